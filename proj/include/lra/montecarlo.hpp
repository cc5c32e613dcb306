#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lra/core_model.hpp"
#include "lra/rng.hpp"

namespace lra {

struct CopyDraw {
    std::uint32_t channel = 0;  // 0-based channel index
    double gain = 0.0;          // |h|^2

    bool operator==(const CopyDraw&) const = default;
};

struct UserDraw {
    std::uint32_t layer = 0;  // 1-based
    std::uint32_t first_copy = 0;

    bool operator==(const UserDraw&) const = default;
};

/// One sampled slot: every active user with its layer, its B distinct
/// channels and one fading gain per (user, channel).
class SlotRealization {
public:
    SlotRealization() = default;
    SlotRealization(std::size_t num_layers, std::size_t num_channels, std::size_t copies_per_user);

    /// Appends a user. Throws ConfigError on a bad layer, a wrong copy count,
    /// repeated or out-of-range channels, or non-positive gains.
    std::size_t add_user(std::size_t layer, std::span<const CopyDraw> copies);

    void clear();

    std::size_t num_layers() const { return layer_counts_.size(); }
    std::size_t num_channels() const { return num_channels_; }
    std::size_t copies_per_user() const { return copies_per_user_; }
    std::size_t num_users() const { return users_.size(); }
    std::size_t users_in_layer(std::size_t l) const;

    const UserDraw& user(std::size_t u) const { return users_[u]; }
    std::span<const CopyDraw> copies_of(std::size_t u) const;
    std::span<const UserDraw> users() const { return users_; }

    bool operator==(const SlotRealization&) const = default;

private:
    friend class SlotSampler;

    std::size_t num_channels_ = 0;
    std::size_t copies_per_user_ = 1;
    std::vector<UserDraw> users_;
    std::vector<CopyDraw> copies_;
    std::vector<std::uint32_t> layer_counts_;
};

/// Draws slots: M_l ~ Poisson(lambda_l) per layer, B distinct channels per
/// user via partial Fisher-Yates, exponential gains with mean sigma_h^2.
/// Holds a reference to the config, which must outlive the sampler.
class SlotSampler {
public:
    explicit SlotSampler(const SystemConfig& config);

    void sample(SlotRng& rng, SlotRealization& out);

private:
    const SystemConfig* config_;
    std::vector<std::uint32_t> perm_;
};

SlotRealization sample_slot(const SystemConfig& config, SlotRng& rng);
SlotRealization sample_slot(const SystemConfig& config, std::uint64_t seed, std::uint64_t slot_index);

enum class Outcome : std::uint8_t { decoded, collided, sinr_failure, blocked };

const char* to_string(Outcome outcome);

/// What happens to a channel whose lower-layer collision or failure is later
/// cleaned up by cancelling the offending users' copies elsewhere.
enum class BlockingRule {
    persistent,         // SIC stops at that channel for good
    release_on_cancel,  // channel reopens for upper layers once no uncancelled lower-layer copy remains
};

struct DecodeOptions {
    BlockingRule blocking = BlockingRule::persistent;
};

struct DecodeReport {
    std::size_t num_layers = 0;
    std::size_t num_channels = 0;
    std::vector<Outcome> outcomes;              // per user
    std::vector<std::uint32_t> occupancy;       // copies per (layer, channel) as transmitted
    std::vector<std::uint32_t> residual;        // copies per (layer, channel) left after that layer's pass
    std::vector<std::uint32_t> users_per_layer;
    std::vector<std::uint32_t> decoded_per_layer;
    std::vector<std::uint32_t> stop_layer;      // per channel: layers passed before SIC stopped, in [0, L]

    std::uint32_t occupancy_at(std::size_t l, std::size_t q) const { return occupancy[(l - 1) * num_channels + q]; }
    std::uint32_t residual_at(std::size_t l, std::size_t q) const { return residual[(l - 1) * num_channels + q]; }
};

/// Inter-layer SIC receiver.
///
/// Layers are processed globally from 1 to L. At layer l each open channel
/// with exactly one layer-l copy is decoded iff log2(1 + P_l g / I) >= R_l,
/// where I is N_0 plus the received power of every upper-layer copy on that
/// channel. Two or more copies collide. A collision or a failed singleton
/// stops SIC on that channel. After the pass every copy of every user
/// decoded at layer l is cancelled. There is no intra-layer iteration.
///
/// A user's outcome is the best over its copies: decoded, then collided,
/// then sinr_failure, then blocked.
class SicDecoder {
public:
    SicDecoder(const SystemConfig& config, DecodeOptions options = {});

    const DecodeReport& decode(const SlotRealization& slot);

private:
    const SystemConfig* config_;
    DecodeOptions options_;
    std::vector<double> rx_power_;       // per (layer, channel)
    std::vector<double> interference_;   // per (layer, channel): N_0 plus all upper-layer power
    std::vector<std::uint8_t> blocked_;
    std::vector<std::uint8_t> block_now_;
    std::vector<std::uint32_t> uncancelled_;
    DecodeReport report_;
};

DecodeReport sic_decode(const SlotRealization& slot, const SystemConfig& config, DecodeOptions options = {});

struct EstimatorOutput {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t slots = 0;
    std::uint64_t seed = 0;
};

struct SimulationOptions {
    int threads = 0;  // 0: OpenMP default
    DecodeOptions decode;
};

struct ThroughputEstimate {
    std::vector<EstimatorOutput> layers;
    EstimatorOutput total;
};

struct OutageEstimate {
    std::vector<EstimatorOutput> layers;  // undecoded users / users, pooled over slots
    std::vector<std::uint64_t> users;
    std::vector<std::uint64_t> failures;
};

struct JointCaptureEstimate {
    EstimatorOutput joint;        // both decoded, given one user per layer on the channel
    EstimatorOutput first_layer;  // layer-1 user decoded, same conditioning
    std::uint64_t events = 0;
};

/// Per-slot throughput sum_l R_l * decoded_l, averaged over slots. Slot i
/// uses stream i of `seed`, so the result does not depend on thread count.
ThroughputEstimate estimate_throughput(const SystemConfig& config, std::uint64_t num_slots,
                                       std::uint64_t seed, const SimulationOptions& options = {});
ThroughputEstimate estimate_throughput_serial(const SystemConfig& config, std::uint64_t num_slots,
                                              std::uint64_t seed, DecodeOptions decode = {});

OutageEstimate estimate_outage(const SystemConfig& config, std::uint64_t num_slots, std::uint64_t seed,
                               const SimulationOptions& options = {});
OutageEstimate estimate_outage_serial(const SystemConfig& config, std::uint64_t num_slots,
                                      std::uint64_t seed, DecodeOptions decode = {});

/// Requires L = 2 and B = 1.
JointCaptureEstimate estimate_joint_capture(const SystemConfig& config, std::uint64_t num_slots,
                                            std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace lra
