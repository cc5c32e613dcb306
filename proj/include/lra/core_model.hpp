#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lra {

/// Raised for any invalid parameter combination. The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-layer design parameters. Powers and rates are linear scale.
struct LayerParams {
    double arrival_rate = 0.0;  // expected number of users choosing this layer per slot
    double power = 1.0;         // transmit power
    double rate = 0.0;          // bits per channel use
};

/// Target average SINR per layer, linear scale.
class TargetSinr {
public:
    explicit TargetSinr(double linear);
    static TargetSinr from_db(double db);

    double linear() const { return linear_; }
    double db() const;

private:
    double linear_;
};

double db_to_linear(double db);

/// Immutable, validated system description.
///
/// Layers are stored in decoding order: layer 1 (highest power) is decoded
/// first. Every accessor taking a layer index uses 1-based indices.
class SystemConfig {
public:
    SystemConfig(std::size_t num_channels, std::vector<LayerParams> layers,
                 double gain_mean = 1.0, double noise_power = 1.0,
                 std::size_t repetition = 1);

    std::size_t num_layers() const { return layers_.size(); }
    std::size_t num_channels() const { return num_channels_; }
    double gain_mean() const { return gain_mean_; }
    double noise_power() const { return noise_power_; }
    std::size_t repetition() const { return repetition_; }

    const LayerParams& layer(std::size_t l) const;
    std::span<const LayerParams> layers() const { return layers_; }

    std::vector<double> arrival_rates() const;
    std::vector<double> powers() const;
    std::vector<double> rates() const;

    SystemConfig with_rates(std::span<const double> rates) const;
    SystemConfig with_rate(std::size_t l, double rate) const;
    SystemConfig with_uniform_rate(double rate) const;
    SystemConfig with_powers(std::span<const double> powers) const;
    SystemConfig with_repetition(std::size_t repetition) const;
    SystemConfig truncated(std::size_t num_layers) const;

private:
    std::size_t num_channels_;
    std::vector<LayerParams> layers_;
    double gain_mean_;
    double noise_power_;
    std::size_t repetition_;
};

/// Checks a 1-based layer index against L, throwing std::out_of_range otherwise.
void check_layer_index(std::size_t l, std::size_t num_layers);

/// SINR threshold for rate R with capacity-achieving codes: 2^R - 1.
double snr_gap(double rate);

/// Probability that a given copy of one of m same-layer users collides when
/// each user places B copies on distinct channels out of N.
double collision_prob(std::size_t m, std::size_t num_channels, std::size_t repetition = 1);

/// Mean interference-plus-noise power seen by layer l when every signal of
/// layers 1..l-1 has been cancelled. Upper-layer occupancy per channel is
/// Poisson with mean lambda_i * B / N.
double interference_variance(std::size_t l, const SystemConfig& config, std::size_t repetition = 1);

/// Power allocation that holds every layer's average SINR at gamma.
///
/// Powers are fixed top-down (layer L first) since the interference seen by
/// layer l depends only on layers above it. Uses single-copy occupancy.
std::vector<double> allocate_powers(TargetSinr gamma, std::size_t num_channels,
                                    std::span<const double> arrival_rates,
                                    double gain_mean = 1.0, double noise_power = 1.0);

/// Convenience: build a config whose powers come from allocate_powers.
SystemConfig make_config(std::size_t num_channels, std::span<const double> arrival_rates,
                         std::span<const double> rates, TargetSinr gamma,
                         std::size_t repetition = 1, double gain_mean = 1.0,
                         double noise_power = 1.0);

/// Same, with a single arrival rate and a single rate for all L layers.
SystemConfig make_uniform_config(std::size_t num_layers, std::size_t num_channels,
                                 double arrival_rate, double rate, TargetSinr gamma,
                                 std::size_t repetition = 1);

}  // namespace lra
