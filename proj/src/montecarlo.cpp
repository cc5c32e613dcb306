#include "lra/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace lra {

SlotRealization::SlotRealization(std::size_t num_layers, std::size_t num_channels,
                                 std::size_t copies_per_user)
    : num_channels_(num_channels), copies_per_user_(copies_per_user), layer_counts_(num_layers, 0) {
    if (num_layers < 1 || num_channels < 1 || copies_per_user < 1 || copies_per_user > num_channels)
        throw ConfigError("slot shape needs L >= 1, N >= 1 and 1 <= B <= N");
}

std::size_t SlotRealization::add_user(std::size_t layer, std::span<const CopyDraw> copies) {
    if (layer < 1 || layer > layer_counts_.size())
        throw ConfigError("user layer " + std::to_string(layer) + " outside 1.." +
                          std::to_string(layer_counts_.size()));
    if (copies.size() != copies_per_user_) throw ConfigError("user must carry exactly B copies");
    for (std::size_t i = 0; i < copies.size(); ++i) {
        if (copies[i].channel >= num_channels_) throw ConfigError("copy channel out of range");
        if (!(copies[i].gain > 0.0) || !std::isfinite(copies[i].gain))
            throw ConfigError("channel gain must be positive and finite");
        for (std::size_t j = 0; j < i; ++j)
            if (copies[j].channel == copies[i].channel) throw ConfigError("copies must use distinct channels");
    }
    const auto first = static_cast<std::uint32_t>(copies_.size());
    copies_.insert(copies_.end(), copies.begin(), copies.end());
    users_.push_back({static_cast<std::uint32_t>(layer), first});
    ++layer_counts_[layer - 1];
    return users_.size() - 1;
}

void SlotRealization::clear() {
    users_.clear();
    copies_.clear();
    std::fill(layer_counts_.begin(), layer_counts_.end(), 0);
}

std::size_t SlotRealization::users_in_layer(std::size_t l) const {
    check_layer_index(l, layer_counts_.size());
    return layer_counts_[l - 1];
}

std::span<const CopyDraw> SlotRealization::copies_of(std::size_t u) const {
    return std::span<const CopyDraw>(copies_).subspan(users_[u].first_copy, copies_per_user_);
}

SlotSampler::SlotSampler(const SystemConfig& config) : config_(&config), perm_(config.num_channels()) {}

void SlotSampler::sample(SlotRng& rng, SlotRealization& out) {
    const auto& config = *config_;
    const std::size_t n = config.num_channels();
    const std::size_t copies = config.repetition();
    if (out.num_layers() != config.num_layers() || out.num_channels() != n || out.copies_per_user() != copies)
        out = SlotRealization(config.num_layers(), n, copies);
    else
        out.clear();

    std::iota(perm_.begin(), perm_.end(), 0u);
    std::exponential_distribution<double> fading(1.0 / config.gain_mean());
    for (std::size_t l = 1; l <= config.num_layers(); ++l) {
        const double arrival = config.layer(l).arrival_rate;
        std::uint64_t users = 0;
        if (arrival > 0.0) users = std::poisson_distribution<std::uint64_t>(arrival)(rng);
        for (std::uint64_t u = 0; u < users; ++u) {
            const auto first = static_cast<std::uint32_t>(out.copies_.size());
            for (std::size_t k = 0; k < copies; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, n - 1);
                std::swap(perm_[k], perm_[pick(rng)]);
                out.copies_.push_back({perm_[k], fading(rng)});
            }
            out.users_.push_back({static_cast<std::uint32_t>(l), first});
            ++out.layer_counts_[l - 1];
        }
    }
}

SlotRealization sample_slot(const SystemConfig& config, SlotRng& rng) {
    SlotSampler sampler(config);
    SlotRealization slot;
    sampler.sample(rng, slot);
    return slot;
}

SlotRealization sample_slot(const SystemConfig& config, std::uint64_t seed, std::uint64_t slot_index) {
    SlotRng rng(seed, slot_index);
    return sample_slot(config, rng);
}

const char* to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::decoded: return "decoded";
        case Outcome::collided: return "collided";
        case Outcome::sinr_failure: return "sinr_failure";
        case Outcome::blocked: return "blocked";
    }
    return "unknown";
}

namespace {

// Ordered so that the best copy outcome is the maximum.
enum CopyState : std::uint8_t { kCopyBlocked = 0, kCopyFailed = 1, kCopyCollided = 2, kCopyDecoded = 3 };

}  // namespace

SicDecoder::SicDecoder(const SystemConfig& config, DecodeOptions options)
    : config_(&config), options_(options) {}

const DecodeReport& SicDecoder::decode(const SlotRealization& slot) {
    const auto& config = *config_;
    const std::size_t num_layers = config.num_layers();
    const std::size_t n = config.num_channels();
    if (slot.num_layers() != num_layers || slot.num_channels() != n ||
        slot.copies_per_user() != config.repetition())
        throw ConfigError("slot shape does not match the configuration");

    auto& r = report_;
    r.num_layers = num_layers;
    r.num_channels = n;
    r.outcomes.assign(slot.num_users(), Outcome::blocked);
    r.occupancy.assign(num_layers * n, 0);
    r.users_per_layer.assign(num_layers, 0);
    r.decoded_per_layer.assign(num_layers, 0);
    r.stop_layer.assign(n, static_cast<std::uint32_t>(num_layers));
    rx_power_.assign(num_layers * n, 0.0);
    blocked_.assign(n, 0);
    uncancelled_.assign(n, 0);

    for (std::size_t u = 0; u < slot.num_users(); ++u) {
        const std::size_t l = slot.user(u).layer;
        ++r.users_per_layer[l - 1];
        const double power = config.layer(l).power;
        for (const auto& c : slot.copies_of(u)) {
            ++r.occupancy[(l - 1) * n + c.channel];
            rx_power_[(l - 1) * n + c.channel] += power * c.gain;
        }
    }
    r.residual = r.occupancy;

    // Interference seen by layer l: noise plus everything from layers l+1..L.
    std::vector<double>& suffix = interference_;
    suffix.assign(num_layers * n, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
        double acc = config.noise_power();
        for (std::size_t l = num_layers; l >= 1; --l) {
            suffix[(l - 1) * n + q] = acc;
            acc += rx_power_[(l - 1) * n + q];
        }
    }

    // Users are not required to be sorted by layer, so each pass scans all users.
    for (std::size_t l = 1; l <= num_layers; ++l) {
        const auto& layer = config.layer(l);
        block_now_.assign(n, 0);
        for (std::size_t u = 0; u < slot.num_users(); ++u) {
            if (slot.user(u).layer != l) continue;
            const auto copies = slot.copies_of(u);
            std::uint8_t best = kCopyBlocked;
            for (std::size_t k = 0; k < copies.size(); ++k) {
                const auto q = copies[k].channel;
                std::uint8_t state;
                if (blocked_[q]) {
                    state = kCopyBlocked;
                } else if (r.occupancy_at(l, q) >= 2) {
                    state = kCopyCollided;
                    block_now_[q] = 1;
                } else {
                    const double sinr = layer.power * copies[k].gain / suffix[(l - 1) * n + q];
                    if (std::log2(1.0 + sinr) >= layer.rate) {
                        state = kCopyDecoded;
                    } else {
                        state = kCopyFailed;
                        block_now_[q] = 1;
                    }
                }
                best = std::max(best, state);
            }
            switch (best) {
                case kCopyDecoded: r.outcomes[u] = Outcome::decoded; break;
                case kCopyCollided: r.outcomes[u] = Outcome::collided; break;
                case kCopyFailed: r.outcomes[u] = Outcome::sinr_failure; break;
                default: r.outcomes[u] = Outcome::blocked; break;
            }
        }

        // Cancel every copy of every user decoded at this layer.
        for (std::size_t u = 0; u < slot.num_users(); ++u) {
            if (slot.user(u).layer != l || r.outcomes[u] != Outcome::decoded) continue;
            ++r.decoded_per_layer[l - 1];
            for (const auto& c : slot.copies_of(u)) --r.residual[(l - 1) * n + c.channel];
        }

        for (std::size_t q = 0; q < n; ++q) {
            uncancelled_[q] += r.residual_at(l, q);
            const bool was_blocked = blocked_[q] != 0;
            bool now_blocked;
            if (options_.blocking == BlockingRule::persistent)
                now_blocked = was_blocked || block_now_[q] != 0;
            else
                now_blocked = uncancelled_[q] > 0;
            if (now_blocked && !was_blocked) r.stop_layer[q] = static_cast<std::uint32_t>(l - 1);
            blocked_[q] = now_blocked ? 1 : 0;
        }
    }
    return r;
}

DecodeReport sic_decode(const SlotRealization& slot, const SystemConfig& config, DecodeOptions options) {
    SicDecoder decoder(config, options);
    return decoder.decode(slot);
}

}  // namespace lra
