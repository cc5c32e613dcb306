// Slot-level Monte Carlo estimators. Each kernel exists twice: an OpenMP
// version used everywhere and a plain serial loop kept as the reference
// the tests compare against. All accumulators are integer counts, so the
// reduction is exact and independent of how slots are split across threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lra/montecarlo.hpp"

namespace lra {

namespace {

// Sums of per-slot count vectors and their pairwise products.
struct CountMoments {
    explicit CountMoments(std::size_t dim) : dim(dim), sum(dim, 0), cross(dim * dim, 0) {}

    void add(const std::vector<std::uint64_t>& c) {
        for (std::size_t i = 0; i < dim; ++i) {
            sum[i] += c[i];
            for (std::size_t j = 0; j < dim; ++j) cross[i * dim + j] += c[i] * c[j];
        }
    }

    void merge(const CountMoments& o) {
        for (std::size_t i = 0; i < dim; ++i) sum[i] += o.sum[i];
        for (std::size_t i = 0; i < cross.size(); ++i) cross[i] += o.cross[i];
    }

    // Sample covariance of components i and j over `slots` observations.
    double covariance(std::size_t i, std::size_t j, std::uint64_t slots) const {
        if (slots < 2) return 0.0;
        const long double s = static_cast<long double>(slots);
        const long double num = s * static_cast<long double>(cross[i * dim + j]) -
                                static_cast<long double>(sum[i]) * static_cast<long double>(sum[j]);
        return static_cast<double>(num / (s * (s - 1.0L)));
    }

    std::size_t dim;
    std::vector<std::uint64_t> sum;
    std::vector<std::uint64_t> cross;
};

// Ratio estimator sum(x) / sum(n) with a delta-method standard error over slots.
EstimatorOutput ratio_estimate(const CountMoments& m, std::size_t xi, std::size_t ni, std::uint64_t slots,
                               std::uint64_t seed) {
    EstimatorOutput out;
    out.slots = slots;
    out.seed = seed;
    const double total_n = static_cast<double>(m.sum[ni]);
    if (total_n == 0.0) return out;
    const double p = static_cast<double>(m.sum[xi]) / total_n;
    out.mean = p;
    if (slots >= 2) {
        const long double sxx = m.cross[xi * m.dim + xi];
        const long double sxn = m.cross[xi * m.dim + ni];
        const long double snn = m.cross[ni * m.dim + ni];
        const long double lp = p;
        long double resid = sxx - 2.0L * lp * sxn + lp * lp * snn;
        resid = std::max(resid, 0.0L);
        const long double s = static_cast<long double>(slots);
        out.std_error = static_cast<double>(std::sqrt(resid * s / (s - 1.0L)) / total_n);
    }
    return out;
}

int resolve_threads(int threads) {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    (void)threads;
    return 1;
#endif
}

// Runs `per_slot(decode_report, counts)` for every slot and accumulates the
// resulting count vectors. `dim` is the count vector length.
template <class PerSlot>
CountMoments run_parallel(const SystemConfig& config, std::uint64_t num_slots, std::uint64_t seed,
                          const SimulationOptions& options, std::size_t dim, PerSlot per_slot) {
    CountMoments total(dim);
    const auto slots = static_cast<std::int64_t>(num_slots);
#pragma omp parallel num_threads(resolve_threads(options.threads))
    {
        CountMoments local(dim);
        SlotSampler sampler(config);
        SicDecoder decoder(config, options.decode);
        SlotRealization slot;
        std::vector<std::uint64_t> counts(dim);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < slots; ++i) {
            SlotRng rng(seed, static_cast<std::uint64_t>(i));
            sampler.sample(rng, slot);
            std::fill(counts.begin(), counts.end(), 0);
            per_slot(slot, decoder.decode(slot), counts);
            local.add(counts);
        }
#pragma omp critical(lra_estimator_merge)
        total.merge(local);
    }
    return total;
}

template <class PerSlot>
CountMoments run_serial(const SystemConfig& config, std::uint64_t num_slots, std::uint64_t seed,
                        DecodeOptions decode, std::size_t dim, PerSlot per_slot) {
    CountMoments total(dim);
    std::vector<std::uint64_t> counts(dim);
    for (std::uint64_t i = 0; i < num_slots; ++i) {
        SlotRng rng(seed, i);
        const SlotRealization slot = sample_slot(config, rng);
        const DecodeReport report = sic_decode(slot, config, decode);
        std::fill(counts.begin(), counts.end(), 0);
        per_slot(slot, report, counts);
        total.add(counts);
    }
    return total;
}

void require_slots(std::uint64_t num_slots) {
    if (num_slots < 1) throw ConfigError("number of slots must be at least 1");
}

// counts[l-1] = users decoded in layer l
void decoded_counts(const SlotRealization&, const DecodeReport& r, std::vector<std::uint64_t>& counts) {
    for (std::size_t l = 0; l < r.decoded_per_layer.size(); ++l) counts[l] = r.decoded_per_layer[l];
}

ThroughputEstimate summarize_throughput(const SystemConfig& config, const CountMoments& m,
                                        std::uint64_t slots, std::uint64_t seed) {
    const std::size_t num_layers = config.num_layers();
    const auto rates = config.rates();
    const double s = static_cast<double>(slots);
    ThroughputEstimate est;
    est.total.slots = slots;
    est.total.seed = seed;
    double total_var = 0.0;
    for (std::size_t l = 0; l < num_layers; ++l) {
        EstimatorOutput out;
        out.slots = slots;
        out.seed = seed;
        out.mean = rates[l] * static_cast<double>(m.sum[l]) / s;
        const double var = std::max(0.0, rates[l] * rates[l] * m.covariance(l, l, slots));
        out.std_error = std::sqrt(var / s);
        est.layers.push_back(out);
        est.total.mean += out.mean;
        for (std::size_t k = 0; k < num_layers; ++k) total_var += rates[l] * rates[k] * m.covariance(l, k, slots);
    }
    est.total.std_error = std::sqrt(std::max(0.0, total_var) / s);
    return est;
}

// counts = [failures_1, users_1, failures_2, users_2, ...]
void outage_counts(const SlotRealization& slot, const DecodeReport& r, std::vector<std::uint64_t>& counts) {
    for (std::size_t l = 0; l < r.users_per_layer.size(); ++l) {
        counts[2 * l] = r.users_per_layer[l] - r.decoded_per_layer[l];
        counts[2 * l + 1] = r.users_per_layer[l];
    }
    (void)slot;
}

OutageEstimate summarize_outage(const SystemConfig& config, const CountMoments& m, std::uint64_t slots,
                                std::uint64_t seed) {
    OutageEstimate est;
    for (std::size_t l = 0; l < config.num_layers(); ++l) {
        est.layers.push_back(ratio_estimate(m, 2 * l, 2 * l + 1, slots, seed));
        est.failures.push_back(m.sum[2 * l]);
        est.users.push_back(m.sum[2 * l + 1]);
    }
    return est;
}

// counts = [both decoded, layer-1 decoded, events]
void joint_counts(const SlotRealization& slot, const DecodeReport& r, std::vector<std::uint64_t>& counts) {
    const std::size_t n = r.num_channels;
    // owner of the single copy per (layer, channel), valid where occupancy is 1
    thread_local std::vector<std::size_t> owner;
    owner.assign(2 * n, 0);
    for (std::size_t u = 0; u < slot.num_users(); ++u) {
        const auto layer = slot.user(u).layer;
        for (const auto& c : slot.copies_of(u)) owner[(layer - 1) * n + c.channel] = u;
    }
    for (std::size_t q = 0; q < n; ++q) {
        if (r.occupancy_at(1, q) != 1 || r.occupancy_at(2, q) != 1) continue;
        const bool first = r.outcomes[owner[q]] == Outcome::decoded;
        const bool second = r.outcomes[owner[n + q]] == Outcome::decoded;
        counts[0] += (first && second) ? 1 : 0;
        counts[1] += first ? 1 : 0;
        counts[2] += 1;
    }
}

}  // namespace

ThroughputEstimate estimate_throughput(const SystemConfig& config, std::uint64_t num_slots, std::uint64_t seed,
                                       const SimulationOptions& options) {
    require_slots(num_slots);
    const auto m = run_parallel(config, num_slots, seed, options, config.num_layers(), decoded_counts);
    return summarize_throughput(config, m, num_slots, seed);
}

ThroughputEstimate estimate_throughput_serial(const SystemConfig& config, std::uint64_t num_slots,
                                              std::uint64_t seed, DecodeOptions decode) {
    require_slots(num_slots);
    const auto m = run_serial(config, num_slots, seed, decode, config.num_layers(), decoded_counts);
    return summarize_throughput(config, m, num_slots, seed);
}

OutageEstimate estimate_outage(const SystemConfig& config, std::uint64_t num_slots, std::uint64_t seed,
                               const SimulationOptions& options) {
    require_slots(num_slots);
    const auto m = run_parallel(config, num_slots, seed, options, 2 * config.num_layers(), outage_counts);
    return summarize_outage(config, m, num_slots, seed);
}

OutageEstimate estimate_outage_serial(const SystemConfig& config, std::uint64_t num_slots, std::uint64_t seed,
                                      DecodeOptions decode) {
    require_slots(num_slots);
    const auto m = run_serial(config, num_slots, seed, decode, 2 * config.num_layers(), outage_counts);
    return summarize_outage(config, m, num_slots, seed);
}

JointCaptureEstimate estimate_joint_capture(const SystemConfig& config, std::uint64_t num_slots,
                                            std::uint64_t seed, const SimulationOptions& options) {
    require_slots(num_slots);
    if (config.num_layers() != 2) throw ConfigError("joint capture estimation needs exactly 2 layers");
    if (config.repetition() != 1) throw ConfigError("joint capture estimation needs B = 1");
    const auto m = run_parallel(config, num_slots, seed, options, 3, joint_counts);
    JointCaptureEstimate est;
    est.joint = ratio_estimate(m, 0, 2, num_slots, seed);
    est.first_layer = ratio_estimate(m, 1, 2, num_slots, seed);
    est.events = m.sum[2];
    return est;
}

}  // namespace lra
