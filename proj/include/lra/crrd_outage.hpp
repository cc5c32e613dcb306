#pragma once

#include <cstddef>
#include <vector>

#include "lra/core_model.hpp"

namespace lra {

/// Analytic outage under B-copy repetition. Indices follow layer order.
struct OutageReport {
    std::vector<double> psi;     // per-layer failure probability, lower layers cleared
    std::vector<double> outage;  // cumulative, includes error propagation from lower layers
    std::vector<double> beta;    // per-copy decoding-error probability
    double omega = 0.0;          // (1 - 1/N)^B
};

inline constexpr double kDefaultTailTol = 1e-12;

/// Per-copy decoding error with upper-layer occupancy Poisson(lambda_i B / N).
/// Equals 1 - capture_prob_exact when B = 1.
double beta_crrd(std::size_t l, const SystemConfig& config);

/// (1 - 1/N)^B: probability that a given other user misses one fixed channel.
double crrd_omega(std::size_t num_channels, std::size_t repetition);

/// Truncation point for conditional Poisson sums: max(50, ceil(lambda + 10 sqrt(lambda) + 30)),
/// extended until the remaining tail mass falls below tail_tol.
std::size_t poisson_truncation(double arrival_rate, double tail_tol);

/// E[p_c(M)^b | M >= 1] for M ~ Poisson(lambda), p_c(m) = 1 - omega^(m-1),
/// by direct summation over m.
double collision_moment_series(double arrival_rate, double omega, std::size_t b,
                               double tail_tol = kDefaultTailTol);

/// Same moment from the finite alternating sum over j = 0..b. Falls back to
/// collision_moment_series when b > 20 or the partial sums exceed 1e6 times
/// the result, where the alternating form loses precision.
double collision_moment(double arrival_rate, double omega, std::size_t b);

/// Alternating-sum form only, without the fallback. Exposed for tests.
double collision_moment_alternating(double arrival_rate, double omega, std::size_t b);

/// Psi_l by direct summation of alpha_l(m)^B over the conditional Poisson law.
/// Rejects lambda_l = 0.
double psi_series(std::size_t l, const SystemConfig& config, double tail_tol = kDefaultTailTol);

/// Psi_l as the finite binomial sum over b of C(B,b)(1-beta)^b beta^(B-b) g(b).
/// Rejects lambda_l = 0.
double psi_closed_form(std::size_t l, const SystemConfig& config);

/// 1 - prod_{i<=l} (1 - psi_i) for every l.
std::vector<double> cascade_outage(const std::vector<double>& psi);

OutageReport outage(const SystemConfig& config);

}  // namespace lra
