#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lra/core_model.hpp"

namespace lra {

/// Which capture probability feeds the throughput expressions.
enum class CaptureModel {
    exact,        // Rayleigh fading averaged over Poisson upper-layer occupancy
    lower_bound,  // Jensen bound exp(-nu(R)/gamma_l)
};

struct AnalyticReport {
    std::vector<double> capture_exact;
    std::vector<double> capture_bound;
    std::vector<double> eta;
    std::vector<double> rho;
    std::vector<double> layer_throughput;
    double total_throughput = 0.0;
    CaptureModel model = CaptureModel::exact;
};

/// Probability that a lone layer-l signal is decodable once layers 1..l-1
/// are cancelled, with upper layers interfering as Poisson(lambda_i/N) users
/// per channel under Rayleigh fading.
double capture_prob_exact(std::size_t l, const SystemConfig& config);

/// exp(-nu(R_l) / gamma_l) with gamma_l = P_l sigma_h^2 / sigma_bar_l^2.
/// Never exceeds capture_prob_exact; equal at the top layer.
double capture_prob_lower_bound(std::size_t l, const SystemConfig& config);

double capture_prob(std::size_t l, const SystemConfig& config, CaptureModel model);

/// Capture probability of layer l evaluated as if its rate were `rate`.
/// Depends on no other layer's rate.
double capture_prob_at_rate(std::size_t l, const SystemConfig& config, double rate, CaptureModel model);

/// Expected number of decoded layer-l packets under the lower-interference-free condition.
double eta(double arrival_rate, std::size_t num_channels, double capture_prob);
double eta(std::size_t l, const SystemConfig& config, double capture_prob);

/// Probability that a given layer-l channel is empty or holds one decodable signal.
double rho(double arrival_rate, std::size_t num_channels, double capture_prob);
double rho(std::size_t l, const SystemConfig& config, double capture_prob);

/// Sum over layers of R_l * (prod_{m<l} rho_m) * eta_l.
AnalyticReport throughput(const SystemConfig& config, CaptureModel model = CaptureModel::exact);

/// Lower bound on decoded packets per slot with a common rate and
/// normalized arrivals tau_l = lambda_l / N.
double sla_lower_bound(std::size_t num_channels, std::span<const double> tau, double rate,
                       TargetSinr gamma);

/// Capture bound shared by all layers in sla_lower_bound: exp(-nu(R)/gamma).
double common_capture_bound(double rate, TargetSinr gamma);

/// Multichannel ALOHA peak e^{-1} N.
double baseline_aloha_max(std::size_t num_channels);

/// Asymptotic IRSA throughput 0.965 N (cited reference value, maximum
/// repetition degree 16, no fading). Not simulated.
double baseline_irsa(std::size_t num_channels);

inline constexpr double kIrsaReferenceEfficiency = 0.965;

}  // namespace lra
