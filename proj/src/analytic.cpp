#include "lra/analytic.hpp"

#include <cmath>

namespace lra {

namespace {

double exact_at_rate(std::size_t l, const SystemConfig& config, double rate) {
    const auto& self = config.layer(l);
    const double gap = snr_gap(rate);
    const double n = static_cast<double>(config.num_channels());
    double exponent = gap * config.noise_power() / (self.power * config.gain_mean());
    for (std::size_t i = l + 1; i <= config.num_layers(); ++i) {
        const auto& upper = config.layer(i);
        exponent += (upper.arrival_rate / n) * gap * upper.power / (self.power + gap * upper.power);
    }
    return std::exp(-exponent);
}

double bound_at_rate(std::size_t l, const SystemConfig& config, double rate) {
    // nu / gamma_l, written so that l = L reproduces the exact form bit for bit
    return std::exp(-snr_gap(rate) * interference_variance(l, config) / (config.layer(l).power * config.gain_mean()));
}

}  // namespace

double capture_prob_exact(std::size_t l, const SystemConfig& config) {
    return exact_at_rate(l, config, config.layer(l).rate);
}

double capture_prob_lower_bound(std::size_t l, const SystemConfig& config) {
    return bound_at_rate(l, config, config.layer(l).rate);
}

double capture_prob(std::size_t l, const SystemConfig& config, CaptureModel model) {
    return capture_prob_at_rate(l, config, config.layer(l).rate, model);
}

double capture_prob_at_rate(std::size_t l, const SystemConfig& config, double rate, CaptureModel model) {
    check_layer_index(l, config.num_layers());
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw ConfigError("rate must be finite and non-negative");
    return model == CaptureModel::exact ? exact_at_rate(l, config, rate) : bound_at_rate(l, config, rate);
}

double eta(double arrival_rate, std::size_t num_channels, double capture_prob) {
    return capture_prob * arrival_rate * std::exp(-arrival_rate / static_cast<double>(num_channels));
}

double eta(std::size_t l, const SystemConfig& config, double capture_prob) {
    return eta(config.layer(l).arrival_rate, config.num_channels(), capture_prob);
}

double rho(double arrival_rate, std::size_t num_channels, double capture_prob) {
    const double load = arrival_rate / static_cast<double>(num_channels);
    return (1.0 + capture_prob * load) * std::exp(-load);
}

double rho(std::size_t l, const SystemConfig& config, double capture_prob) {
    return rho(config.layer(l).arrival_rate, config.num_channels(), capture_prob);
}

AnalyticReport throughput(const SystemConfig& config, CaptureModel model) {
    const std::size_t num_layers = config.num_layers();
    AnalyticReport report;
    report.model = model;
    report.capture_exact.reserve(num_layers);
    report.capture_bound.reserve(num_layers);
    report.eta.reserve(num_layers);
    report.rho.reserve(num_layers);
    report.layer_throughput.reserve(num_layers);

    double clear_below = 1.0;  // prod_{m<l} rho_m
    for (std::size_t l = 1; l <= num_layers; ++l) {
        const double exact = capture_prob_exact(l, config);
        const double bound = capture_prob_lower_bound(l, config);
        const double phi = model == CaptureModel::exact ? exact : bound;
        const double e = eta(l, config, phi);
        const double r = rho(l, config, phi);
        const double t = config.layer(l).rate * clear_below * e;

        report.capture_exact.push_back(exact);
        report.capture_bound.push_back(bound);
        report.eta.push_back(e);
        report.rho.push_back(r);
        report.layer_throughput.push_back(t);
        report.total_throughput += t;
        clear_below *= r;
    }
    return report;
}

double common_capture_bound(double rate, TargetSinr gamma) {
    return std::exp(-snr_gap(rate) / gamma.linear());
}

double sla_lower_bound(std::size_t num_channels, std::span<const double> tau, double rate,
                       TargetSinr gamma) {
    if (num_channels < 1) throw ConfigError("number of channels must be at least 1");
    const double phi = common_capture_bound(rate, gamma);
    double sum = 0.0;
    double clear_below = 1.0;
    for (const double t : tau) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("normalized arrival rates must be finite and >= 0");
        sum += clear_below * phi * t * std::exp(-t);
        clear_below *= (1.0 + phi * t) * std::exp(-t);
    }
    return static_cast<double>(num_channels) * sum;
}

double baseline_aloha_max(std::size_t num_channels) {
    return std::exp(-1.0) * static_cast<double>(num_channels);
}

double baseline_irsa(std::size_t num_channels) {
    return kIrsaReferenceEfficiency * static_cast<double>(num_channels);
}

}  // namespace lra
