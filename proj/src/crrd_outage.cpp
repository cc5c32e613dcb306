#include "lra/crrd_outage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lra {

namespace {

void require_active_layer(std::size_t l, const SystemConfig& config) {
    if (config.layer(l).arrival_rate == 0.0)
        throw ConfigError("layer " + std::to_string(l) +
                          " has zero arrival rate; outage conditions on at least one user");
}

double binomial(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

// Conditional Poisson weights P(M = m | M >= 1), m = 1..M_max.
std::vector<double> conditional_poisson(double arrival_rate, double tail_tol) {
    const std::size_t m_max = poisson_truncation(arrival_rate, tail_tol);
    const double norm = -std::expm1(-arrival_rate);
    std::vector<double> w(m_max + 1, 0.0);
    // log-space start keeps P(M = 1) accurate for large lambda
    double log_p = -arrival_rate;
    for (std::size_t m = 1; m <= m_max; ++m) {
        log_p += std::log(arrival_rate) - std::log(static_cast<double>(m));
        w[m] = std::exp(log_p) / norm;
    }
    return w;
}

}  // namespace

double crrd_omega(std::size_t num_channels, std::size_t repetition) {
    return std::pow(1.0 - 1.0 / static_cast<double>(num_channels), static_cast<double>(repetition));
}

double beta_crrd(std::size_t l, const SystemConfig& config) {
    const auto& self = config.layer(l);
    const double gap = snr_gap(self.rate);
    const double n = static_cast<double>(config.num_channels());
    const double b = static_cast<double>(config.repetition());
    double exponent = gap * config.noise_power() / (self.power * config.gain_mean());
    for (std::size_t i = l + 1; i <= config.num_layers(); ++i) {
        const auto& upper = config.layer(i);
        exponent += (upper.arrival_rate * b / n) * gap * upper.power / (self.power + gap * upper.power);
    }
    return -std::expm1(-exponent);
}

std::size_t poisson_truncation(double arrival_rate, double tail_tol) {
    if (!(tail_tol > 0.0)) throw ConfigError("tail tolerance must be positive");
    auto m_max = static_cast<std::size_t>(
        std::ceil(arrival_rate + 10.0 * std::sqrt(arrival_rate) + 30.0));
    m_max = std::max<std::size_t>(m_max, 50);
    // Extend until the Poisson tail beyond m_max is below tail_tol. Terms past
    // the mode decrease geometrically with ratio lambda/(m+1).
    for (;;) {
        const double m = static_cast<double>(m_max);
        const double log_pm = -arrival_rate + m * std::log(arrival_rate) - std::lgamma(m + 1.0);
        const double ratio = arrival_rate / (m + 1.0);
        const double tail = ratio < 1.0 ? std::exp(log_pm) * ratio / (1.0 - ratio) : 1.0;
        if (tail < tail_tol) return m_max;
        m_max *= 2;
    }
}

double collision_moment_series(double arrival_rate, double omega, std::size_t b, double tail_tol) {
    if (!(arrival_rate > 0.0)) throw ConfigError("collision moment needs a positive arrival rate");
    const auto w = conditional_poisson(arrival_rate, tail_tol);
    double sum = 0.0;
    double omega_pow = 1.0;  // omega^(m-1)
    for (std::size_t m = 1; m < w.size(); ++m) {
        sum += std::pow(1.0 - omega_pow, static_cast<double>(b)) * w[m];
        omega_pow *= omega;
    }
    return sum;
}

double collision_moment_alternating(double arrival_rate, double omega, std::size_t b) {
    if (!(arrival_rate > 0.0)) throw ConfigError("collision moment needs a positive arrival rate");
    double sum = 0.0;
    double omega_pow = 1.0;  // omega^j
    for (std::size_t j = 0; j <= b; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binomial(b, j) / omega_pow * std::expm1(arrival_rate * omega_pow);
        omega_pow *= omega;
    }
    return std::exp(-arrival_rate) / -std::expm1(-arrival_rate) * sum;
}

double collision_moment(double arrival_rate, double omega, std::size_t b) {
    if (b > 20) return collision_moment_series(arrival_rate, omega, b);
    const double scale = std::exp(-arrival_rate) / -std::expm1(-arrival_rate);
    double largest_partial = 0.0;
    double partial = 0.0;
    double omega_pow = 1.0;
    for (std::size_t j = 0; j <= b; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        partial += sign * binomial(b, j) / omega_pow * std::expm1(arrival_rate * omega_pow);
        largest_partial = std::max(largest_partial, std::abs(partial * scale));
        omega_pow *= omega;
    }
    const double result = scale * partial;
    if (largest_partial > 1e6 * std::abs(result)) return collision_moment_series(arrival_rate, omega, b);
    return std::clamp(result, 0.0, 1.0);
}

double psi_series(std::size_t l, const SystemConfig& config, double tail_tol) {
    require_active_layer(l, config);
    const double beta = beta_crrd(l, config);
    const std::size_t n = config.num_channels();
    const std::size_t copies = config.repetition();
    const auto w = conditional_poisson(config.layer(l).arrival_rate, tail_tol);
    double sum = 0.0;
    for (std::size_t m = 1; m < w.size(); ++m) {
        const double pc = collision_prob(m, n, copies);
        const double alpha = pc + (1.0 - pc) * beta;
        sum += std::pow(alpha, static_cast<double>(copies)) * w[m];
    }
    return sum;
}

double psi_closed_form(std::size_t l, const SystemConfig& config) {
    require_active_layer(l, config);
    const double beta = beta_crrd(l, config);
    const std::size_t copies = config.repetition();
    const double omega = crrd_omega(config.num_channels(), copies);
    const double arrival = config.layer(l).arrival_rate;
    double sum = 0.0;
    for (std::size_t b = 0; b <= copies; ++b) {
        const double weight = binomial(copies, b) * std::pow(1.0 - beta, static_cast<double>(b)) *
                              std::pow(beta, static_cast<double>(copies - b));
        if (weight == 0.0) continue;
        sum += weight * collision_moment(arrival, omega, b);
    }
    return std::clamp(sum, 0.0, 1.0);
}

std::vector<double> cascade_outage(const std::vector<double>& psi) {
    std::vector<double> out;
    out.reserve(psi.size());
    double survive = 1.0;
    for (const double p : psi) {
        survive *= 1.0 - p;
        out.push_back(1.0 - survive);
    }
    return out;
}

OutageReport outage(const SystemConfig& config) {
    OutageReport report;
    report.omega = crrd_omega(config.num_channels(), config.repetition());
    for (std::size_t l = 1; l <= config.num_layers(); ++l) {
        report.beta.push_back(beta_crrd(l, config));
        report.psi.push_back(psi_closed_form(l, config));
    }
    report.outage = cascade_outage(report.psi);
    return report;
}

}  // namespace lra
