#include "lra/rate_optimizer.hpp"

#include <cmath>

namespace lra {

void validate(const SearchSettings& settings) {
    if (!(settings.rate_max > 0.0) || !std::isfinite(settings.rate_max))
        throw ConfigError("rate search range must be positive (--rate-max)");
    if (!(settings.tau_max > 0.0) || !std::isfinite(settings.tau_max))
        throw ConfigError("normalized arrival search range must be positive");
    if (settings.grid_points < 2) throw ConfigError("grid must have at least 2 points (--grid-points)");
    if (!(settings.refine_tol > 0.0)) throw ConfigError("refinement tolerance must be positive (--refine-tol)");
}

ScalarOptimum maximize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              std::size_t grid_points, double refine_tol) {
    if (!(hi > lo)) throw ConfigError("search interval must be non-empty");
    if (grid_points < 2) throw ConfigError("grid must have at least 2 points");

    const double step = (hi - lo) / static_cast<double>(grid_points);
    std::size_t best_k = 0;
    double best = f(lo);
    for (std::size_t k = 1; k <= grid_points; ++k) {
        const double v = f(lo + step * static_cast<double>(k));
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    const double best_x = lo + step * static_cast<double>(best_k);

    double a = best_k == 0 ? lo : best_x - step;
    double b = best_k == grid_points ? hi : best_x + step;
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double fc = f(c);
    double fd = f(d);
    while (b - a > refine_tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx > best) return {x, fx};
    return {best_x, best};
}

RatePlan optimize_rates(const SystemConfig& config, const SearchSettings& settings, CaptureModel model) {
    validate(settings);
    const std::size_t num_layers = config.num_layers();
    const std::size_t n = config.num_channels();

    RatePlan plan;
    plan.optimal_rates.assign(num_layers, 0.0);
    plan.layer_values.assign(num_layers, 0.0);

    double next_value = 0.0;
    for (std::size_t l = num_layers; l >= 1; --l) {
        const double arrival = config.layer(l).arrival_rate;
        if (arrival == 0.0) {
            // empty layer: eta = 0, rho = 1
            plan.optimal_rates[l - 1] = 0.0;
            plan.layer_values[l - 1] = next_value;
            continue;
        }
        auto objective = [&](double r) {
            const double phi = capture_prob_at_rate(l, config, r, model);
            return r * eta(arrival, n, phi) + rho(arrival, n, phi) * next_value;
        };
        const auto best = maximize_scalar(objective, 0.0, settings.rate_max, settings.grid_points,
                                          settings.refine_tol);
        plan.optimal_rates[l - 1] = best.arg;
        plan.layer_values[l - 1] = best.value;
        next_value = best.value;
    }
    plan.achieved_throughput = plan.layer_values.front();
    return plan;
}

ArrivalPlan optimize_arrivals(std::size_t num_layers, std::size_t num_channels, double rate,
                              TargetSinr gamma, const SearchSettings& settings) {
    validate(settings);
    if (num_layers < 1) throw ConfigError("number of layers must be at least 1");
    if (num_channels < 1) throw ConfigError("number of channels must be at least 1");
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw ConfigError("rate must be finite and non-negative");

    const double phi = common_capture_bound(rate, gamma);
    ArrivalPlan plan;
    plan.tau.assign(num_layers, 0.0);
    plan.layer_values.assign(num_layers, 0.0);

    double next_value = 0.0;
    for (std::size_t l = num_layers; l >= 1; --l) {
        auto objective = [&](double t) {
            const double clear = (1.0 + phi * t) * std::exp(-t);
            return phi * t * std::exp(-t) + clear * next_value;
        };
        const auto best = maximize_scalar(objective, 0.0, settings.tau_max, settings.grid_points,
                                          settings.refine_tol);
        plan.tau[l - 1] = best.arg;
        plan.layer_values[l - 1] = best.value;
        next_value = best.value;
    }
    plan.value = static_cast<double>(num_channels) * plan.layer_values.front();
    return plan;
}

}  // namespace lra
