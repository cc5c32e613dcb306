#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "lra/analytic.hpp"
#include "lra/core_model.hpp"

namespace lra {

struct SearchSettings {
    double rate_max = 16.0;           // upper end of the rate search, bits per channel use
    std::size_t grid_points = 2048;   // coarse grid resolution before refinement
    double refine_tol = 1e-9;         // golden-section bracket width at which refinement stops
    double tau_max = 4.0;             // upper end of the normalized-arrival search
};

void validate(const SearchSettings& settings);

struct ScalarOptimum {
    double arg = 0.0;
    double value = 0.0;
};

/// Maximizes f over [lo, hi]: uniform grid of grid_points steps, then
/// golden-section refinement on the bracket around the best grid point.
/// Ties on the grid resolve to the smallest argument; the refined point is
/// kept only if it strictly improves on the grid maximum.
ScalarOptimum maximize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              std::size_t grid_points, double refine_tol);

struct RatePlan {
    std::vector<double> optimal_rates;
    std::vector<double> layer_values;  // T_l(R*_l), l = 1..L
    double achieved_throughput = 0.0;  // T_1(R*_1)
};

/// Throughput-maximizing rates found by L scalar searches from the top layer
/// down: T_l(R) = R eta_l(R) + rho_l(R) T_{l+1}(R*_{l+1}), T_{L+1} = 0.
/// Layers with zero arrival rate get R* = 0. The config's existing rates are ignored.
RatePlan optimize_rates(const SystemConfig& config, const SearchSettings& settings = {},
                        CaptureModel model = CaptureModel::exact);

struct ArrivalPlan {
    std::vector<double> tau;           // optimal normalized arrivals per layer
    std::vector<double> layer_values;  // per-channel partial objective V_l
    double value = 0.0;                // N * V_1, the optimized lower bound
};

/// Normalized arrivals maximizing sla_lower_bound for L layers sharing rate R.
/// Same top-down recursion as optimize_rates over tau in [0, tau_max].
ArrivalPlan optimize_arrivals(std::size_t num_layers, std::size_t num_channels, double rate,
                              TargetSinr gamma, const SearchSettings& settings = {});

}  // namespace lra
