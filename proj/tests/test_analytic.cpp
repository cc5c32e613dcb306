#include <doctest.h>

#include <cmath>
#include <vector>

#include "gen.hpp"
#include "lra/analytic.hpp"

using namespace lra;
using doctest::Approx;

namespace {

// E[x^K] for K ~ Poisson(mean), summed term by term.
double poisson_pgf(double mean, double x) {
    double term = std::exp(-mean);
    double sum = 0.0;
    for (int k = 0; k < 400; ++k) {
        sum += term * std::pow(x, k);
        term *= mean / (k + 1);
    }
    return sum;
}

// Capture probability from the fading/occupancy model directly: for
// independent exponential gains, P(P g > nu (N0 + sum P_i g_i)) factors into
// exp(-nu N0 / (P sigma)) times E[(1 + nu P_i / P)^-K_i] per upper layer.
double capture_oracle(std::size_t l, const SystemConfig& cfg) {
    const auto& self = cfg.layer(l);
    const double nu = std::exp2(self.rate) - 1.0;
    double p = std::exp(-nu * cfg.noise_power() / (self.power * cfg.gain_mean()));
    for (std::size_t i = l + 1; i <= cfg.num_layers(); ++i) {
        const auto& up = cfg.layer(i);
        p *= poisson_pgf(up.arrival_rate / static_cast<double>(cfg.num_channels()),
                         1.0 / (1.0 + nu * up.power / self.power));
    }
    return p;
}

SystemConfig two_layer() { return SystemConfig(10, {{0.0, 6.0, 1.0}, {10.0, 2.0, 1.0}}); }

}  // namespace

TEST_CASE("capture probability examples") {
    const SystemConfig single(10, {{10.0, 2.0, 1.0}});
    CHECK(capture_prob_exact(1, single) == Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(capture_prob_exact(1, single) == Approx(0.60653).epsilon(1e-5));

    const auto two = two_layer();
    CHECK(capture_prob_exact(1, two) == Approx(std::exp(-1.0 / 6.0 - 2.0 / 8.0)).epsilon(1e-14));
    CHECK(capture_prob_exact(1, two) == Approx(0.65924).epsilon(1e-5));
    CHECK(capture_prob_lower_bound(1, two) == Approx(std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("capture matches the Poisson-averaged oracle") {
    test::Gen g(21);
    for (int i = 0; i < 300; ++i) {
        const auto cfg = g.config(5, {5, 10, 60}, 20.0);
        for (std::size_t l = 1; l <= cfg.num_layers(); ++l)
            CHECK(capture_prob_exact(l, cfg) == Approx(capture_oracle(l, cfg)).epsilon(1e-11));
    }
}

TEST_CASE("lower bound never exceeds exact capture") {
    test::Gen g(22);
    for (int i = 0; i < 500; ++i) {
        const auto cfg = g.config(6, {2, 10, 60}, 30.0);
        const std::size_t L = cfg.num_layers();
        for (std::size_t l = 1; l <= L; ++l)
            CHECK(capture_prob_lower_bound(l, cfg) <= capture_prob_exact(l, cfg) * (1.0 + 1e-14));
        CHECK(capture_prob_lower_bound(L, cfg) == Approx(capture_prob_exact(L, cfg)).epsilon(1e-12));
    }
}

TEST_CASE("capture at an overridden rate ignores the layer's own rate") {
    const auto cfg = two_layer();
    const auto other = cfg.with_rate(1, 3.0);
    for (double r : {0.0, 0.5, 1.0, 2.0}) {
        CHECK(capture_prob_at_rate(1, cfg, r, CaptureModel::exact) ==
              capture_prob_at_rate(1, other, r, CaptureModel::exact));
        CHECK(capture_prob_at_rate(1, cfg, r, CaptureModel::lower_bound) ==
              capture_prob_at_rate(1, other, r, CaptureModel::lower_bound));
    }
    CHECK(capture_prob_at_rate(1, cfg, 0.0, CaptureModel::exact) == 1.0);
    CHECK_THROWS_AS(capture_prob_at_rate(1, cfg, -1.0, CaptureModel::exact), ConfigError);
    CHECK_THROWS_AS(capture_prob_at_rate(3, cfg, 1.0, CaptureModel::exact), std::out_of_range);
}

TEST_CASE("eta and rho") {
    CHECK(eta(10.0, 10, 1.0) == Approx(10.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(eta(10.0, 10, 1.0) == Approx(3.6788).epsilon(1e-4));
    CHECK(eta(10.0, 10, std::exp(-0.5)) == Approx(2.2313).epsilon(1e-4));
    CHECK(rho(10.0, 10, 1.0) == Approx(0.73576).epsilon(1e-5));
    CHECK(rho(10.0, 10, std::exp(-0.5)) == Approx(0.59102).epsilon(1e-5));
    CHECK(eta(0.0, 10, 0.5) == 0.0);
    CHECK(rho(0.0, 10, 0.5) == 1.0);
}

TEST_CASE("throughput recursion") {
    const SystemConfig single(10, {{10.0, 2.0, 1.0}});
    const auto rep = throughput(single);
    CHECK(rep.total_throughput == Approx(2.2313).epsilon(1e-4));

    test::Gen g(23);
    for (int i = 0; i < 100; ++i) {
        const auto cfg = g.config(6, {5, 10, 60}, 20.0);
        for (auto model : {CaptureModel::exact, CaptureModel::lower_bound}) {
            const auto r = throughput(cfg, model);
            double expected = 0.0;
            double prod = 1.0;
            for (std::size_t l = 1; l <= cfg.num_layers(); ++l) {
                const double phi = model == CaptureModel::exact ? capture_oracle(l, cfg)
                                                                : capture_prob_lower_bound(l, cfg);
                const double load = cfg.layer(l).arrival_rate / cfg.num_channels();
                expected += cfg.layer(l).rate * prod * phi * cfg.layer(l).arrival_rate * std::exp(-load);
                prod *= (1.0 + phi * load) * std::exp(-load);
            }
            CHECK(r.total_throughput == Approx(expected).epsilon(1e-10));
            CHECK(r.layer_throughput.size() == cfg.num_layers());
            for (double rho_l : r.rho) {
                CHECK(rho_l > 0.0);
                CHECK(rho_l <= 1.0);
            }
        }
    }
}

TEST_CASE("optimized-arrival bound") {
    const std::vector<double> tau{1.0, 1.0};
    const TargetSinr gamma(10.0);
    const double phi = std::exp(-0.1);
    CHECK(common_capture_bound(1.0, gamma) == Approx(phi).epsilon(1e-14));
    const double expected = phi * std::exp(-1.0) * (1.0 + (1.0 + phi) * std::exp(-1.0));
    CHECK(sla_lower_bound(10, tau, 1.0, gamma) == Approx(10.0 * expected).epsilon(1e-14));
    CHECK(expected == Approx(0.56613).epsilon(1e-5));
    CHECK(sla_lower_bound(20, tau, 1.0, gamma) == 2.0 * sla_lower_bound(10, tau, 1.0, gamma));
    CHECK(sla_lower_bound(10, std::vector<double>{}, 1.0, gamma) == 0.0);
    CHECK_THROWS_AS(sla_lower_bound(10, std::vector<double>{-1.0}, 1.0, gamma), ConfigError);
}

TEST_CASE("reference baselines") {
    CHECK(baseline_aloha_max(10) == Approx(10.0 / std::exp(1.0)));
    CHECK(baseline_irsa(10) == Approx(9.65));
}
