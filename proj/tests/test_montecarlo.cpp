#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "gen.hpp"
#include "lra/analytic.hpp"
#include "lra/montecarlo.hpp"
#include "lra/rate_optimizer.hpp"

using namespace lra;
using doctest::Approx;

namespace {

SystemConfig two_layer_rig(std::size_t N, std::size_t B) {
    return SystemConfig(N, {{1.0, 6.0, 1.0}, {1.0, 2.0, 1.0}}, 1.0, 1.0, B);
}

std::size_t add(SlotRealization& s, std::size_t layer, std::vector<CopyDraw> copies) {
    return s.add_user(layer, copies);
}

}  // namespace

TEST_CASE("counter-based generator") {
    SlotRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
}

TEST_CASE("slot realization validates users") {
    SlotRealization s(2, 4, 2);
    CHECK_THROWS_AS(add(s, 0, {{0, 1.0}, {1, 1.0}}), ConfigError);
    CHECK_THROWS_AS(add(s, 3, {{0, 1.0}, {1, 1.0}}), ConfigError);
    CHECK_THROWS_AS(add(s, 1, {{0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(add(s, 1, {{0, 1.0}, {0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(add(s, 1, {{0, 1.0}, {4, 1.0}}), ConfigError);
    CHECK_THROWS_AS(add(s, 1, {{0, 1.0}, {1, 0.0}}), ConfigError);
    CHECK(add(s, 2, {{0, 1.0}, {3, 2.0}}) == 0);
    CHECK(s.users_in_layer(2) == 1);
    CHECK(s.copies_of(0)[1].gain == 2.0);
    CHECK_THROWS_AS(SlotRealization(1, 2, 3), ConfigError);
}

TEST_CASE("sampler") {
    SUBCASE("same seed and slot give the same realization") {
        const auto cfg = make_uniform_config(3, 10, 6.0, 1.0, TargetSinr::from_db(3.0), 3);
        CHECK(sample_slot(cfg, 5, 17) == sample_slot(cfg, 5, 17));
        CHECK_FALSE(sample_slot(cfg, 5, 17) == sample_slot(cfg, 5, 18));
        CHECK_FALSE(sample_slot(cfg, 6, 17) == sample_slot(cfg, 5, 17));
    }

    SUBCASE("copies land on distinct channels") {
        const auto cfg = make_uniform_config(2, 8, 5.0, 1.0, TargetSinr(2.0), 5);
        SlotSampler sampler(cfg);
        SlotRealization slot;
        for (std::uint64_t i = 0; i < 2000; ++i) {
            SlotRng rng(3, i);
            sampler.sample(rng, slot);
            for (std::size_t u = 0; u < slot.num_users(); ++u) {
                std::set<std::uint32_t> seen;
                for (const auto& c : slot.copies_of(u)) {
                    CHECK(c.channel < 8);
                    CHECK(c.gain > 0.0);
                    seen.insert(c.channel);
                }
                CHECK(seen.size() == 5);
            }
        }
    }

    SUBCASE("arrival counts, channel choice and gain moments") {
        const SystemConfig cfg(10, {{10.0, 1.0, 1.0}}, 2.5, 1.0, 1);
        SlotSampler sampler(cfg);
        SlotRealization slot;
        const std::uint64_t slots = 1000000;
        double users = 0.0, gain_sum = 0.0, gain_n = 0.0;
        std::vector<double> per_channel(10, 0.0);
        for (std::uint64_t i = 0; i < slots; ++i) {
            SlotRng rng(11, i);
            sampler.sample(rng, slot);
            users += static_cast<double>(slot.users_in_layer(1));
            for (std::size_t u = 0; u < slot.num_users(); ++u) {
                const auto& c = slot.copies_of(u)[0];
                per_channel[c.channel] += 1.0;
                gain_sum += c.gain;
                gain_n += 1.0;
            }
        }
        const double mean = users / static_cast<double>(slots);
        CHECK(std::abs(mean - 10.0) < 4.0 * std::sqrt(10.0 / static_cast<double>(slots)));
        CHECK(std::abs(gain_sum / gain_n - 2.5) < 4.0 * 2.5 / std::sqrt(gain_n));
        for (double c : per_channel) CHECK(std::abs(c / gain_n - 0.1) < 4.0 * std::sqrt(0.09 / gain_n));
    }
}

TEST_CASE("hand-traced SIC") {
    const auto cfg = two_layer_rig(2, 1);

    SUBCASE("both layers decode on a shared channel") {
        // layer 1: 6*10 / (1 + 2*1) = 20 -> log2(21) >= 1; layer 2 after cancellation: 2*1/1 -> log2(3) >= 1
        SlotRealization s(2, 2, 1);
        add(s, 1, {{0, 10.0}});
        add(s, 2, {{0, 1.0}});
        const auto r = sic_decode(s, cfg);
        CHECK(r.outcomes[0] == Outcome::decoded);
        CHECK(r.outcomes[1] == Outcome::decoded);
        CHECK(r.decoded_per_layer == std::vector<std::uint32_t>{1, 1});
        CHECK(r.stop_layer == std::vector<std::uint32_t>{2, 2});
        CHECK(r.residual_at(1, 0) == 0);
    }

    SUBCASE("upper-layer interference breaks layer 1") {
        // 6*0.4 / (1 + 2*1) = 0.8 < 1
        SlotRealization s(2, 2, 1);
        add(s, 1, {{0, 0.4}});
        add(s, 2, {{0, 1.0}});
        add(s, 2, {{1, 1.0}});
        const auto r = sic_decode(s, cfg);
        CHECK(r.outcomes[0] == Outcome::sinr_failure);
        CHECK(r.outcomes[1] == Outcome::blocked);
        CHECK(r.outcomes[2] == Outcome::decoded);
        CHECK(r.stop_layer == std::vector<std::uint32_t>{0, 2});
    }

    SUBCASE("collision blocks the channel") {
        SlotRealization s(2, 2, 1);
        add(s, 1, {{0, 50.0}});
        add(s, 1, {{0, 50.0}});
        add(s, 2, {{0, 9.0}});
        add(s, 1, {{1, 0.1}});
        const auto r = sic_decode(s, cfg);
        CHECK(r.outcomes[0] == Outcome::collided);
        CHECK(r.outcomes[1] == Outcome::collided);
        CHECK(r.outcomes[2] == Outcome::blocked);
        CHECK(r.outcomes[3] == Outcome::sinr_failure);
        CHECK(r.occupancy_at(1, 0) == 2);
        CHECK(r.stop_layer == std::vector<std::uint32_t>{0, 0});
        CHECK(r.users_per_layer == std::vector<std::uint32_t>{3, 1});
    }

    SUBCASE("decoder rejects a slot of the wrong shape") {
        SlotRealization s(3, 2, 1);
        CHECK_THROWS_AS(sic_decode(s, cfg), ConfigError);
    }
}

TEST_CASE("repetition and blocking rules") {
    // A and B collide on channel 0 but decode on their other copies, which
    // cancels both colliding copies. C's other copy is too weak.
    const auto cfg = two_layer_rig(4, 2);
    SlotRealization s(2, 4, 2);
    add(s, 1, {{0, 10.0}, {1, 10.0}});
    add(s, 1, {{0, 10.0}, {2, 10.0}});
    add(s, 2, {{0, 5.0}, {3, 1e-6}});

    const auto persistent = sic_decode(s, cfg);
    CHECK(persistent.outcomes[0] == Outcome::decoded);
    CHECK(persistent.outcomes[1] == Outcome::decoded);
    CHECK(persistent.outcomes[2] == Outcome::sinr_failure);
    CHECK(persistent.residual_at(1, 0) == 0);
    CHECK(persistent.stop_layer[0] == 0);
    CHECK(persistent.stop_layer[3] == 1);

    const auto released = sic_decode(s, cfg, {BlockingRule::release_on_cancel});
    CHECK(released.outcomes[2] == Outcome::decoded);
    CHECK(released.stop_layer[0] == 2);
    // C's failed copy is cancelled once C decodes on channel 0
    CHECK(released.stop_layer[3] == 2);
}

TEST_CASE("decoder invariants on random slots") {
    test::Gen g(51);
    for (int trial = 0; trial < 60; ++trial) {
        const auto cfg = g.config(5, {4, 10, 30}, 12.0, 4);
        const std::size_t L = cfg.num_layers(), N = cfg.num_channels(), B = cfg.repetition();
        SicDecoder persistent(cfg);
        SicDecoder released(cfg, {BlockingRule::release_on_cancel});
        SlotSampler sampler(cfg);
        SlotRealization slot;
        for (std::uint64_t i = 0; i < 200; ++i) {
            SlotRng rng(trial, i);
            sampler.sample(rng, slot);
            const auto& r = persistent.decode(slot);
            const auto& rr = released.decode(slot);

            std::size_t copies = 0;
            for (auto o : r.occupancy) copies += o;
            CHECK(copies == slot.num_users() * B);
            for (std::size_t k = 0; k < r.residual.size(); ++k) CHECK(r.residual[k] <= r.occupancy[k]);
            for (std::size_t l = 1; l <= L; ++l) {
                CHECK(r.users_per_layer[l - 1] == slot.users_in_layer(l));
                CHECK(r.decoded_per_layer[l - 1] <= r.users_per_layer[l - 1]);
            }
            for (auto s : r.stop_layer) CHECK(s <= L);

            for (std::size_t u = 0; u < slot.num_users(); ++u) {
                const std::size_t l = slot.user(u).layer;
                const auto copies_u = slot.copies_of(u);
                if (l == 1) CHECK(r.outcomes[u] != Outcome::blocked);
                if (r.outcomes[u] == Outcome::decoded) {
                    bool via_open_singleton = false;
                    for (const auto& c : copies_u)
                        via_open_singleton |= r.occupancy_at(l, c.channel) == 1 && r.stop_layer[c.channel] >= l;
                    CHECK(via_open_singleton);
                }
                if (r.outcomes[u] == Outcome::collided) {
                    bool shared = false;
                    for (const auto& c : copies_u) shared |= r.occupancy_at(l, c.channel) >= 2;
                    CHECK(shared);
                }
                if (r.outcomes[u] == Outcome::blocked) {
                    for (const auto& c : copies_u) CHECK(r.stop_layer[c.channel] < l);
                }
                // reopening channels never loses a decode
                if (r.outcomes[u] == Outcome::decoded) CHECK(rr.outcomes[u] == Outcome::decoded);
            }
            // Under persistent blocking a channel passes layer l only if every layer <= l had
            // at most one copy there.
            for (std::size_t q = 0; q < N; ++q)
                for (std::size_t l = 1; l <= r.stop_layer[q]; ++l) CHECK(r.occupancy_at(l, q) <= 1);
        }
    }
}

TEST_CASE("single layer simulation matches the analytic throughput") {
    const SystemConfig cfg(10, {{10.0, 2.0, 1.0}});
    const auto est = estimate_throughput(cfg, 50000, 3);
    const double analytic = throughput(cfg).total_throughput;
    CHECK(std::abs(est.total.mean - analytic) < 4.0 * est.total.std_error);
    CHECK(est.total.slots == 50000);
    CHECK(est.total.seed == 3);
}

TEST_CASE("parallel estimators equal the serial reference") {
    const auto cfg = make_uniform_config(3, 10, 8.0, 1.2, TargetSinr::from_db(3.0));
    const auto ref = estimate_throughput_serial(cfg, 3000, 9);
    const auto cfg_b = make_uniform_config(3, 20, 3.0, 1.0, TargetSinr::from_db(10.0), 3);
    const auto ref_out = estimate_outage_serial(cfg_b, 3000, 9);
    for (int threads : {1, 2, 3, 4, 8}) {
        const auto est = estimate_throughput(cfg, 3000, 9, {threads, {}});
        CHECK(est.total.mean == ref.total.mean);
        CHECK(est.total.std_error == ref.total.std_error);
        for (std::size_t l = 0; l < 3; ++l) CHECK(est.layers[l].mean == ref.layers[l].mean);
        const auto out = estimate_outage(cfg_b, 3000, 9, {threads, {}});
        CHECK(out.failures == ref_out.failures);
        CHECK(out.users == ref_out.users);
        for (std::size_t l = 0; l < 3; ++l) CHECK(out.layers[l].std_error == ref_out.layers[l].std_error);
    }
    CHECK_THROWS_AS(estimate_throughput(cfg, 0, 1), ConfigError);
}

TEST_CASE("joint capture against its closed form") {
    // One user per layer on a channel: both decode iff
    // P1 g1 >= nu1 (N0 + P2 g2) and P2 g2 >= nu2 N0, with exponential gains.
    auto base = make_uniform_config(3, 10, 6.0, 1.0, TargetSinr::from_db(3.0));
    base = base.with_rates(optimize_rates(base).optimal_rates);
    const auto cfg = base.truncated(2);
    const double s = cfg.gain_mean(), n0 = cfg.noise_power();
    const double p1 = cfg.layer(1).power, p2 = cfg.layer(2).power;
    const double nu1 = std::exp2(cfg.layer(1).rate) - 1.0, nu2 = std::exp2(cfg.layer(2).rate) - 1.0;
    const double a = nu1 * p2 / p1;
    const double t2 = nu2 * n0 / p2;
    const double joint = std::exp(-nu1 * n0 / (p1 * s)) * std::exp(-(1.0 + a) * t2 / s) / (1.0 + a);
    const double first = std::exp(-nu1 * n0 / (p1 * s)) / (1.0 + a);
    const double second = std::exp(-t2 / s);

    const auto est = estimate_joint_capture(cfg, 200000, 4);
    CHECK(est.events > 10000);
    CHECK(std::abs(est.joint.mean - joint) < 4.0 * est.joint.std_error);
    CHECK(std::abs(est.first_layer.mean - first) < 4.0 * est.first_layer.std_error);
    // the two captures are correlated through the shared layer-2 gain
    CHECK(std::abs(est.joint.mean - first * second) > 3.0 * est.joint.std_error);

    CHECK_THROWS_AS(estimate_joint_capture(cfg.with_repetition(2), 10, 1), ConfigError);
    CHECK_THROWS_AS(estimate_joint_capture(base, 10, 1), ConfigError);
}

TEST_CASE("empty slots") {
    const SystemConfig cfg(5, {{0.0, 4.0, 1.0}, {0.0, 1.0, 1.0}});
    const auto slot = sample_slot(cfg, 1, 0);
    CHECK(slot.num_users() == 0);
    const auto r = sic_decode(slot, cfg);
    CHECK(r.outcomes.empty());
    CHECK(r.stop_layer == std::vector<std::uint32_t>(5, 2));
    const auto est = estimate_throughput(cfg, 100, 1);
    CHECK(est.total.mean == 0.0);
    CHECK(est.total.std_error == 0.0);
}

TEST_CASE("outcomes partition the users") {
    const auto cfg = make_uniform_config(3, 10, 6.0, 1.5, TargetSinr::from_db(3.0), 2);
    SicDecoder decoder(cfg);
    SlotSampler sampler(cfg);
    SlotRealization slot;
    for (std::uint64_t i = 0; i < 500; ++i) {
        SlotRng rng(2, i);
        sampler.sample(rng, slot);
        const auto& r = decoder.decode(slot);
        std::vector<std::size_t> by_outcome(4, 0);
        for (auto o : r.outcomes) ++by_outcome[static_cast<std::size_t>(o)];
        CHECK(by_outcome[0] + by_outcome[1] + by_outcome[2] + by_outcome[3] == slot.num_users());
        std::size_t decoded = 0;
        for (auto d : r.decoded_per_layer) decoded += d;
        CHECK(decoded == by_outcome[0]);
    }
}

TEST_CASE("single-layer collision fraction") {
    // Averaged over slots with M >= 1, the fraction of collided users is E[p_c(M) | M >= 1].
    const SystemConfig cfg(10, {{4.0, 1.0, 0.0}});
    const double lambda = 4.0;
    double expected = 0.0, pm = std::exp(-lambda);
    for (std::size_t m = 1; m < 80; ++m) {
        pm *= lambda / static_cast<double>(m);
        expected += pm * collision_prob(m, 10, 1);
    }
    expected /= 1.0 - std::exp(-lambda);

    SicDecoder decoder(cfg);
    SlotSampler sampler(cfg);
    SlotRealization slot;
    double sum = 0.0, sum2 = 0.0, n = 0.0;
    for (std::uint64_t i = 0; i < 200000; ++i) {
        SlotRng rng(12, i);
        sampler.sample(rng, slot);
        if (slot.num_users() == 0) continue;
        const auto& r = decoder.decode(slot);
        double collided = 0.0;
        for (auto o : r.outcomes) collided += o == Outcome::collided ? 1.0 : 0.0;
        const double f = collided / static_cast<double>(slot.num_users());
        sum += f;
        sum2 += f * f;
        n += 1.0;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - expected) < 4.0 * se);
}

TEST_CASE("adding a user never raises a channel's stop layer") {
    test::Gen g(52);
    for (int trial = 0; trial < 40; ++trial) {
        const auto cfg = g.config(4, {3, 8, 20}, 8.0, 3);
        const std::size_t L = cfg.num_layers(), N = cfg.num_channels(), B = cfg.repetition();
        SlotSampler sampler(cfg);
        SlotRealization slot;
        for (std::uint64_t i = 0; i < 100; ++i) {
            SlotRng rng(100 + trial, i);
            sampler.sample(rng, slot);
            const auto before = sic_decode(slot, cfg).stop_layer;

            SlotRealization more = slot;
            std::vector<CopyDraw> copies;
            std::vector<std::uint32_t> channels(N);
            for (std::uint32_t q = 0; q < N; ++q) channels[q] = q;
            for (std::size_t k = 0; k < B; ++k) {
                std::swap(channels[k], channels[g.integer(k, N - 1)]);
                copies.push_back({channels[k], g.uniform(0.01, 5.0)});
            }
            more.add_user(g.integer(1, L), copies);
            const auto after = sic_decode(more, cfg).stop_layer;
            for (std::size_t q = 0; q < N; ++q) CHECK(after[q] <= before[q]);
        }
    }
}

TEST_CASE("outage limits") {
    const SystemConfig hopeless(10, {{3.0, 1.0, 30.0}});
    CHECK(estimate_outage(hopeless, 2000, 1).layers[0].mean == 1.0);
    const SystemConfig lonely(50, {{0.01, 1.0, 0.0}});
    const auto est = estimate_outage(lonely, 20000, 1);
    CHECK(est.users[0] > 0);
    CHECK(est.layers[0].mean < 0.01);
}

TEST_CASE("joint capture limits") {
    const SystemConfig free_rates(10, {{5.0, 4.0, 0.0}, {5.0, 1.0, 0.0}});
    const auto all = estimate_joint_capture(free_rates, 5000, 2);
    CHECK(all.joint.mean == 1.0);
    const SystemConfig second_free(10, {{5.0, 4.0, 1.0}, {5.0, 1.0, 0.0}});
    const auto est = estimate_joint_capture(second_free, 5000, 2);
    CHECK(est.joint.mean == est.first_layer.mean);
}

TEST_CASE("outcome names") {
    CHECK(std::string(to_string(Outcome::decoded)) == "decoded");
    CHECK(std::string(to_string(Outcome::blocked)) == "blocked");
}
