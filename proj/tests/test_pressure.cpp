#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "eulerctl/pressure.hpp"
#include "test_util.hpp"

using namespace eulerctl;
using eulerctl::test::random_field;
using eulerctl::test::random_scalar_field;

TEST_CASE("quadratic form A: single mode vanishes, zero argument vanishes") {
    const auto c = mode_field({1, 0, 0}, Polarization::plus, Phase::cos);
    CHECK(quadratic_form_a(c, 1).is_zero());
    CHECK(quadratic_form_a(SpectralField::zero(), c, 2).is_zero());
}

TEST_CASE("quadratic form A: symmetric and quadratic") {
    Rng rng(301);
    const auto u = random_field(rng, 2);
    const auto v = random_field(rng, 2);

    const auto auv = quadratic_form_a(u, v, 2);
    const auto avu = quadratic_form_a(v, u, 2);
    CHECK(sobolev_norm(auv - avu, 0.0) < 1e-14);

    const auto a2 = quadratic_form_a(u * 3.0, 2);
    const auto a9 = quadratic_form_a(u, 2) * 9.0;
    CHECK(sobolev_norm(a2 - a9, 0.0) < 1e-12 * std::max(1.0, sobolev_norm(a9, 0.0)));
}

TEST_CASE("quadratic form A agrees with pressure recovery projected to G_m") {
    Rng rng(303);
    for (int t = 0; t < 3; ++t) {
        const auto u = random_field(rng, 3);
        const auto a = quadratic_form_a(u, 2);
        const auto p = pressure_recover(u, SpectralField::zero()).truncated_l1(2);
        CHECK(sobolev_norm(a - p, 0.0) < 1e-12 * std::max(1.0, sobolev_norm(p, 0.0)));
    }
}

TEST_CASE("paper formula: direct substitution for n = (1,0,0), phi = 1") {
    const auto q = paper_formula_quadruple({1, 0, 0}, 1, {0, 1, 0});
    CHECK(q.k1 == WaveVector{0, 8, 0});
    CHECK(q.k2 == WaveVector{1, 8, 0});
    CHECK(q.k3 == WaveVector{0, 12, 0});
    CHECK(q.k4 == WaveVector{1, 12, 0});
    validate_quadruples({q}, 1); // does not throw
}

TEST_CASE("quadruple families validate for both strategies at m = 1, 2") {
    for (int m : {1, 2}) {
        const auto paper = quadruple_family(m, QuadrupleStrategy::paper_formula);
        const auto minimal = quadruple_family(m, QuadrupleStrategy::minimal_norm);
        CHECK(paper.size() == canonical_l1_ball(m).size());
        CHECK(minimal.size() == paper.size());

        // condition (a) by construction on every entry
        for (const auto& q : paper) CHECK(q.k2 - q.k1 == q.n);
        for (const auto& q : minimal) CHECK(q.k4 - q.k3 == q.n);

        // minimal-norm quadruples are strictly smaller than the formula's
        int pmax = 0, mmax = 0;
        for (const auto& q : paper)
            pmax = std::max({pmax, q.k1.l1(), q.k2.l1(), q.k3.l1(), q.k4.l1()});
        for (const auto& q : minimal)
            mmax = std::max({mmax, q.k1.l1(), q.k2.l1(), q.k3.l1(), q.k4.l1()});
        CHECK(mmax < pmax);
    }
}

TEST_CASE("validator rejects broken families") {
    auto family = quadruple_family(1, QuadrupleStrategy::minimal_norm);
    auto broken = family;
    broken[0].k2 = broken[0].k1; // breaks (a) and (c)
    CHECK_THROWS_AS(validate_quadruples(broken, 1), std::logic_error);

    broken = family;
    broken[0].k3 = broken[0].k1; // same vector in both blocks: difference 0
    CHECK_THROWS_AS(validate_quadruples(broken, 1), std::logic_error);
}

TEST_CASE("select_wavevectors returns the family entry") {
    const auto q = select_wavevectors({0, 1, 0}, 1, QuadrupleStrategy::paper_formula);
    CHECK(q.n == WaveVector{0, 1, 0});
    CHECK_THROWS_AS(select_wavevectors({3, 0, 0}, 1, QuadrupleStrategy::paper_formula),
                    std::invalid_argument);
}

TEST_CASE("pressure lift: zero residual target needs no lift") {
    Rng rng(307);
    const auto u_hat = random_field(rng, 1, 4.0, 0.3);
    const auto p_hat = quadratic_form_a(u_hat, 1); // p_hat = A(u_hat)
    const auto target = make_pressure_target(1, u_hat, p_hat);
    const auto quads = quadruple_family(1, QuadrupleStrategy::minimal_norm);
    const auto v = pressure_lift(target, quads);
    CHECK(sobolev_norm(v, 0.0) < 1e-9);
}

TEST_CASE("pressure lift: single sin target solves exactly") {
    const auto p_hat = ScalarSpectralField::from_entries(
        {{WaveVector{0, 1, 0}, c64{0.0, -0.25}}}); // 0.5 sin<n,x>
    const auto target = make_pressure_target(1, SpectralField::zero(), p_hat);
    const auto quads = quadruple_family(1, QuadrupleStrategy::minimal_norm);
    const auto v = pressure_lift(target, quads);
    CHECK_FALSE(v.is_zero());
    const auto achieved = quadratic_form_a(v, 1);
    CHECK(sobolev_norm(achieved - p_hat, 0.0) < 1e-10);
}

TEST_CASE("pressure lift: randomized targets at m = 1 and 2, both strategies") {
    Rng rng(311);
    for (int m : {1, 2}) {
        for (auto strategy : {QuadrupleStrategy::paper_formula, QuadrupleStrategy::minimal_norm}) {
            const auto quads = quadruple_family(m, strategy);
            for (int t = 0; t < 3; ++t) {
                const auto u_hat = random_field(rng, m, 4.0, 0.2);
                const auto p_hat = random_scalar_field(rng, m, 4.0, 0.05);
                const auto target = make_pressure_target(m, u_hat, p_hat);
                const auto v = pressure_lift(target, quads);

                // A(u_hat + v) = p_hat on G_m
                const auto achieved = quadratic_form_a(u_hat + v, m);
                CHECK(sobolev_norm(achieved - p_hat, 4.0) < 1e-10);

                // exact orthogonality to F_m: supports are disjoint
                for (const auto& e : v.entries()) CHECK(e.m.l1() > m);
                CHECK(std::abs(inner_k(v, u_hat, 0.0)) == 0.0);
            }
        }
    }
}

TEST_CASE("pressure lift responds continuously to the target") {
    Rng rng(313);
    const auto u_hat = random_field(rng, 1, 4.0, 0.2);
    const auto p_base = random_scalar_field(rng, 1, 4.0, 0.05);
    const auto quads = quadruple_family(1, QuadrupleStrategy::minimal_norm);
    const auto v0 = pressure_lift(make_pressure_target(1, u_hat, p_base), quads);

    double prev_ratio = -1.0;
    for (double tau : {1e-4, 1e-6}) {
        const auto p_pert = p_base + random_scalar_field(rng, 1, 4.0, tau);
        const auto v1 = pressure_lift(make_pressure_target(1, u_hat, p_pert), quads);
        const double ratio = sobolev_norm(v1 - v0, 4.0) / tau;
        if (prev_ratio > 0.0) {
            // O(tau) response: the difference quotient is stable under
            // shrinking tau (factor 4 headroom)
            CHECK(ratio < 4.0 * prev_ratio);
            CHECK(ratio > 0.25 * prev_ratio);
        }
        prev_ratio = ratio;
    }
}

TEST_CASE("block separation: cross-block products stay outside G_m") {
    const auto quads = quadruple_family(1, QuadrupleStrategy::minimal_norm);
    // A restricted to m must see no contribution from pairs of different
    // blocks; build one mode from each block of different targets and check
    const auto& qa = quads[0];
    const auto& qb = quads[1];
    const auto sa = mode_field(qa.k1, Polarization::plus, Phase::sin);
    const auto sb = mode_field(qb.k3, Polarization::minus, Phase::sin);
    CHECK(quadratic_form_a(sa, sb, 1).is_zero());
}

TEST_CASE("steering: combined velocity and pressure projections at m = 1") {
    Rng rng(317);
    const auto u_hat = random_field(rng, 1, 4.0, 5e-3);
    const auto p_hat = random_scalar_field(rng, 1, 4.0, 1e-7);

    GalerkinConfig cfg;
    cfg.cutoff = 6;
    cfg.dt = 1e-3;
    SynthesisParams params;
    params.stages = 0; // exact-forcing ansatz; E plays no role
    params.mu = 1e-6;
    params.delta = 1e-6;

    const auto res = steer_velocity_pressure(SpectralField::zero(), u_hat, p_hat, 1, 1.0,
                                             ControlSignal::zero(1.0), ModeSubspace{}, params,
                                             cfg, QuadrupleStrategy::minimal_norm);
    CHECK(res.velocity_error < 1e-3);
    CHECK(res.pressure_proj_error <= res.c_emp * res.velocity_error * 1.05 + 1e-15);
    CHECK(res.pressure_proj_error < 1e-2);
    CHECK(res.required_cutoff <= 6);
}

TEST_CASE("steering rejects a cutoff that cannot hold the lift") {
    Rng rng(319);
    const auto u_hat = random_field(rng, 1, 4.0, 5e-3);
    const auto p_hat = random_scalar_field(rng, 1, 4.0, 1e-7);
    GalerkinConfig cfg;
    cfg.cutoff = 3; // too small for |k| > 2 lift modes plus their sums
    SynthesisParams params;
    params.stages = 0;
    CHECK_THROWS_AS(steer_velocity_pressure(SpectralField::zero(), u_hat, p_hat, 1, 1.0,
                                            ControlSignal::zero(1.0), ModeSubspace{}, params,
                                            cfg, QuadrupleStrategy::minimal_norm),
                    std::invalid_argument);
}
