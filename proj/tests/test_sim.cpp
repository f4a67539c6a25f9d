#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "eulerctl/grid_oracle.hpp"
#include "eulerctl/sim.hpp"
#include "test_util.hpp"

using namespace eulerctl;
using eulerctl::test::random_field;

namespace {

GalerkinConfig quick_cfg(int cutoff = 3, double dt = 1e-3) {
    GalerkinConfig cfg;
    cfg.cutoff = cutoff;
    cfg.dt = dt;
    cfg.store_stride = 10;
    return cfg;
}

} // namespace

TEST_CASE("single mode is a stationary solution of the unforced system") {
    const auto u0 = mode_field({1, 1, 0}, Polarization::plus, Phase::cos);
    const auto cfg = quick_cfg();
    const auto traj = resolve(u0, ControlSignal::zero(1.0), ControlSignal::zero(1.0), cfg);
    for (const auto& s : traj.states)
        CHECK(sobolev_norm(s - u0, 0.0) < 1e-12);
}

TEST_CASE("unforced truncated Euler conserves energy") {
    Rng rng(101);
    const auto u0 = random_field(rng, 3, 0.0, 1.0);
    const auto cfg = quick_cfg(3, 1e-3);
    const auto traj = resolve(u0, ControlSignal::zero(0.5), ControlSignal::zero(0.5), cfg);
    const double e0 = traj.energy(0);
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        CHECK(std::abs(traj.energy(i) - e0) < 1e-6 * e0);
    CHECK(traj.max_divergence < 1e-12);
}

TEST_CASE("resolve is deterministic bit for bit") {
    Rng rng(103);
    const auto u0 = random_field(rng, 2);
    const auto f = ControlSignal::constant(random_field(rng, 2, 0.0, 0.3), 0.3);
    const auto cfg = quick_cfg(3, 1e-3);
    const auto t1 = resolve(u0, ControlSignal::zero(0.3), f, cfg);
    const auto t2 = resolve(u0, ControlSignal::zero(0.3), f, cfg);
    REQUIRE(t1.states.size() == t2.states.size());
    for (std::size_t i = 0; i < t1.states.size(); ++i) {
        REQUIRE(t1.states[i].size() == t2.states[i].size());
        for (std::size_t e = 0; e < t1.states[i].size(); ++e) {
            CHECK(t1.states[i].entries()[e].a.x == t2.states[i].entries()[e].a.x);
            CHECK(t1.states[i].entries()[e].a.y == t2.states[i].entries()[e].a.y);
            CHECK(t1.states[i].entries()[e].a.z == t2.states[i].entries()[e].a.z);
        }
    }
}

TEST_CASE("resolve_controlled matches resolve with f = h + eta") {
    Rng rng(107);
    const auto u0 = random_field(rng, 2);
    const auto eta = ControlSignal::constant(random_field(rng, 2, 0.0, 0.5), 0.4);
    const auto h = ControlSignal::constant(random_field(rng, 1, 0.0, 0.2), 0.4);
    const auto cfg = quick_cfg();
    const auto a = resolve_controlled(u0, eta, h, cfg);
    const auto b = resolve(u0, ControlSignal::zero(0.4), h + eta, cfg);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i)
        CHECK(sobolev_norm(a.states[i] - b.states[i], 0.0) == 0.0);
}

TEST_CASE("eta = -h cancels the forcing") {
    Rng rng(109);
    const auto u0 = random_field(rng, 2);
    const auto hval = random_field(rng, 2, 0.0, 0.8);
    const auto h = ControlSignal::constant(hval, 0.3);
    const auto eta = ControlSignal::constant(hval * -1.0, 0.3);
    const auto cfg = quick_cfg();
    const auto forced = resolve_controlled(u0, eta, h, cfg);
    const auto free_run = resolve(u0, ControlSignal::zero(0.3), ControlSignal::zero(0.3), cfg);
    for (std::size_t i = 0; i < forced.states.size(); ++i)
        CHECK(sobolev_norm(forced.states[i] - free_run.states[i], 0.0) < 1e-12);
}

TEST_CASE("initial slope under constant control from a stationary state") {
    // stationary u0 (single mode), constant eta: u'(0) = eta via finite difference
    const auto u0 = mode_field({0, 1, 0}, Polarization::minus, Phase::sin);
    Rng rng(113);
    const auto eta_val = random_field(rng, 2, 0.0, 0.4);
    auto cfg = quick_cfg(3, 1e-4);
    cfg.store_stride = 1;
    const auto traj = resolve_controlled(u0, ControlSignal::constant(eta_val, 0.01),
                                         ControlSignal::zero(0.01), cfg);
    const auto slope = (traj.states[1] - traj.states[0]) * (1.0 / (traj.times[1] - traj.times[0]));
    // B(u0 + small) deviates from eta at order dt; tolerance reflects that
    CHECK(sobolev_norm(slope - eta_val, 0.0) < 1e-3 * sobolev_norm(eta_val, 0.0) + 1e-6);
}

TEST_CASE("RK4 self-convergence order is at least 3.8") {
    Rng rng(127);
    const auto u0 = random_field(rng, 2, 0.0, 0.8);
    const auto f = ControlSignal::polynomial(
        {random_field(rng, 2, 0.0, 0.5), random_field(rng, 2, 0.0, 0.3)}, 0.5);
    auto run = [&](double dt) {
        auto cfg = quick_cfg(3, dt);
        cfg.store_stride = 0;
        return resolve(u0, ControlSignal::zero(0.5), f, cfg).final_state();
    };
    const auto c = run(4e-3);
    const auto m = run(2e-3);
    const auto fgrid = run(1e-3);
    const double e1 = sobolev_norm(c - m, 0.0);
    const double e2 = sobolev_norm(m - fgrid, 0.0);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.8);
    CHECK(order < 4.6);
}

TEST_CASE("blow-up guard trips on norm growth") {
    Rng rng(131);
    const auto u0 = random_field(rng, 2, 4.0, 1.0);
    auto cfg = quick_cfg(3, 1e-3);
    cfg.guard_factor = 1.000001; // any growth trips
    const auto f = ControlSignal::constant(random_field(rng, 2, 0.0, 50.0), 1.0);
    CHECK_THROWS_AS(resolve(u0, ControlSignal::zero(1.0), f, cfg), BlowupError);
}

TEST_CASE("u0 outside the cutoff ball is rejected") {
    const auto u0 = mode_field({3, 2, 0}, Polarization::plus, Phase::cos); // l1 = 5
    const auto cfg = quick_cfg(3);
    CHECK_THROWS_AS(resolve(u0, ControlSignal::zero(1.0), ControlSignal::zero(1.0), cfg),
                    std::invalid_argument);
}

TEST_CASE("pressure recovery: trivial cases") {
    Rng rng(137);
    // u = 0, divergence-free h -> p = 0
    const auto h = random_field(rng, 2);
    CHECK(pressure_recover(SpectralField::zero(), h).is_zero());

    // single trigonometric mode, h = 0 -> p = 0
    const auto c = mode_field({2, -1, 0}, Polarization::plus, Phase::cos);
    const auto p = pressure_recover(c, SpectralField::zero());
    CHECK(sobolev_norm(p, 0.0) < 1e-13);
}

TEST_CASE("pressure recovery matches the grid oracle") {
    Rng rng(139);
    for (int t = 0; t < 3; ++t) {
        const auto u = random_field(rng, 3);
        const auto p_spec = pressure_recover(u, SpectralField::zero());
        const auto src = grid_oracle_pressure_source(u, 32);
        RawScalarMap neg;
        for (const auto& [m, v] : src) neg[m] = -v;
        const auto p_grid = inverse_laplacian(ScalarSpectralField::from_raw(neg));
        CHECK(sobolev_norm(p_spec - p_grid, 0.0) < 1e-10);
    }
}

TEST_CASE("shift identity: resolve(u0, zeta~, h+eta) + zeta~ = R(u0, eta + zeta~')") {
    Rng rng(149);
    for (int inst = 0; inst < 3; ++inst) {
        const double T = 1.0;
        const auto u0 = random_field(rng, 2, 0.0, 0.5);
        const auto hval = random_field(rng, 1, 0.0, 0.2);
        const auto h = ControlSignal::constant(hval, T);
        const auto eta = ControlSignal::constant(random_field(rng, 2, 0.0, 0.4), T);

        // piecewise-constant zeta, then the C1 ramped version vanishing at 0, T
        std::vector<FieldPtr> vals;
        for (int i = 0; i < 4; ++i) vals.push_back(share(random_field(rng, 2, 0.0, 0.5)));
        const auto zeta_pwc =
            ControlSignal::piecewise_constant({0.0, 0.25, 0.5, 0.75, 1.0}, vals, T);
        const auto ramped = ramp_piecewise_constant(zeta_pwc, 0.05);

        auto cfg = quick_cfg(3, 1e-3);
        cfg.store_stride = 50;
        const auto lhs = resolve(u0, ramped.value, h + eta, cfg);
        const auto rhs = resolve_controlled(u0, eta + ramped.derivative, h, cfg);

        REQUIRE(lhs.times.size() == rhs.times.size());
        for (std::size_t i = 0; i < lhs.times.size(); ++i) {
            const auto shifted = lhs.states[i] + ramped.value.eval(lhs.times[i]);
            CHECK(sobolev_norm(shifted - rhs.states[i], 0.0) < 1e-8);
        }
        // endpoints agree without the shift since zeta~(T) = 0
        CHECK(sobolev_norm(lhs.final_state() - rhs.final_state(), 0.0) < 1e-8);
    }
}

TEST_CASE("lipschitz probe: zero perturbation, scale stability, time bound") {
    Rng rng(151);
    const auto u0 = random_field(rng, 2, 4.0, 0.8);
    const auto f = ControlSignal::constant(random_field(rng, 2, 0.0, 0.3), 0.5);
    const auto zeta = ControlSignal::zero(0.5);
    auto cfg = quick_cfg(3, 1e-3);
    cfg.store_stride = 5;

    const auto zero_rep = lipschitz_probe(u0, SpectralField::zero(), zeta, f, cfg, {1e-2});
    CHECK(zero_rep.ratios[0] == 0.0);

    const auto du0 = random_field(rng, 2, 4.0, 1.0);
    const auto rep = lipschitz_probe(u0, du0, zeta, f, cfg, {1e-2, 5e-3, 2.5e-3});
    for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
        CHECK(rep.ratios[i] < 2.0 * rep.ratios[i - 1]);
        CHECK(rep.ratios[i] > 0.5 * rep.ratios[i - 1]);
    }
    CHECK(rep.time_ratio_max <= 1.1 * rep.rhs_sup);
}
