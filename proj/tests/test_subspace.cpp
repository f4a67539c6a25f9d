#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "eulerctl/subspace.hpp"
#include "test_util.hpp"

using namespace eulerctl;
using eulerctl::test::random_field;

TEST_CASE("span_of orthonormalizes and drops dependent generators") {
    Rng rng(2);
    const auto a = random_field(rng, 2);
    const auto b = random_field(rng, 2);
    const auto s = ModeSubspace::span_of({a, b, a + b * 2.0, a * 0.5});
    CHECK(s.dim() == 2);
    const Mat g = s.gram();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("raw basis construction rejects rank deficiency") {
    Rng rng(3);
    const auto a = random_field(rng, 2);
    const auto b = random_field(rng, 2);
    CHECK_THROWS(ModeSubspace::from_raw_basis({a, b, a - b}));
    const auto s = ModeSubspace::from_raw_basis({a, b});
    CHECK(s.dim() == 2);
    CHECK_FALSE(s.orthonormalized());
}

TEST_CASE("projection: member fixed, orthogonal killed, idempotent") {
    Rng rng(5);
    const auto g1 = mode_field({1, 0, 0}, Polarization::plus, Phase::cos);
    const auto g2 = mode_field({0, 1, 0}, Polarization::minus, Phase::sin);
    const auto s = ModeSubspace::span_of({g1, g2});

    const auto inside = g1 * 0.3 - g2 * 1.7;
    CHECK(sobolev_norm(s.project(inside) - inside, 0.0) < 1e-13);

    const auto outside = mode_field({0, 0, 1}, Polarization::plus, Phase::cos);
    CHECK(sobolev_norm(s.project(outside), 0.0) < 1e-13);

    const auto u = random_field(rng, 2);
    const auto pu = s.project(u);
    CHECK(sobolev_norm(s.project(pu) - pu, 0.0) < 1e-12);
}

TEST_CASE("projection minimizes distance (normal equations oracle)") {
    Rng rng(7);
    // skewed raw basis, not orthonormal
    const auto a = random_field(rng, 2);
    const auto b = random_field(rng, 2);
    const auto raw = ModeSubspace::from_raw_basis({a, a * 0.9 + b * 0.1});
    const auto u = random_field(rng, 3);

    // independent least-squares solve via the Gram system
    Mat g = raw.gram();
    std::vector<double> rhs = {inner_k(u, raw.basis()[0], 0.0), inner_k(u, raw.basis()[1], 0.0)};
    const auto c = spd_solve(g, rhs);
    const SpectralField best = raw.basis()[0] * c[0] + raw.basis()[1] * c[1];

    const auto p = raw.project(u);
    CHECK(sobolev_norm(p - best, 0.0) < 1e-11);

    // any perturbation inside the span increases the distance
    const double d0 = sobolev_norm(u - p, 0.0);
    for (int t = 0; t < 4; ++t) {
        const SpectralField q = p + raw.basis()[t % 2] * rng.uniform(-0.1, 0.1);
        CHECK(sobolev_norm(u - q, 0.0) >= d0 - 1e-12);
    }
}

TEST_CASE("extended spans nest") {
    Rng rng(11);
    const auto s = ModeSubspace::span_of({random_field(rng, 1), random_field(rng, 1)});
    const auto bigger = s.extended({random_field(rng, 2)});
    for (const auto& b : s.basis()) CHECK(bigger.projection_residual(b) < 1e-10);
    CHECK(bigger.dim() == 3);
}

TEST_CASE("fiber dimensions") {
    const WaveVector m{1, 0, 0};
    const auto full = ModeSubspace::span_of(fiber_basis(m));
    CHECK(fiber_dimension(full, m) == 4);
    CHECK(fiber_dimension(full, {0, 1, 0}) == 0);

    const auto single = ModeSubspace::span_of({mode_field(m, Polarization::plus, Phase::cos)});
    CHECK(fiber_dimension(single, m) == 1);

    // generator subspace has full fibers inside the radius, none outside
    const auto gen = generator_subspace(2);
    CHECK(gen.dim() == 4 * canonical_l1_ball(2).size());
    CHECK(fiber_dimension(gen, {1, 1, 0}) == 4);
    CHECK(fiber_dimension(gen, {1, 1, 1}) == 0);
}

TEST_CASE("scalar subspaces share the machinery") {
    Rng rng(13);
    const auto f1 = eulerctl::test::random_scalar_field(rng, 1);
    const auto f2 = eulerctl::test::random_scalar_field(rng, 1);
    const auto s = ScalarSubspace::span_of({f1, f2});
    CHECK(s.dim() == 2);
    CHECK(sobolev_norm(s.project(f1) - f1, 0.0) < 1e-12 * sobolev_norm(f1, 0.0));
}
