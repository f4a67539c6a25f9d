#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "eulerctl/linalg.hpp"
#include "eulerctl/rng.hpp"

using namespace eulerctl;

TEST_CASE("spd solve round trip") {
    Rng rng(1);
    const std::size_t n = 12;
    // G = A^T A + I is SPD
    Mat a(n, n);
    for (auto& v : a.a) v = rng.normal();
    Mat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = i == j ? 1.0 : 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(k, i) * a(k, j);
            g(i, j) = s;
        }
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b[i] += g(i, j) * x[j];
    const auto got = spd_solve(g, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - x[i]) < 1e-10);
}

TEST_CASE("jacobi eigen recovers a known spectrum") {
    Mat m(3, 3);
    m(0, 0) = 5.0;
    m(0, 1) = m(1, 0) = -2.0;
    m(1, 1) = 5.0;
    m(2, 2) = 9.0;
    std::vector<double> eig;
    Mat v;
    jacobi_eigen(m, eig, v);
    CHECK(eig[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(eig[1] == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(eig[2] == doctest::Approx(9.0).epsilon(1e-12));
    // eigenvector columns orthonormal
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += v(k, i) * v(k, j);
            CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
}

namespace {

SparseVec dense_col(const std::vector<double>& v) {
    SparseVec c;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0.0) c.nz.push_back({static_cast<int>(i), v[i]});
    return c;
}

} // namespace

TEST_CASE("nnls: exact nonnegative combination is recovered") {
    std::vector<SparseVec> cols = {
        dense_col({1, 0, 0, 1}),
        dense_col({0, 1, 0, -1}),
        dense_col({0, 0, 1, 1}),
    };
    std::vector<double> b = {2, 0, 0.5, 2.5};
    const auto r = nnls(cols, b, 1e-12);
    CHECK(r.converged);
    CHECK(r.residual_norm < 1e-12);
    REQUIRE(r.x.size() == 2);
    CHECK(r.x[0].first == 0);
    CHECK(r.x[0].second == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.x[1].first == 2);
    CHECK(r.x[1].second == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("nnls: infeasible target leaves a residual, never negative weights") {
    std::vector<SparseVec> cols = {dense_col({1, 0}), dense_col({0, 1})};
    std::vector<double> b = {-1, -2}; // only reachable with negative weights
    const auto r = nnls(cols, b, 1e-12);
    CHECK(r.x.empty());
    CHECK(r.residual_norm == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("nnls: random consistent systems at larger size") {
    Rng rng(9);
    const int rows = 40, cols_n = 120;
    std::vector<SparseVec> cols(cols_n);
    for (auto& c : cols) {
        std::vector<double> d(rows);
        for (auto& v : d) v = rng.normal();
        c = dense_col(d);
    }
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> b(rows, 0.0);
        for (int t = 0; t < 6; ++t) {
            const int j = static_cast<int>(rng.next_u64() % cols_n);
            cols[j].axpy(rng.uniform(0.1, 2.0), b);
        }
        const auto r = nnls(cols, b, 1e-9);
        CHECK(r.converged);
        CHECK(r.residual_norm < 1e-9);
        for (const auto& [j, v] : r.x) CHECK(v > 0.0);
    }
}

TEST_CASE("nnls: column subset restriction is honored") {
    std::vector<SparseVec> cols = {dense_col({1, 0}), dense_col({0, 1})};
    std::vector<double> b = {1, 1};
    const auto r = nnls(cols, b, 1e-12, 0, {0});
    REQUIRE(r.x.size() == 1);
    CHECK(r.x[0].first == 0);
    CHECK(r.residual_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nnls is deterministic") {
    Rng rng(13);
    const int rows = 20, cols_n = 50;
    std::vector<SparseVec> cols(cols_n);
    for (auto& c : cols) {
        std::vector<double> d(rows);
        for (auto& v : d) v = rng.normal();
        c = dense_col(d);
    }
    std::vector<double> b(rows);
    for (auto& v : b) v = rng.normal();
    const auto r1 = nnls(cols, b, 1e-10);
    const auto r2 = nnls(cols, b, 1e-10);
    REQUIRE(r1.x.size() == r2.x.size());
    for (std::size_t i = 0; i < r1.x.size(); ++i) {
        CHECK(r1.x[i].first == r2.x[i].first);
        CHECK(r1.x[i].second == r2.x[i].second);
    }
}
