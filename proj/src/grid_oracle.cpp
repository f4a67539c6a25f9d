#include "eulerctl/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eulerctl {

namespace {

struct Grid {
    int res;
    double h; // 2*pi / res
    Vec3 point(int i, int j, int k) const {
        return {h * i, h * j, h * k};
    }
};

// direct DFT of grid samples at a single wavevector
template <class Sampler>
c64 dft_at(const Grid& g, const WaveVector& m, Sampler&& value) {
    const int n = g.res;
    // separable twiddle tables keep this O(n^3) with cheap inner ops
    std::vector<c64> w1(n), w2(n), w3(n);
    for (int i = 0; i < n; ++i) {
        w1[i] = std::polar(1.0, -g.h * m.m1 * i);
        w2[i] = std::polar(1.0, -g.h * m.m2 * i);
        w3[i] = std::polar(1.0, -g.h * m.m3 * i);
    }
    c64 acc{0.0, 0.0};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const c64 wij = w1[i] * w2[j];
            c64 row{0.0, 0.0};
            for (int k = 0; k < n; ++k) row += value(i, j, k) * w3[k];
            acc += wij * row;
        }
    return acc / static_cast<double>(static_cast<long long>(n) * n * n);
}

std::vector<WaveVector> sumset_support(const SpectralField& a, const SpectralField& b,
                                       bool include_zero) {
    std::vector<WaveVector> out;
    std::unordered_map<WaveVector, char, WaveVectorHash> seen;
    for (const auto& ea : a.entries())
        for (int sa = 0; sa < 2; ++sa)
            for (const auto& eb : b.entries())
                for (int sb = 0; sb < 2; ++sb) {
                    const WaveVector mo = (sa ? -ea.m : ea.m) + (sb ? -eb.m : eb.m);
                    if (mo.is_zero()) {
                        if (include_zero) seen.emplace(mo, 1);
                        continue;
                    }
                    seen.emplace(mo.canonical(), 1);
                }
    for (const auto& [m, _] : seen) out.push_back(m);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

RawCoeffMap grid_oracle_advect(const SpectralField& a, const SpectralField& b, int grid_res) {
    const int out_linf = a.support_linf_radius() + b.support_linf_radius();
    if (grid_res <= 2 * out_linf)
        throw std::invalid_argument("grid_oracle_advect: grid_res too small (aliasing)");

    const Grid g{grid_res, 2.0 * std::numbers::pi / grid_res};
    const std::size_t npts = static_cast<std::size_t>(grid_res) * grid_res * grid_res;

    // sample a and grad b, then form (a.grad)b point-wise
    std::vector<Vec3> w(npts);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(npts); ++idx) {
        const int i = static_cast<int>(idx / (static_cast<std::size_t>(grid_res) * grid_res));
        const int j = static_cast<int>((idx / grid_res) % grid_res);
        const int k = static_cast<int>(idx % grid_res);
        const Vec3 x = g.point(i, j, k);

        const Vec3 av = a.eval(x);
        // grad b at x: d_j b_i = sum_m 2 Re( i m_j b_hat_i e^{i<m,x>} )
        double gb[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        for (const auto& e : b.entries()) {
            const double ph = e.m.m1 * x.x + e.m.m2 * x.y + e.m.m3 * x.z;
            const c64 iw = c64{0.0, 1.0} * std::polar(1.0, ph);
            const double mj[3] = {static_cast<double>(e.m.m1), static_cast<double>(e.m.m2),
                                  static_cast<double>(e.m.m3)};
            const c64 bi[3] = {e.a.x, e.a.y, e.a.z};
            for (int ci = 0; ci < 3; ++ci)
                for (int cj = 0; cj < 3; ++cj)
                    gb[cj][ci] += 2.0 * std::real(mj[cj] * bi[ci] * iw);
        }
        w[idx] = {av.x * gb[0][0] + av.y * gb[1][0] + av.z * gb[2][0],
                  av.x * gb[0][1] + av.y * gb[1][1] + av.z * gb[2][1],
                  av.x * gb[0][2] + av.y * gb[1][2] + av.z * gb[2][2]};
    }

    const auto outs = sumset_support(a, b, /*include_zero=*/true);
    std::vector<CVec3> coeffs(outs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t o = 0; o < static_cast<std::int64_t>(outs.size()); ++o) {
        const WaveVector m = outs[o];
        coeffs[o] = {
            dft_at(g, m, [&](int i, int j, int k) {
                return c64{w[(static_cast<std::size_t>(i) * g.res + j) * g.res + k].x, 0.0};
            }),
            dft_at(g, m, [&](int i, int j, int k) {
                return c64{w[(static_cast<std::size_t>(i) * g.res + j) * g.res + k].y, 0.0};
            }),
            dft_at(g, m, [&](int i, int j, int k) {
                return c64{w[(static_cast<std::size_t>(i) * g.res + j) * g.res + k].z, 0.0};
            })};
    }

    RawCoeffMap raw;
    for (std::size_t o = 0; o < outs.size(); ++o) raw[outs[o]] = coeffs[o];
    return raw;
}

RawScalarMap grid_oracle_pressure_source(const SpectralField& u, int grid_res) {
    const int out_linf = 2 * u.support_linf_radius();
    if (grid_res <= 2 * out_linf)
        throw std::invalid_argument("grid_oracle_pressure_source: grid_res too small");

    const Grid g{grid_res, 2.0 * std::numbers::pi / grid_res};
    const std::size_t npts = static_cast<std::size_t>(grid_res) * grid_res * grid_res;

    std::vector<double> s(npts);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(npts); ++idx) {
        const int i = static_cast<int>(idx / (static_cast<std::size_t>(grid_res) * grid_res));
        const int j = static_cast<int>((idx / grid_res) % grid_res);
        const int k = static_cast<int>(idx % grid_res);
        const Vec3 x = g.point(i, j, k);

        double gu[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}; // gu[j][i] = d_j u_i
        for (const auto& e : u.entries()) {
            const double ph = e.m.m1 * x.x + e.m.m2 * x.y + e.m.m3 * x.z;
            const c64 iw = c64{0.0, 1.0} * std::polar(1.0, ph);
            const double mj[3] = {static_cast<double>(e.m.m1), static_cast<double>(e.m.m2),
                                  static_cast<double>(e.m.m3)};
            const c64 ui[3] = {e.a.x, e.a.y, e.a.z};
            for (int ci = 0; ci < 3; ++ci)
                for (int cj = 0; cj < 3; ++cj)
                    gu[cj][ci] += 2.0 * std::real(mj[cj] * ui[ci] * iw);
        }
        double acc = 0.0;
        for (int ci = 0; ci < 3; ++ci)
            for (int cj = 0; cj < 3; ++cj) acc += gu[cj][ci] * gu[ci][cj];
        s[idx] = acc;
    }

    // output support: pairwise sums of u's support
    const auto outs = sumset_support(u, u, /*include_zero=*/false);
    std::vector<c64> coeffs(outs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t o = 0; o < static_cast<std::int64_t>(outs.size()); ++o) {
        coeffs[o] = dft_at(g, outs[o], [&](int i, int j, int k) {
            return c64{s[(static_cast<std::size_t>(i) * g.res + j) * g.res + k], 0.0};
        });
    }
    RawScalarMap raw;
    for (std::size_t o = 0; o < outs.size(); ++o) raw[outs[o]] = coeffs[o];
    return raw;
}

SpectralField curl(const SpectralField& u) {
    std::vector<FieldEntry> entries;
    for (const auto& e : u.entries()) {
        const Vec3 m = to_vec3(e.m);
        const c64 i{0.0, 1.0};
        entries.push_back({e.m, CVec3{i * (m.y * e.a.z - m.z * e.a.y),
                                      i * (m.z * e.a.x - m.x * e.a.z),
                                      i * (m.x * e.a.y - m.y * e.a.x)}});
    }
    // curl of a divergence-free field is divergence-free as well
    return SpectralField::from_entries(std::move(entries));
}

double vorticity_sup(const SpectralField& u, int grid_res) {
    if (u.is_zero()) return 0.0;
    const SpectralField w = curl(u);
    if (w.is_zero()) return 0.0;

    const Grid g{grid_res, 2.0 * std::numbers::pi / grid_res};

    // coarse scan, keeping the best few starting points
    struct Cand {
        double val;
        Vec3 x;
    };
    std::vector<Cand> best;
    const std::size_t keep = 8;
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        std::vector<Cand> local;
#ifdef _OPENMP
#pragma omp for schedule(static) nowait
#endif
        for (std::int64_t i = 0; i < grid_res; ++i)
            for (int j = 0; j < grid_res; ++j)
                for (int k = 0; k < grid_res; ++k) {
                    const Vec3 x = g.point(static_cast<int>(i), j, k);
                    const Vec3 v = w.eval(x);
                    local.push_back({dot(v, v), x});
                    std::push_heap(local.begin(), local.end(),
                                   [](const Cand& a, const Cand& b) { return a.val > b.val; });
                    if (local.size() > keep) {
                        std::pop_heap(local.begin(), local.end(),
                                      [](const Cand& a, const Cand& b) { return a.val > b.val; });
                        local.pop_back();
                    }
                }
#ifdef _OPENMP
#pragma omp critical(vort_candidates)
#endif
        best.insert(best.end(), local.begin(), local.end());
    }
    std::sort(best.begin(), best.end(), [](const Cand& a, const Cand& b) {
        if (a.val != b.val) return a.val > b.val;
        if (a.x.x != b.x.x) return a.x.x < b.x.x;
        if (a.x.y != b.x.y) return a.x.y < b.x.y;
        return a.x.z < b.x.z;
    });
    if (best.size() > keep) best.resize(keep);

    // gradient-ascent polish of |rot u|^2 from each candidate
    auto value_grad = [&](const Vec3& x, Vec3& grad) {
        const Vec3 v = w.eval(x);
        Vec3 dvx{0, 0, 0}, dvy{0, 0, 0}, dvz{0, 0, 0};
        for (const auto& e : w.entries()) {
            const double ph = e.m.m1 * x.x + e.m.m2 * x.y + e.m.m3 * x.z;
            const c64 iw = c64{0.0, 1.0} * std::polar(1.0, ph);
            const Vec3 d{2.0 * std::real(e.a.x * iw), 2.0 * std::real(e.a.y * iw),
                         2.0 * std::real(e.a.z * iw)};
            dvx = dvx + d * static_cast<double>(e.m.m1);
            dvy = dvy + d * static_cast<double>(e.m.m2);
            dvz = dvz + d * static_cast<double>(e.m.m3);
        }
        grad = {2.0 * dot(v, dvx), 2.0 * dot(v, dvy), 2.0 * dot(v, dvz)};
        return dot(v, v);
    };

    double sup2 = 0.0;
    for (const Cand& c : best) {
        Vec3 x = c.x;
        Vec3 grad;
        double f = value_grad(x, grad);
        double step = g.h;
        for (int it = 0; it < 80; ++it) {
            const double gn = norm(grad);
            if (gn < 1e-13 * std::max(f, 1e-300)) break;
            const Vec3 trial = x + grad * (step / gn);
            Vec3 tg;
            const double tf = value_grad(trial, tg);
            if (tf > f) {
                x = trial;
                f = tf;
                grad = tg;
                step *= 1.3;
            } else {
                step *= 0.5;
                if (step < 1e-14) break;
            }
        }
        sup2 = std::max(sup2, f);
    }
    return std::sqrt(sup2);
}

} // namespace eulerctl
