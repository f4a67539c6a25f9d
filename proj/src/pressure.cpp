#include "eulerctl/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eulerctl/bilinear.hpp"
#include "eulerctl/rng.hpp"

namespace eulerctl {

ScalarSpectralField quadratic_form_a(const SpectralField& u, const SpectralField& v, int m) {
    // sum_ij d_j u_i d_i v_j at ma + mb is -<u_hat(ma), mb> <v_hat(mb), ma>;
    // accumulate both operand orders so exact symmetry holds coefficientwise
    RawScalarMap acc;
    auto accumulate = [&acc, m](const SpectralField& a, const SpectralField& b) {
        for (const auto& ea : a.entries())
            for (int sa = 0; sa < 2; ++sa) {
                const WaveVector ma = sa ? -ea.m : ea.m;
                const CVec3 ca = sa ? conj(ea.a) : ea.a;
                for (const auto& eb : b.entries())
                    for (int sb = 0; sb < 2; ++sb) {
                        const WaveVector mb = sb ? -eb.m : eb.m;
                        const WaveVector r = ma + mb;
                        if (r.is_zero() || r.l1() > m) continue;
                        const CVec3 cb = sb ? conj(eb.a) : eb.a;
                        acc[r] += 0.5 * dot_c(ca, mb) * dot_c(cb, ma);
                    }
            }
    };
    accumulate(u, v);
    accumulate(v, u);

    // the accumulated pairing is -S_hat (S = sum_ij d_j u_i d_i v_j), so
    // A = -inverse_laplacian(S) has coefficients -acc / |r|^2
    RawScalarMap out;
    double scale = 0.0;
    for (const auto& [r, c] : acc) scale = std::max(scale, std::abs(c));
    for (const auto& [r, c] : acc) {
        const c64 val = -c / static_cast<double>(r.l2sq());
        if (std::abs(val) > kCoeffDropTol * scale) out[r] = val;
    }
    return ScalarSpectralField::from_raw(out);
}

PressureTarget make_pressure_target(int m, const SpectralField& u_hat,
                                    const ScalarSpectralField& p_hat) {
    if (u_hat.support_l1_radius() > m)
        throw std::invalid_argument("make_pressure_target: u_hat not supported in F_m");
    for (const auto& e : p_hat.entries())
        if (e.m.l1() > m)
            throw std::invalid_argument("make_pressure_target: p_hat not supported in G_m");

    PressureTarget t;
    t.m = m;
    t.u_hat = u_hat;
    t.p_hat = p_hat;
    const ScalarSpectralField g = p_hat - quadratic_form_a(u_hat, m);
    for (const WaveVector& n : canonical_l1_ball(m)) {
        const c64* c = g.find(n);
        const double re = c ? c->real() : 0.0;
        const double im = c ? c->imag() : 0.0;
        // g(x) = sum 2 Re(g_hat e^{i<n,x>}) = 2 Re g_hat cos - 2 Im g_hat sin
        t.targets.push_back({n, -2.0 * im, 2.0 * re});
    }
    return t;
}

//------------------------------------------------------------------------------

void validate_quadruples(const std::vector<WaveQuadruple>& family, int m) {
    struct Tagged {
        WaveVector k;
        std::size_t quad;
        int pos; // 1..4
    };
    std::vector<Tagged> all;
    for (std::size_t q = 0; q < family.size(); ++q) {
        const auto& w = family[q];
        if (w.n.l1() > m || w.n.is_zero())
            throw std::logic_error("quadruple: target wavevector outside 0 < |n| <= m");
        if (w.k2 - w.k1 != w.n || w.k4 - w.k3 != w.n)
            throw std::logic_error("quadruple: condition (a) violated (k2-k1 = k4-k3 = n)");
        for (const WaveVector& k : {w.k1, w.k2, w.k3, w.k4}) {
            if (k.l1() <= 2 * m) throw std::logic_error("quadruple: |k| > 2m violated");
            if (!k.is_canonical())
                throw std::logic_error("quadruple: wavevectors must be canonical");
        }
        if (parallel(w.k1, w.k2) || parallel(w.k3, w.k4))
            throw std::logic_error("quadruple: condition (c) violated (parallel pair)");
        all.push_back({w.k1, q, 1});
        all.push_back({w.k2, q, 2});
        all.push_back({w.k3, q, 3});
        all.push_back({w.k4, q, 4});
    }

    // condition (b), inclusive reading: every pairwise sum and difference in
    // the whole family stays outside the |.| <= m ball, except the designed
    // differences k2 - k1 and k4 - k3 (which must equal n exactly)
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const auto& x = all[i];
            const auto& y = all[j];
            if ((x.k + y.k).l1() <= m)
                throw std::logic_error("quadruple: condition (b) violated (sum inside ball)");
            const bool designed = x.quad == y.quad &&
                                  ((x.pos == 1 && y.pos == 2) || (x.pos == 2 && y.pos == 1) ||
                                   (x.pos == 3 && y.pos == 4) || (x.pos == 4 && y.pos == 3));
            if (!designed && (x.k - y.k).l1() <= m)
                throw std::logic_error("quadruple: condition (b) violated (difference inside ball)");
        }
}

namespace {

WaveVector direction_m_of(const WaveVector& n, int m) {
    // simplest deterministic choice not parallel to n with |m(n)| = m
    return parallel(n, WaveVector{1, 0, 0}) ? WaveVector{0, m, 0} : WaveVector{m, 0, 0};
}

} // namespace

WaveQuadruple paper_formula_quadruple(const WaveVector& n, std::uint64_t phi,
                                      const WaveVector& m_of_n) {
    WaveQuadruple q;
    q.n = n;
    q.phi = phi;
    q.m_of_n = m_of_n;
    const int f = static_cast<int>(8 * phi);
    q.k1 = m_of_n * f;
    q.k2 = q.k1 + n;
    q.k3 = m_of_n * (f + 4);
    q.k4 = q.k3 + n;
    return q;
}

namespace {

std::vector<WaveQuadruple> paper_family(int m) {
    std::vector<WaveQuadruple> family;
    for (const WaveVector& n : canonical_l1_ball(m))
        family.push_back(paper_formula_quadruple(n, lattice_rank(n), direction_m_of(n, m)));
    return family;
}

// exhaustive joint search for the smallest-norm family passing the validator
std::vector<WaveQuadruple> minimal_family(int m) {
    // candidate (k1, k2 = k1 + n) pairs per n, ordered by cost
    struct Cand {
        WaveVector k1, k2;
        int cost;
    };
    auto candidates_for = [m](const WaveVector& n, int bound) {
        std::vector<Cand> out;
        for (int i = -bound; i <= bound; ++i)
            for (int j = -bound; j <= bound; ++j)
                for (int k = -bound; k <= bound; ++k) {
                    const WaveVector k1{i, j, k};
                    if (k1.l1() <= 2 * m || k1.l1() > bound) continue;
                    if (!k1.is_canonical()) continue;
                    const WaveVector k2 = k1 + n;
                    if (k2.l1() <= 2 * m || !k2.is_canonical()) continue;
                    if (parallel(k1, k2)) continue;
                    out.push_back({k1, k2, std::max(k1.l1(), k2.l1())});
                }
        std::stable_sort(out.begin(), out.end(), [](const Cand& a, const Cand& b) {
            if (a.cost != b.cost) return a.cost < b.cost;
            if (a.k1 != b.k1) return a.k1 < b.k1;
            return a.k2 < b.k2;
        });
        return out;
    };

    for (int bound = 2 * m + 2; bound <= 16 * (m + 1); bound += m + 1) {
        std::vector<WaveQuadruple> family;
        bool ok = true;
        for (const WaveVector& n : canonical_l1_ball(m)) {
            const auto cands = candidates_for(n, bound);
            bool placed = false;
            // greedy: first (k1,k2) x (k3,k4) candidate pair that validates
            // against everything accepted so far
            for (std::size_t a = 0; a < cands.size() && !placed; ++a)
                for (std::size_t b = 0; b < cands.size() && !placed; ++b) {
                    if (a == b) continue;
                    WaveQuadruple q;
                    q.n = n;
                    q.phi = lattice_rank(n);
                    q.m_of_n = WaveVector{0, 0, 0};
                    q.k1 = cands[a].k1;
                    q.k2 = cands[a].k2;
                    q.k3 = cands[b].k1;
                    q.k4 = cands[b].k2;
                    std::vector<WaveQuadruple> trial = family;
                    trial.push_back(q);
                    try {
                        validate_quadruples(trial, m);
                    } catch (const std::logic_error&) {
                        continue;
                    }
                    family = std::move(trial);
                    placed = true;
                }
            if (!placed) {
                ok = false;
                break;
            }
        }
        if (ok) return family;
    }
    throw std::logic_error("minimal_family: search bound exhausted");
}

} // namespace

std::vector<WaveQuadruple> quadruple_family(int m, QuadrupleStrategy strategy) {
    std::vector<WaveQuadruple> family =
        strategy == QuadrupleStrategy::paper_formula ? paper_family(m) : minimal_family(m);
    validate_quadruples(family, m); // hard error on construction bugs
    return family;
}

WaveQuadruple select_wavevectors(const WaveVector& n, int m, QuadrupleStrategy strategy) {
    if (n.is_zero() || n.l1() > m)
        throw std::invalid_argument("select_wavevectors: need 0 < |n| <= m");
    const auto family = quadruple_family(m, strategy);
    for (const auto& q : family)
        if (q.n == n.canonical()) return q;
    throw std::logic_error("select_wavevectors: family misses a target");
}

//------------------------------------------------------------------------------

namespace {

// unit polarization of k maximizing |<l, k_other>|: the normalized projection
// of k_other onto the k-perp plane.  Nonzero whenever the pair is
// non-parallel, so the coefficient solve never degenerates.
Vec3 steering_polarization(const WaveVector& k, const WaveVector& k_other) {
    const Vec3 kv = to_vec3(k);
    const Vec3 ov = to_vec3(k_other);
    const Vec3 proj = ov - kv * (dot(kv, ov) / dot(kv, kv));
    const double n = norm(proj);
    if (n < 1e-12)
        throw std::logic_error("steering_polarization: degenerate (parallel) pair");
    return proj * (1.0 / n);
}

SpectralField trig_mode(const WaveVector& k, const Vec3& l, Phase ph, double amplitude) {
    // amplitude * l * cos<k,x> (or sin); coefficient convention of (3.4)
    const c64 phase = ph == Phase::cos ? c64{0.5, 0.0} : c64{0.0, -0.5};
    return SpectralField::from_entries({{k, CVec3(l) * (phase * amplitude)}});
}

} // namespace

SpectralField pressure_lift(const PressureTarget& target,
                            const std::vector<WaveQuadruple>& quads) {
    const int m = target.m;
    SpectralField v;
    for (const auto& coef : target.targets) {
        const WaveQuadruple q = [&] {
            for (const auto& w : quads)
                if (w.n == coef.n) return w;
            throw std::invalid_argument("pressure_lift: no quadruple for a target wavevector");
        }();

        // block 1 realizes C_n sin<n,x> from the (s_{k1}, c_{k2}) cross term
        if (coef.c_sin != 0.0) {
            const Vec3 l1 = steering_polarization(q.k1, q.k2);
            const Vec3 l2 = steering_polarization(q.k2, q.k1);
            const auto s1 = trig_mode(q.k1, l1, Phase::sin, 1.0);
            const auto c2 = trig_mode(q.k2, l2, Phase::cos, 1.0);
            const ScalarSpectralField cross = quadratic_form_a(s1, c2, m) * 2.0;
            const c64* cn = cross.find(coef.n);
            if (cn == nullptr || std::abs(cn->imag()) < 1e-300)
                throw std::logic_error("pressure_lift: block 1 produced no sin component");
            const double gamma = -2.0 * cn->imag(); // sin coefficient per unit C*D
            if (std::abs(cn->real()) > 1e-12 * std::abs(cn->imag()))
                throw std::logic_error("pressure_lift: block 1 leaked a cos component");
            const double r = coef.c_sin / gamma;
            const double c = std::sqrt(std::abs(r));
            const double d = r >= 0.0 ? c : -c;
            v = v + s1 * c + c2 * d;
        }

        // block 2 realizes D_n cos<n,x> from the (s_{k3}, s_{k4}) cross term
        if (coef.d_cos != 0.0) {
            const Vec3 l3 = steering_polarization(q.k3, q.k4);
            const Vec3 l4 = steering_polarization(q.k4, q.k3);
            const auto s3 = trig_mode(q.k3, l3, Phase::sin, 1.0);
            const auto s4 = trig_mode(q.k4, l4, Phase::sin, 1.0);
            const ScalarSpectralField cross = quadratic_form_a(s3, s4, m) * 2.0;
            const c64* dn = cross.find(coef.n);
            if (dn == nullptr || std::abs(dn->real()) < 1e-300)
                throw std::logic_error("pressure_lift: block 2 produced no cos component");
            const double gamma = 2.0 * dn->real(); // cos coefficient per unit C*C'
            if (std::abs(dn->imag()) > 1e-12 * std::abs(dn->real()))
                throw std::logic_error("pressure_lift: block 2 leaked a sin component");
            const double r = coef.d_cos / gamma;
            const double c = std::sqrt(std::abs(r));
            const double d = r >= 0.0 ? c : -c;
            v = v + s3 * c + s4 * d;
        }
    }

    // lift orthogonality: supports are disjoint from F_m by |k| > 2m
    for (const auto& e : v.entries())
        if (e.m.l1() <= m) throw std::logic_error("pressure_lift: lift leaked into F_m");
    return v;
}

//------------------------------------------------------------------------------

SteerResult steer_velocity_pressure(const SpectralField& u0, const SpectralField& u_hat,
                                    const ScalarSpectralField& p_hat, int m, double horizon,
                                    const ControlSignal& h, const ModeSubspace& e,
                                    const SynthesisParams& params, const GalerkinConfig& cfg,
                                    QuadrupleStrategy strategy) {
    const PressureTarget target = make_pressure_target(m, u_hat, p_hat);
    const auto quads = quadruple_family(m, strategy);

    SteerResult out;
    out.lift = pressure_lift(target, quads);
    const SpectralField combined = u_hat + out.lift;
    out.required_cutoff = std::max(combined.support_l1_radius(), u0.support_l1_radius());
    if (out.required_cutoff > cfg.cutoff)
        throw std::invalid_argument(
            "steer_velocity_pressure: lift wavevectors exceed the cutoff budget (need l1 radius " +
            std::to_string(out.required_cutoff) + ")");

    SynthesisResult synth = synthesize(u0, combined, horizon, h, e, params, cfg);
    out.synth_report = synth.report;
    out.control = std::move(synth.control);

    GalerkinConfig rcfg = cfg;
    rcfg.store_stride = 0;
    const Trajectory traj = resolve_controlled(u0, out.control, h, rcfg);
    out.final_velocity = traj.final_state();
    out.final_pressure = pressure_recover(out.final_velocity, h.eval(horizon));

    const double k = cfg.sobolev_k;
    out.velocity_error = sobolev_norm(out.final_velocity - combined, k);
    out.velocity_proj_error = sobolev_norm(out.final_velocity.truncated_l1(m) - u_hat, k);
    out.pressure_proj_error = sobolev_norm(out.final_pressure.truncated_l1(m) - p_hat, k);

    // empirical local Lipschitz constant of u -> P_G A(u) around the endpoint
    {
        const ScalarSpectralField a_end = quadratic_form_a(out.final_velocity, m);
        const ScalarSpectralField a_tgt = quadratic_form_a(combined, m);
        const double gap = sobolev_norm(out.final_velocity - combined, k);
        if (gap > 0.0) out.c_emp = sobolev_norm(a_end - a_tgt, k) / gap;
        Rng rng(8128);
        const double scale = std::max(gap, 1e-9);
        for (int probe = 0; probe < 8; ++probe) {
            SpectralField w;
            for (const auto& en : combined.entries()) {
                CVec3 g{c64{rng.normal(), rng.normal()}, c64{rng.normal(), rng.normal()},
                        c64{rng.normal(), rng.normal()}};
                RawCoeffMap raw;
                raw[en.m] = g;
                w = w + leray_project(raw);
            }
            const double wn = sobolev_norm(w, k);
            if (wn == 0.0) continue;
            w = w * (scale / wn);
            const double ratio =
                sobolev_norm(quadratic_form_a(combined + w, m) - a_tgt, k) / scale;
            out.c_emp = std::max(out.c_emp, ratio);
        }
    }
    return out;
}

} // namespace eulerctl
