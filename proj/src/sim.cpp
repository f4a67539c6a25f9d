#include "eulerctl/sim.hpp"

#include <algorithm>
#include <cmath>

namespace eulerctl {

namespace {

// dense working state over an explicit support list
struct DenseLayout {
    std::vector<WaveVector> support; // cutoff ball first, control-only modes after
    std::size_t ball_size = 0;
    LatticeBox box;
    std::vector<std::int32_t> index_of; // box -> support slot

    explicit DenseLayout(int cutoff, const std::vector<ControlSignal const*>& signals) {
        support = canonical_l1_ball(cutoff);
        ball_size = support.size();
        int radius = cutoff;
        for (const auto* sig : signals) radius = std::max(radius, sig->support_l1_radius());
        box = LatticeBox(radius);
        index_of.assign(box.size(), -1);
        for (std::size_t i = 0; i < support.size(); ++i)
            index_of[box.index(support[i])] = static_cast<std::int32_t>(i);
        // control values may live outside the state ball; B sees them exactly
        for (const auto* sig : signals)
            for (const auto& f : sig->value_generators())
                for (const auto& e : f.entries())
                    if (index_of[box.index(e.m)] < 0) {
                        index_of[box.index(e.m)] = static_cast<std::int32_t>(support.size());
                        support.push_back(e.m);
                    }
    }

    int slot(const WaveVector& m) const {
        if (!box.contains(m)) return -1;
        return index_of[box.index(m)];
    }

    void scatter(const SpectralField& f, std::vector<CVec3>& dense, bool ball_only) const {
        for (const auto& e : f.entries()) {
            const int s = slot(e.m);
            if (s < 0) continue;
            if (ball_only && static_cast<std::size_t>(s) >= ball_size) continue;
            dense[s] += e.a;
        }
    }
};

double norm_k_dense(const std::vector<CVec3>& u, const std::vector<WaveVector>& sup,
                    std::size_t n, double k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = k == 0.0 ? 1.0 : std::pow(static_cast<double>(sup[i].l2sq()), k);
        acc += 2.0 * w * abs2(u[i]);
    }
    return std::sqrt(acc);
}

} // namespace

Trajectory resolve(const SpectralField& u0, const ControlSignal& zeta, const ControlSignal& f,
                   const GalerkinConfig& cfg) {
    cfg.validate();
    if (std::abs(zeta.horizon() - f.horizon()) > 1e-12 * f.horizon())
        throw std::invalid_argument("resolve: zeta and f horizons differ");
    const double T = f.horizon();
    if (u0.support_l1_radius() > cfg.cutoff)
        throw std::invalid_argument("resolve: u0 not supported in the cutoff ball");

    DenseLayout lay(cfg.cutoff, {&zeta, &f});
    const std::size_t n = lay.support.size();
    const std::size_t nb = lay.ball_size;

    // plan over the extended support; outputs restricted to the ball
    ConvPlan plan(lay.support, lay.support, cfg.cutoff);
    // map plan output slots back into state slots
    std::vector<std::int32_t> out_slot(plan.support_out().size());
    for (std::size_t i = 0; i < out_slot.size(); ++i)
        out_slot[i] = static_cast<std::int32_t>(lay.slot(plan.support_out()[i]));

    std::vector<CVec3> u(n), bout(plan.support_out().size()), fbuf(nb), k1(nb), k2(nb), k3(nb),
        k4(nb), stage(n), tmp(n);
    lay.scatter(u0, u, /*ball_only=*/true);

    const double init_norm = sobolev_norm(u0, cfg.sobolev_k);
    const double ceiling = cfg.guard_factor * std::max(init_norm, 1.0);

    Trajectory traj;
    traj.cfg = cfg;

    auto record_divergence = [&](double& worst) {
        for (std::size_t i = 0; i < nb; ++i) {
            const double mag = cnorm(u[i]);
            if (mag < 1e-300) continue;
            worst = std::max(worst,
                             std::abs(dot_c(u[i], lay.support[i])) / (mag * lay.support[i].l2()));
        }
    };

    auto store = [&](double t) {
        std::vector<FieldEntry> entries;
        for (std::size_t i = 0; i < nb; ++i)
            if (cnorm(u[i]) > 0.0) entries.push_back({lay.support[i], u[i]});
        traj.times.push_back(t);
        traj.states.push_back(SpectralField::from_entries(std::move(entries)).cleaned());
    };

    // derivative at (t, state) within fixed segments of zeta and f
    auto deriv = [&](std::size_t zseg, std::size_t fseg, double t,
                     const std::vector<CVec3>& state, std::vector<CVec3>& out) {
        std::fill(stage.begin(), stage.end(), CVec3{});
        for (std::size_t i = 0; i < nb; ++i) stage[i] = state[i];
        lay.scatter(zeta.eval_in_segment(zseg, t), stage, /*ball_only=*/false);
        plan.apply(stage.data(), stage.data(), bout.data());

        std::fill(fbuf.begin(), fbuf.end(), CVec3{});
        lay.scatter(f.eval_in_segment(fseg, t), fbuf, /*ball_only=*/true);

        std::fill(out.begin(), out.end(), CVec3{});
        for (std::size_t i = 0; i < bout.size(); ++i) {
            const std::int32_t s = out_slot[i];
            if (s >= 0 && static_cast<std::size_t>(s) < nb) out[s] = -bout[i];
        }
        for (std::size_t i = 0; i < nb; ++i) out[i] += fbuf[i];
    };

    store(0.0);

    // merged breakpoint walk
    std::vector<double> cuts;
    for (double b : zeta.breakpoints()) cuts.push_back(b);
    for (double b : f.breakpoints()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [T](double a, double b) { return b - a < 1e-14 * T; }),
               cuts.end());

    std::size_t zseg = 0, fseg = 0;
    long step_counter = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double t0 = cuts[c], t1 = cuts[c + 1];
        const double mid = 0.5 * (t0 + t1);
        while (zseg + 1 < zeta.segments().size() && zeta.segments()[zseg].t1 <= mid) ++zseg;
        while (fseg + 1 < f.segments().size() && f.segments()[fseg].t1 <= mid) ++fseg;

        const long nsteps =
            std::max<long>(1, static_cast<long>(std::ceil((t1 - t0) / cfg.dt - 1e-9)));
        const double h = (t1 - t0) / static_cast<double>(nsteps);
        for (long s = 0; s < nsteps; ++s) {
            const double t = t0 + h * static_cast<double>(s);

            deriv(zseg, fseg, t, u, k1);
            for (std::size_t i = 0; i < nb; ++i) tmp[i] = u[i] + k1[i] * (0.5 * h);
            deriv(zseg, fseg, t + 0.5 * h, tmp, k2);
            for (std::size_t i = 0; i < nb; ++i) tmp[i] = u[i] + k2[i] * (0.5 * h);
            deriv(zseg, fseg, t + 0.5 * h, tmp, k3);
            for (std::size_t i = 0; i < nb; ++i) tmp[i] = u[i] + k3[i] * h;
            deriv(zseg, fseg, t + h, tmp, k4);
            for (std::size_t i = 0; i < nb; ++i)
                u[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);

            record_divergence(traj.max_divergence);
            const double nk = norm_k_dense(u, lay.support, nb, cfg.sobolev_k);
            if (nk > ceiling) throw BlowupError(t + h, nk, ceiling);

            ++step_counter;
            const bool last = (c + 2 == cuts.size()) && (s + 1 == nsteps);
            if (!last && cfg.store_stride > 0 && step_counter % cfg.store_stride == 0)
                store(t + h);
        }
    }
    store(T);
    return traj;
}

Trajectory resolve_controlled(const SpectralField& u0, const ControlSignal& eta,
                              const ControlSignal& h, const GalerkinConfig& cfg) {
    return resolve(u0, ControlSignal::zero(eta.horizon()), h + eta, cfg);
}

ScalarSpectralField pressure_recover(const SpectralField& u, const SpectralField& h) {
    RawScalarMap acc;
    // div h (identically zero for the divergence-free type; kept for fidelity)
    for (const auto& e : h.entries()) acc[e.m] += c64{0.0, 1.0} * dot_c(e.a, e.m);

    // sum_ij d_j u_i d_i u_j as a Fourier convolution, subtracted
    const auto& ent = u.entries();
    for (const auto& ea : ent)
        for (int sa = 0; sa < 2; ++sa) {
            const WaveVector ma = sa ? -ea.m : ea.m;
            const CVec3 ca = sa ? conj(ea.a) : ea.a;
            for (const auto& eb : ent)
                for (int sb = 0; sb < 2; ++sb) {
                    const WaveVector mb = sb ? -eb.m : eb.m;
                    const WaveVector m = ma + mb;
                    if (m.is_zero()) continue;
                    const CVec3 cb = sb ? conj(eb.a) : eb.a;
                    // (i ma_j ca_i)(i mb_i cb_j) summed over i,j
                    acc[m] -= -dot_c(ca, mb) * dot_c(cb, ma);
                }
        }
    return inverse_laplacian(ScalarSpectralField::from_raw(acc)).cleaned();
}

const SpectralField& Trajectory::state_near(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end()) return states.back();
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i > 0 && t - times[i - 1] < times[i] - t) --i;
    return states[i];
}

LipschitzReport lipschitz_probe(const SpectralField& u0, const SpectralField& du0,
                                const ControlSignal& zeta, const ControlSignal& f,
                                const GalerkinConfig& cfg, const std::vector<double>& scales) {
    const double km1 = std::max(cfg.sobolev_k - 1.0, 0.0);
    const Trajectory base = resolve(u0, zeta, f, cfg);

    LipschitzReport rep;
    rep.scales = scales;
    const double dn = sobolev_norm(du0, km1);
    for (double s : scales) {
        if (dn == 0.0 || s == 0.0) {
            rep.ratios.push_back(0.0);
            continue;
        }
        const Trajectory pert = resolve(u0 + du0 * s, zeta, f, cfg);
        double sup = 0.0;
        for (std::size_t i = 0; i < base.states.size(); ++i)
            sup = std::max(sup, sobolev_norm(pert.states[i] - base.states[i], km1));
        rep.ratios.push_back(sup / (s * dn));
    }

    for (std::size_t i = 0; i + 1 < base.states.size(); ++i) {
        const double dt = base.times[i + 1] - base.times[i];
        if (dt <= 0.0) continue;
        rep.time_ratio_max =
            std::max(rep.time_ratio_max,
                     sobolev_norm(base.states[i + 1] - base.states[i], km1) / dt);
    }
    for (std::size_t i = 0; i < base.states.size(); ++i) {
        const double t = base.times[i];
        const SpectralField rhs =
            f.eval(t).truncated_l1(cfg.cutoff) -
            bilinear_b(base.states[i] + zeta.eval(t)).truncated_l1(cfg.cutoff);
        rep.rhs_sup = std::max(rep.rhs_sup, sobolev_norm(rhs, km1));
    }
    return rep;
}

} // namespace eulerctl
