#include "eulerctl/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "eulerctl/bilinear.hpp"

namespace eulerctl {

//------------------------------------------------------------------------------

AnsatzResult ansatz_control(const SpectralField& u0, const SpectralField& u_hat, double mu,
                            double delta, double horizon, const ControlSignal& h,
                            const GalerkinConfig& cfg) {
    if (mu <= 0.0 || delta <= 0.0)
        throw std::invalid_argument("ansatz_control: mu and delta must be positive");
    const double T = horizon;

    AnsatzResult a;
    a.start = u0.heat(delta);
    a.end = u_hat.heat(mu);
    const SpectralField w = a.end - a.start; // q - p

    // u(t) = p + (t/T) w;  eta = u' + B(u) - h expanded in powers of t
    a.c0 = w * (1.0 / T) + bilinear_b(a.start);
    a.c1 = bilinear_b_sym(a.start, w) * (1.0 / T);
    a.c2 = bilinear_b(w) * (1.0 / (T * T));
    a.eta = ControlSignal::polynomial({a.c0, a.c1, a.c2}, T) + h.scaled(-1.0);

    a.path.cfg = cfg;
    const long steps = std::max<long>(1, static_cast<long>(std::llround(T / cfg.dt)));
    const long stride = std::max<long>(1, cfg.store_stride);
    for (long i = 0; i <= steps; i += stride) {
        const double t = T * static_cast<double>(i) / static_cast<double>(steps);
        a.path.times.push_back(t);
        a.path.states.push_back(a.start + w * (t / T));
    }
    if (a.path.times.back() != T) {
        a.path.times.push_back(T);
        a.path.states.push_back(a.end);
    }
    return a;
}

//------------------------------------------------------------------------------

SpectralField PiecewiseConstantControl::reconstruct_at(int r) const {
    SpectralField acc;
    for (std::size_t l = 0; l < vertices.size(); ++l)
        acc = acc + vertices[l] * coefficients(l, r);
    return acc;
}

ControlSignal PiecewiseConstantControl::as_signal() const {
    std::vector<double> breaks;
    std::vector<FieldPtr> values;
    for (int r = 0; r < grid_count; ++r) {
        breaks.push_back(horizon * r / grid_count);
        values.push_back(share(reconstruct_at(r)));
    }
    breaks.push_back(horizon);
    return ControlSignal::piecewise_constant(breaks, values, horizon);
}

PiecewiseConstantControl pwc_approximate(const ControlSignal& eta,
                                         const std::vector<SpectralField>& basis, int s) {
    if (basis.empty()) throw std::invalid_argument("pwc_approximate: zero subspace rejected");
    if (s < 1) throw std::invalid_argument("pwc_approximate: grid count must be >= 1");
    const double T = eta.horizon();
    const int d = static_cast<int>(basis.size());

    // coordinate functions xi_l(t) = <eta(t), e_l>; the sample grid contains
    // every t_r, so sampled weights are guaranteed nonnegative
    const int oversample = 64;
    const int nsamp = oversample * s;
    Mat xi(static_cast<std::size_t>(d), static_cast<std::size_t>(nsamp) + 1);
    std::vector<double> axis_m(d, 0.0);
    for (int j = 0; j <= nsamp; ++j) {
        const SpectralField v = eta.eval(T * j / nsamp);
        for (int l = 0; l < d; ++l) {
            xi(l, j) = inner_k(v, basis[l], 0.0);
            axis_m[l] = std::max(axis_m[l], std::abs(xi(l, j)));
        }
    }

    // per-axis vertex scaling: axes with small coordinate ranges get small
    // vertices, which keeps the convexified relaxation shifts (and hence the
    // defect) proportionate instead of inflated by the largest axis
    PiecewiseConstantControl out;
    out.basis = basis;
    out.axis_m = axis_m;
    out.big_m = *std::max_element(axis_m.begin(), axis_m.end());
    out.grid_count = s;
    out.horizon = T;
    for (int l = 0; l < d; ++l) out.vertices.push_back(basis[l] * (d * axis_m[l]));
    for (int l = 0; l < d; ++l) out.vertices.push_back(basis[l] * (-d * axis_m[l]));

    out.coefficients = Mat(static_cast<std::size_t>(2 * d), static_cast<std::size_t>(s));
    for (int r = 0; r < s; ++r) {
        const int j = r * oversample; // sample index of t_r
        for (int l = 0; l < d; ++l) {
            const double ratio = axis_m[l] > 0.0 ? xi(l, j) / axis_m[l] : 0.0;
            out.coefficients(l, r) = (1.0 + ratio) / (2.0 * d);
            out.coefficients(l + d, r) = (1.0 - ratio) / (2.0 * d);
        }
    }
    return out;
}

double pwc_metric(const PiecewiseConstantControl& a, const PiecewiseConstantControl& b) {
    if (a.vertices.size() != b.vertices.size() || a.grid_count != b.grid_count)
        throw std::invalid_argument("pwc_metric: controls live in different P_s spaces");
    double acc = 0.0;
    for (std::size_t l = 0; l < a.vertices.size(); ++l) {
        double sup = 0.0;
        for (int r = 0; r < a.grid_count; ++r)
            sup = std::max(sup, std::abs(a.coefficients(l, r) - b.coefficients(l, r)));
        acc += sup;
    }
    return acc;
}

//------------------------------------------------------------------------------

ConvexifiedForce convexify(const SaturationCertificate& cert) {
    ConvexifiedForce form;
    form.eta = cert.eta;
    const std::size_t n = cert.terms.size();
    if (n == 0) return form; // eta1 in E: degenerate p = 0 form

    double alpha = 0.0;
    for (const auto& [a, z] : cert.terms) {
        if (a <= 0.0) throw std::invalid_argument("convexify: certificate alphas must be positive");
        alpha += a;
    }
    const double root = std::sqrt(alpha);
    form.lambdas.reserve(2 * n);
    form.zetas.reserve(2 * n);
    for (const auto& [a, z] : cert.terms) {
        form.lambdas.push_back(a / (2.0 * alpha));
        form.zetas.push_back(share(*z * root));
    }
    for (const auto& [a, z] : cert.terms) {
        form.lambdas.push_back(a / (2.0 * alpha));
        form.zetas.push_back(share(*z * -root));
    }
    return form;
}

double convexify_identity_residual(const ConvexifiedForce& form, const SpectralField& eta1,
                                   const SpectralField& u) {
    SpectralField lhs = bilinear_b(u) - eta1;
    SpectralField rhs = form.eta * -1.0;
    if (form.lambdas.empty()) {
        rhs = rhs + bilinear_b(u);
    } else {
        for (std::size_t j = 0; j < form.lambdas.size(); ++j)
            rhs = rhs + bilinear_b(u + *form.zetas[j]) * form.lambdas[j];
    }
    return sobolev_norm(lhs - rhs, 0.0);
}

//------------------------------------------------------------------------------

ControlSignal relaxation_control(const IntervalSchedule& schedule, int n, double horizon,
                                 double drop_weight, IntervalSchedule* effective_out) {
    if (n < 1) throw std::invalid_argument("relaxation_control: n must be >= 1");
    const int s = static_cast<int>(schedule.size());
    if (s < 1) throw std::invalid_argument("relaxation_control: empty schedule");

    IntervalSchedule effective(schedule.size());
    for (int r = 0; r < s; ++r) {
        double total = 0.0;
        for (const auto& slot : schedule[r]) total += slot.weight;
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("relaxation_control: interval weights must sum to 1");
        double kept = 0.0;
        for (const auto& slot : schedule[r])
            if (slot.weight >= drop_weight) kept += slot.weight;
        if (kept <= 0.0)
            throw std::invalid_argument("relaxation_control: drop_weight removed every slot");
        for (const auto& slot : schedule[r])
            if (slot.weight >= drop_weight)
                effective[r].push_back({slot.weight / kept, slot.zeta});
    }

    std::vector<SignalSegment> segs;
    for (int r = 0; r < s; ++r) {
        const double t0 = horizon * r / s;
        const double t1 = horizon * (r + 1) / s;
        const double period = (t1 - t0) / n;
        double cursor = t0;
        for (int c = 0; c < n; ++c) {
            for (std::size_t i = 0; i < effective[r].size(); ++i) {
                const auto& slot = effective[r][i];
                double end = cursor + slot.weight * period;
                // pin period and interval boundaries exactly
                if (i + 1 == effective[r].size())
                    end = c + 1 == n ? t1 : t0 + (t1 - t0) * (c + 1) / n;
                SignalSegment seg{cursor, end, {}};
                if (slot.zeta && !slot.zeta->is_zero())
                    seg.terms.push_back({TimeShape::constant, slot.zeta, 1.0, 0, 0});
                segs.push_back(std::move(seg));
                cursor = end;
            }
        }
    }
    if (effective_out) *effective_out = std::move(effective);
    return ControlSignal(horizon, std::move(segs));
}

namespace {

int interval_of(double t, int s, double horizon) {
    int r = static_cast<int>(std::floor(t * s / horizon));
    return std::min(std::max(r, 0), s - 1);
}

// the single constant field a relaxation segment holds (null for zeta = 0)
const SpectralField* segment_zeta(const SignalSegment& seg) {
    for (const auto& term : seg.terms) {
        if (term.shape != TimeShape::constant)
            throw std::invalid_argument("relaxation defect: zeta_n must be piecewise constant");
        if (term.field && !term.field->is_zero() && term.scale != 0.0) return term.field.get();
    }
    return nullptr;
}

// B(u + zeta) with caching over the distinct zeta fields of a schedule
class ShiftedBCache {
  public:
    explicit ShiftedBCache(const SpectralField& u) : u_(u) {}

    const SpectralField& at(const SpectralField* zeta) {
        const auto key = static_cast<const void*>(zeta);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        SpectralField b = zeta == nullptr || zeta->is_zero() ? bilinear_b(u_)
                                                             : bilinear_b(u_ + *zeta);
        return cache_.emplace(key, std::move(b)).first->second;
    }

  private:
    const SpectralField& u_;
    std::unordered_map<const void*, SpectralField> cache_;
};

} // namespace

RelaxationDefect compute_relaxation_defect(const SpectralField& constant_state,
                                           const ControlSignal& zeta_n,
                                           const IntervalSchedule& schedule, double k) {
    const double T = zeta_n.horizon();
    const int s = static_cast<int>(schedule.size());
    ShiftedBCache cache(constant_state);

    // per-interval mixture drift sum_i d_i B(u + zeta_i)
    std::vector<SpectralField> mix(s);
    for (int r = 0; r < s; ++r)
        for (const auto& slot : schedule[r])
            mix[r] = mix[r] + cache.at(slot.zeta ? slot.zeta.get() : nullptr) * slot.weight;

    RelaxationDefect out;
    SpectralField kf;
    out.times.push_back(0.0);
    out.kf_norm.push_back(0.0);
    for (const auto& seg : zeta_n.segments()) {
        const int r = interval_of(0.5 * (seg.t0 + seg.t1), s, T);
        const SpectralField fn = cache.at(segment_zeta(seg)) - mix[r];
        // f_n is constant on the segment, so K f_n is linear across it and
        // its norm is maximized at segment ends
        kf = kf + fn * (seg.t1 - seg.t0);
        out.times.push_back(seg.t1);
        out.kf_norm.push_back(sobolev_norm(kf, k + 1.0));
        out.sup_kf = std::max(out.sup_kf, out.kf_norm.back());
    }
    return out;
}

RelaxationDefect compute_relaxation_defect(const Trajectory& u1, const ControlSignal& zeta_n,
                                           const IntervalSchedule& schedule, double k,
                                           int /*samples*/) {
    const double T = zeta_n.horizon();
    const int s = static_cast<int>(schedule.size());

    // segment-exact integration with the state frozen at each segment's
    // nearest stored snapshot; caches keyed by (state, zeta) pointer pairs
    struct PairHash {
        std::size_t operator()(const std::pair<const void*, const void*>& p) const {
            return std::hash<const void*>()(p.first) * 0x9e3779b9 ^
                   std::hash<const void*>()(p.second);
        }
    };
    std::unordered_map<std::pair<const void*, const void*>, SpectralField, PairHash> cache;
    auto shifted_b = [&](const SpectralField& u, const SpectralField* zeta) -> const SpectralField& {
        const auto key = std::make_pair(static_cast<const void*>(&u),
                                        static_cast<const void*>(zeta));
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        SpectralField b = zeta == nullptr ? bilinear_b(u) : bilinear_b(u + *zeta);
        return cache.emplace(key, std::move(b)).first->second;
    };

    // mixture drifts cached per (interval, state snapshot)
    std::unordered_map<std::pair<const void*, const void*>, SpectralField, PairHash> mix_cache;
    auto mixture = [&](int r, const SpectralField& u) -> const SpectralField& {
        const auto key = std::make_pair(static_cast<const void*>(&u),
                                        reinterpret_cast<const void*>(
                                            static_cast<std::uintptr_t>(r + 1)));
        auto it = mix_cache.find(key);
        if (it != mix_cache.end()) return it->second;
        SpectralField mix;
        for (const auto& slot : schedule[r])
            mix = mix + shifted_b(u, slot.zeta ? slot.zeta.get() : nullptr) * slot.weight;
        return mix_cache.emplace(key, std::move(mix)).first->second;
    };

    RelaxationDefect out;
    SpectralField kf;
    out.times.push_back(0.0);
    out.kf_norm.push_back(0.0);
    for (const auto& seg : zeta_n.segments()) {
        const double mid = 0.5 * (seg.t0 + seg.t1);
        const SpectralField& u = u1.state_near(mid);
        const int r = interval_of(mid, s, T);
        const SpectralField fn = shifted_b(u, segment_zeta(seg)) - mixture(r, u);
        kf = kf + fn * (seg.t1 - seg.t0);
        out.times.push_back(seg.t1);
        out.kf_norm.push_back(sobolev_norm(kf, k + 1.0));
        out.sup_kf = std::max(out.sup_kf, out.kf_norm.back());
    }
    return out;
}

//------------------------------------------------------------------------------

ZetaElimination eliminate_zeta(const ControlSignal& eta, const ControlSignal& zeta_pwc,
                               double ramp_width) {
    if (zeta_pwc.is_zero())
        return {eta, ControlSignal::zero(eta.horizon()), 0.0};
    RampedSignal ramp = ramp_piecewise_constant(zeta_pwc, ramp_width);
    return {eta + ramp.derivative, std::move(ramp.value), ramp_width};
}

//------------------------------------------------------------------------------

namespace {

// field decomposed into its single-fiber components (shared)
std::vector<FieldPtr> split_fibers(const SpectralField& f) {
    std::vector<FieldPtr> out;
    for (const auto& e : f.entries())
        out.push_back(share(SpectralField::from_entries({e})));
    return out;
}

// sum of coef * B~(a, b) over single-fiber pairs at distinct fibers; the
// two-sided certificate mechanism: c B~(a,b) = -|c| B(a - sign(c) b)
struct QuadraticDecomposition {
    struct Pair {
        double coef;
        FieldPtr a, b;
    };
    std::vector<Pair> pairs;

    void append_terms(double scale, std::vector<std::pair<double, FieldPtr>>& terms) const {
        for (const auto& p : pairs) {
            const double c = scale * p.coef;
            if (c == 0.0) continue;
            const double sign = c > 0.0 ? 1.0 : -1.0;
            terms.push_back({std::abs(c), share(*p.a - *p.b * sign)});
        }
    }

    static QuadraticDecomposition of_b(const SpectralField& w, double scale) {
        QuadraticDecomposition d;
        const auto parts = split_fibers(w);
        for (std::size_t f = 0; f < parts.size(); ++f)
            for (std::size_t g = f + 1; g < parts.size(); ++g) {
                if (bilinear_b_sym(*parts[f], *parts[g]).is_zero()) continue;
                d.pairs.push_back({scale, parts[f], parts[g]});
            }
        return d;
    }

    static QuadraticDecomposition of_b_sym(const SpectralField& p, const SpectralField& w,
                                           double scale) {
        QuadraticDecomposition d;
        const auto pp = split_fibers(p);
        const auto ww = split_fibers(w);
        for (const auto& a : pp)
            for (const auto& b : ww) {
                if (a->entries()[0].m == b->entries()[0].m) continue; // same fiber: B~ = 0
                if (bilinear_b_sym(*a, *b).is_zero()) continue;
                d.pairs.push_back({scale, a, b});
            }
        return d;
    }
};

// a generator of the ansatz value span: an E component plus a structural
// quadratic part
struct StructuralGenerator {
    SpectralField field; // e_part + quadratic value (for coordinates)
    SpectralField e_part;
    QuadraticDecomposition quad;
};

// orthonormal basis of the generator span with combination coordinates
struct CoordedBasis {
    std::vector<SpectralField> basis;
    std::vector<std::vector<double>> coords; // basis[j] = sum_i coords[j][i] * gen[i]
};

CoordedBasis orthonormalize_with_coords(const std::vector<SpectralField>& gens,
                                        double tol = 1e-10) {
    CoordedBasis out;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        SpectralField r = gens[i];
        std::vector<double> cvec(gens.size(), 0.0);
        cvec[i] = 1.0;
        const double gn = sobolev_norm(r, 0.0);
        if (gn == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < out.basis.size(); ++j) {
                const double c = inner_k(r, out.basis[j], 0.0);
                r = r - out.basis[j] * c;
                for (std::size_t t = 0; t < cvec.size(); ++t) cvec[t] -= c * out.coords[j][t];
            }
        const double rn = sobolev_norm(r, 0.0);
        if (rn <= tol * gn) continue;
        for (double& c : cvec) c /= rn;
        out.basis.push_back(r * (1.0 / rn));
        out.coords.push_back(std::move(cvec));
    }
    return out;
}

struct StageCertifier {
    // structural path
    const std::vector<StructuralGenerator>* structural = nullptr;
    const std::vector<std::vector<double>>* coords = nullptr; // basis -> generators
    // bank path
    const CertificateBank* bank = nullptr;
    double tol = 1e-9;

    // certificate for scale * e_basis[l]
    SaturationCertificate vertex(const std::vector<SpectralField>& basis, int l,
                                 double scale) const {
        const SpectralField target = basis[l] * scale;
        if (structural) {
            SaturationCertificate cert;
            cert.target = target;
            const auto& w = (*coords)[l];
            for (std::size_t i = 0; i < structural->size(); ++i) {
                const double c = scale * w[i];
                if (c == 0.0) continue;
                cert.eta = cert.eta + (*structural)[i].e_part * c;
                (*structural)[i].quad.append_terms(c, cert.terms);
            }
            SpectralField sum_b;
            for (const auto& [a, z] : cert.terms) sum_b = sum_b + bilinear_b(*z) * a;
            cert.residual = sobolev_norm(cert.target - cert.eta + sum_b, 0.0);
            if (cert.residual > tol)
                throw std::logic_error("structural vertex certificate failed its residual check");
            return cert;
        }
        auto cert = bank->certify(target, tol);
        if (!cert)
            throw std::runtime_error("vertex certificate not available in the certified span");
        return *cert;
    }
};

struct StageOutput {
    ControlSignal control;
    double pwc_sup_error = 0.0;
    double defect_sup = -1.0;
    double ramp_l2_estimate = 0.0;
    int schedule_slots_max = 0;
    double ramp_width = 0.0;
};

StageOutput run_stage(const ControlSignal& eta_cur, const StageCertifier& certifier,
                      const SynthesisParams& params, const GalerkinConfig& cfg,
                      const SpectralField& u0, const ControlSignal& h, bool measure_defect) {
    const double T = eta_cur.horizon();
    const double k = cfg.sobolev_k;

    // orthonormal basis of the value span (structural path fixes the
    // generator list so vertex coordinates stay attached to certificates)
    std::vector<SpectralField> gens;
    if (certifier.structural)
        for (const auto& g : *certifier.structural) gens.push_back(g.field);
    else
        gens = eta_cur.value_generators();
    CoordedBasis cb = orthonormalize_with_coords(gens);
    if (cb.basis.empty()) {
        // nothing to do: the control is already zero
        return {eta_cur, 0.0, -1.0, 0.0, 0, 0.0};
    }

    StageCertifier vertex_certifier = certifier;
    vertex_certifier.coords = &cb.coords;

    PiecewiseConstantControl pwc = pwc_approximate(eta_cur, cb.basis, params.s);
    const int d = static_cast<int>(cb.basis.size());

    StageOutput out;
    // sampled sup distance between the control and its pwc approximation
    for (int j = 0; j <= 16 * params.s; ++j) {
        const double t = T * j / (16 * params.s);
        const int r = std::min(interval_of(t, params.s, T), params.s - 1);
        out.pwc_sup_error =
            std::max(out.pwc_sup_error, sobolev_norm(eta_cur.eval(t) - pwc.reconstruct_at(r), k));
    }

    // convexified forms per vertex
    std::vector<ConvexifiedForce> forms(2 * d);
    for (int v = 0; v < 2 * d; ++v) {
        const int l = v % d;
        const double scale = (v < d ? 1.0 : -1.0) * d * pwc.axis_m[l];
        forms[v] = scale == 0.0 ? ConvexifiedForce{}
                                : convexify(vertex_certifier.vertex(cb.basis, l, scale));
    }

    // per-interval mixtures and the accompanying eta
    IntervalSchedule schedule(params.s);
    std::vector<double> breaks;
    std::vector<FieldPtr> eta_values;
    for (int r = 0; r < params.s; ++r) {
        double zero_weight = 0.0;
        SpectralField eta_r;
        for (int v = 0; v < 2 * d; ++v) {
            const double c = pwc.coefficients(v, r);
            if (c <= 0.0) continue;
            eta_r = eta_r + forms[v].eta * c;
            if (forms[v].lambdas.empty()) {
                zero_weight += c;
            } else {
                for (std::size_t j = 0; j < forms[v].lambdas.size(); ++j)
                    schedule[r].push_back({c * forms[v].lambdas[j], forms[v].zetas[j]});
            }
        }
        if (zero_weight > 0.0) schedule[r].push_back({zero_weight, nullptr});
        out.schedule_slots_max = std::max(out.schedule_slots_max,
                                          static_cast<int>(schedule[r].size()));
        breaks.push_back(T * r / params.s);
        eta_values.push_back(share(eta_r));
    }
    breaks.push_back(T);
    const ControlSignal eta_mix = ControlSignal::piecewise_constant(breaks, eta_values, T);

    IntervalSchedule effective;
    const ControlSignal zeta_n =
        relaxation_control(schedule, params.n, T, params.drop_weight, &effective);

    if (measure_defect) {
        // trajectory under the piecewise-constant control, then the sampled
        // defect estimate along it
        try {
            GalerkinConfig dcfg = cfg;
            dcfg.store_stride = 10;
            const Trajectory u1 = resolve_controlled(u0, pwc.as_signal(), h, dcfg);
            out.defect_sup = compute_relaxation_defect(u1, zeta_n, effective, k).sup_kf;
        } catch (const BlowupError&) {
            out.defect_sup = -1.0;
        }
    }

    // ramp width from the shortest relaxation slot
    double min_len = T;
    for (const auto& seg : zeta_n.segments()) min_len = std::min(min_len, seg.t1 - seg.t0);
    out.ramp_width = std::min(0.49, params.ramp_frac) * min_len;

    ZetaElimination elim = eliminate_zeta(eta_mix, zeta_n, out.ramp_width);

    // closed-form L2 estimate of ||zeta_n - zeta~||: each smoothstep bridge
    // contributes 0.0589 w ||jump||^2
    {
        const auto& segs = zeta_n.segments();
        SpectralField prev;
        double acc = 0.0;
        for (std::size_t i = 0; i <= segs.size(); ++i) {
            const SpectralField cur =
                i < segs.size() ? segs[i].value(segs[i].t0) : SpectralField::zero();
            const double jump = sobolev_norm(cur - prev, k + 1.0);
            acc += 0.0589 * out.ramp_width * jump * jump;
            prev = cur;
        }
        out.ramp_l2_estimate = std::sqrt(acc);
    }

    out.control = std::move(elim.control);
    return out;
}

} // namespace

SynthesisResult synthesize(const SpectralField& u0, const SpectralField& u_hat, double horizon,
                           const ControlSignal& h, const ModeSubspace& e,
                           const SynthesisParams& params, const GalerkinConfig& cfg,
                           const SaturationReport* saturation) {
    if (params.stages < 0) throw std::invalid_argument("synthesize: stages must be >= 0");
    if (saturation == nullptr && params.stages > 1)
        throw std::invalid_argument("synthesize: stages > 1 requires a saturation report");
    if (saturation &&
        saturation->spaces.size() <= static_cast<std::size_t>(params.stages))
        throw std::invalid_argument("synthesize: saturation report too shallow for stages");

    const double k = cfg.sobolev_k;
    SynthesisResult out;
    out.report.params = params;

    AnsatzResult ansatz =
        ansatz_control(u0, u_hat, params.mu, params.delta, horizon, h, cfg);
    out.report.ansatz_endpoint_error = sobolev_norm(ansatz.end - u_hat, k);

    ControlSignal eta_cur = ansatz.eta;

    if (params.stages == 0) {
        out.control = std::move(eta_cur);
    } else if (saturation == nullptr) {
        // structural certification of the ansatz quadratic; requires u0, u_hat
        // and h supported on complete fibers of E
        auto fibers_complete = [&](const SpectralField& f) {
            for (const auto& en : f.entries())
                if (fiber_dimension(e, en.m) != 4) return false;
            return true;
        };
        const SpectralField w = ansatz.end - ansatz.start;
        if (!fibers_complete(ansatz.start) || !fibers_complete(w))
            throw std::invalid_argument(
                "synthesize: structural path needs u0 and u_hat on complete fibers of E; "
                "provide a saturation report instead");

        std::vector<StructuralGenerator> gens;
        {
            StructuralGenerator g0;
            g0.e_part = w * (1.0 / horizon);
            g0.quad = QuadraticDecomposition::of_b(ansatz.start, 1.0);
            g0.field = ansatz.c0;
            gens.push_back(std::move(g0));
            if (!ansatz.c1.is_zero()) {
                StructuralGenerator g1;
                g1.quad = QuadraticDecomposition::of_b_sym(ansatz.start, w, 1.0 / horizon);
                g1.field = ansatz.c1;
                gens.push_back(std::move(g1));
            }
            if (!ansatz.c2.is_zero()) {
                StructuralGenerator g2;
                g2.quad = QuadraticDecomposition::of_b(w, 1.0 / (horizon * horizon));
                g2.field = ansatz.c2;
                gens.push_back(std::move(g2));
            }
            for (const auto& hv : h.value_generators()) {
                if (!e.contains(hv, 1e-9))
                    throw std::invalid_argument(
                        "synthesize: structural path needs h valued in span(E)");
                StructuralGenerator gh;
                gh.e_part = hv * -1.0;
                gh.field = hv * -1.0;
                gens.push_back(std::move(gh));
            }
        }

        StageCertifier certifier;
        certifier.structural = &gens;
        certifier.tol = params.cert_tol;
        StageOutput stage =
            run_stage(eta_cur, certifier, params, cfg, u0, h, /*measure_defect=*/true);
        out.report.pwc_sup_error = stage.pwc_sup_error;
        out.report.relaxation_defect_sup = stage.defect_sup;
        out.report.ramp_l2_estimate = stage.ramp_l2_estimate;
        out.report.schedule_slots_max = stage.schedule_slots_max;
        out.control = std::move(stage.control);
    } else {
        // reduce onto E_N, then walk the saturation chain downward
        const ModeSubspace& e_n = saturation->spaces[params.stages];
        ControlSignal reduced = eta_cur.projected(e_n);
        out.report.reduction_l1_error = l1_distance(eta_cur, reduced, k);
        eta_cur = std::move(reduced);
        out.report.used_bank_certificates = true;

        for (int stage = params.stages; stage >= 1; --stage) {
            CertificateBank bank(saturation->spaces[stage - 1],
                                 saturation->added_per_step[stage - 1]);
            StageCertifier certifier;
            certifier.bank = &bank;
            certifier.tol = params.cert_tol;
            StageOutput so = run_stage(eta_cur, certifier, params, cfg, u0, h,
                                       /*measure_defect=*/stage == params.stages);
            if (stage == params.stages) {
                out.report.pwc_sup_error = so.pwc_sup_error;
                out.report.relaxation_defect_sup = so.defect_sup;
                out.report.ramp_l2_estimate = so.ramp_l2_estimate;
                out.report.schedule_slots_max = so.schedule_slots_max;
            }
            eta_cur = std::move(so.control);
        }
        out.control = std::move(eta_cur);
    }

    out.report.control_segments = out.control.segments().size();
    if (params.compute_final_error) {
        try {
            GalerkinConfig fcfg = cfg;
            fcfg.store_stride = 0;
            const Trajectory traj = resolve_controlled(u0, out.control, h, fcfg);
            out.report.final_error = sobolev_norm(traj.final_state() - u_hat, k);
            const double un = sobolev_norm(u_hat, k);
            out.report.final_rel_error = un > 0 ? out.report.final_error / un : 0.0;
        } catch (const BlowupError&) {
            out.report.admissible = false;
        }
    }
    return out;
}

//------------------------------------------------------------------------------

ProjectionIterateResult exact_projection_iterate(
    const SpectralField& u0, const SpectralField& u_hat, const ModeSubspace& f,
    const std::function<ControlSignal(const SpectralField&)>& synth, const ControlSignal& h,
    const GalerkinConfig& cfg, double tol, int max_iter, double theta) {
    if (!f.contains(u_hat, 1e-9))
        throw std::invalid_argument("exact_projection_iterate: u_hat must lie in F");

    ProjectionIterateResult out;
    SpectralField target = u_hat;
    double best = -1.0;
    GalerkinConfig rcfg = cfg;
    rcfg.store_stride = 0;

    for (int it = 0; it < max_iter; ++it) {
        const ControlSignal control = synth(target);
        const Trajectory traj = resolve_controlled(u0, control, h, rcfg);
        const SpectralField phi = f.project(traj.final_state());
        const double err = sobolev_norm(phi - u_hat, cfg.sobolev_k);
        out.error_history.push_back(err);
        out.iterations = it + 1;
        out.max_iterate_norm = std::max(out.max_iterate_norm, sobolev_norm(target, cfg.sobolev_k));
        if (best < 0.0 || err < best) {
            best = err;
            out.control = control;
            out.achieved_error = err;
        }
        if (err <= tol) {
            out.converged = true;
            break;
        }
        target = target + (u_hat - phi) * theta;
    }
    return out;
}

} // namespace eulerctl
