#include "eulerctl/bilinear.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eulerctl {

namespace {

constexpr c64 kI{0.0, 1.0};

// term of (a.grad)b at ma + mb:  i <a_hat(ma), mb> b_hat(mb)
inline CVec3 advect_term(const CVec3& ca, const WaveVector& mb, const CVec3& cb) {
    return cb * (kI * dot_c(ca, mb));
}

inline CVec3 leray_at(const WaveVector& m, const CVec3& v) {
    const double m2 = static_cast<double>(m.l2sq());
    return v - CVec3(to_vec3(m)) * (dot_c(v, m) / m2);
}

// Magnitude below which convolution output is rounding noise, not signal:
// individual terms scale like |a||b||m|, so exact cancellations (single-mode
// self-advection, say) leave residue around machine epsilon times that.
double conv_noise_floor(const SpectralField& a, const SpectralField& b) {
    const double mscale = std::max(1, b.support_l1_radius());
    return kCoeffDropTol * a.max_abs_coeff() * b.max_abs_coeff() * mscale;
}

} // namespace

namespace ref {

RawCoeffMap advect_raw(const SpectralField& a, const SpectralField& b) {
    RawCoeffMap acc;
    for (const auto& ea : a.entries()) {
        for (int sa = 0; sa < 2; ++sa) {
            const WaveVector ma = sa ? -ea.m : ea.m;
            const CVec3 ca = sa ? conj(ea.a) : ea.a;
            for (const auto& eb : b.entries()) {
                for (int sb = 0; sb < 2; ++sb) {
                    const WaveVector mb = sb ? -eb.m : eb.m;
                    const CVec3 cb = sb ? conj(eb.a) : eb.a;
                    acc[ma + mb] += advect_term(ca, mb, cb);
                }
            }
        }
    }
    return acc;
}

SpectralField bilinear(const SpectralField& a, const SpectralField& b) {
    return leray_project(advect_raw(a, b)).cleaned(kCoeffDropTol, conv_noise_floor(a, b));
}

} // namespace ref

//------------------------------------------------------------------------------

ConvPlan::ConvPlan(std::vector<WaveVector> support_a, std::vector<WaveVector> support_b,
                   int out_l1_cap)
    : sup_a_(std::move(support_a)), sup_b_(std::move(support_b)) {
    exp_a_.reserve(2 * sup_a_.size());
    for (std::size_t i = 0; i < sup_a_.size(); ++i) {
        exp_a_.push_back({sup_a_[i], static_cast<std::int32_t>(i), false});
        exp_a_.push_back({-sup_a_[i], static_cast<std::int32_t>(i), true});
    }
    exp_b_.reserve(2 * sup_b_.size());
    for (std::size_t i = 0; i < sup_b_.size(); ++i) {
        exp_b_.push_back({sup_b_[i], static_cast<std::int32_t>(i), false});
        exp_b_.push_back({-sup_b_[i], static_cast<std::int32_t>(i), true});
    }

    // box lookup over b's expanded support
    int rb = 0;
    for (const auto& m : sup_b_) rb = std::max(rb, m.linf());
    LatticeBox box(rb);
    std::vector<std::int32_t> b_at(box.size(), -1);
    for (std::size_t i = 0; i < exp_b_.size(); ++i) b_at[box.index(exp_b_[i].m)] = static_cast<std::int32_t>(i);

    // output support: distinct canonical sums inside the cap
    std::vector<WaveVector> outs;
    {
        std::unordered_map<WaveVector, char, WaveVectorHash> seen;
        for (const auto& ea : exp_a_)
            for (const auto& eb : exp_b_) {
                const WaveVector mo = ea.m + eb.m;
                if (mo.is_zero()) continue;
                if (out_l1_cap >= 0 && mo.l1() > out_l1_cap) continue;
                seen.emplace(mo.canonical(), 1);
            }
        outs.reserve(seen.size());
        for (const auto& [m, _] : seen) outs.push_back(m);
        std::sort(outs.begin(), outs.end());
    }
    sup_out_ = std::move(outs);

    // pair lists per output, each in fixed (ia-major) order
    std::vector<std::vector<Pair>> per_out(sup_out_.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::int64_t o = 0; o < static_cast<std::int64_t>(sup_out_.size()); ++o) {
        const WaveVector mo = sup_out_[o];
        auto& list = per_out[o];
        for (std::size_t ia = 0; ia < exp_a_.size(); ++ia) {
            const WaveVector mb = mo - exp_a_[ia].m;
            if (mb.is_zero() || !box.contains(mb)) continue;
            const std::int32_t ib = b_at[box.index(mb)];
            if (ib >= 0) list.push_back({static_cast<std::int32_t>(ia), ib});
        }
    }
    offsets_.assign(sup_out_.size() + 1, 0);
    for (std::size_t o = 0; o < per_out.size(); ++o) offsets_[o + 1] = offsets_[o] + per_out[o].size();
    pairs_.resize(offsets_.back());
    for (std::size_t o = 0; o < per_out.size(); ++o)
        std::copy(per_out[o].begin(), per_out[o].end(), pairs_.begin() + offsets_[o]);

    // ma + mb = 0 pairs, kept only so the zero mode can be asserted
    for (std::size_t ia = 0; ia < exp_a_.size(); ++ia) {
        const WaveVector mb = -exp_a_[ia].m;
        if (!box.contains(mb)) continue;
        const std::int32_t ib = b_at[box.index(mb)];
        if (ib >= 0) zero_mode_pairs_.push_back({static_cast<std::int32_t>(ia), ib});
    }
}

ConvPlan ConvPlan::ball_plan(int cutoff) {
    auto ball = canonical_l1_ball(cutoff);
    return ConvPlan(ball, ball, cutoff);
}

void ConvPlan::apply(const CVec3* a, const CVec3* b, CVec3* out) const {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t o = 0; o < static_cast<std::int64_t>(sup_out_.size()); ++o) {
        CVec3 acc;
        for (std::size_t p = offsets_[o]; p < offsets_[o + 1]; ++p) {
            const Expanded& ra = exp_a_[pairs_[p].ia];
            const Expanded& rb = exp_b_[pairs_[p].ib];
            const CVec3 ca = ra.conjugate ? conj(a[ra.src]) : a[ra.src];
            const CVec3 cb = rb.conjugate ? conj(b[rb.src]) : b[rb.src];
            acc += advect_term(ca, rb.m, cb);
        }
        out[o] = leray_at(sup_out_[o], acc);
    }

    // zero mode of (a.grad)b: each term carries <a_hat(-mb), mb> = 0 for
    // divergence-free a; accumulate and assert before discarding.
    CVec3 zero_acc;
    double scale = 0.0;
    for (const Pair& p : zero_mode_pairs_) {
        const Expanded& ra = exp_a_[p.ia];
        const Expanded& rb = exp_b_[p.ib];
        const CVec3 ca = ra.conjugate ? conj(a[ra.src]) : a[ra.src];
        const CVec3 cb = rb.conjugate ? conj(b[rb.src]) : b[rb.src];
        zero_acc += advect_term(ca, rb.m, cb);
        scale = std::max(scale, cnorm(ca) * cnorm(cb) * rb.m.l2());
    }
    if (cnorm(zero_acc) > 1e-10 * std::max(scale, 1e-300))
        throw std::logic_error("ConvPlan: advection zero mode did not vanish");
}

SpectralField ConvPlan::apply(const SpectralField& a, const SpectralField& b) const {
    std::vector<CVec3> da(sup_a_.size()), db(sup_b_.size()), out(sup_out_.size());
    for (std::size_t i = 0; i < sup_a_.size(); ++i)
        if (const CVec3* c = a.find(sup_a_[i])) da[i] = *c;
    for (std::size_t i = 0; i < sup_b_.size(); ++i)
        if (const CVec3* c = b.find(sup_b_[i])) db[i] = *c;
    apply(da.data(), db.data(), out.data());

    const double floor = conv_noise_floor(a, b);
    std::vector<FieldEntry> entries;
    entries.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (cnorm(out[i]) > floor) entries.push_back({sup_out_[i], out[i]});
    return SpectralField::from_entries(std::move(entries));
}

//------------------------------------------------------------------------------

SpectralField bilinear_b(const SpectralField& a, const SpectralField& b, int out_l1_cap) {
    if (a.is_zero() || b.is_zero()) return SpectralField::zero();

    const std::size_t work = 4 * a.size() * b.size();
    if (work <= 32768) {
        // direct pair expansion; cheaper than planning for sparse operands
        RawCoeffMap raw = ref::advect_raw(a, b);
        if (auto it = raw.find(WaveVector{0, 0, 0}); it != raw.end()) {
            if (cnorm(it->second) >
                1e-10 * std::max(a.max_abs_coeff() * b.max_abs_coeff(), 1e-300))
                throw std::logic_error("bilinear_b: advection zero mode did not vanish");
        }
        SpectralField f = leray_project(raw).cleaned(kCoeffDropTol, conv_noise_floor(a, b));
        return out_l1_cap >= 0 ? f.truncated_l1(out_l1_cap) : f;
    }

    std::vector<WaveVector> sa, sb;
    sa.reserve(a.size());
    sb.reserve(b.size());
    for (const auto& e : a.entries()) sa.push_back(e.m);
    for (const auto& e : b.entries()) sb.push_back(e.m);
    ConvPlan plan(std::move(sa), std::move(sb), out_l1_cap);
    return plan.apply(a, b);
}

SpectralField bilinear_b_sym(const SpectralField& a, const SpectralField& b, int out_l1_cap) {
    return bilinear_b(a, b, out_l1_cap) + bilinear_b(b, a, out_l1_cap);
}

} // namespace eulerctl
