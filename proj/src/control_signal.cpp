#include "eulerctl/control_signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace eulerctl {

double shape_value(TimeShape s, double t, double s0, double s1) {
    switch (s) {
        case TimeShape::constant: return 1.0;
        case TimeShape::linear_t: return t;
        case TimeShape::quadratic_t: return t * t;
        case TimeShape::ramp01: {
            if (t <= s0) return 0.0;
            if (t >= s1) return 1.0;
            const double x = (t - s0) / (s1 - s0);
            return x * x * (3.0 - 2.0 * x);
        }
        case TimeShape::ramp01_deriv: {
            // quadratic in t, so the RK4 (Simpson) quadrature integrates every
            // ramp jump exactly even when a segment is crossed in one step
            if (t <= s0 || t >= s1) return 0.0;
            const double w = s1 - s0;
            const double x = (t - s0) / w;
            return 6.0 * x * (1.0 - x) / w;
        }
    }
    return 0.0;
}

SpectralField SignalSegment::value(double t) const {
    SpectralField acc;
    for (const SignalTerm& term : terms) {
        const double c = term.scale * shape_value(term.shape, t, term.s0, term.s1);
        if (c == 0.0 || !term.field || term.field->is_zero()) continue;
        acc = lincomb(1.0, acc, c, *term.field);
    }
    return acc.cleaned();
}

ControlSignal::ControlSignal(double horizon, std::vector<SignalSegment> segments)
    : horizon_(horizon), segments_(std::move(segments)) {
    if (horizon_ <= 0.0) throw std::invalid_argument("ControlSignal: horizon must be positive");
    if (segments_.empty()) segments_.push_back({0.0, horizon_, {}});
    const double tol = 1e-12 * horizon_;
    if (std::abs(segments_.front().t0) > tol ||
        std::abs(segments_.back().t1 - horizon_) > tol)
        throw std::invalid_argument("ControlSignal: segments must cover [0, T]");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].t1 <= segments_[i].t0)
            throw std::invalid_argument("ControlSignal: breakpoints must increase strictly");
        if (i > 0 && std::abs(segments_[i].t0 - segments_[i - 1].t1) > tol)
            throw std::invalid_argument("ControlSignal: segments must be contiguous");
    }
}

ControlSignal ControlSignal::zero(double horizon) { return ControlSignal(horizon, {}); }

ControlSignal ControlSignal::constant(const SpectralField& value, double horizon) {
    SignalSegment seg{0.0, horizon, {}};
    if (!value.is_zero()) seg.terms.push_back({TimeShape::constant, share(value), 1.0, 0, 0});
    return ControlSignal(horizon, {seg});
}

ControlSignal ControlSignal::polynomial(const std::vector<SpectralField>& coeffs,
                                        double horizon) {
    if (coeffs.size() > 3)
        throw std::invalid_argument("ControlSignal::polynomial: at most quadratic");
    static constexpr TimeShape shapes[3] = {TimeShape::constant, TimeShape::linear_t,
                                            TimeShape::quadratic_t};
    SignalSegment seg{0.0, horizon, {}};
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        if (!coeffs[k].is_zero())
            seg.terms.push_back({shapes[k], share(coeffs[k]), 1.0, 0, 0});
    return ControlSignal(horizon, {seg});
}

ControlSignal ControlSignal::piecewise_constant(const std::vector<double>& breaks,
                                                const std::vector<FieldPtr>& values,
                                                double horizon) {
    if (breaks.size() != values.size() + 1)
        throw std::invalid_argument("piecewise_constant: breaks/values size mismatch");
    std::vector<SignalSegment> segs;
    segs.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        SignalSegment seg{breaks[i], breaks[i + 1], {}};
        if (values[i] && !values[i]->is_zero())
            seg.terms.push_back({TimeShape::constant, values[i], 1.0, 0, 0});
        segs.push_back(std::move(seg));
    }
    return ControlSignal(horizon, std::move(segs));
}

ControlSignal ControlSignal::sampled(const std::vector<double>& times,
                                     const std::vector<SpectralField>& values, double horizon) {
    if (times.size() != values.size() || times.empty())
        throw std::invalid_argument("sampled: times/values size mismatch");
    std::vector<double> breaks = times;
    breaks.push_back(horizon);
    std::vector<FieldPtr> ptrs;
    ptrs.reserve(values.size());
    for (const auto& v : values) ptrs.push_back(share(v));
    return piecewise_constant(breaks, ptrs, horizon);
}

bool ControlSignal::is_zero() const {
    for (const auto& s : segments_)
        for (const auto& t : s.terms)
            if (t.field && !t.field->is_zero() && t.scale != 0.0) return false;
    return true;
}

const SignalSegment& ControlSignal::segment_at(double t) const {
    // half-open segments; t = T falls into the final segment
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const SignalSegment& s) { return v < s.t1; });
    if (it == segments_.end()) --it;
    return *it;
}

SpectralField ControlSignal::eval(double t) const { return segment_at(t).value(t); }

std::vector<double> ControlSignal::breakpoints() const {
    std::vector<double> b;
    b.reserve(segments_.size() + 1);
    b.push_back(segments_.front().t0);
    for (const auto& s : segments_) b.push_back(s.t1);
    return b;
}

ControlSignal ControlSignal::scaled(double c) const {
    ControlSignal out = *this;
    for (auto& s : out.segments_)
        for (auto& t : s.terms) t.scale *= c;
    return out;
}

ControlSignal ControlSignal::operator+(const ControlSignal& o) const {
    if (std::abs(horizon_ - o.horizon_) > 1e-12 * std::max(horizon_, o.horizon_))
        throw std::invalid_argument("ControlSignal::operator+: horizon mismatch");
    std::vector<double> cuts;
    for (const auto& s : segments_) {
        cuts.push_back(s.t0);
        cuts.push_back(s.t1);
    }
    for (const auto& s : o.segments_) {
        cuts.push_back(s.t0);
        cuts.push_back(s.t1);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [this](double a, double b) { return b - a < 1e-14 * horizon_; }),
               cuts.end());

    std::vector<SignalSegment> segs;
    std::size_t ia = 0, ib = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double t0 = cuts[c], t1 = cuts[c + 1];
        const double mid = 0.5 * (t0 + t1);
        while (ia + 1 < segments_.size() && segments_[ia].t1 <= mid) ++ia;
        while (ib + 1 < o.segments_.size() && o.segments_[ib].t1 <= mid) ++ib;
        SignalSegment seg{t0, t1, segments_[ia].terms};
        seg.terms.insert(seg.terms.end(), o.segments_[ib].terms.begin(),
                         o.segments_[ib].terms.end());
        segs.push_back(std::move(seg));
    }
    return ControlSignal(horizon_, std::move(segs));
}

ControlSignal ControlSignal::projected(const ModeSubspace& space) const {
    std::unordered_map<const SpectralField*, FieldPtr> cache;
    ControlSignal out = *this;
    for (auto& s : out.segments_)
        for (auto& t : s.terms) {
            if (!t.field) continue;
            auto it = cache.find(t.field.get());
            if (it == cache.end())
                it = cache.emplace(t.field.get(), share(space.project(*t.field))).first;
            t.field = it->second;
        }
    return out;
}

std::vector<SpectralField> ControlSignal::value_generators() const {
    std::vector<SpectralField> out;
    std::unordered_map<const SpectralField*, char> seen;
    for (const auto& s : segments_)
        for (const auto& t : s.terms) {
            if (!t.field || t.field->is_zero()) continue;
            if (seen.emplace(t.field.get(), 1).second) out.push_back(*t.field);
        }
    return out;
}

int ControlSignal::support_l1_radius() const {
    int r = 0;
    for (const auto& s : segments_)
        for (const auto& t : s.terms)
            if (t.field) r = std::max(r, t.field->support_l1_radius());
    return r;
}

double ControlSignal::max_value_norm(double k, int samples) const {
    double best = 0.0;
    for (int i = 0; i <= samples; ++i)
        best = std::max(best, sobolev_norm(eval(horizon_ * i / samples), k));
    for (const auto& s : segments_) best = std::max(best, sobolev_norm(s.value(s.t0), k));
    return best;
}

double l1_distance(const ControlSignal& a, const ControlSignal& b, double k,
                   int samples_per_segment) {
    if (std::abs(a.horizon() - b.horizon()) > 1e-12 * a.horizon())
        throw std::invalid_argument("l1_distance: horizon mismatch");
    std::vector<double> cuts;
    for (const auto& s : a.segments()) {
        cuts.push_back(s.t0);
        cuts.push_back(s.t1);
    }
    for (const auto& s : b.segments()) {
        cuts.push_back(s.t0);
        cuts.push_back(s.t1);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double t0 = cuts[c], t1 = cuts[c + 1];
        if (t1 - t0 < 1e-15 * a.horizon()) continue;
        double prev = sobolev_norm(a.eval(t0) - b.eval(t0), k);
        for (int i = 1; i <= samples_per_segment; ++i) {
            const double t = t0 + (t1 - t0) * i / samples_per_segment;
            const double cur = sobolev_norm(a.eval(t) - b.eval(t), k);
            acc += 0.5 * (prev + cur) * (t1 - t0) / samples_per_segment;
            prev = cur;
        }
    }
    return acc;
}

RampedSignal ramp_piecewise_constant(const ControlSignal& pwc, double ramp_width) {
    // collect the constancy intervals
    struct Flat {
        double t0, t1;
        FieldPtr v;
    };
    std::vector<Flat> flats;
    for (const auto& s : pwc.segments()) {
        for (const auto& term : s.terms)
            if (term.shape != TimeShape::constant)
                throw std::invalid_argument(
                    "ramp_piecewise_constant: signal is not piecewise constant");
        FieldPtr v;
        if (s.terms.empty())
            v = nullptr;
        else if (s.terms.size() == 1 && s.terms[0].scale == 1.0)
            v = s.terms[0].field;
        else
            v = share(s.value(s.t0));
        flats.push_back({s.t0, s.t1, v});
    }

    double min_len = pwc.horizon();
    for (const auto& f : flats) min_len = std::min(min_len, f.t1 - f.t0);
    if (ramp_width <= 0.0)
        throw std::invalid_argument("ramp_piecewise_constant: ramp_width must be positive");
    // boundary windows use the full width and interior ones half on each
    // side, so half the shortest interval is the hard limit
    if (2.0 * ramp_width >= min_len)
        throw std::invalid_argument(
            "ramp_piecewise_constant: ramp_width too large for breakpoint spacing");

    const double w = ramp_width;
    const double T = pwc.horizon();

    // jump windows; boundary jumps ramp from/to zero and sit inside [0, T]
    struct Jump {
        double w0, w1;
        FieldPtr from, to;
    };
    std::vector<Jump> jumps;
    jumps.push_back({0.0, w, nullptr, flats.front().v});
    for (std::size_t i = 0; i + 1 < flats.size(); ++i)
        jumps.push_back(
            {flats[i].t1 - 0.5 * w, flats[i].t1 + 0.5 * w, flats[i].v, flats[i + 1].v});
    jumps.push_back({T - w, T, flats.back().v, nullptr});

    std::vector<SignalSegment> vsegs, dsegs;
    auto add_flat = [&](double t0, double t1, const FieldPtr& v) {
        if (t1 - t0 <= 1e-15 * T) return;
        SignalSegment s{t0, t1, {}};
        if (v && !v->is_zero()) s.terms.push_back({TimeShape::constant, v, 1.0, 0, 0});
        vsegs.push_back(s);
        dsegs.push_back({t0, t1, {}});
    };
    auto add_ramp = [&](const Jump& j) {
        SignalSegment vs{j.w0, j.w1, {}};
        SignalSegment ds{j.w0, j.w1, {}};
        // value = from*(1 - r) + to*r, reusing the shared plateau fields
        if (j.from && !j.from->is_zero()) {
            vs.terms.push_back({TimeShape::constant, j.from, 1.0, 0, 0});
            vs.terms.push_back({TimeShape::ramp01, j.from, -1.0, j.w0, j.w1});
            ds.terms.push_back({TimeShape::ramp01_deriv, j.from, -1.0, j.w0, j.w1});
        }
        if (j.to && !j.to->is_zero()) {
            vs.terms.push_back({TimeShape::ramp01, j.to, 1.0, j.w0, j.w1});
            ds.terms.push_back({TimeShape::ramp01_deriv, j.to, 1.0, j.w0, j.w1});
        }
        vsegs.push_back(std::move(vs));
        dsegs.push_back(std::move(ds));
    };

    double cursor = 0.0;
    for (std::size_t j = 0; j < jumps.size(); ++j) {
        add_flat(cursor, jumps[j].w0, j == 0 ? nullptr : flats[j - 1].v);
        add_ramp(jumps[j]);
        cursor = jumps[j].w1;
    }
    add_flat(cursor, T, nullptr);

    auto stitch = [&](std::vector<SignalSegment> segs) {
        for (std::size_t i = 0; i + 1 < segs.size(); ++i) segs[i + 1].t0 = segs[i].t1;
        segs.front().t0 = 0.0;
        segs.back().t1 = T;
        return segs;
    };
    return {ControlSignal(T, stitch(vsegs)), ControlSignal(T, stitch(dsegs))};
}

} // namespace eulerctl
