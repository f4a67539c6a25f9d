//==============================================================================
// control_signal.hpp
// Time-parameterized subspace-valued controls.  A signal is a sorted list of
// segments; each segment evaluates as a sum of terms
//     scale * shape(t) * field
// where shape is either a global polynomial in t (constant, t, t^2) or a
// raised-cosine ramp tied to an explicit window [s0, s1].  Ramp windows are
// stored per term, so segments may be split freely (sums, projections) with
// no change of value.  Fields are shared immutably; relaxation signals with
// hundreds of thousands of segments stay cheap.
//==============================================================================
#pragma once

#include <memory>
#include <vector>

#include "eulerctl/spectral_field.hpp"
#include "eulerctl/subspace.hpp"

namespace eulerctl {

enum class TimeShape {
    constant,    // 1
    linear_t,    // t
    quadratic_t, // t^2
    ramp01,      // C1 smoothstep 0 -> 1 across [s0, s1]
    ramp01_deriv // d/dt of ramp01
};

double shape_value(TimeShape s, double t, double s0, double s1);

using FieldPtr = std::shared_ptr<const SpectralField>;

inline FieldPtr share(SpectralField f) {
    return std::make_shared<const SpectralField>(std::move(f));
}

struct SignalTerm {
    TimeShape shape = TimeShape::constant;
    FieldPtr field;
    double scale = 1.0;
    double s0 = 0.0, s1 = 1.0; // ramp window (ramp shapes only)
};

struct SignalSegment {
    double t0 = 0.0, t1 = 0.0;
    std::vector<SignalTerm> terms;

    SpectralField value(double t) const;
};

class ControlSignal {
  public:
    ControlSignal() = default;
    ControlSignal(double horizon, std::vector<SignalSegment> segments);

    static ControlSignal zero(double horizon);
    static ControlSignal constant(const SpectralField& value, double horizon);
    // sum_k coeffs[k] * t^k over [0, horizon]; at most quadratic
    static ControlSignal polynomial(const std::vector<SpectralField>& coeffs, double horizon);
    // piecewise constant: values[i] on [breaks[i], breaks[i+1]); breaks spans [0, T]
    static ControlSignal piecewise_constant(const std::vector<double>& breaks,
                                            const std::vector<FieldPtr>& values, double horizon);
    // zero-order hold of samples taken at the given times
    static ControlSignal sampled(const std::vector<double>& times,
                                 const std::vector<SpectralField>& values, double horizon);

    double horizon() const { return horizon_; }
    const std::vector<SignalSegment>& segments() const { return segments_; }
    bool is_zero() const;

    SpectralField eval(double t) const;
    // segment-local evaluation, valid on the closed interval [t0, t1]
    SpectralField eval_in_segment(std::size_t seg, double t) const {
        return segments_[seg].value(t);
    }
    const SignalSegment& segment_at(double t) const;

    std::vector<double> breakpoints() const;

    ControlSignal scaled(double s) const;
    ControlSignal operator+(const ControlSignal& o) const;
    // time-pointwise L2 projection of every value onto S
    ControlSignal projected(const ModeSubspace& s) const;

    // distinct fields appearing in terms (the values' linear hull generators)
    std::vector<SpectralField> value_generators() const;
    int support_l1_radius() const;

    // sup-norm proxy over a sample grid: max_t ||value(t)||_k
    double max_value_norm(double k, int samples = 512) const;

  private:
    double horizon_ = 0.0;
    std::vector<SignalSegment> segments_;
};

// integral of || a(t) - b(t) ||_k dt over their common horizon (trapezoid on
// the merged breakpoint grid with per-segment oversampling)
double l1_distance(const ControlSignal& a, const ControlSignal& b, double k,
                   int samples_per_segment = 8);

// C1 ramped version of a piecewise-constant signal: smoothstep transitions
// of the given width replace every jump, the signal starts and ends at zero,
// and time averages over constancy intervals are preserved.  Also returns the
// exact derivative signal.
struct RampedSignal {
    ControlSignal value;      // zeta~
    ControlSignal derivative; // d zeta~ / dt
};
RampedSignal ramp_piecewise_constant(const ControlSignal& pwc, double ramp_width);

} // namespace eulerctl
