//==============================================================================
// bilinear.hpp
// The advection bilinear form B(a,b) = Pi{ <a, grad> b } as an exact Fourier
// convolution over finite supports.
//
// Two implementations:
//   * ref::  — a naive serial map-accumulating kernel, kept as the reference
//              implementation for tests and benchmarks;
//   * ConvPlan — a precomputed, output-partitioned kernel that parallelizes
//              with OpenMP.  Every output coefficient is accumulated by a
//              single task in a fixed order, so results are bit-identical
//              for any thread count.
// bilinear_b() dispatches: small ad-hoc supports use direct pair expansion,
// large ones build a plan.
//==============================================================================
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eulerctl/spectral_field.hpp"

namespace eulerctl {

namespace ref {

// (a . grad) b, unprojected, as a raw canonical coefficient map.  The zero
// mode is kept (it must vanish for divergence-free a; tests assert this).
RawCoeffMap advect_raw(const SpectralField& a, const SpectralField& b);

// Pi{ (a . grad) b }
SpectralField bilinear(const SpectralField& a, const SpectralField& b);

} // namespace ref

class ConvPlan {
  public:
    // plan for inputs supported on the given canonical lists, output
    // restricted to out_l1_cap (pass <0 for the full sumset)
    ConvPlan(std::vector<WaveVector> support_a, std::vector<WaveVector> support_b,
             int out_l1_cap);

    // convenience: cutoff-ball plan with identical in/out supports
    static ConvPlan ball_plan(int cutoff);

    const std::vector<WaveVector>& support_a() const { return sup_a_; }
    const std::vector<WaveVector>& support_b() const { return sup_b_; }
    const std::vector<WaveVector>& support_out() const { return sup_out_; }
    std::size_t pair_count() const { return pairs_.size(); }

    // dense apply: arrays indexed like the support lists; out is overwritten.
    // Includes the Leray projection.  Asserts the zero-mode accumulation is
    // negligible before discarding it.
    void apply(const CVec3* a, const CVec3* b, CVec3* out) const;

    // field-level convenience (scatters/gathers around apply)
    SpectralField apply(const SpectralField& a, const SpectralField& b) const;

  private:
    struct Expanded {
        WaveVector m;
        std::int32_t src;
        bool conjugate;
    };
    struct Pair {
        std::int32_t ia;
        std::int32_t ib;
    };

    std::vector<WaveVector> sup_a_, sup_b_, sup_out_;
    std::vector<Expanded> exp_a_, exp_b_;
    std::vector<Pair> pairs_;           // grouped by output
    std::vector<std::size_t> offsets_;  // per-output ranges into pairs_
    std::vector<Pair> zero_mode_pairs_; // ma + mb = 0, asserted negligible
};

// B(a, b); out_l1_cap < 0 keeps the full sumset support
SpectralField bilinear_b(const SpectralField& a, const SpectralField& b, int out_l1_cap = -1);
inline SpectralField bilinear_b(const SpectralField& a) { return bilinear_b(a, a); }

// symmetrized form B~(a,b) = B(a,b) + B(b,a)
SpectralField bilinear_b_sym(const SpectralField& a, const SpectralField& b,
                             int out_l1_cap = -1);

} // namespace eulerctl
