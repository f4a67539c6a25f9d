//==============================================================================
// spectral_field.hpp
// Zero-mean fields on T^3 held as Fourier coefficients over the canonical
// half-lattice.  The physical field is
//     u(x) = sum_m 2 Re( u_hat(m) e^{i<m,x>} )      (m canonical)
// so conjugate symmetry is implicit and real-valuedness is unbreakable.
// Vector fields additionally satisfy <m, u_hat(m)> = 0 (divergence-free).
// All norms are the homogeneous coefficient-space norms
//     ||u||_k^2 = 2 sum_m |m|_2^{2k} |u_hat(m)|^2.
//==============================================================================
#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "eulerctl/frame.hpp"
#include "eulerctl/vec3.hpp"
#include "eulerctl/wavevector.hpp"

namespace eulerctl {

// relative magnitude below which coefficients are dropped after algebra
inline constexpr double kCoeffDropTol = 1e-14;
// relative divergence tolerance admitted at construction
inline constexpr double kDivTol = 1e-13;

struct FieldEntry {
    WaveVector m; // canonical
    CVec3 a;
};

using RawCoeffMap = std::map<WaveVector, CVec3>;

class SpectralField {
  public:
    SpectralField() = default;

    // Entries must be canonical, divergence-free and free of duplicates;
    // throws otherwise.  Tiny coefficients are dropped.
    static SpectralField from_entries(std::vector<FieldEntry> entries);

    // Accepts an arbitrary full-lattice map: non-canonical keys are folded
    // onto their canonical conjugates, m = 0 is rejected unless negligible.
    // No divergence check here; used by leray_project and the grid oracle.
    static SpectralField from_raw_unchecked(const RawCoeffMap& raw);

    static SpectralField zero() { return {}; }

    const std::vector<FieldEntry>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    const CVec3* find(const WaveVector& m) const;
    std::optional<int>& cutoff_hint() { return cutoff_hint_; }
    const std::optional<int>& cutoff_hint() const { return cutoff_hint_; }

    int support_l1_radius() const;
    int support_linf_radius() const;
    double max_abs_coeff() const;
    double max_relative_divergence() const;

    SpectralField operator+(const SpectralField& o) const;
    SpectralField operator-(const SpectralField& o) const;
    SpectralField operator*(double s) const;
    SpectralField operator-() const { return *this * -1.0; }

    // e^{-delta L}: coefficient at m scaled by e^{-delta |m|_2^2}; delta >= 0.
    SpectralField heat(double delta) const;
    // drop everything with l1 norm above radius
    SpectralField truncated_l1(int radius) const;
    // drop coefficients below max(rel_tol * max |coeff|, abs_floor)
    SpectralField cleaned(double rel_tol = kCoeffDropTol, double abs_floor = 0.0) const;

    // physical value at a point
    Vec3 eval(const Vec3& x) const;

  private:
    std::vector<FieldEntry> entries_; // sorted by wavevector
    std::optional<int> cutoff_hint_;

    friend SpectralField lincomb(double, const SpectralField&, double, const SpectralField&);
};

SpectralField lincomb(double ca, const SpectralField& a, double cb, const SpectralField& b);

inline SpectralField operator*(double s, const SpectralField& f) { return f * s; }

double inner_k(const SpectralField& a, const SpectralField& b, double k);
double sobolev_norm(const SpectralField& u, double k);

// L2-orthogonal projection onto divergence-free zero-mean fields: each raw
// coefficient is replaced by a - m<m,a>/|m|_2^2 and the zero mode is dropped.
SpectralField leray_project(const RawCoeffMap& raw);
SpectralField leray_project(const SpectralField& u); // idempotent

//------------------------------------------------------------------------------
// scalar fields (pressure lives here)
//------------------------------------------------------------------------------

struct ScalarEntry {
    WaveVector m;
    c64 a;
};

using RawScalarMap = std::map<WaveVector, c64>;

class ScalarSpectralField {
  public:
    ScalarSpectralField() = default;
    static ScalarSpectralField from_entries(std::vector<ScalarEntry> entries);
    static ScalarSpectralField from_raw(const RawScalarMap& raw); // folds, drops mean

    const std::vector<ScalarEntry>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }
    const c64* find(const WaveVector& m) const;

    ScalarSpectralField operator+(const ScalarSpectralField& o) const;
    ScalarSpectralField operator-(const ScalarSpectralField& o) const;
    ScalarSpectralField operator*(double s) const;

    ScalarSpectralField truncated_l1(int radius) const;
    ScalarSpectralField cleaned(double rel_tol = kCoeffDropTol) const;
    double eval(const Vec3& x) const;
    double max_abs_coeff() const;

  private:
    std::vector<ScalarEntry> entries_;

    friend ScalarSpectralField inverse_laplacian(const ScalarSpectralField&);
    friend ScalarSpectralField laplacian(const ScalarSpectralField&);
};

double inner_k(const ScalarSpectralField& a, const ScalarSpectralField& b, double k);
double sobolev_norm(const ScalarSpectralField& u, double k);

// coefficient divided by -|m|_2^2 (solves Laplace problem on zero-mean fields)
ScalarSpectralField inverse_laplacian(const ScalarSpectralField& f);
// round-trip partner, for tests
ScalarSpectralField laplacian(const ScalarSpectralField& f);

//------------------------------------------------------------------------------
// single-mode generator fields (Example 3.3 building blocks)
//------------------------------------------------------------------------------

enum class Polarization { plus, minus };
enum class Phase { cos, sin };

// l(m) cos<m,x> or l(m) sin<m,x>, scaled to unit L2 norm.  theta rotates the
// polarization frame inside the fiber.
SpectralField mode_field(const WaveVector& m, Polarization pol, Phase ph, double theta = 0.0);

// the four-dimensional real fiber of canonical m: {cos, sin} x {l+, l-}
std::vector<SpectralField> fiber_basis(const WaveVector& m, double theta = 0.0);

// generator set of Example 3.3: all fibers with 0 < |m|_l1 <= radius
std::vector<SpectralField> generator_fields(int radius, double theta = 0.0);

} // namespace eulerctl
