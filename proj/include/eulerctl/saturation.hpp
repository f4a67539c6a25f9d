//==============================================================================
// saturation.hpp
// Certified under-approximation of the saturation operator F(E): the largest
// vector space whose elements decompose as
//     xi = eta - sum_i alpha_i B(zeta_i),   eta, zeta_i in E,  alpha_i > 0.
// Feasibility is solved by nonnegative least squares over a finite dictionary
// of B-images (generators and pairwise combinations); a direction enters the
// enlarged space only when BOTH signs certify, which makes the added span
// provably contained in F(E) (scaling rescales the alphas, the minus
// certificate covers negation, sums concatenate).
//==============================================================================
#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "eulerctl/control_signal.hpp"
#include "eulerctl/coord_map.hpp"
#include "eulerctl/linalg.hpp"
#include "eulerctl/subspace.hpp"

namespace eulerctl {

struct SaturationCertificate {
    SpectralField target; // xi
    SpectralField eta;    // in span(E)
    std::vector<std::pair<double, FieldPtr>> terms; // (alpha_i > 0, zeta_i in E)
    double residual = 0.0; // || xi - eta + sum alpha_i B(zeta_i) ||_0 at creation
};

// re-derives the certificate residual on an independent code path (the serial
// reference kernel, field-level algebra)
double verify_certificate(const SaturationCertificate& cert);

// positive scaling and sums stay inside the certified cone
SaturationCertificate scale_certificate(const SaturationCertificate& c, double s);
SaturationCertificate add_certificates(const SaturationCertificate& a,
                                       const SaturationCertificate& b);

struct CertifiedDirection {
    SpectralField direction; // unit L2 norm, orthogonal to E
    SaturationCertificate plus;
    SaturationCertificate minus;
};

struct SaturationOptions {
    int combo_depth = 2;
    double tol = 1e-10;          // certification residual tolerance
    int image_l1_cap = -1;       // discard dictionary entries reaching beyond (<0: none)
    int max_candidates = -1;     // cap on complement directions attempted (<0: none)
    double pivot_tol = 1e-8;     // complement-basis acceptance threshold
    bool fiber_align_basis = true;
};

// Dictionary of (zeta, B(zeta)) pairs over E's basis generators, together
// with the prebuilt solver context (coordinate rows, E-perp columns, a
// fiber-to-column index) shared by all certification solves.
class BImageDictionary {
  public:
    BImageDictionary(const ModeSubspace& e, const SaturationOptions& opt);

    struct Entry {
        FieldPtr zeta;
        SpectralField image;      // B(zeta)
        SpectralField image_perp; // (I - P_E) B(zeta)
    };

    const std::vector<Entry>& entries() const { return entries_; }
    const ModeSubspace& space() const { return e_; }
    std::size_t size() const { return entries_.size(); }

    const CoordMap& coords() const { return coords_; }
    const std::vector<SparseVec>& columns() const { return cols_; }
    // indices of columns whose image touches the given fiber
    std::vector<int> local_columns(const SpectralField& target) const;

  private:
    ModeSubspace e_;
    std::vector<Entry> entries_;
    CoordMap coords_;
    std::vector<SparseVec> cols_;
    std::unordered_map<WaveVector, std::vector<int>, WaveVectorHash> fiber_to_cols_;
};

// Nonnegative feasibility solve for xi = eta - sum alpha_i B(zeta_i); absent
// when infeasible at the tolerance.
std::optional<SaturationCertificate> certify_direction(const SpectralField& xi,
                                                       const BImageDictionary& dict,
                                                       const ModeSubspace& e, double tol);

struct SaturationStep {
    ModeSubspace enlarged;                 // E1 = span(E u certified)
    std::vector<CertifiedDirection> added; // with verified two-sided certificates
};

SaturationStep saturation_step(const ModeSubspace& e, const SaturationOptions& opt);

struct FiberRecord {
    WaveVector m;
    int dimension; // 0..4
};

std::vector<FiberRecord> fiber_report(const ModeSubspace& s, int radius);

struct SaturationReport {
    std::vector<ModeSubspace> spaces;  // E0 ... EN
    std::vector<std::size_t> dims;
    std::vector<std::vector<CertifiedDirection>> added_per_step; // N entries
    int fiber_radius = 0;
    std::vector<std::vector<FiberRecord>> fibers_per_stage;
};

SaturationReport saturation_sequence(const ModeSubspace& e, int steps,
                                     const SaturationOptions& opt);

// Decomposes fields over span(E u certified directions) and assembles
// certificates by combination; used by the synthesis cascade to certify
// piecewise-constant vertices.
class CertificateBank {
  public:
    CertificateBank(ModeSubspace e, std::vector<CertifiedDirection> directions);

    const ModeSubspace& base_space() const { return e_; }
    const std::vector<CertifiedDirection>& directions() const { return dirs_; }

    // absent when xi is not within tol of the certified span
    std::optional<SaturationCertificate> certify(const SpectralField& xi, double tol) const;

  private:
    ModeSubspace e_;
    std::vector<CertifiedDirection> dirs_;
};

} // namespace eulerctl
