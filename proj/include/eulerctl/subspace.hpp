//==============================================================================
// subspace.hpp
// Finite ordered bases of spectral fields with span / projection operations,
// parameterized over the field type (vector or scalar).  Projections are
// L2-orthogonal.  Bases are either kept raw (projections via a Gram solve)
// or orthonormalized at construction.
//==============================================================================
#pragma once

#include <stdexcept>
#include <vector>

#include "eulerctl/linalg.hpp"
#include "eulerctl/spectral_field.hpp"

namespace eulerctl {

template <class Field>
class Subspace {
  public:
    Subspace() = default;

    // orthonormalize generators (modified Gram-Schmidt, two passes); near-
    // dependent generators are dropped
    static Subspace span_of(const std::vector<Field>& generators, double tol = 1e-10) {
        Subspace s;
        s.orthonormal_ = true;
        for (const Field& g : generators) s.absorb(g, tol);
        return s;
    }

    // keep the given basis as-is; throws if it is rank deficient
    static Subspace from_raw_basis(std::vector<Field> basis, double tol = 1e-10) {
        Subspace probe = span_of(basis, tol);
        if (probe.dim() != basis.size())
            throw std::invalid_argument("Subspace: rank-deficient basis");
        Subspace s;
        s.basis_ = std::move(basis);
        s.orthonormal_ = false;
        return s;
    }

    const std::vector<Field>& basis() const { return basis_; }
    std::size_t dim() const { return basis_.size(); }
    bool orthonormalized() const { return orthonormal_; }

    // Gram matrix in the L2 pairing
    Mat gram() const {
        Mat g(dim(), dim());
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = i; j < dim(); ++j) {
                g(i, j) = inner_k(basis_[i], basis_[j], 0.0);
                g(j, i) = g(i, j);
            }
        return g;
    }

    std::vector<double> coords(const Field& u) const {
        std::vector<double> c(dim());
        for (std::size_t i = 0; i < dim(); ++i) c[i] = inner_k(u, basis_[i], 0.0);
        if (!orthonormal_ && dim() > 0) c = spd_solve(gram(), std::move(c));
        return c;
    }

    Field reconstruct(const std::vector<double>& c) const {
        Field u{};
        for (std::size_t i = 0; i < dim(); ++i)
            if (c[i] != 0.0) u = u + basis_[i] * c[i];
        return u;
    }

    Field project(const Field& u) const {
        if (dim() == 0) return Field{};
        return reconstruct(coords(u));
    }

    double projection_residual(const Field& u) const {
        return sobolev_norm(u - project(u), 0.0);
    }

    bool contains(const Field& u, double tol = 1e-9) const {
        const double n = sobolev_norm(u, 0.0);
        if (n == 0.0) return true;
        return projection_residual(u) <= tol * n;
    }

    // span(this  U  extra); result orthonormal, existing basis first
    Subspace extended(const std::vector<Field>& extra, double tol = 1e-10) const {
        Subspace s = orthonormal_ ? *this : span_of(basis_, tol);
        s.orthonormal_ = true;
        for (const Field& g : extra) s.absorb(g, tol);
        return s;
    }

    // component of u orthogonal to this subspace
    Field orth_complement_of(const Field& u) const { return u - project(u); }

  private:
    std::vector<Field> basis_;
    bool orthonormal_ = false;

    void absorb(const Field& g, double tol) {
        const double gn = sobolev_norm(g, 0.0);
        if (gn == 0.0) return;
        Field r = g;
        for (int pass = 0; pass < 2; ++pass)
            for (const Field& b : basis_) r = r - b * inner_k(r, b, 0.0);
        const double rn = sobolev_norm(r, 0.0);
        if (rn > tol * gn) basis_.push_back(r * (1.0 / rn));
    }
};

using ModeSubspace = Subspace<SpectralField>;
using ScalarSubspace = Subspace<ScalarSpectralField>;

// dimension (0..4) of the projection of span(S) onto the real fiber of m
int fiber_dimension(const ModeSubspace& s, const WaveVector& m, double tol = 1e-8);

// span{c_m, s_m (both polarizations) : 0 < |m|_l1 <= radius}   (Example 3.3)
ModeSubspace generator_subspace(int radius, double theta = 0.0);

} // namespace eulerctl
