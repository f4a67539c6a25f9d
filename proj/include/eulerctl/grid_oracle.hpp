//==============================================================================
// grid_oracle.hpp
// Real-space oracles used to cross-check the spectral kernels: fields are
// evaluated point-wise on a uniform grid, nonlinearities formed there, and
// the result transformed back by direct DFT.  No Leray projection is applied
// by the advection oracle; callers project.  Grid resolution must exceed
// twice the largest output wavevector (l-infinity) or the transform aliases.
//==============================================================================
#pragma once

#include "eulerctl/spectral_field.hpp"

namespace eulerctl {

// (a . grad) b formed on a res^3 grid, returned as raw coefficients for every
// wavevector in the support sumset (zero mode included).
RawCoeffMap grid_oracle_advect(const SpectralField& a, const SpectralField& b, int grid_res);

// sum_ij d_j u_i d_i u_j formed on the grid (the pressure source term)
RawScalarMap grid_oracle_pressure_source(const SpectralField& u, int grid_res);

// sup over T^3 of |rot u|: grid scan followed by a local ascent polish, so
// the value is resolution-independent once the coarse grid resolves the
// maximizing basin.  Diagnostic only.
double vorticity_sup(const SpectralField& u, int grid_res);

// curl in Fourier space: (rot u)^(m) = i m x u_hat(m)
SpectralField curl(const SpectralField& u);

} // namespace eulerctl
