//==============================================================================
// sim.hpp
// Galerkin-truncated time integration of the shifted Euler system
//     u' + P_M B(u + zeta) = P_M f,     u(0) = u0,
// on the l1 cutoff ball.  B is evaluated exactly on the inputs' support and
// restricted afterwards, which keeps <P_M B(u), u> = 0 and hence exact energy
// conservation up to time-stepping error.  The integrator is RK4 with fixed
// dt, segment-aligned to control breakpoints so discontinuities never
// straddle a step.  Runs are deterministic: identical inputs give
// bit-identical trajectories.
//==============================================================================
#pragma once

#include <stdexcept>
#include <vector>

#include "eulerctl/bilinear.hpp"
#include "eulerctl/control_signal.hpp"
#include "eulerctl/spectral_field.hpp"

namespace eulerctl {

struct GalerkinConfig {
    int cutoff = 3;        // l1 radius of retained modes
    double dt = 1e-3;      // nominal step; segments are subdivided to honor it
    double sobolev_k = 4;  // reporting norm order
    double guard_factor = 1e3;
    int store_stride = 1;  // store every n-th step (0 and T always stored)

    void validate() const {
        if (cutoff < 1) throw std::invalid_argument("GalerkinConfig: cutoff must be >= 1");
        if (dt <= 0.0) throw std::invalid_argument("GalerkinConfig: dt must be positive");
        if (sobolev_k < 0.0) throw std::invalid_argument("GalerkinConfig: sobolev_k >= 0");
    }
};

// raised when the (2.11)-style norm monitor trips
class BlowupError : public std::runtime_error {
  public:
    BlowupError(double t, double norm, double ceiling)
        : std::runtime_error("blow-up guard tripped"), time(t), norm(norm), ceiling(ceiling) {}
    double time, norm, ceiling;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    GalerkinConfig cfg;
    double max_divergence = 0.0; // worst relative divergence seen at any step

    const SpectralField& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }

    // state at the stored time nearest to t
    const SpectralField& state_near(double t) const;
    // kinetic energy proxy ||u||_0^2
    double energy(std::size_t i) const {
        const double n = sobolev_norm(states[i], 0.0);
        return n * n;
    }
};

// solve u' = -P_M B(u + zeta) + P_M f
Trajectory resolve(const SpectralField& u0, const ControlSignal& zeta, const ControlSignal& f,
                   const GalerkinConfig& cfg);

// the controlled system (zeta = 0, f = h + eta)
Trajectory resolve_controlled(const SpectralField& u0, const ControlSignal& eta,
                              const ControlSignal& h, const GalerkinConfig& cfg);

// p = inverse_laplacian(div h - sum_ij d_j u_i d_i u_j), zero mean
ScalarSpectralField pressure_recover(const SpectralField& u, const SpectralField& h);

struct LipschitzReport {
    std::vector<double> scales;
    std::vector<double> ratios;   //||R(u0+s du0) - R(u0)||_{C(J,H^{k-1})} / (s ||du0||_{k-1})
    double time_ratio_max = 0.0;  // max_t ||u(t+dt)-u(t)||_{k-1} / dt
    double rhs_sup = 0.0;         // max_t ||P_M f - P_M B(u+zeta)||_{k-1}
};

// empirical probes for the continuity statements of the resolving operator
LipschitzReport lipschitz_probe(const SpectralField& u0, const SpectralField& du0,
                                const ControlSignal& zeta, const ControlSignal& f,
                                const GalerkinConfig& cfg, const std::vector<double>& scales);

} // namespace eulerctl
