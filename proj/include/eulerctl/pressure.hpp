//==============================================================================
// pressure.hpp
// Exact pressure-projection control: the quadratic form A, high-wavevector
// quadruple selection with machine-checked separation conditions, the lift
// field v solving A(u_hat + v) = p_hat in F_m-perp, and combined
// velocity+pressure projection steering.
//==============================================================================
#pragma once

#include <cstdint>
#include <vector>

#include "eulerctl/sim.hpp"
#include "eulerctl/synthesis.hpp"

namespace eulerctl {

// the symmetric quadratic form A(u,v) = -P_{G_m} inverse_laplacian of
// sum_ij d_j u_i d_i v_j, exact in Fourier space
ScalarSpectralField quadratic_form_a(const SpectralField& u, const SpectralField& v, int m);
inline ScalarSpectralField quadratic_form_a(const SpectralField& u, int m) {
    return quadratic_form_a(u, u, m);
}

struct PressureTarget {
    int m = 1;
    SpectralField u_hat;        // in F_m
    ScalarSpectralField p_hat;  // in G_m
    struct Coefficient {
        WaveVector n;  // canonical
        double c_sin;  // coefficient of sin<n,x> in p_hat - A(u_hat)
        double d_cos;  // coefficient of cos<n,x>
    };
    std::vector<Coefficient> targets;
};

PressureTarget make_pressure_target(int m, const SpectralField& u_hat,
                                    const ScalarSpectralField& p_hat);

struct WaveQuadruple {
    WaveVector n; // canonical target wavevector, 0 < |n| <= m
    WaveVector k1, k2, k3, k4;
    std::uint64_t phi = 0;  // injection value (paper_formula)
    WaveVector m_of_n;      // direction vector (paper_formula)
};

enum class QuadrupleStrategy { paper_formula, minimal_norm };

// Machine check of the separation conditions for a whole family: designed
// differences k2-k1 = k4-k3 = n, every |k| > 2m, all other pairwise sums and
// differences (within and across blocks and targets) exceed m, and the pairs
// (k1,k2), (k3,k4) are non-parallel.  Throws std::logic_error on violation.
void validate_quadruples(const std::vector<WaveQuadruple>& family, int m);

// the raw construction rule k1 = 8 phi m(n), k2 = k1 + n, k3 = (8 phi + 4) m(n),
// k4 = k3 + n for a given injection value and direction
WaveQuadruple paper_formula_quadruple(const WaveVector& n, std::uint64_t phi,
                                      const WaveVector& m_of_n);

// the full family for all canonical |n| <= m, jointly validated
std::vector<WaveQuadruple> quadruple_family(int m, QuadrupleStrategy strategy);
// single-target accessor
WaveQuadruple select_wavevectors(const WaveVector& n, int m, QuadrupleStrategy strategy);

// the lift v in F_m-perp with A(u_hat + v) = p_hat; coefficients are split
// sqrt-balanced within each block so v -> 0 as the residual target does
SpectralField pressure_lift(const PressureTarget& target,
                            const std::vector<WaveQuadruple>& quads);

struct SteerResult {
    ControlSignal control;
    SpectralField lift;
    SpectralField final_velocity;
    ScalarSpectralField final_pressure;
    double velocity_error = 0.0;        // ||u(T) - (u_hat + v)||_k
    double velocity_proj_error = 0.0;   // ||P_{F_m} u(T) - u_hat||_k
    double pressure_proj_error = 0.0;   // ||P_{G_m} p(T) - p_hat||_k
    double c_emp = 0.0;                 // measured local Lipschitz constant of A
    int required_cutoff = 0;            // smallest ball containing target + lift
    SynthesisReport synth_report;
};

SteerResult steer_velocity_pressure(const SpectralField& u0, const SpectralField& u_hat,
                                    const ScalarSpectralField& p_hat, int m, double horizon,
                                    const ControlSignal& h, const ModeSubspace& e,
                                    const SynthesisParams& params, const GalerkinConfig& cfg,
                                    QuadrupleStrategy strategy);

} // namespace eulerctl
