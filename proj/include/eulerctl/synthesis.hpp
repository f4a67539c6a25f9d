//==============================================================================
// synthesis.hpp
// The approximate-controllability synthesis cascade: smoothed linear ansatz,
// reduction to a saturated subspace, piecewise-constant approximation,
// convexification of saturation certificates, fast-oscillation relaxation,
// and elimination of the shift control by ramping.  The end product is an
// E-valued control whose trajectory lands near the target.
//==============================================================================
#pragma once

#include <functional>
#include <optional>

#include "eulerctl/saturation.hpp"
#include "eulerctl/sim.hpp"

namespace eulerctl {

//------------------------------------------------------------------------------
// ansatz: u(t) = (t/T) e^{-mu L} u_hat + (1 - t/T) e^{-delta L} u0, with the
// exact forcing eta = u' + B(u) - h evaluated in Fourier space.  Note the path
// starts at e^{-delta L} u0, not u0; small delta plus the continuity of the
// resolving operator covers the gap.
//------------------------------------------------------------------------------
struct AnsatzResult {
    ControlSignal eta;   // polynomial control, h already subtracted
    Trajectory path;     // the closed-form path sampled on the dt grid
    SpectralField start; // e^{-delta L} u0
    SpectralField end;   // e^{-mu L} u_hat
    SpectralField c0, c1, c2; // eta(t) + h(t) = c0 + c1 t + c2 t^2
};

AnsatzResult ansatz_control(const SpectralField& u0, const SpectralField& u_hat, double mu,
                            double delta, double horizon, const ControlSignal& h,
                            const GalerkinConfig& cfg);

// heat smoothing of a target (trades H^k targets for smoother ones)
inline SpectralField mollify_target(const SpectralField& u_hat, double delta) {
    return u_hat.heat(delta);
}

// time-pointwise L2 projection of a control onto a subspace
inline ControlSignal reduce_to_subspace(const ControlSignal& eta, const ModeSubspace& e_n) {
    return eta.projected(e_n);
}

//------------------------------------------------------------------------------
// piecewise-constant approximation over a fixed orthonormal basis of the
// control's value span: vertices +-dM e_l, convex weights sampled at r T / s
//------------------------------------------------------------------------------
struct PiecewiseConstantControl {
    std::vector<SpectralField> basis; // e_1..e_d, orthonormal
    double big_m = 0.0;               // max coordinate magnitude over all axes
    std::vector<double> axis_m;       // per-axis coordinate maxima M_l
    std::vector<SpectralField> vertices; // 2d entries: +d M_l e_l, then -d M_l e_l
    int grid_count = 0;               // s
    Mat coefficients;                 // (2d) x s, nonnegative, columns sum to 1
    double horizon = 0.0;

    SpectralField reconstruct_at(int r) const;
    ControlSignal as_signal() const;
};

PiecewiseConstantControl pwc_approximate(const ControlSignal& eta,
                                         const std::vector<SpectralField>& basis, int s);

// the metric of the piecewise-constant control space: sum over vertices of
// the sup distance between weight functions.  Requires matching shapes.
double pwc_metric(const PiecewiseConstantControl& a, const PiecewiseConstantControl& b);

//------------------------------------------------------------------------------
// convexification of a saturation certificate (the identity
// B(u) - eta1 = sum_j lambda_j B(u + zeta_j) - eta for all u)
//------------------------------------------------------------------------------
struct ConvexifiedForce {
    std::vector<double> lambdas;  // positive, sum to 1 (empty for eta1 in E)
    std::vector<FieldPtr> zetas;  // same length
    SpectralField eta;
};

ConvexifiedForce convexify(const SaturationCertificate& cert);

// residual of the convexification identity at a given u
double convexify_identity_residual(const ConvexifiedForce& form, const SpectralField& eta1,
                                   const SpectralField& u);

//------------------------------------------------------------------------------
// relaxation: per-interval mixtures sum_i d_i B(u + zeta_i) replaced by fast
// cycling through the zeta_i with time shares d_i
//------------------------------------------------------------------------------
struct MixtureSlot {
    double weight = 0.0;
    FieldPtr zeta; // null means zeta = 0
};
using IntervalSchedule = std::vector<std::vector<MixtureSlot>>; // one list per interval

// piecewise-constant zeta_n with n periods inside each of the s intervals,
// visiting zeta_i for weight_i * period.  Slots below drop_weight are removed
// and the remainder renormalized; the effective schedule is reported when
// requested (the defect must be measured against it).
ControlSignal relaxation_control(const IntervalSchedule& schedule, int n, double horizon,
                                 double drop_weight = 0.0,
                                 IntervalSchedule* effective_out = nullptr);

struct RelaxationDefect {
    std::vector<double> times;
    std::vector<double> kf_norm; // ||K f_n(t)||_{k+1}
    double sup_kf = 0.0;
};

// defect f_n = B(u1 + zeta_n) - sum_i d_i B(u1 + zeta_i) along a trajectory,
// integrated to K f_n.  Exact piecewise-linear integration for a constant
// state; sampled quadrature along a trajectory.
RelaxationDefect compute_relaxation_defect(const SpectralField& constant_state,
                                           const ControlSignal& zeta_n,
                                           const IntervalSchedule& schedule, double k);
RelaxationDefect compute_relaxation_defect(const Trajectory& u1, const ControlSignal& zeta_n,
                                           const IntervalSchedule& schedule, double k,
                                           int samples = 64);

//------------------------------------------------------------------------------
// zeta elimination: replace the shift by a C1 ramped version vanishing at the
// endpoints and fold its derivative into the control.  The contract is
//     R(u0, zeta~, h + eta) = R(u0, eta + d(zeta~)/dt) - zeta~ ,
// so the two trajectories coincide at T where zeta~ vanishes.
//------------------------------------------------------------------------------
struct ZetaElimination {
    ControlSignal control;    // eta + d(zeta~)/dt
    ControlSignal zeta_tilde; // the ramped shift (for the identity check)
    double ramp_width = 0.0;
};

ZetaElimination eliminate_zeta(const ControlSignal& eta, const ControlSignal& zeta_pwc,
                               double ramp_width);

//------------------------------------------------------------------------------
// the full cascade
//------------------------------------------------------------------------------
struct SynthesisParams {
    double mu = 1e-5;
    double delta = 1e-5;
    int s = 16;              // pwc grid count
    int n = 32;              // relaxation frequency
    int stages = 1;
    double ramp_frac = 0.25;   // ramp width as a fraction of the shortest slot
    double drop_weight = 1e-3; // mixture slots below this are dropped
    double cert_tol = 1e-9;
    bool compute_final_error = true;
};

struct SynthesisReport {
    double ansatz_endpoint_error = 0.0; // ||path(T) - u_hat||_k
    double reduction_l1_error = 0.0;    // L1(J_T, H^k) cost of P_{E_N}
    double pwc_sup_error = 0.0;         // sampled sup ||eta(t) - Psi_s(t)||_k
    double relaxation_defect_sup = 0.0; // sampled sup ||K f_n||_{k+1}
    double ramp_l2_estimate = 0.0;      // ||zeta_n - zeta~||_{L2(J,H^{k+1})} bound
    double final_error = -1.0;          // ||u(T) - u_hat||_k (when computed)
    double final_rel_error = -1.0;
    int schedule_slots_max = 0;
    std::size_t control_segments = 0;
    bool admissible = true;      // no blow-up guard trip during measurement
    bool used_bank_certificates = false;
    SynthesisParams params;
};

struct SynthesisResult {
    ControlSignal control; // E-valued
    SynthesisReport report;
};

// Cascade synthesis.  With a SaturationReport the ansatz is reduced onto
// E_N (N = stages) and vertices are certified through the stored stage
// certificates; without one (stages <= 1) the ansatz quadratic is certified
// structurally from its fiber pair decomposition, which requires u0, u_hat
// and h to live on E's fibers.
SynthesisResult synthesize(const SpectralField& u0, const SpectralField& u_hat, double horizon,
                           const ControlSignal& h, const ModeSubspace& e,
                           const SynthesisParams& params, const GalerkinConfig& cfg,
                           const SaturationReport* saturation = nullptr);

//------------------------------------------------------------------------------
// exact projection targeting (Brouwer-style damped fixed point iteration on
// u -> u + theta (u_hat - P_F R_T(u0, synth(u))))
//------------------------------------------------------------------------------
struct ProjectionIterateResult {
    ControlSignal control;
    double achieved_error = 0.0; // ||P_F u(T) - u_hat||_k of the best iterate
    int iterations = 0;
    bool converged = false;
    double max_iterate_norm = 0.0; // the ball the iteration actually used
    std::vector<double> error_history;
};

ProjectionIterateResult exact_projection_iterate(
    const SpectralField& u0, const SpectralField& u_hat, const ModeSubspace& f,
    const std::function<ControlSignal(const SpectralField&)>& synth, const ControlSignal& h,
    const GalerkinConfig& cfg, double tol, int max_iter, double theta = 1.0);

} // namespace eulerctl
