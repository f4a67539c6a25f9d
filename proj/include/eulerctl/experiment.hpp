//==============================================================================
// experiment.hpp
// Reproducible experiment runner: a config file plus a seed determines every
// number in the output directory.  Kinds: simulate, saturate, synthesize,
// pressure, verify.  Exit codes: 0 pass, 1 assertion failure, 2 config
// error, 3 numerical guard tripped.
//==============================================================================
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "eulerctl/pressure.hpp"
#include "eulerctl/saturation.hpp"
#include "eulerctl/sim.hpp"
#include "eulerctl/synthesis.hpp"
#include "eulerctl/toml_lite.hpp"

namespace eulerctl {

struct ExperimentConfig {
    std::string kind;
    std::string out_dir;
    std::uint64_t seed = 1;

    GalerkinConfig galerkin;
    double horizon = 1.0;
    int snapshot_stride = 0; // field snapshots every N stored states (0: none)

    // generator set (Example 3.3 defaults)
    int generator_radius = 3;
    double frame_rotation = 0.0;

    // target
    int target_radius = 2;
    double target_norm = 1.0;
    std::string target_file;

    // initial state
    bool u0_zero = true;
    int u0_radius = 2;
    double u0_norm = 1.0;
    std::string u0_file;

    // forcing (h for controlled runs, f for plain simulation)
    bool forcing_zero = true;
    int forcing_radius = 1;
    double forcing_norm = 0.0;

    // saturation
    int saturation_steps = 2;
    int combo_depth = 2;
    double saturation_tol = 1e-10;
    int image_radius_cap = -1;
    int max_candidates = -1;
    int export_certificates = 0; // write the first N certified directions for audit

    // synthesis
    SynthesisParams synth;
    std::vector<int> n_sweep;
    bool export_control = false;

    // pressure
    int pressure_m = 1;
    std::string strategy = "minimal_norm";
    double pressure_norm = 1e-7;

    // assertion gates (negative / false disables a gate)
    double assert_energy_drift_max = -1.0;
    double assert_rel_error_max = -1.0;
    bool assert_monotone_sweep = false;
    bool assert_dims_strictly_increasing = false;
    double assert_cert_residual_max = -1.0;
    double assert_velocity_error_max = -1.0;
    double assert_pressure_error_max = -1.0;
};

// throws ConfigError with precise field paths
ExperimentConfig load_experiment_config(const TomlTable& table, const std::string& kind,
                                        const std::string& out_dir);

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> failures; // human-readable assertion breach notes
    nlohmann::json report;
};

RunResult run(const ExperimentConfig& cfg);

// deterministic pseudorandom divergence-free target on all fibers with
// |m| <= radius, normalized to the requested H^k norm
SpectralField generate_target(int radius, double k, double norm, std::uint64_t seed);
ScalarSpectralField generate_scalar_target(int radius, double k, double norm,
                                           std::uint64_t seed);

} // namespace eulerctl
