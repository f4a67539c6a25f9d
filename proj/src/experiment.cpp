#include "eulerctl/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "eulerctl/bilinear.hpp"
#include "eulerctl/grid_oracle.hpp"
#include "eulerctl/rng.hpp"
#include "eulerctl/serialize.hpp"

namespace eulerctl {

namespace {

namespace fs = std::filesystem;

constexpr const char* kProjectVersion = "0.1.0";

} // namespace

SpectralField generate_target(int radius, double k, double norm, std::uint64_t seed) {
    if (radius < 1) throw ConfigError("generate_target: radius must be >= 1");
    Rng rng(seed);
    SpectralField u;
    for (const WaveVector& m : canonical_l1_ball(radius))
        for (const auto& f : fiber_basis(m)) u = u + f * rng.normal();
    if (norm == 0.0) return SpectralField::zero();
    const double n = sobolev_norm(u, k);
    return u * (norm / n);
}

ScalarSpectralField generate_scalar_target(int radius, double k, double norm,
                                           std::uint64_t seed) {
    Rng rng(seed ^ 0x5ca1ab1eull);
    RawScalarMap raw;
    for (const WaveVector& m : canonical_l1_ball(radius))
        raw[m] = c64{rng.normal(), rng.normal()};
    ScalarSpectralField f = ScalarSpectralField::from_raw(raw);
    if (norm == 0.0) return {};
    return f * (norm / sobolev_norm(f, k));
}

//------------------------------------------------------------------------------

ExperimentConfig load_experiment_config(const TomlTable& table, const std::string& kind,
                                        const std::string& out_dir) {
    TomlReader r(table);
    ExperimentConfig c;
    c.kind = kind;
    c.out_dir = out_dir;

    const std::string file_kind = r.text("experiment", "kind", kind);
    if (file_kind != kind)
        throw ConfigError("experiment.kind ('" + file_kind + "') conflicts with the subcommand '" +
                          kind + "'");
    c.seed = static_cast<std::uint64_t>(r.integer("experiment", "seed", 1));

    c.galerkin.cutoff = static_cast<int>(r.integer("galerkin", "cutoff", 3));
    c.galerkin.dt = r.number("galerkin", "dt", 1e-3);
    c.galerkin.sobolev_k = r.number("galerkin", "sobolev_k", 4.0);
    c.galerkin.guard_factor = r.number("galerkin", "guard_factor", 1e3);
    c.galerkin.store_stride = static_cast<int>(r.integer("galerkin", "store_stride", 10));
    try {
        c.galerkin.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("galerkin: ") + e.what());
    }

    c.horizon = r.number("run", "horizon", 1.0);
    if (c.horizon <= 0.0) throw ConfigError("run.horizon: must be positive");
    c.snapshot_stride = static_cast<int>(r.integer("run", "snapshot_stride", 0));

    c.generator_radius = static_cast<int>(r.integer("generators", "radius", 3));
    c.frame_rotation = r.number("generators", "frame_rotation", 0.0);
    if (c.generator_radius < 1) throw ConfigError("generators.radius: must be >= 1");

    c.target_radius = static_cast<int>(r.integer("target", "radius", 2));
    c.target_norm = r.number("target", "norm", 1.0);
    c.target_file = r.text("target", "file", "");

    c.u0_zero = r.boolean("initial", "zero", true);
    c.u0_radius = static_cast<int>(r.integer("initial", "radius", 2));
    c.u0_norm = r.number("initial", "norm", 1.0);
    c.u0_file = r.text("initial", "file", "");

    c.forcing_zero = r.boolean("forcing", "zero", true);
    c.forcing_radius = static_cast<int>(r.integer("forcing", "radius", 1));
    c.forcing_norm = r.number("forcing", "norm", 0.0);

    c.saturation_steps = static_cast<int>(r.integer("saturate", "steps", 2));
    c.combo_depth = static_cast<int>(r.integer("saturate", "combo_depth", 2));
    c.saturation_tol = r.number("saturate", "tol", 1e-10);
    c.image_radius_cap = static_cast<int>(r.integer("saturate", "image_radius_cap", -1));
    c.max_candidates = static_cast<int>(r.integer("saturate", "max_candidates", -1));
    c.export_certificates = static_cast<int>(r.integer("saturate", "export_certificates", 0));
    if (c.combo_depth < 1 || c.combo_depth > 2)
        throw ConfigError("saturate.combo_depth: must be 1 or 2");

    c.synth.mu = r.number("synthesis", "mu", 1e-5);
    c.synth.delta = r.number("synthesis", "delta", 1e-5);
    c.synth.s = static_cast<int>(r.integer("synthesis", "s", 16));
    c.synth.n = static_cast<int>(r.integer("synthesis", "n", 32));
    c.synth.stages = static_cast<int>(r.integer("synthesis", "stages", 1));
    c.synth.ramp_frac = r.number("synthesis", "ramp_frac", 0.1);
    c.synth.drop_weight = r.number("synthesis", "drop_weight", 1e-3);
    c.synth.cert_tol = r.number("synthesis", "cert_tol", 1e-9);
    for (double v : r.numbers("synthesis", "n_sweep", {}))
        c.n_sweep.push_back(static_cast<int>(v));
    c.export_control = r.boolean("synthesis", "export_control", false);
    if (c.synth.s < 1 || c.synth.n < 1) throw ConfigError("synthesis.s/n: must be >= 1");

    c.pressure_m = static_cast<int>(r.integer("pressure", "m", 1));
    c.strategy = r.text("pressure", "strategy", "minimal_norm");
    c.pressure_norm = r.number("pressure", "norm", 1e-7);
    if (c.strategy != "minimal_norm" && c.strategy != "paper_formula")
        throw ConfigError("pressure.strategy: expected minimal_norm or paper_formula");

    c.assert_energy_drift_max = r.number("assert", "energy_drift_max", -1.0);
    c.assert_rel_error_max = r.number("assert", "rel_error_max", -1.0);
    c.assert_monotone_sweep = r.boolean("assert", "monotone_sweep", false);
    c.assert_dims_strictly_increasing = r.boolean("assert", "dims_strictly_increasing", false);
    c.assert_cert_residual_max = r.number("assert", "cert_residual_max", -1.0);
    c.assert_velocity_error_max = r.number("assert", "velocity_error_max", -1.0);
    c.assert_pressure_error_max = r.number("assert", "pressure_error_max", -1.0);

    r.mark_known("experiment", "kind");
    r.reject_unknown_keys();
    return c;
}

//------------------------------------------------------------------------------

namespace {

nlohmann::json config_echo(const ExperimentConfig& c) {
    nlohmann::json j;
    j["kind"] = c.kind;
    j["seed"] = c.seed;
    j["galerkin"] = {{"cutoff", c.galerkin.cutoff},
                     {"dt", c.galerkin.dt},
                     {"sobolev_k", c.galerkin.sobolev_k},
                     {"guard_factor", c.galerkin.guard_factor},
                     {"store_stride", c.galerkin.store_stride}};
    j["run"] = {{"horizon", c.horizon}, {"snapshot_stride", c.snapshot_stride}};
    j["generators"] = {{"radius", c.generator_radius}, {"frame_rotation", c.frame_rotation}};
    j["target"] = {{"radius", c.target_radius}, {"norm", c.target_norm}, {"file", c.target_file}};
    j["initial"] = {{"zero", c.u0_zero},
                    {"radius", c.u0_radius},
                    {"norm", c.u0_norm},
                    {"file", c.u0_file}};
    j["forcing"] = {{"zero", c.forcing_zero},
                    {"radius", c.forcing_radius},
                    {"norm", c.forcing_norm}};
    j["saturate"] = {{"steps", c.saturation_steps},
                     {"combo_depth", c.combo_depth},
                     {"tol", c.saturation_tol},
                     {"image_radius_cap", c.image_radius_cap},
                     {"max_candidates", c.max_candidates},
                     {"export_certificates", c.export_certificates}};
    j["synthesis"] = {{"mu", c.synth.mu},         {"delta", c.synth.delta},
                      {"s", c.synth.s},           {"n", c.synth.n},
                      {"stages", c.synth.stages}, {"ramp_frac", c.synth.ramp_frac},
                      {"drop_weight", c.synth.drop_weight}, {"cert_tol", c.synth.cert_tol},
                      {"n_sweep", c.n_sweep},     {"export_control", c.export_control}};
    j["pressure"] = {{"m", c.pressure_m}, {"strategy", c.strategy}, {"norm", c.pressure_norm}};
    return j;
}

void write_manifest(const ExperimentConfig& c) {
    nlohmann::json j;
    j["format_version"] = kFieldFormatVersion;
    j["project_version"] = kProjectVersion;
    j["seed"] = c.seed;
    j["config"] = config_echo(c);
    write_text_file(c.out_dir + "/manifest.json", j.dump(1) + "\n");
}

SpectralField resolve_u0(const ExperimentConfig& c) {
    if (!c.u0_file.empty()) return load_field(c.u0_file);
    if (c.u0_zero) return SpectralField::zero();
    return generate_target(c.u0_radius, c.galerkin.sobolev_k, c.u0_norm, c.seed ^ 0x11);
}

SpectralField resolve_target(const ExperimentConfig& c) {
    if (!c.target_file.empty()) return load_field(c.target_file);
    return generate_target(c.target_radius, c.galerkin.sobolev_k, c.target_norm, c.seed);
}

ControlSignal resolve_forcing(const ExperimentConfig& c) {
    if (c.forcing_zero || c.forcing_norm == 0.0) return ControlSignal::zero(c.horizon);
    return ControlSignal::constant(
        generate_target(c.forcing_radius, c.galerkin.sobolev_k, c.forcing_norm, c.seed ^ 0x22),
        c.horizon);
}

void check(std::vector<std::string>& failures, bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

//------------------------------------------------------------------------------

RunResult run_simulate(const ExperimentConfig& c) {
    RunResult out;
    const SpectralField u0 = resolve_u0(c);
    const ControlSignal f = resolve_forcing(c);
    const Trajectory traj = resolve(u0, ControlSignal::zero(c.horizon), f, c.galerkin);

    {
        std::ostringstream csv;
        trajectory_csv(traj, csv);
        write_text_file(c.out_dir + "/trajectory.csv", csv.str());
    }
    if (c.snapshot_stride > 0) {
        fs::create_directories(c.out_dir + "/fields");
        for (std::size_t i = 0; i < traj.states.size();
             i += static_cast<std::size_t>(c.snapshot_stride)) {
            char name[64];
            std::snprintf(name, sizeof(name), "/fields/state_%06zu.json", i);
            save_field(traj.states[i], c.out_dir + name);
        }
    }

    double drift = 0.0;
    const double e0 = traj.energy(0);
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        drift = std::max(drift, std::abs(traj.energy(i) - e0));
    const double rel_drift = e0 > 0.0 ? drift / e0 : drift;

    out.report["final_energy"] = traj.energy(traj.states.size() - 1);
    out.report["final_norm_k"] = sobolev_norm(traj.final_state(), c.galerkin.sobolev_k);
    out.report["energy_rel_drift"] = rel_drift;
    out.report["max_divergence"] = traj.max_divergence;
    out.report["stored_states"] = traj.states.size();

    if (c.assert_energy_drift_max >= 0.0)
        check(out.failures, rel_drift <= c.assert_energy_drift_max,
              "energy drift " + fmt(rel_drift) + " exceeds " + fmt(c.assert_energy_drift_max));
    return out;
}

RunResult run_saturate(const ExperimentConfig& c) {
    RunResult out;
    const ModeSubspace e = generator_subspace(c.generator_radius, c.frame_rotation);
    SaturationOptions opt;
    opt.combo_depth = c.combo_depth;
    opt.tol = c.saturation_tol;
    opt.image_l1_cap = c.image_radius_cap;
    opt.max_candidates = c.max_candidates;
    const SaturationReport rep = saturation_sequence(e, c.saturation_steps, opt);

    // re-derive every certificate residual on the independent code path
    double worst_residual = 0.0;
    std::size_t cert_count = 0;
    for (const auto& step : rep.added_per_step)
        for (const auto& d : step) {
            worst_residual = std::max(
                {worst_residual, verify_certificate(d.plus), verify_certificate(d.minus)});
            cert_count += 2;
        }

    nlohmann::json j = to_json(rep);
    j["verified_certificates"] = cert_count;
    j["worst_verified_residual"] = worst_residual;
    write_text_file(c.out_dir + "/saturation.json", j.dump(1) + "\n");
    out.report = std::move(j);

    if (c.export_certificates > 0) {
        // audit export: the decomposition data in the standard field format
        auto cert_json = [](const SaturationCertificate& cert) {
            nlohmann::json cj;
            cj["target"] = field_to_json(cert.target, "certificate_target");
            cj["eta"] = field_to_json(cert.eta, "certificate_eta");
            cj["residual"] = cert.residual;
            auto& terms = cj["terms"] = nlohmann::json::array();
            for (const auto& [alpha, zeta] : cert.terms)
                terms.push_back(
                    {{"alpha", alpha}, {"zeta", field_to_json(*zeta, "certificate_zeta")}});
            return cj;
        };
        nlohmann::json certs = nlohmann::json::array();
        int exported = 0;
        for (const auto& step : rep.added_per_step)
            for (const auto& d : step) {
                if (exported >= c.export_certificates) break;
                certs.push_back({{"direction", field_to_json(d.direction, "direction")},
                                 {"plus", cert_json(d.plus)},
                                 {"minus", cert_json(d.minus)}});
                ++exported;
            }
        write_text_file(c.out_dir + "/certificates.json", certs.dump(1) + "\n");
    }

    if (c.assert_dims_strictly_increasing)
        for (std::size_t s = 0; s + 1 < rep.dims.size(); ++s)
            check(out.failures, rep.dims[s + 1] > rep.dims[s],
                  "dims not strictly increasing at stage " + std::to_string(s + 1));
    if (c.assert_cert_residual_max >= 0.0)
        check(out.failures, worst_residual <= c.assert_cert_residual_max,
              "certificate residual " + fmt(worst_residual) + " exceeds " +
                  fmt(c.assert_cert_residual_max));
    // fiber monotonicity is structural; verify anyway
    for (std::size_t s = 0; s + 1 < rep.fibers_per_stage.size(); ++s)
        for (std::size_t i = 0; i < rep.fibers_per_stage[s].size(); ++i)
            check(out.failures,
                  rep.fibers_per_stage[s][i].dimension <=
                      rep.fibers_per_stage[s + 1][i].dimension,
                  "fiber dimension decreased across stages");
    return out;
}

RunResult run_synthesize(const ExperimentConfig& c) {
    RunResult out;
    const ModeSubspace e = generator_subspace(c.generator_radius, c.frame_rotation);
    const SpectralField u0 = resolve_u0(c);
    const SpectralField u_hat = resolve_target(c);
    const ControlSignal h = resolve_forcing(c);

    std::vector<int> sweep = c.n_sweep;
    if (sweep.empty()) sweep.push_back(c.synth.n);

    nlohmann::json runs = nlohmann::json::array();
    std::vector<double> errors;
    ControlSignal final_control = ControlSignal::zero(c.horizon);
    for (int n : sweep) {
        SynthesisParams p = c.synth;
        p.n = n;
        const SynthesisResult res = synthesize(u0, u_hat, c.horizon, h, e, p, c.galerkin);
        runs.push_back(to_json(res.report));
        errors.push_back(res.report.final_rel_error);
        final_control = res.control;
        if (!res.report.admissible) out.exit_code = 3;
    }

    nlohmann::json j;
    j["target_norm_k"] = sobolev_norm(u_hat, c.galerkin.sobolev_k);
    j["runs"] = runs;
    write_text_file(c.out_dir + "/synthesis.json", j.dump(1) + "\n");
    out.report = std::move(j);

    if (c.export_control) {
        const ModeSubspace basis = ModeSubspace::span_of(final_control.value_generators());
        std::ostringstream csv;
        control_csv(final_control, basis, csv);
        write_text_file(c.out_dir + "/control.csv", csv.str());
    }

    if (c.assert_rel_error_max >= 0.0)
        check(out.failures, errors.back() >= 0.0 && errors.back() <= c.assert_rel_error_max,
              "relative error " + fmt(errors.back()) + " exceeds " +
                  fmt(c.assert_rel_error_max));
    if (c.assert_monotone_sweep)
        for (std::size_t i = 0; i + 1 < errors.size(); ++i)
            check(out.failures, errors[i + 1] <= errors[i],
                  "sweep error increased from n=" + std::to_string(sweep[i]) + " to n=" +
                      std::to_string(sweep[i + 1]));
    return out;
}

RunResult run_pressure(const ExperimentConfig& c) {
    RunResult out;
    const SpectralField u_hat =
        generate_target(c.pressure_m, c.galerkin.sobolev_k, c.target_norm, c.seed);
    const ScalarSpectralField p_hat =
        generate_scalar_target(c.pressure_m, c.galerkin.sobolev_k, c.pressure_norm, c.seed);
    const ControlSignal h = resolve_forcing(c);
    const auto strategy = c.strategy == "paper_formula" ? QuadrupleStrategy::paper_formula
                                                        : QuadrupleStrategy::minimal_norm;
    const ModeSubspace e =
        c.synth.stages > 0 ? generator_subspace(c.generator_radius, c.frame_rotation)
                           : ModeSubspace{};

    const SteerResult res = steer_velocity_pressure(resolve_u0(c), u_hat, p_hat, c.pressure_m,
                                                    c.horizon, h, e, c.synth, c.galerkin,
                                                    strategy);

    {
        std::ostringstream csv;
        quadruples_csv(quadruple_family(c.pressure_m, strategy), csv);
        write_text_file(c.out_dir + "/quadruples.csv", csv.str());
    }
    save_field(res.lift, c.out_dir + "/lift.json", "lift");
    nlohmann::json j = to_json(res);
    write_text_file(c.out_dir + "/pressure.json", j.dump(1) + "\n");
    out.report = std::move(j);

    if (c.assert_velocity_error_max >= 0.0)
        check(out.failures, res.velocity_error <= c.assert_velocity_error_max,
              "velocity error " + fmt(res.velocity_error) + " exceeds " +
                  fmt(c.assert_velocity_error_max));
    if (c.assert_pressure_error_max >= 0.0)
        check(out.failures, res.pressure_proj_error <= c.assert_pressure_error_max,
              "pressure projection error " + fmt(res.pressure_proj_error) + " exceeds " +
                  fmt(c.assert_pressure_error_max));
    return out;
}

RunResult run_verify(const ExperimentConfig& c) {
    RunResult out;
    struct Row {
        std::string name;
        double measured;
        double bound;
    };
    std::vector<Row> rows;
    Rng rng(c.seed);

    auto random_div_free = [&rng](int radius) {
        SpectralField u;
        for (const WaveVector& m : canonical_l1_ball(radius))
            for (const auto& f : fiber_basis(m)) u = u + f * rng.normal();
        return u * (1.0 / sobolev_norm(u, 0.0));
    };

    { // spectral vs grid advection oracle
        double worst = 0.0;
        for (int t = 0; t < 3; ++t) {
            const auto a = random_div_free(2);
            const auto b = random_div_free(2);
            worst = std::max(worst, sobolev_norm(leray_project(grid_oracle_advect(a, b, 12)) -
                                                     bilinear_b(a, b),
                                                 0.0));
        }
        rows.push_back({"bilinear_grid_oracle", worst, 1e-10});
    }
    { // advection skew symmetry
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const auto a = random_div_free(3);
            const auto b = random_div_free(3);
            worst = std::max(worst, std::abs(inner_k(bilinear_b(a, b), b, 0.0)));
        }
        rows.push_back({"advection_skew_symmetry", worst, 1e-12});
    }
    { // single-mode fixed point of B
        const auto cmode = mode_field({2, -1, 0}, Polarization::plus, Phase::sin);
        rows.push_back({"single_mode_self_advection", sobolev_norm(bilinear_b(cmode), 0.0), 0.0});
    }
    { // energy conservation on a short unforced run
        GalerkinConfig g = c.galerkin;
        g.cutoff = 3;
        g.store_stride = 25;
        const auto traj =
            resolve(random_div_free(3), ControlSignal::zero(0.25), ControlSignal::zero(0.25), g);
        double drift = 0.0;
        for (std::size_t i = 0; i < traj.states.size(); ++i)
            drift = std::max(drift, std::abs(traj.energy(i) - traj.energy(0)) / traj.energy(0));
        rows.push_back({"energy_conservation", drift, 1e-6});
    }
    { // shift identity on one randomized instance
        const double T = 0.5;
        std::vector<FieldPtr> vals;
        for (int i = 0; i < 3; ++i) vals.push_back(share(random_div_free(2) * 0.4));
        const auto zeta =
            ControlSignal::piecewise_constant({0.0, 0.5 / 3, 1.0 / 3, T}, vals, T);
        const auto ramped = ramp_piecewise_constant(zeta, 0.02);
        const auto eta = ControlSignal::constant(random_div_free(2) * 0.3, T);
        GalerkinConfig g = c.galerkin;
        g.cutoff = 3;
        g.store_stride = 100;
        const auto u0 = random_div_free(2) * 0.5;
        const auto lhs = resolve(u0, ramped.value, eta, g);
        const auto rhs = resolve_controlled(u0, eta + ramped.derivative,
                                            ControlSignal::zero(T), g);
        double worst = 0.0;
        for (std::size_t i = 0; i < lhs.times.size(); ++i)
            worst = std::max(worst, sobolev_norm(lhs.states[i] +
                                                     ramped.value.eval(lhs.times[i]) -
                                                     rhs.states[i],
                                                 0.0));
        rows.push_back({"zeta_shift_identity", worst, 1e-8});
    }
    { // saturation certificates on a small instance, independent verification
        const auto e =
            ModeSubspace::span_of(fiber_basis({1, 0, 0})).extended(fiber_basis({0, 1, 0}));
        SaturationOptions opt;
        const auto step = saturation_step(e, opt);
        double worst = step.added.empty() ? 1.0 : 0.0; // must certify something
        for (const auto& d : step.added)
            worst = std::max({worst, verify_certificate(d.plus), verify_certificate(d.minus)});
        rows.push_back({"saturation_certificates", worst, 1e-9});
    }
    { // convexification identity
        const auto g1 = mode_field({1, 0, 0}, Polarization::plus, Phase::sin);
        const auto g2 = mode_field({0, 1, 0}, Polarization::minus, Phase::cos);
        SaturationCertificate cert;
        cert.target = bilinear_b(g1 - g2) * -1.0;
        cert.terms.push_back({1.0, share(g1 - g2)});
        const auto form = convexify(cert);
        double worst = 0.0;
        for (int t = 0; t < 5; ++t)
            worst = std::max(worst, convexify_identity_residual(form, cert.target,
                                                                random_div_free(2)));
        rows.push_back({"convexification_identity", worst, 1e-12});
    }
    { // pressure lift at m = 1
        const auto u_hat = random_div_free(1) * 0.2;
        const auto p_hat = generate_scalar_target(1, c.galerkin.sobolev_k, 0.05, c.seed ^ 7);
        const auto quads = quadruple_family(1, QuadrupleStrategy::minimal_norm);
        const auto v = pressure_lift(make_pressure_target(1, u_hat, p_hat), quads);
        rows.push_back({"pressure_lift_identity",
                        sobolev_norm(quadratic_form_a(u_hat + v, 1) - p_hat, 0.0), 1e-10});
    }

    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : rows) {
        const bool pass = row.measured <= row.bound;
        table.push_back({{"check", row.name},
                         {"measured", row.measured},
                         {"bound", row.bound},
                         {"pass", pass}});
        check(out.failures, pass,
              row.name + ": measured " + fmt(row.measured) + " exceeds " + fmt(row.bound));
    }
    nlohmann::json j;
    j["checks"] = table;
    write_text_file(c.out_dir + "/verify.json", j.dump(1) + "\n");
    out.report = std::move(j);
    return out;
}

} // namespace

RunResult run(const ExperimentConfig& c) {
    fs::create_directories(c.out_dir);
    write_manifest(c);

    RunResult out;
    try {
        if (c.kind == "simulate")
            out = run_simulate(c);
        else if (c.kind == "saturate")
            out = run_saturate(c);
        else if (c.kind == "synthesize")
            out = run_synthesize(c);
        else if (c.kind == "pressure")
            out = run_pressure(c);
        else if (c.kind == "verify")
            out = run_verify(c);
        else
            throw ConfigError("unknown experiment kind: " + c.kind);
    } catch (const BlowupError& e) {
        nlohmann::json j;
        j["guard_tripped"] = true;
        j["time"] = e.time;
        j["norm"] = e.norm;
        j["ceiling"] = e.ceiling;
        write_text_file(c.out_dir + "/guard.json", j.dump(1) + "\n");
        out.report = std::move(j);
        out.exit_code = 3;
        return out;
    }

    if (out.exit_code == 0 && !out.failures.empty()) out.exit_code = 1;
    nlohmann::json summary;
    summary["exit_code"] = out.exit_code;
    summary["failures"] = out.failures;
    write_text_file(c.out_dir + "/status.json", summary.dump(1) + "\n");
    return out;
}

} // namespace eulerctl
