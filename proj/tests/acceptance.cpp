//==============================================================================
// acceptance.cpp
// End-to-end acceptance suite: one criterion per number, every tolerance
// pinned in code.  Usage:
//     acceptance            run all criteria
//     acceptance <k>        run criterion k only
// Prints one pass/fail line per criterion; exit 0 iff everything passed.
//==============================================================================
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "eulerctl/bilinear.hpp"
#include "eulerctl/experiment.hpp"
#include "eulerctl/grid_oracle.hpp"
#include "eulerctl/pressure.hpp"
#include "eulerctl/rng.hpp"
#include "eulerctl/saturation.hpp"
#include "eulerctl/serialize.hpp"
#include "eulerctl/sim.hpp"
#include "eulerctl/synthesis.hpp"

using namespace eulerctl;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " FAILED{" << what << "}";
        }
    }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SpectralField random_div_free(Rng& rng, int radius, double k = 0.0, double norm = 1.0) {
    SpectralField u;
    for (const WaveVector& m : canonical_l1_ball(radius))
        for (const auto& f : fiber_basis(m)) u = u + f * rng.normal();
    return u * (norm / sobolev_norm(u, k));
}

//------------------------------------------------------------------------------
// 1. spectral bilinear form vs grid advection oracle + projection
//------------------------------------------------------------------------------
Outcome criterion_1() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto a = random_div_free(rng, 3);
        const auto b = random_div_free(rng, 3);
        const auto via_grid = leray_project(grid_oracle_advect(a, b, 16));
        const auto via_spectral = bilinear_b(a, b);
        worst = std::max(worst, sobolev_norm(via_grid - via_spectral, 0.0));
    }
    const double secs = seconds_since(t0);
    out.detail << "max deviation " << worst << " over 50 pairs, " << secs << " s";
    out.require(worst <= 1e-10, "deviation above 1e-10");
    out.require(secs < 10.0, "runtime above 10 s");
    return out;
}

//------------------------------------------------------------------------------
// 2. conservation suite: energy, divergence, zero mean, advection skew symmetry
//------------------------------------------------------------------------------
Outcome criterion_2() {
    Outcome out;
    Rng rng(1002);
    GalerkinConfig cfg;
    cfg.cutoff = 4;
    cfg.dt = 1e-3;
    cfg.store_stride = 1; // every step checked
    const auto u0 = random_div_free(rng, 4, 0.0, 1.0);
    const auto traj = resolve(u0, ControlSignal::zero(1.0), ControlSignal::zero(1.0), cfg);

    double drift = 0.0;
    const double e0 = traj.energy(0);
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        drift = std::max(drift, std::abs(traj.energy(i) - e0) / e0);
    bool zero_mean = true;
    for (const auto& s : traj.states)
        for (const auto& e : s.entries())
            if (e.m.is_zero()) zero_mean = false;

    double skew = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto a = random_div_free(rng, 3);
        const auto b = random_div_free(rng, 3);
        skew = std::max(skew, std::abs(inner_k(bilinear_b(a, b), b, 0.0)));
    }

    out.detail << "energy drift " << drift << ", max divergence " << traj.max_divergence
               << ", skew " << skew;
    out.require(drift <= 1e-6, "energy drift above 1e-6");
    out.require(traj.max_divergence <= 1e-12, "divergence above 1e-12");
    out.require(zero_mean, "zero-mean violated");
    out.require(skew <= 1e-12, "<B(a,b), b> above 1e-12");
    return out;
}

//------------------------------------------------------------------------------
// 3. continuity probes for the resolving operator
//------------------------------------------------------------------------------
Outcome criterion_3() {
    Outcome out;
    Rng rng(1003);
    GalerkinConfig cfg;
    cfg.cutoff = 3;
    cfg.dt = 1e-3;
    cfg.store_stride = 5;
    const auto u0 = random_div_free(rng, 3, 4.0, 0.8);
    const auto du0 = random_div_free(rng, 3, 4.0, 1.0);
    const auto f = ControlSignal::constant(random_div_free(rng, 2, 0.0, 0.3), 0.5);
    const auto rep =
        lipschitz_probe(u0, du0, ControlSignal::zero(0.5), f, cfg, {1e-2, 5e-3, 2.5e-3});

    out.detail << "ratios";
    for (double r : rep.ratios) out.detail << " " << r;
    out.detail << ", time ratio " << rep.time_ratio_max << " vs rhs sup " << rep.rhs_sup;
    for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
        out.require(rep.ratios[i] < 2.0 * rep.ratios[i - 1], "ratio grew by more than 2x");
        out.require(rep.ratios[i] > 0.5 * rep.ratios[i - 1], "ratio shrank by more than 2x");
    }
    out.require(rep.time_ratio_max <= 1.1 * rep.rhs_sup,
                "time-Lipschitz ratio above 1.1 x sup ||f - B(u+zeta)||");
    return out;
}

//------------------------------------------------------------------------------
// 4. saturation from the |m| <= 3 generator set
//------------------------------------------------------------------------------
Outcome criterion_4() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    SaturationOptions opt;
    opt.combo_depth = 2;
    opt.tol = 1e-10;
    opt.image_l1_cap = 8;
    const auto rep = saturation_sequence(generator_subspace(3), 2, opt);

    out.require(rep.dims.size() == 3, "missing stages");
    out.require(rep.dims[1] > rep.dims[0], "dims not strictly increasing at stage 1");
    out.require(rep.dims[2] > rep.dims[1], "dims not strictly increasing at stage 2");

    double worst = 0.0;
    std::size_t n_certs = 0;
    for (const auto& step : rep.added_per_step)
        for (const auto& d : step) {
            worst = std::max(
                {worst, verify_certificate(d.plus), verify_certificate(d.minus)});
            n_certs += 2;
        }
    out.require(worst < 1e-9, "certificate residual above 1e-9 on the independent path");

    bool monotone = true;
    for (std::size_t s = 0; s + 1 < rep.fibers_per_stage.size(); ++s)
        for (std::size_t i = 0; i < rep.fibers_per_stage[s].size(); ++i)
            if (rep.fibers_per_stage[s][i].dimension >
                rep.fibers_per_stage[s + 1][i].dimension)
                monotone = false;
    out.require(monotone, "fiber map not monotone");

    int complete_outside = 0;
    for (const auto& f : rep.fibers_per_stage[2])
        if (f.m.l1() > 3 && f.dimension == 4) ++complete_outside;
    out.require(complete_outside >= 1, "no complete fiber outside the generator radius");

    const double secs = seconds_since(t0);
    out.detail << "dims " << rep.dims[0] << " -> " << rep.dims[1] << " -> " << rep.dims[2]
               << ", " << n_certs << " certificates (worst residual " << worst << "), "
               << complete_outside << " complete fibers outside radius 3, " << secs << " s";
    out.require(secs < 300.0, "runtime above 5 min");
    return out;
}

//------------------------------------------------------------------------------
// 5. convexification identity across produced forms
//------------------------------------------------------------------------------
Outcome criterion_5() {
    Outcome out;
    Rng rng(1005);
    std::vector<std::pair<SpectralField, ConvexifiedForce>> forms;

    // forms from NNLS certificates of a saturation step
    const auto e = generator_subspace(1);
    SaturationOptions opt;
    const auto step = saturation_step(e, opt);
    for (const auto& d : step.added) {
        forms.push_back({d.plus.target, convexify(d.plus)});
        forms.push_back({d.minus.target, convexify(d.minus)});
        if (forms.size() >= 10) break;
    }
    out.require(forms.size() >= 2, "no certificates produced");

    // forms from structural certificates (pair decompositions)
    for (int t = 0; t < 4; ++t) {
        const auto w = random_div_free(rng, 2, 0.0, rng.uniform(0.2, 1.0));
        SaturationCertificate cert;
        cert.target = bilinear_b(w);
        std::vector<FieldPtr> parts;
        for (const auto& en : w.entries())
            parts.push_back(share(SpectralField::from_entries({en})));
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = i + 1; j < parts.size(); ++j) {
                if (bilinear_b_sym(*parts[i], *parts[j]).is_zero()) continue;
                cert.terms.push_back({1.0, share(*parts[i] - *parts[j])});
            }
        if (verify_certificate(cert) > 1e-12) continue;
        forms.push_back({cert.target, convexify(cert)});
    }

    double worst = 0.0;
    for (const auto& [eta1, form] : forms)
        for (int t = 0; t < 20; ++t) {
            const auto u = random_div_free(rng, 2, 0.0, rng.uniform(0.1, 2.0));
            worst = std::max(worst, convexify_identity_residual(form, eta1, u));
        }
    out.detail << forms.size() << " forms x 20 states, worst residual " << worst;
    out.require(worst < 1e-12, "identity residual above 1e-12");
    return out;
}

//------------------------------------------------------------------------------
// 6. relaxation defect decay rate on the constant-state instance
//------------------------------------------------------------------------------
Outcome criterion_6() {
    Outcome out;
    Rng rng(1006);
    const auto b = random_div_free(rng, 2, 0.0, 0.8);
    const auto z1 = share(mode_field({1, 0, 0}, Polarization::plus, Phase::cos));
    const auto z2 = share(mode_field({0, 1, 0}, Polarization::plus, Phase::sin) * 0.7);
    const auto z3 = share(mode_field({0, 0, 1}, Polarization::minus, Phase::cos) * 1.2);
    const IntervalSchedule sched = {{{0.3, z1}, {0.5, z2}, {0.2, z3}}};

    std::vector<double> ns = {4, 8, 16, 32}, sups;
    for (double n : ns) {
        const auto zn = relaxation_control(sched, static_cast<int>(n), 1.0);
        sups.push_back(compute_relaxation_defect(b, zn, sched, 4.0).sup_kf);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double x = std::log(ns[i]), y = std::log(sups[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope =
        (static_cast<double>(ns.size()) * sxy - sx * sy) /
        (static_cast<double>(ns.size()) * sxx - sx * sx);
    out.detail << "sup ||Kf_n||:";
    for (double s : sups) out.detail << " " << s;
    out.detail << ", fitted exponent " << -slope;
    out.require(-slope >= 0.8 && -slope <= 1.2, "decay exponent outside [0.8, 1.2]");
    return out;
}

//------------------------------------------------------------------------------
// 7. zeta-elimination shift identity along trajectories
//------------------------------------------------------------------------------
Outcome criterion_7() {
    Outcome out;
    Rng rng(1007);
    double worst = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        const double T = 1.0;
        const auto u0 = random_div_free(rng, 2, 0.0, 0.5);
        const auto h = ControlSignal::constant(random_div_free(rng, 1, 0.0, 0.2), T);
        const auto eta = ControlSignal::constant(random_div_free(rng, 2, 0.0, 0.4), T);
        std::vector<FieldPtr> vals;
        for (int i = 0; i < 4; ++i) vals.push_back(share(random_div_free(rng, 2, 0.0, 0.5)));
        const auto zeta =
            ControlSignal::piecewise_constant({0.0, 0.25, 0.5, 0.75, 1.0}, vals, T);
        const auto ramped = ramp_piecewise_constant(zeta, 0.05);

        GalerkinConfig cfg;
        cfg.cutoff = 3;
        cfg.dt = 1e-3;
        cfg.store_stride = 25;
        const auto lhs = resolve(u0, ramped.value, h + eta, cfg);
        const auto rhs = resolve_controlled(u0, eta + ramped.derivative, h, cfg);
        for (std::size_t i = 0; i < lhs.times.size(); ++i) {
            const auto shifted = lhs.states[i] + ramped.value.eval(lhs.times[i]);
            worst = std::max(worst, sobolev_norm(shifted - rhs.states[i], 0.0));
        }
    }
    out.detail << "worst trajectory deviation " << worst << " over 10 instances";
    out.require(worst < 1e-8, "shift identity above 1e-8");
    return out;
}

//------------------------------------------------------------------------------
// the pinned reference instance shared by criteria 8 and 9
//------------------------------------------------------------------------------
struct ReferenceInstance {
    GalerkinConfig cfg;
    ModeSubspace e;
    SpectralField u_hat;
    ControlSignal h = ControlSignal::zero(1.0);
    SynthesisParams params;

    ReferenceInstance() {
        cfg.cutoff = 3;
        cfg.dt = 1e-3;
        cfg.store_stride = 0;
        e = generator_subspace(3);
        u_hat = generate_target(2, 4.0, 1.0, 42);
        params.mu = 1e-5;
        params.delta = 1e-5;
        params.s = 16;
        params.n = 32;
        params.ramp_frac = 0.1;
    }
};

//------------------------------------------------------------------------------
// 8. end-to-end approximate controllability with an n-sweep
//------------------------------------------------------------------------------
Outcome criterion_8() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    ReferenceInstance ref;

    std::vector<double> errors;
    out.detail << "rel errors:";
    for (int n : {8, 16, 32}) {
        SynthesisParams p = ref.params;
        p.n = n;
        const auto res =
            synthesize(SpectralField::zero(), ref.u_hat, 1.0, ref.h, ref.e, p, ref.cfg);
        out.require(res.report.admissible, "blow-up guard tripped");
        errors.push_back(res.report.final_rel_error);
        out.detail << " n=" << n << ": " << res.report.final_rel_error;
    }
    out.require(errors.back() < 0.1, "relative error at (s,n)=(16,32) not below 0.1");
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        out.require(errors[i + 1] <= errors[i], "error not monotone non-increasing in n");

    const double secs = seconds_since(t0);
    out.detail << ", " << secs << " s";
    out.require(secs < 600.0, "runtime above 10 min");
    return out;
}

//------------------------------------------------------------------------------
// 9. exact projection targeting on the criterion-8 instance
//------------------------------------------------------------------------------
Outcome criterion_9() {
    Outcome out;
    ReferenceInstance ref;
    const auto f = ModeSubspace::span_of(generator_fields(1));
    const SpectralField u_hat_f = f.project(ref.u_hat);

    SynthesisParams p = ref.params;
    p.compute_final_error = false;
    auto synth = [&](const SpectralField& target) {
        return synthesize(SpectralField::zero(), target, 1.0, ref.h, ref.e, p, ref.cfg).control;
    };
    const auto res = exact_projection_iterate(SpectralField::zero(), u_hat_f, f, synth, ref.h,
                                              ref.cfg, 1e-3, 20);
    out.detail << "achieved " << res.achieved_error << " in " << res.iterations
               << " iterations (history:";
    for (double e : res.error_history) out.detail << " " << e;
    out.detail << ")";
    out.require(res.converged && res.achieved_error < 1e-3,
                "projection error not below 1e-3 within 20 iterations");
    return out;
}

//------------------------------------------------------------------------------
// 10. pressure lift identity for both strategies at m = 1, 2
//------------------------------------------------------------------------------
Outcome criterion_10() {
    Outcome out;
    Rng rng(1010);
    double worst = 0.0;
    for (int m : {1, 2})
        for (auto strategy :
             {QuadrupleStrategy::paper_formula, QuadrupleStrategy::minimal_norm}) {
            const auto quads = quadruple_family(m, strategy);
            for (int t = 0; t < 20; ++t) {
                const auto u_hat = random_div_free(rng, m, 4.0, 0.2);
                const auto p_hat =
                    generate_scalar_target(m, 4.0, 0.05, rng.next_u64());
                const auto target = make_pressure_target(m, u_hat, p_hat);
                const auto v = pressure_lift(target, quads);
                worst =
                    std::max(worst, sobolev_norm(quadratic_form_a(u_hat + v, m) - p_hat, 4.0));
                for (const auto& en : v.entries())
                    out.require(en.m.l1() > m, "lift support inside F_m");
                out.require(std::abs(inner_k(v, u_hat, 0.0)) == 0.0,
                            "lift not exactly orthogonal to the velocity target");
            }
        }
    out.detail << "worst ||A(u+v) - p||_4 = " << worst
               << " over 80 randomized pairs (m in {1,2}, both strategies)";
    out.require(worst <= 1e-10, "lift identity residual above 1e-10");
    return out;
}

//------------------------------------------------------------------------------
// 11. combined velocity + pressure steering at m = 1
//------------------------------------------------------------------------------
Outcome criterion_11() {
    Outcome out;
    GalerkinConfig cfg;
    cfg.cutoff = 6;
    cfg.dt = 1e-3;
    cfg.store_stride = 0;
    SynthesisParams p;
    p.stages = 0;
    p.mu = 1e-6;
    p.delta = 1e-6;
    const auto u_hat = generate_target(1, 4.0, 5e-3, 71);
    const auto p_hat = generate_scalar_target(1, 4.0, 1e-7, 71);

    const auto res = steer_velocity_pressure(SpectralField::zero(), u_hat, p_hat, 1, 1.0,
                                             ControlSignal::zero(1.0), ModeSubspace{}, p, cfg,
                                             QuadrupleStrategy::minimal_norm);
    out.detail << "velocity error " << res.velocity_error << ", pressure projection error "
               << res.pressure_proj_error << ", C_emp " << res.c_emp << ", bound "
               << res.c_emp * res.velocity_error;
    out.require(res.velocity_error < 1e-3, "velocity error not below 1e-3");
    out.require(res.pressure_proj_error <= 1.05 * res.c_emp * res.velocity_error + 1e-15,
                "pressure error above C_emp x velocity error");
    out.require(res.pressure_proj_error < 1e-2, "pressure error not below 1e-2");
    return out;
}

//------------------------------------------------------------------------------
// 12. determinism: identical config and seed give byte-identical reports
//------------------------------------------------------------------------------
Outcome criterion_12() {
    Outcome out;
    namespace fs = std::filesystem;
    const std::string configs[] = {
        "[experiment]\nseed = 5\n[galerkin]\ncutoff = 2\ndt = 2e-3\nstore_stride = 10\n"
        "[run]\nhorizon = 0.1\nsnapshot_stride = 5\n"
        "[initial]\nzero = false\nradius = 2\nnorm = 0.8\n"
        "[forcing]\nzero = false\nradius = 1\nnorm = 0.3\n",
        "[experiment]\nseed = 6\n[generators]\nradius = 1\n[saturate]\nsteps = 1\n",
    };
    const std::string kinds[] = {"simulate", "saturate"};

    for (int which = 0; which < 2; ++which) {
        const auto base = fs::temp_directory_path() / ("eulerctl_acc12_" + kinds[which]);
        const std::string dir_a = (base / "a").string();
        const std::string dir_b = (base / "b").string();
        fs::remove_all(base);
        const TomlTable t = parse_toml(configs[which]);
        run(load_experiment_config(t, kinds[which], dir_a));
        run(load_experiment_config(t, kinds[which], dir_b));

        std::size_t files = 0;
        for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
            if (!entry.is_regular_file()) continue;
            ++files;
            const auto rel = fs::relative(entry.path(), dir_a);
            const auto twin = fs::path(dir_b) / rel;
            out.require(fs::exists(twin), "missing twin artifact " + rel.string());
            if (!fs::exists(twin)) continue;
            out.require(read_text_file(entry.path().string()) ==
                            read_text_file(twin.string()),
                        "artifact differs: " + rel.string());
        }
        out.detail << kinds[which] << ": " << files << " artifacts byte-identical; ";
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    using CriterionFn = std::function<Outcome()>;
    const std::vector<std::pair<const char*, CriterionFn>> criteria = {
        {"spectral-core oracle equivalence", criterion_1},
        {"conservation suite", criterion_2},
        {"resolving-operator continuity probes", criterion_3},
        {"saturation from the |m| <= 3 generators", criterion_4},
        {"convexification identity", criterion_5},
        {"relaxation defect decay rate", criterion_6},
        {"zeta-elimination shift identity", criterion_7},
        {"end-to-end approximate controllability", criterion_8},
        {"exact projection targeting", criterion_9},
        {"pressure lift identity", criterion_10},
        {"combined velocity+pressure steering", criterion_11},
        {"determinism of experiment reruns", criterion_12},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "usage: acceptance [1..%zu]\n", criteria.size());
        return 2;
    }

    bool all_pass = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i + 1) != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        std::printf("[%s] criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, o.detail.str().c_str());
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
