#include "eulerctl/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eulerctl/grid_oracle.hpp"

namespace eulerctl {

namespace {

nlohmann::json header_json(const std::string& kind, const std::optional<int>& cutoff_hint) {
    nlohmann::json h;
    h["kind"] = kind;
    h["format_version"] = kFieldFormatVersion;
    if (cutoff_hint) h["cutoff_hint"] = *cutoff_hint;
    return h;
}

} // namespace

nlohmann::json field_to_json(const SpectralField& f, const std::string& kind) {
    nlohmann::json j;
    j["header"] = header_json(kind, f.cutoff_hint());
    auto& modes = j["modes"] = nlohmann::json::array();
    for (const auto& e : f.entries()) {
        nlohmann::json rec;
        rec["m"] = {e.m.m1, e.m.m2, e.m.m3};
        rec["re"] = {e.a.x.real(), e.a.y.real(), e.a.z.real()};
        rec["im"] = {e.a.x.imag(), e.a.y.imag(), e.a.z.imag()};
        modes.push_back(std::move(rec));
    }
    return j;
}

nlohmann::json field_to_json(const ScalarSpectralField& f, const std::string& kind) {
    nlohmann::json j;
    j["header"] = header_json(kind, std::nullopt);
    auto& modes = j["modes"] = nlohmann::json::array();
    for (const auto& e : f.entries()) {
        nlohmann::json rec;
        rec["m"] = {e.m.m1, e.m.m2, e.m.m3};
        rec["re"] = e.a.real();
        rec["im"] = e.a.imag();
        modes.push_back(std::move(rec));
    }
    return j;
}

SpectralField field_from_json(const nlohmann::json& j) {
    std::vector<FieldEntry> entries;
    for (const auto& rec : j.at("modes")) {
        const auto& m = rec.at("m");
        const auto& re = rec.at("re");
        const auto& im = rec.at("im");
        entries.push_back({WaveVector{m.at(0), m.at(1), m.at(2)},
                           CVec3{c64{re.at(0), im.at(0)}, c64{re.at(1), im.at(1)},
                                 c64{re.at(2), im.at(2)}}});
    }
    SpectralField f = SpectralField::from_entries(std::move(entries));
    if (j.at("header").contains("cutoff_hint"))
        f.cutoff_hint() = j.at("header").at("cutoff_hint").get<int>();
    return f;
}

ScalarSpectralField scalar_field_from_json(const nlohmann::json& j) {
    std::vector<ScalarEntry> entries;
    for (const auto& rec : j.at("modes")) {
        const auto& m = rec.at("m");
        entries.push_back({WaveVector{m.at(0), m.at(1), m.at(2)},
                           c64{rec.at("re").get<double>(), rec.at("im").get<double>()}});
    }
    return ScalarSpectralField::from_entries(std::move(entries));
}

void save_field(const SpectralField& f, const std::string& path, const std::string& kind) {
    write_text_file(path, field_to_json(f, kind).dump(1) + "\n");
}
void save_field(const ScalarSpectralField& f, const std::string& path, const std::string& kind) {
    write_text_file(path, field_to_json(f, kind).dump(1) + "\n");
}
SpectralField load_field(const std::string& path) {
    return field_from_json(nlohmann::json::parse(read_text_file(path)));
}
ScalarSpectralField load_scalar_field(const std::string& path) {
    return scalar_field_from_json(nlohmann::json::parse(read_text_file(path)));
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void trajectory_csv(const Trajectory& traj, std::ostream& os, int vorticity_grid) {
    os << "t,energy,norm_k,vorticity_sup\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double vort =
            vorticity_grid > 0 ? vorticity_sup(traj.states[i], vorticity_grid) : 0.0;
        os << fmt_double(traj.times[i]) << ',' << fmt_double(traj.energy(i)) << ','
           << fmt_double(sobolev_norm(traj.states[i], traj.cfg.sobolev_k)) << ','
           << fmt_double(vort) << '\n';
    }
}

void control_csv(const ControlSignal& signal, const ModeSubspace& basis, std::ostream& os,
                 std::size_t max_rows) {
    os << "t";
    for (std::size_t i = 0; i < basis.dim(); ++i) os << ",c" << i;
    os << '\n';
    std::size_t rows = 0;
    for (const auto& seg : signal.segments()) {
        if (++rows > max_rows) break;
        os << fmt_double(seg.t0);
        const auto c = basis.coords(seg.value(seg.t0));
        for (double v : c) os << ',' << fmt_double(v);
        os << '\n';
    }
}

void quadruples_csv(const std::vector<WaveQuadruple>& family, std::ostream& os) {
    os << "n1,n2,n3,k1_1,k1_2,k1_3,k2_1,k2_2,k2_3,k3_1,k3_2,k3_3,k4_1,k4_2,k4_3,phi\n";
    for (const auto& q : family) {
        auto put = [&os](const WaveVector& w) { os << w.m1 << ',' << w.m2 << ',' << w.m3; };
        put(q.n);
        os << ',';
        put(q.k1);
        os << ',';
        put(q.k2);
        os << ',';
        put(q.k3);
        os << ',';
        put(q.k4);
        os << ',' << q.phi << '\n';
    }
}

nlohmann::json to_json(const SaturationReport& rep) {
    nlohmann::json j;
    j["dims"] = rep.dims;
    j["fiber_radius"] = rep.fiber_radius;
    auto& stages = j["stages"] = nlohmann::json::array();
    for (std::size_t s = 0; s < rep.spaces.size(); ++s) {
        nlohmann::json st;
        st["dim"] = rep.dims[s];
        if (s > 0) {
            st["added"] = rep.added_per_step[s - 1].size();
            double worst = 0.0;
            for (const auto& d : rep.added_per_step[s - 1])
                worst = std::max({worst, d.plus.residual, d.minus.residual});
            st["max_certificate_residual"] = worst;
        }
        auto& fibers = st["fibers"] = nlohmann::json::array();
        for (const auto& f : rep.fibers_per_stage[s])
            fibers.push_back({{"m", {f.m.m1, f.m.m2, f.m.m3}}, {"dim", f.dimension}});
        stages.push_back(std::move(st));
    }
    return j;
}

nlohmann::json to_json(const SynthesisReport& rep) {
    nlohmann::json j;
    j["ansatz_endpoint_error"] = rep.ansatz_endpoint_error;
    j["reduction_l1_error"] = rep.reduction_l1_error;
    j["pwc_sup_error"] = rep.pwc_sup_error;
    j["relaxation_defect_sup"] = rep.relaxation_defect_sup;
    j["ramp_l2_estimate"] = rep.ramp_l2_estimate;
    j["final_error"] = rep.final_error;
    j["final_rel_error"] = rep.final_rel_error;
    j["schedule_slots_max"] = rep.schedule_slots_max;
    j["control_segments"] = rep.control_segments;
    j["admissible"] = rep.admissible;
    j["used_bank_certificates"] = rep.used_bank_certificates;
    j["params"] = {{"mu", rep.params.mu},
                   {"delta", rep.params.delta},
                   {"s", rep.params.s},
                   {"n", rep.params.n},
                   {"stages", rep.params.stages},
                   {"ramp_frac", rep.params.ramp_frac},
                   {"drop_weight", rep.params.drop_weight}};
    return j;
}

nlohmann::json to_json(const LipschitzReport& rep) {
    nlohmann::json j;
    j["scales"] = rep.scales;
    j["ratios"] = rep.ratios;
    j["time_ratio_max"] = rep.time_ratio_max;
    j["rhs_sup"] = rep.rhs_sup;
    return j;
}

nlohmann::json to_json(const SteerResult& res) {
    nlohmann::json j;
    j["velocity_error"] = res.velocity_error;
    j["velocity_proj_error"] = res.velocity_proj_error;
    j["pressure_proj_error"] = res.pressure_proj_error;
    j["c_emp"] = res.c_emp;
    j["required_cutoff"] = res.required_cutoff;
    j["synthesis"] = to_json(res.synth_report);
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace eulerctl
