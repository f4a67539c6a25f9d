//==============================================================================
// serialize.hpp
// Text artifacts: spectral fields as JSON record lists (one record per
// canonical wavevector), trajectory / control CSV tables, and report JSON.
// Doubles are emitted shortest-round-trip, so rewriting a loaded field is
// byte-identical and reruns of an experiment produce byte-identical reports.
//==============================================================================
#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "eulerctl/pressure.hpp"
#include "eulerctl/saturation.hpp"
#include "eulerctl/sim.hpp"
#include "eulerctl/synthesis.hpp"

namespace eulerctl {

inline constexpr int kFieldFormatVersion = 1;

nlohmann::json field_to_json(const SpectralField& f, const std::string& kind = "velocity");
nlohmann::json field_to_json(const ScalarSpectralField& f, const std::string& kind = "pressure");
SpectralField field_from_json(const nlohmann::json& j);
ScalarSpectralField scalar_field_from_json(const nlohmann::json& j);

void save_field(const SpectralField& f, const std::string& path,
                const std::string& kind = "velocity");
void save_field(const ScalarSpectralField& f, const std::string& path,
                const std::string& kind = "pressure");
SpectralField load_field(const std::string& path);
ScalarSpectralField load_scalar_field(const std::string& path);

// time series: t, energy, ||u||_k, vorticity_sup
void trajectory_csv(const Trajectory& traj, std::ostream& os, int vorticity_grid = 24);

// breakpoint table: t, then the value's coordinates in the subspace basis
void control_csv(const ControlSignal& signal, const ModeSubspace& basis, std::ostream& os,
                 std::size_t max_rows = 100000);

// quadruple table: n, k1..k4, phi
void quadruples_csv(const std::vector<WaveQuadruple>& family, std::ostream& os);

nlohmann::json to_json(const SaturationReport& rep);
nlohmann::json to_json(const SynthesisReport& rep);
nlohmann::json to_json(const LipschitzReport& rep);
nlohmann::json to_json(const SteerResult& res);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace eulerctl
