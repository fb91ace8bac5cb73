#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "iqm/connection.hpp"
#include "iqm/flow.hpp"
#include "iqm/tracker.hpp"

namespace iqm {

using json = nlohmann::json;

constexpr int kScenarioSchemaVersion = 1;

// Complex arrays are stored as separate real and imaginary parts, row-major.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

json state_to_json(const StateVector& s);
StateVector state_from_json(const json& j);

json density_to_json(const DensityOperator& d);
DensityOperator density_from_json(const json& j);

// {"dim", "re", "im"} or a split {"n1", "n2", "h0", "h1", "h2"}, plus an
// optional "drive": {"family": "sinusoidal", "omega", "phase", "re", "im"}.
json hamiltonian_to_json(const HamiltonianSpec& h);
HamiltonianSpec hamiltonian_from_json(const json& j);

json read_json_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

// t, then per frame index: |q|, arg q, energy phase
void write_trajectory_csv(std::ostream& os, const PolarTrajectory& traj);
void write_jumps_jsonl(std::ostream& os, const std::vector<JumpEvent>& jumps);
void write_label_timeline_csv(std::ostream& os, const LabelTimeline& tl);
void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

struct Scenario {
    int schema_version = kScenarioSchemaVersion;
    std::string name = "scenario";
    int n1 = 2;
    int n2 = 2;

    // state: "product", "singlet", "hyperfine", "random" or "file"
    std::string state = "hyperfine";
    double theta = 3.0 * std::numbers::pi / 7.0;
    double q_plus0 = 0.94;
    std::string state_file;
    std::vector<double> initial_phases;  // A^H phases of q at t0; empty = 0

    // hamiltonian: "hyperfine", "local" (H0 = 0), "random" or "file"
    std::string hamiltonian = "hyperfine";
    double mu = 1.0;
    std::string hamiltonian_file;

    double t0 = 0.0;
    double t1 = 1.0;
    int samples = 101;
    double tol = 1e-10;
    FlowMode mode = FlowMode::svd_transport;
    std::uint64_t seed = 1;
    std::filesystem::path base_dir;  // relative file references resolve here
};

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir = {});
json scenario_to_json(const Scenario& s);

StateVector scenario_state(const Scenario& s);
HamiltonianSpec scenario_hamiltonian(const Scenario& s);
// initial frame of scenario_state with the configured phases put on q
PolarFrame scenario_frame(const Scenario& s, const StateVector& gamma);

} // namespace iqm
