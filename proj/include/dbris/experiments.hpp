// SPDX-License-Identifier: Apache-2.0
//
// JSON experiment configs and the commands behind the dbris CLI. Commands
// return their output files as in-memory text; nothing is written here.

#ifndef DBRIS_EXPERIMENTS_HPP
#define DBRIS_EXPERIMENTS_HPP

#include "dbris/codebook.hpp"
#include "dbris/error.hpp"
#include "dbris/io.hpp"
#include "dbris/topology.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dbris
{

using nlohmann::json;

inline constexpr int kConfigVersion = 1;

// Exit status for a failure kind: 2 input, 3 infeasible, 4 numerical.
int exit_code(ErrorKind kind);

ArraySpec array_from_json(const json& j);
AngleGrid grid_from_json(const json& j);
CouplingModel coupling_from_json(const json& j);
IncidentWave incidence_from_json(const json& j, double frequency_hz);
SubElement element_from_json(const json& j);
FeedingSpec feeding_from_json(const json& j);
EntropyObjectiveSpec objective_from_json(const json& j, const Direction& incidence);
GaParams ga_from_json(const json& j, std::uint64_t seed);
std::vector<Direction> targets_from_json(const json& j);

struct TopologyRun
{
    GaResult ga;
    std::vector<double> report_theta;
    std::vector<double> report_freq;
    std::vector<std::vector<double>> entropy; // [theta][freq]
    double min_mean_entropy = 0.0;          // min over freq of the mean over theta
    std::vector<double> broadside_phases;    // centre frequency, reflection phases
};

TopologyRun run_topology(const json& cfg, std::uint64_t seed);

struct IndependenceReport
{
    std::vector<double> deviation_db; // one per sub-6 state
    double max_deviation_db = 0.0;
};

// mmWave pattern with the sub-6 element ports sharing the aperture. Cross
// coupling eps * zs * exp(-jkd) / max(kd, 1); eps = 0 solves the bands apart.
IndependenceReport cross_band_independence(const ArraySpec& mmwave, const std::vector<int>& mm_states,
                                           const SubElement& element, const GeometryVector& x,
                                           const IncidentWave& wave, const AngleGrid& grid, double epsilon);

struct CommandOutput
{
    std::vector<std::pair<std::string, std::string>> files; // relative path, contents
    std::string message;                                    // one-line summary for stdout
};

// config_dir resolves relative paths inside the config.
CommandOutput run_command(const std::string& verb, const json& config, const std::string& config_dir,
                          std::optional<std::uint64_t> seed);

// Writes every file of a successful command under out_dir.
void write_outputs(const CommandOutput& out, const std::string& out_dir);

} // namespace dbris

#endif
