#pragma once

#include "frontlab/pde.hpp"
#include "frontlab/potential.hpp"
#include "frontlab/speed_atlas.hpp"
#include "frontlab/wave_ode.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace frontlab {

/// Resolved run configuration: defaults merged with a config file and then
/// with command-line overrides. Sections: potential, critical_point, grid,
/// ic, search, output.
nlohmann::json default_config();
/// Merges `patch` into `base` recursively (objects merge, everything else replaces).
void merge_config(nlohmann::json& base, const nlohmann::json& patch);

/// Potential described by the `potential` section.
PotentialSpec potential_from_config(const nlohmann::json& section);
nlohmann::json potential_to_config(const PotentialSpec& p);

/// The invaded critical point from `critical_point.guess` (default: origin).
CriticalPoint critical_point_from_config(const PotentialSpec& p, const nlohmann::json& config);

SimConfig sim_config_from(const nlohmann::json& grid);

/// Default shooting bracket (c_lin + 5e-4 c_quad, c_quad).
std::pair<double, double> default_front_bracket(const SpeedAtlas& atlas);

/// Atlas plus nonlinear bracket and case label; d = 1 uses shooting, where
/// no sign change means the bracket collapses onto c_lin. When a pushed
/// front is found it is returned through `front`.
SpeedAtlas full_atlas(const PotentialSpec& p, const CriticalPoint& e, const nlohmann::json& config,
                      std::optional<FrontProfile>* front = nullptr);

struct FisherRow {
  double nu = 0.0;
  double c_lin = 0.0;
  double c_quad_hull = 0.0;
  std::optional<double> pushed_speed;
  double c_nonlin_lo = 0.0;
  double c_nonlin_hi = 0.0;
  int case_label = 0;
  std::string verdict;  ///< pushed | pulled
};

FisherRow fisher_row(double nu, const nlohmann::json& config);
std::string fisher_table_csv(const std::vector<FisherRow>& rows);

// Each command writes its artifacts under config["output"], echoes the
// resolved config into report.json, prints a summary and returns the exit code.
int cmd_speeds(const nlohmann::json& config, std::ostream& out);
int cmd_fisher_table(const nlohmann::json& config, std::ostream& out);
int cmd_front(const nlohmann::json& config, std::ostream& out);
int cmd_simulate(const nlohmann::json& config, std::ostream& out);
int cmd_nonlin_speed(const nlohmann::json& config, std::ostream& out);
int cmd_energy_scan(const nlohmann::json& config, std::ostream& out);

/// Dispatches on config["command"]; maps library errors to exit codes.
int run_command(const nlohmann::json& config, std::ostream& out, std::ostream& err);

}  // namespace frontlab
