#include "frontlab/commands.hpp"
#include "frontlab/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

// Parses a value as JSON when possible, otherwise keeps it as a string.
json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

// Applies `a.b.c=value` to the config.
void apply_assignment(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw std::invalid_argument("empty key in '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = parse_value(assignment.substr(eq + 1));
      return;
    }
    if (!(*node)[key].is_object()) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frontlab: invasion speeds, pushed fronts and travelling-frame energies"};
  app.set_version_flag("--version", std::string(frontlab::kVersion));

  std::string command;
  std::string config_path;
  std::optional<std::string> output;
  std::optional<double> nu;
  std::optional<std::string> family;
  std::vector<double> bracket, tracked, nu_list;
  std::optional<double> dx, dt, t_final, length, c0, resolution;
  std::vector<std::string> assignments;
  bool print_config = false;

  app.add_option("command", command, "speeds | front | simulate | nonlin-speed | energy-scan | fisher-table")
      ->required();
  app.add_option("-c,--config", config_path, "JSON config file");
  app.add_option("-o,--output", output, "output directory");
  app.add_option("--family", family, "potential family (fisher, quintic_gl, quadratic, separable, polynomial)");
  app.add_option("--nu", nu, "Fisher parameter nu");
  app.add_option("--bracket", bracket, "speed bracket lo hi")->expected(2);
  app.add_option("--dx", dx, "grid spacing");
  app.add_option("--dt", dt, "time step");
  app.add_option("--t-final", t_final, "final time");
  app.add_option("--length", length, "domain length");
  app.add_option("--tracked", tracked, "tracked frame speeds")->expected(1, -1);
  app.add_option("--c0", c0, "reference speed for the stability radii");
  app.add_option("--nu-list", nu_list, "nu values for fisher-table")->expected(1, -1);
  app.add_option("--resolution", resolution, "target width of the nonlinear speed bracket");
  app.add_option("--set", assignments, "override any config key: section.key=value (value parsed as JSON)");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? 0 : 2;
  }

  json config = frontlab::default_config();
  try {
    if (const char* root = std::getenv("FRONTLAB_OUTPUT_ROOT"); root && *root)
      config["output"] = (std::filesystem::path(root) / command).string();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config " + config_path);
      frontlab::merge_config(config, json::parse(in, nullptr, true, true));
    }
    config["command"] = command;
    if (output) config["output"] = *output;
    if (family) config["potential"] = {{"family", *family}};
    if (nu) {
      if (!family && config["potential"].value("family", "fisher") != "fisher") config["potential"] = json::object();
      config["potential"]["family"] = config["potential"].value("family", "fisher");
      config["potential"]["nu"] = *nu;
    }
    if (!bracket.empty()) config["search"]["bracket"] = bracket;
    if (dx) config["grid"]["dx"] = *dx;
    if (dt) config["grid"]["dt"] = *dt;
    if (t_final) config["grid"]["t_final"] = *t_final;
    if (length) config["grid"]["length"] = *length;
    if (!tracked.empty()) config["grid"]["tracked_speeds"] = tracked;
    if (c0) config["grid"]["c0"] = *c0;
    if (!nu_list.empty()) config["search"]["nu_list"] = nu_list;
    if (resolution) config["search"]["nonlin"]["resolution"] = *resolution;
    for (const auto& a : assignments) apply_assignment(config, a);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }

  if (print_config) {
    std::cout << config.dump(2) << "\n";
    return 0;
  }
  return frontlab::run_command(config, std::cout, std::cerr);
}
