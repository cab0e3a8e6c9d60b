#include "frontlab/commands.hpp"
#include "frontlab/errors.hpp"
#include "frontlab/report.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace frontlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "frontlab-tests" / name;
  fs::remove_all(dir);
  return dir;
}

json config_for(const std::string& command, const fs::path& out, const json& patch = json::object()) {
  json c = default_config();
  c["command"] = command;
  c["output"] = out.string();
  merge_config(c, patch);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run(const json& c, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(c, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("merge_config merges objects and replaces leaves") {
  json base = {{"a", {{"x", 1}, {"y", 2}}}, {"b", 3}};
  merge_config(base, {{"a", {{"y", 5}}}, {"c", {1, 2}}});
  CHECK(base["a"]["x"] == 1);
  CHECK(base["a"]["y"] == 5);
  CHECK(base["b"] == 3);
  CHECK(base["c"].size() == 2);
}

TEST_CASE("potential families from config") {
  CHECK(potential_from_config({{"family", "fisher"}, {"nu", 0.25}}).value1(1.0) == doctest::Approx(-0.5));
  const auto poly = potential_from_config(
      {{"family", "polynomial"}, {"dim", 1}, {"terms", {{{"coefficient", -0.5}, {"powers", {2}}}, {{"coefficient", 0.25}, {"powers", {4}}}}}});
  CHECK(poly.value1(1.0) == doctest::Approx(-0.25));
  const auto sep = potential_from_config(
      {{"family", "separable"}, {"parts", {{{"family", "fisher"}, {"nu", 0.25}}, {{"family", "quadratic"}, {"mu", {2.0}}}}}});
  CHECK(sep.dim() == 2);
  CHECK_THROWS_AS(potential_from_config({{"family", "nope"}}), InvalidArgument);
  const auto echo = potential_to_config(make_fisher(0.25));
  CHECK(echo["nu"] == 0.25);
}

TEST_CASE("speeds: fisher nu = 1 and nu = 1/4") {
  const auto out1 = scratch("speeds1");
  REQUIRE(run(config_for("speeds", out1, {{"potential", {{"nu", 1.0}}}})) == 0);
  const auto a1 = json::parse(slurp(out1 / "atlas.json"));
  CHECK(a1["case"] == 2);
  CHECK(std::abs(a1["c_lin"].get<double>() - 2.0) < 1e-9);
  CHECK(std::abs(a1["c_quad_hull"].get<double>() - 2.0) < 1e-9);

  const auto out4 = scratch("speeds4");
  REQUIRE(run(config_for("speeds", out4)) == 0);
  const auto a4 = json::parse(slurp(out4 / "atlas.json"));
  CHECK(a4["case"] == 4);
  for (const char* key : {"c_lin", "mu_quad_hull", "c_quad_hull", "c_nonlin", "c_upp_diag", "case", "radii"})
    CHECK(a4.contains(key));
  const auto rep = json::parse(slurp(out4 / "report.json"));
  CHECK(rep["version"] == kVersion);
  CHECK(rep["config"] == config_for("speeds", out4));
}

TEST_CASE("speeds: quadratic potential is rejected with exit code 2") {
  std::string err;
  CHECK(run(config_for("speeds", scratch("quad"), {{"potential", {{"family", "quadratic"}, {"mu", {1.0}}}}}), &err) == 2);
  CHECK(err.find("V_min") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run(config_for("bogus", scratch("bogus"))) == 2);
  CHECK(run(config_for("speeds", scratch("tol"), {{"search", {{"c_tol", -1.0}}}})) == 2);
  CHECK(run(config_for("speeds", scratch("type"), {{"box", "wide"}})) == 2);
  CHECK(run(config_for("front", scratch("pulled"), {{"potential", {{"nu", 0.7}}}, {"search", {{"bracket", {2.001, 2.4}}}}})) == 3);
  // Unresolvable bracket: tiny time budget leaves probes ambiguous.
  const auto c = config_for("nonlin-speed", scratch("ambig"),
                            {{"search", {{"bracket", {2.3, 2.4}}, {"nonlin", {{"t_max", 5.0}, {"t_plateau", 50.0}}}}}});
  CHECK(run(c) == 4);
}

TEST_CASE("front command writes front.csv with the pushed speed") {
  const auto out = scratch("front");
  REQUIRE(run(config_for("front", out, {{"search", {{"bracket", {2.01, 2.4}}}}})) == 0);
  const auto f = json::parse(slurp(out / "front.json"));
  CHECK(std::abs(f["c"].get<double>() - oracle::pushed_speed(0.25)) < 1e-6);
  CHECK(slurp(out / "front.csv").rfind("xi,phi_1,dphi_1\n", 0) == 0);
}

TEST_CASE("energy-scan crosses zero at the pushed speed") {
  const auto out = scratch("scan");
  REQUIRE(run(config_for("energy-scan", out)) == 0);
  const auto rep = json::parse(slurp(out / "report.json"));
  CHECK(std::abs(rep["c_var"].get<double>() - oracle::pushed_speed(0.25)) < 1e-4);
  CHECK(slurp(out / "scan.csv").rfind("c,E_c\n", 0) == 0);
}

TEST_CASE("fisher table rows") {
  const auto c = config_for("fisher-table", scratch("table"));
  std::vector<FisherRow> rows;
  for (double nu : {1.0, 0.7, 0.5, 0.25}) rows.push_back(fisher_row(nu, c));
  CHECK(rows[0].case_label == 2);
  CHECK(rows[1].case_label == 3);
  CHECK(rows[2].case_label == 3);
  CHECK(rows[3].case_label == 4);
  CHECK(rows[0].verdict == "pulled");
  CHECK(rows[1].verdict == "pulled");
  CHECK(rows[2].verdict == "pulled");
  CHECK(rows[3].verdict == "pushed");
  REQUIRE(rows[3].pushed_speed);
  CHECK(std::abs(*rows[3].pushed_speed - 3.0 / std::sqrt(2.0)) < 1e-6);
  CHECK(std::abs(rows[0].c_lin - 2.0) < 1e-9);
  CHECK(std::abs(rows[0].c_quad_hull - 2.0) < 1e-9);
  CHECK_FALSE(rows[0].pushed_speed);
  CHECK_THROWS_AS(fisher_row(1.5, c), InvalidArgument);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto a = scratch("det-a"), b = scratch("det-b");
  auto ca = config_for("fisher-table", a), cb = config_for("fisher-table", b);
  REQUIRE(run(ca) == 0);
  REQUIRE(run(cb) == 0);
  CHECK(slurp(a / "fisher_table.csv") == slurp(b / "fisher_table.csv"));
  auto ja = json::parse(slurp(a / "report.json")), jb = json::parse(slurp(b / "report.json"));
  jb["config"]["output"] = ja["config"]["output"];
  CHECK(ja.dump() == jb.dump());
}

TEST_CASE("unwritable output directory") {
  CHECK(run(config_for("speeds", fs::path("/proc/frontlab-no-such-dir"))) == 2);
}
