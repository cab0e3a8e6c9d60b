#include "frontlab/commands.hpp"

#include "frontlab/errors.hpp"
#include "frontlab/report.hpp"
#include "frontlab/weighted_profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

namespace frontlab {

using nlohmann::json;

json default_config() {
  return json::parse(R"({
    "command": "speeds",
    "output": "frontlab-out",
    "potential": {"family": "fisher", "nu": 0.25},
    "critical_point": {"guess": null},
    "box": [-3.0, 3.0],
    "grid": {
      "x_left": 0.0, "length": 400.0, "dx": 0.1, "dt": 0.005, "t_final": 150.0,
      "snapshot_every": 0.5, "tracked_speeds": [1.0, 1.5, 2.0], "c0": 0.0,
      "delta_stab": 0.0, "delta_hess": 0.0, "margin": 30.0, "stencil_order": 6,
      "profile_stride": 0
    },
    "ic": {"kind": "bump", "width": 20.0, "edge": 1.0},
    "search": {
      "bracket": null,
      "c_tol": 1e-7,
      "tol_conn": 1e-8,
      "case_tol": null,
      "nu_list": [1.0, 0.7, 0.5, 0.25],
      "identity_speeds": [1.6, 1.8, 2.0, 2.05, 2.2, 2.5],
      "scan_points": 64,
      "profile": null,
      "nonlin": {
        "xi_left": -150.0, "xi_right": 50.0, "dx": 0.1, "dt": 0.01, "t_max": 2000.0,
        "t_plateau": 50.0, "tol_neg": 1e-6, "resolution": 0.02, "seed_cut": -40.0,
        "seed_ramp": 10.0
      }
    }
  })");
}

void merge_config(json& base, const json& patch) {
  if (!patch.is_object() || !base.is_object()) {
    base = patch;
    return;
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      merge_config(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

PotentialSpec potential_from_config(const json& s) {
  const std::string family = s.value("family", "fisher");
  if (family == "fisher") return make_fisher(s.at("nu").get<double>());
  if (family == "quintic_gl") return make_quintic_gl(s.at("mu1").get<double>());
  if (family == "quadratic") return make_quadratic(s.at("mu").get<std::vector<double>>());
  if (family == "separable") {
    std::vector<PotentialSpec> parts;
    for (const auto& part : s.at("parts")) parts.push_back(potential_from_config(part));
    return make_separable(parts);
  }
  if (family == "polynomial") {
    const int dim = s.at("dim").get<int>();
    std::vector<Monomial> terms;
    for (const auto& t : s.at("terms"))
      terms.push_back({t.at("coefficient").get<double>(), t.at("powers").get<std::vector<int>>()});
    const auto box = s.value("box", std::vector<double>{-3.0, 3.0});
    if (box.size() != 2) throw InvalidArgument("polynomial box must be [lo, hi]");
    return make_polynomial(dim, std::move(terms), box[0], box[1]);
  }
  throw InvalidArgument("unknown potential family '" + family + "'");
}

json potential_to_config(const PotentialSpec& p) {
  json j;
  j["family"] = to_string(p.family());
  j["dim"] = p.dim();
  for (const auto& [k, v] : p.parameters()) j[k] = v;
  j["terms"] = json::array();
  for (const auto& t : p.terms()) j["terms"].push_back({{"coefficient", t.coefficient}, {"powers", t.powers}});
  if (const auto& gm = p.global_minimum()) {
    j["v_min"] = gm->value;
    j["v_min_point"] = std::vector<double>(gm->point.data(), gm->point.data() + gm->point.size());
  }
  return j;
}

CriticalPoint critical_point_from_config(const PotentialSpec& p, const json& config) {
  Vec guess = Vec::Zero(p.dim());
  const auto& cp = config.at("critical_point");
  if (cp.contains("guess") && !cp["guess"].is_null()) {
    const auto g = cp["guess"].get<std::vector<double>>();
    if (static_cast<int>(g.size()) != p.dim()) throw InvalidArgument("critical_point.guess has the wrong dimension");
    for (int j = 0; j < p.dim(); ++j) guess(j) = g[j];
  }
  return find_critical_point(p, guess);
}

SimConfig sim_config_from(const json& g) {
  SimConfig c;
  c.x_left = g.at("x_left").get<double>();
  c.length = g.at("length").get<double>();
  c.dx = g.at("dx").get<double>();
  c.dt = g.at("dt").get<double>();
  c.t_final = g.at("t_final").get<double>();
  c.snapshot_every = g.at("snapshot_every").get<double>();
  c.tracked_speeds = g.at("tracked_speeds").get<std::vector<double>>();
  c.c0 = g.at("c0").get<double>();
  c.delta_stab = g.at("delta_stab").get<double>();
  c.delta_hess = g.at("delta_hess").get<double>();
  c.margin = g.at("margin").get<double>();
  c.stencil_order = g.at("stencil_order").get<int>();
  c.profile_stride = g.at("profile_stride").get<int>();
  c.validate();
  return c;
}

namespace {

SearchBox box_from(const json& config) {
  const auto b = config.at("box").get<std::vector<double>>();
  if (b.size() != 2 || !(b[1] > b[0])) throw InvalidArgument("box must be [lo, hi] with lo < hi");
  SearchBox box;
  box.lo = b[0];
  box.hi = b[1];
  return box;
}

double case_tol(const json& config, const SpeedAtlas& a) {
  const auto& t = config.at("search").at("case_tol");
  return t.is_null() ? default_case_tol(a) : t.get<double>();
}

std::filesystem::path out_dir(const json& config) {
  return std::filesystem::path(config.at("output").get<std::string>());
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json base_report(const json& config) {
  return {{"version", kVersion}, {"config", config}};
}

NonlinOptions nonlin_options(const json& s) {
  NonlinOptions o;
  o.xi_left = s.at("xi_left").get<double>();
  o.xi_right = s.at("xi_right").get<double>();
  o.dx = s.at("dx").get<double>();
  o.dt = s.at("dt").get<double>();
  o.t_max = s.at("t_max").get<double>();
  o.t_plateau = s.at("t_plateau").get<double>();
  o.tol_neg = s.at("tol_neg").get<double>();
  o.resolution = s.at("resolution").get<double>();
  o.seed_cut = s.at("seed_cut").get<double>();
  o.seed_ramp = s.at("seed_ramp").get<double>();
  if (!(o.tol_neg > 0.0) || !(o.resolution > 0.0) || !(o.t_plateau > 0.0))
    throw InvalidArgument("nonlin tolerances must be positive");
  return o;
}

FrontSearchOptions front_options(const json& config) {
  FrontSearchOptions o;
  o.c_tol = config.at("search").at("c_tol").get<double>();
  o.shot.tol_conn = config.at("search").at("tol_conn").get<double>();
  if (!(o.c_tol > 0.0) || !(o.shot.tol_conn > 0.0)) throw InvalidArgument("search tolerances must be positive");
  return o;
}

std::pair<double, double> bracket_from(const json& config, const SpeedAtlas& atlas) {
  const auto& b = config.at("search").at("bracket");
  if (b.is_null()) return default_front_bracket(atlas);
  const auto v = b.get<std::vector<double>>();
  if (v.size() != 2 || !(v[1] > v[0])) throw InvalidArgument("search.bracket must be [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

GridProfile read_profile_csv(const std::string& path, const Vec& e) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read profile " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> xs, vals;
  const int d = static_cast<int>(e.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) < 1 + d) throw InvalidArgument("profile row has too few columns");
    xs.push_back(row[0]);
    vals.insert(vals.end(), row.begin() + 1, row.begin() + 1 + d);
  }
  if (xs.size() < 8) throw InvalidArgument("profile has fewer than 8 rows");
  const double dx = xs[1] - xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[i - 1] - dx) > 1e-9 * std::max(1.0, std::abs(dx)))
      throw InvalidArgument("profile grid is not uniform");
  return GridProfile(xs[0], dx, d, std::move(vals), e);
}

}  // namespace

std::pair<double, double> default_front_bracket(const SpeedAtlas& atlas) {
  return {atlas.c_lin + 5e-4 * atlas.c_quad_hull, atlas.c_quad_hull};
}

SpeedAtlas full_atlas(const PotentialSpec& p, const CriticalPoint& e, const json& config,
                      std::optional<FrontProfile>* front) {
  AtlasOptions opts;
  opts.box = box_from(config);
  SpeedAtlas a = compute_atlas(p, e, opts);
  const bool degenerate = a.c_quad_hull - a.c_lin <= 1e-9 * std::max(1.0, a.c_quad_hull);
  if (degenerate) {
    a.c_nonlin = NonlinBracket{a.c_lin, a.c_lin, "shooting"};
  } else if (p.dim() == 1 && a.c_lin > 0.0) {
    const auto [lo, hi] = bracket_from(config, a);
    try {
      FrontProfile f = find_pushed_front(p, e, lo, hi, front_options(config));
      a.c_nonlin = NonlinBracket{f.c_lo, f.c_hi, "shooting"};
      if (front) *front = std::move(f);
    } catch (const NumericalFailure&) {
      // No sign change above lo: any pushed front would sit within lo - c_lin of c_lin.
      a.c_nonlin = NonlinBracket{a.c_lin, lo, "shooting"};
    }
  }
  if (a.c_nonlin) a.case_label = classify_case(a, case_tol(config, a));
  return a;
}

FisherRow fisher_row(double nu, const json& config) {
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("fisher-table needs nu in (0, 1]");
  const PotentialSpec p = make_fisher(nu);
  const CriticalPoint e = find_critical_point(p, Vec::Zero(1));
  std::optional<FrontProfile> front;
  const SpeedAtlas a = full_atlas(p, e, config, &front);
  FisherRow r;
  r.nu = nu;
  r.c_lin = a.c_lin;
  r.c_quad_hull = a.c_quad_hull;
  r.c_nonlin_lo = a.c_nonlin->lo;
  r.c_nonlin_hi = a.c_nonlin->hi;
  r.case_label = a.case_label.value_or(0);
  const bool pushed = front && front->steep.verdict == SteepnessVerdict::pushed;
  if (pushed) r.pushed_speed = front->c;
  r.verdict = pushed ? "pushed" : "pulled";
  return r;
}

std::string fisher_table_csv(const std::vector<FisherRow>& rows) {
  std::ostringstream os;
  os << "nu,c_lin,c_quad_hull,pushed_speed,c_nonlin_lo,c_nonlin_hi,case,verdict\n";
  for (const auto& r : rows)
    os << fmt17(r.nu) << ',' << fmt17(r.c_lin) << ',' << fmt17(r.c_quad_hull) << ','
       << (r.pushed_speed ? fmt17(*r.pushed_speed) : std::string("none")) << ','
       << fmt17(r.c_nonlin_lo) << ',' << fmt17(r.c_nonlin_hi) << ',' << r.case_label << ','
       << r.verdict << '\n';
  return os.str();
}

int cmd_speeds(const json& config, std::ostream& out) {
  const PotentialSpec p = potential_from_config(config.at("potential"));
  const CriticalPoint e = critical_point_from_config(p, config);
  const SpeedAtlas a = full_atlas(p, e, config);
  const auto dir = out_dir(config);
  write_json(dir / "atlas.json", to_json(a));
  json rep = base_report(config);
  rep["potential"] = potential_to_config(p);
  rep["atlas"] = to_json(a);
  write_json(dir / "report.json", rep);
  out << "speed atlas\n" << atlas_table(a);
  return 0;
}

int cmd_fisher_table(const json& config, std::ostream& out) {
  const auto nus = config.at("search").at("nu_list").get<std::vector<double>>();
  std::vector<std::future<FisherRow>> jobs;
  for (double nu : nus) jobs.push_back(std::async(std::launch::async, fisher_row, nu, std::cref(config)));
  std::vector<FisherRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  const std::string csv = fisher_table_csv(rows);
  const auto dir = out_dir(config);
  write_text(dir / "fisher_table.csv", csv);
  json rep = base_report(config);
  rep["rows"] = json::array();
  for (const auto& r : rows)
    rep["rows"].push_back({{"nu", r.nu},
                           {"c_lin", r.c_lin},
                           {"c_quad_hull", r.c_quad_hull},
                           {"pushed_speed", r.pushed_speed ? json(*r.pushed_speed) : json(nullptr)},
                           {"c_nonlin", {r.c_nonlin_lo, r.c_nonlin_hi}},
                           {"case", r.case_label},
                           {"verdict", r.verdict}});
  write_json(dir / "report.json", rep);
  out << csv;
  return 0;
}

int cmd_front(const json& config, std::ostream& out) {
  const PotentialSpec p = potential_from_config(config.at("potential"));
  const CriticalPoint e = critical_point_from_config(p, config);
  AtlasOptions ao;
  ao.box = box_from(config);
  ao.compute_upp_diag = false;
  const SpeedAtlas a = compute_atlas(p, e, ao);
  const auto [lo, hi] = bracket_from(config, a);
  if (!(hi > lo)) throw NumericalFailure("no pushed front: c_quad_hull does not exceed c_lin");
  const FrontProfile f = find_pushed_front(p, e, lo, hi, front_options(config));
  json residuals;
  residuals["ode"] = ode_residual(p, f.c, f.traj);
  residuals["energy_identity"] = json::array();
  for (double cp : config.at("search").at("identity_speeds").get<std::vector<double>>()) {
    try {
      residuals["energy_identity"].push_back(to_json(front_energy_identity(f, p, cp)));
    } catch (const InvalidArgument&) {
    }
  }
  residuals["zero_energy"] = front_energy_identity(f, p, f.c).residual;
  json fj = {{"c", f.c},
             {"steepness", to_json(f.steep)},
             {"status", to_string(f.status)},
             {"bracket", {f.c_lo, f.c_hi}},
             {"epsilon", f.eps},
             {"closest_approach", f.closest},
             {"residuals", residuals}};
  const auto dir = out_dir(config);
  write_text(dir / "front.csv", front_csv(f));
  write_json(dir / "front.json", fj);
  json rep = base_report(config);
  rep["front"] = fj;
  write_json(dir / "report.json", rep);
  out << "pushed front speed " << fmt17(f.c) << " (" << to_string(f.status) << "), steepness "
      << fmt17(f.steep.rate) << " [" << to_string(f.steep.verdict) << "]\n";
  return 0;
}

int cmd_simulate(const json& config, std::ostream& out) {
  const PotentialSpec p = potential_from_config(config.at("potential"));
  const CriticalPoint e = critical_point_from_config(p, config);
  SimConfig cfg = sim_config_from(config.at("grid"));
  std::optional<FrontProfile> front;
  double c_hi = 0.0;
  if (cfg.c0 <= 0.0 || cfg.delta_stab <= 0.0 || cfg.delta_hess <= 0.0) {
    const SpeedAtlas a = full_atlas(p, e, config, &front);
    c_hi = a.c_quad_hull;
    if (a.c_upp_diag) c_hi = std::min(c_hi, a.c_upp_diag->value());
    if (front) c_hi = std::min(c_hi, front->c);
  }
  resolve_radii(p, e, cfg, c_hi);
  const auto gm = p.global_minimum() ? *p.global_minimum() : search_global_minimum(p, -3.0, 3.0);
  const auto& icj = config.at("ic");
  const std::string kind = icj.value("kind", "bump");
  GridProfile ic = kind == "bump"
                       ? bump_ic(cfg, e.location, gm.point, icj.value("width", 20.0), icj.value("edge", 1.0))
                       : kind == "plateau"
                             ? plateau_seed(cfg, e.location, gm.point, icj.value("cut", 20.0), icj.value("ramp", 5.0))
                             : throw InvalidArgument("ic.kind must be bump or plateau");
  const InvasionTrace tr = simulate(p, e, ic, cfg);
  const auto dir = out_dir(config);
  write_text(dir / "trace.csv", trace_csv(tr));
  for (std::size_t k = 0; k < tr.profiles.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshots/profile_%05zu.csv", k);
    write_text(dir / name, profile_csv(tr.profiles[k]));
  }
  json rep = base_report(config);
  rep["resolved"] = {{"c0", cfg.c0}, {"delta_stab", cfg.delta_stab}, {"delta_hess", cfg.delta_hess}};
  rep["stop_reason"] = tr.stop_reason;
  json defects = json::object();
  for (const auto& s : tr.speeds) defects[shortest(s.c)] = energy_balance_check(tr, s.c);
  rep["balance_defects"] = defects;
  int code = 0;
  try {
    const SpeedFit fit = fit_invasion_speed(tr);
    rep["fitted_speed"] = {{"speed", fit.speed}, {"confidence", fit.confidence}, {"samples", fit.samples}};
    out << "fitted invasion speed " << fmt17(fit.speed) << " (confidence " << fmt17(fit.confidence) << ")\n";
  } catch (const NumericalFailure& ex) {
    rep["fitted_speed"] = nullptr;
    out << "no invasion speed: " << ex.what() << "\n";
    code = 4;
  }
  write_json(dir / "report.json", rep);
  out << "stop reason: " << tr.stop_reason << "\n";
  return code;
}

int cmd_nonlin_speed(const json& config, std::ostream& out) {
  const PotentialSpec p = potential_from_config(config.at("potential"));
  const CriticalPoint e = critical_point_from_config(p, config);
  AtlasOptions ao;
  ao.box = box_from(config);
  ao.compute_upp_diag = false;
  const SpeedAtlas a = compute_atlas(p, e, ao);
  double lo, hi;
  if (config.at("search").at("bracket").is_null()) {
    lo = a.c_lin > 0.0 ? a.c_lin : 0.05;
    hi = a.c_quad_hull;
  } else {
    std::tie(lo, hi) = bracket_from(config, a);
  }
  const NonlinEstimate est = estimate_c_nonlin(p, e, lo, hi, nonlin_options(config.at("search").at("nonlin")));
  json rep = base_report(config);
  rep["bracket"] = {{"lo", est.bracket.lo}, {"hi", est.bracket.hi}, {"method", est.bracket.method}};
  rep["resolved"] = est.resolved;
  rep["probes"] = json::array();
  for (const auto& pr : est.probes) rep["probes"].push_back(to_json(pr));
  rep["warnings"] = est.warnings;
  write_json(out_dir(config) / "report.json", rep);
  out << "c_nonlin bracket [" << fmt17(est.bracket.lo) << ", " << fmt17(est.bracket.hi) << "]"
      << (est.resolved ? "" : " (unresolved)") << "\n";
  for (const auto& w : est.warnings) out << "warning: " << w << "\n";
  return est.resolved ? 0 : 4;
}

int cmd_energy_scan(const json& config, std::ostream& out) {
  const PotentialSpec p = potential_from_config(config.at("potential"));
  const CriticalPoint e = critical_point_from_config(p, config);
  AtlasOptions ao;
  ao.box = box_from(config);
  ao.compute_upp_diag = false;
  const SpeedAtlas a = compute_atlas(p, e, ao);
  const auto& prof = config.at("search").at("profile");
  std::optional<GridProfile> w;
  if (!prof.is_null()) {
    w = read_profile_csv(prof.get<std::string>(), e.location);
  } else {
    const auto [lo, hi] = bracket_from(config, a);
    const FrontProfile f = find_pushed_front(p, e, lo, hi, front_options(config));
    w = to_grid_profile(f, f.traj.xi.front(), 20.0);
  }
  const int points = config.at("search").at("scan_points").get<int>();
  if (points < 2) throw InvalidArgument("scan_points must be at least 2");
  const VariationalScan scan = variational_speed_scan(*w, p, default_speed_grid(a.c_quad_hull, points), 0.0);
  std::ostringstream csv;
  csv << "c,E_c\n";
  for (std::size_t k = 0; k < scan.speeds.size(); ++k)
    csv << fmt17(scan.speeds[k]) << ',' << fmt17(scan.energies[k]) << '\n';
  const auto dir = out_dir(config);
  write_text(dir / "scan.csv", csv.str());
  json rep = base_report(config);
  rep["c_var"] = scan.c_var;
  rep["excluded"] = scan.excluded;
  write_json(dir / "report.json", rep);
  out << "variational speed " << fmt17(scan.c_var) << "\n";
  return 0;
}

int run_command(const json& config, std::ostream& out, std::ostream& err) {
  try {
    const std::string cmd = config.at("command").get<std::string>();
    if (cmd == "speeds") return cmd_speeds(config, out);
    if (cmd == "fisher-table") return cmd_fisher_table(config, out);
    if (cmd == "front") return cmd_front(config, out);
    if (cmd == "simulate") return cmd_simulate(config, out);
    if (cmd == "nonlin-speed") return cmd_nonlin_speed(config, out);
    if (cmd == "energy-scan") return cmd_energy_scan(config, out);
    err << "error: unknown command '" << cmd << "'\n";
    return 2;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return ex.exit_code();
  } catch (const json::exception& ex) {
    err << "error: invalid configuration: " << ex.what() << "\n";
    return 2;
  }
}

}  // namespace frontlab
