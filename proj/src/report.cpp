#include "frontlab/report.hpp"

#include "frontlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace frontlab {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
nlohmann::json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}
}  // namespace

nlohmann::json to_json(const SpeedAtlas& a) {
  nlohmann::json j;
  j["c_lin"] = num(a.c_lin);
  j["mu_1"] = num(a.mu_1);
  j["v_min"] = num(a.v_min_relative);
  j["mu_quad_hull"] = num(a.mu_quad_hull);
  j["c_quad_hull"] = num(a.c_quad_hull);
  if (a.c_nonlin)
    j["c_nonlin"] = {{"lo", num(a.c_nonlin->lo)}, {"hi", num(a.c_nonlin->hi)}, {"method", a.c_nonlin->method}};
  else
    j["c_nonlin"] = nullptr;
  if (a.c_upp_diag)
    j["c_upp_diag"] = {{"lo", num(a.c_upp_diag->lo)},
                       {"hi", num(a.c_upp_diag->hi)},
                       {"saturated", a.c_upp_diag->saturated},
                       {"value", num(a.c_upp_diag->value())}};
  else
    j["c_upp_diag"] = nullptr;
  j["case"] = a.case_label ? nlohmann::json(*a.case_label) : nlohmann::json(nullptr);
  j["radii"] = nlohmann::json::array();
  for (const auto& r : a.radii)
    j["radii"].push_back({{"c0", num(r.c0)},
                          {"delta_stab", num(r.delta_stab)},
                          {"delta_hess", num(r.delta_hess)},
                          {"c_upp", num(r.c_upp)}});
  return j;
}

nlohmann::json to_json(const WeightedEnergy& e) {
  return {{"c", num(e.c)},
          {"xi_ref", num(e.xi_ref)},
          {"value", num(e.value)},
          {"kinetic", num(e.kinetic)},
          {"potential", num(e.potential)}};
}

nlohmann::json to_json(const Steepness& s) {
  return {{"rate", num(s.rate)},
          {"xi_lo", num(s.xi_lo)},
          {"xi_hi", num(s.xi_hi)},
          {"samples", s.samples},
          {"verdict", to_string(s.verdict)}};
}

nlohmann::json to_json(const EnergyIdentity& id) {
  return {{"c_prime", num(id.c_prime)},
          {"energy", num(id.energy)},
          {"weighted_dphi_sq", num(id.weighted_dphi_sq)},
          {"predicted", num(id.predicted)},
          {"residual", num(id.residual)},
          {"xi_ref", num(id.xi_ref)}};
}

nlohmann::json to_json(const NonlinProbe& p) {
  return {{"c", num(p.c)},
          {"verdict", to_string(p.verdict)},
          {"t_end", num(p.t_end)},
          {"energy_end", num(p.energy_end)},
          {"log_rate", num(p.log_rate)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidArgument("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string atlas_table(const SpeedAtlas& a) {
  std::ostringstream os;
  char buf[160];
  auto row = [&](const char* name, const std::string& value) {
    std::snprintf(buf, sizeof buf, "  %-16s %s\n", name, value.c_str());
    os << buf;
  };
  row("c_lin", fmt17(a.c_lin));
  row("mu_quad_hull", fmt17(a.mu_quad_hull));
  row("c_quad_hull", fmt17(a.c_quad_hull));
  row("V_min", fmt17(a.v_min_relative));
  if (a.c_nonlin)
    row("c_nonlin", "[" + fmt17(a.c_nonlin->lo) + ", " + fmt17(a.c_nonlin->hi) + "] (" +
                        a.c_nonlin->method + ")");
  if (a.c_upp_diag)
    row("c_upp_diag", "[" + fmt17(a.c_upp_diag->lo) + ", " + fmt17(a.c_upp_diag->hi) + "]" +
                          (a.c_upp_diag->saturated ? " (whole interval)" : ""));
  if (a.case_label) row("case", std::to_string(*a.case_label));
  if (!a.radii.empty()) {
    os << "  c0                   delta_stab            delta_hess            c_upp\n";
    for (const auto& r : a.radii) {
      std::snprintf(buf, sizeof buf, "  %-20.12g %-21.12g %-21.12g %.12g\n", r.c0, r.delta_stab,
                    r.delta_hess, r.c_upp);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace frontlab
