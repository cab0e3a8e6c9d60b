#pragma once

#include "frontlab/pde.hpp"
#include "frontlab/speed_atlas.hpp"
#include "frontlab/wave_ode.hpp"
#include "frontlab/weighted_profiles.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace frontlab {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip rendering with at most 17 significant digits.
std::string fmt17(double v);

nlohmann::json to_json(const SpeedAtlas& atlas);
nlohmann::json to_json(const WeightedEnergy& e);
nlohmann::json to_json(const Steepness& s);
nlohmann::json to_json(const EnergyIdentity& id);
nlohmann::json to_json(const NonlinProbe& p);

/// Creates parent directories and writes the file; throws InvalidArgument
/// when the location is not writable.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Fixed-width text table of an atlas for terminal output.
std::string atlas_table(const SpeedAtlas& atlas);

}  // namespace frontlab
