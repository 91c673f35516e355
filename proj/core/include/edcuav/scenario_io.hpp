#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "edcuav/scenario.hpp"

namespace edc::io {

inline constexpr std::string_view kScenarioFormatVersion = "1";

/// Canonical JSON text of a scenario (stable key order, round-trip exact doubles).
std::string scenario_to_json(const Scenario& scenario);

/// Parses and validates. Throws MalformedInput for syntax/schema problems and
/// whatever Scenario::validate throws for invariant violations.
Scenario scenario_from_json(std::string_view text, SeparationCheck check = SeparationCheck::Required);

Scenario read_scenario_file(const std::filesystem::path& path, SeparationCheck check = SeparationCheck::Required);
void write_scenario_file(const std::filesystem::path& path, const Scenario& scenario);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace edc::io
