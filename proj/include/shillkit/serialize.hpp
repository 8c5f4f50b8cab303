#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "shillkit/attack.hpp"
#include "shillkit/detect.hpp"
#include "shillkit/evaluate.hpp"

namespace shillkit {

// JSON views of the report types. Volatile fields (wall times) are only
// included where noted so rerunning a config reproduces the bytes exactly.
nlohmann::json to_json(const AttackConfig& cfg);
nlohmann::json to_json(const DetectionConfig& cfg);
nlohmann::json to_json(const AttackSummary& summary);
nlohmann::json to_json(const DetectionScore& score);
nlohmann::json to_json(const ImpactScore& impact);
nlohmann::json to_json(const DetectionReport& report, bool include_timing = true);
nlohmann::json to_json(const ExperimentResult& result);  // timing excluded

// Flat table per grid cell: model, intent, attack_size, filler_size,
// precision, recall, f_measure, rmse shifts. Absent metrics stay empty.
std::string results_csv(std::span<const ExperimentResult> results);

// Cells ranked by F-measure (descending, ties by input order).
std::string results_summary(std::span<const ExperimentResult> results);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace shillkit
