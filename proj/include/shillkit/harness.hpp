#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shillkit/attack.hpp"
#include "shillkit/detect.hpp"
#include "shillkit/evaluate.hpp"

namespace shillkit {

// Exit code classes: 0 success, 2 config validation, 3 input parse/io,
// 4 runtime failure.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int parse = 3;
inline constexpr int runtime = 4;
}  // namespace exit_code

int exit_code_for(const std::exception& e);

// Fully resolved experiment run. Defaults follow the experimental protocol:
// random/average/bandwagon push attacks, sizes 5-25%, fillers 5/10/15%,
// thresholds 0.95 and 10% of the authentic users.
struct RunConfig {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> items;
  std::filesystem::path output_dir = "out";

  std::vector<AttackModel> models = {AttackModel::random, AttackModel::average,
                                     AttackModel::bandwagon};
  std::vector<AttackIntent> intents = {AttackIntent::push};
  std::vector<double> attack_sizes = {0.05, 0.10, 0.15, 0.20, 0.25};
  std::vector<double> filler_sizes = {0.05, 0.10, 0.15};
  std::vector<ItemId> targets;     // explicit target items
  std::size_t auto_targets = 5;    // sampled below-median items when empty
  std::size_t selected_count = 10;
  FillerStyle bandwagon_filler = FillerStyle::random_style;
  std::string segment_genre;
  double jitter_sigma = 0.0;

  double correlation_threshold = 0.95;
  std::string profile_threshold = "10%";  // count, fraction, or percentage
  std::size_t min_overlap = 3;

  std::vector<std::string> engines = {"user", "item"};
  std::size_t svd_rank = 12;

  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

// Flat "key = value" config file; '#' starts a comment. Unknown keys are
// rejected so typos fail loudly.
RunConfig load_run_config(const std::filesystem::path& path);
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// "95" -> count, "10%" -> fraction 0.10, "0.1" -> fraction. Values >= 1
// without '%' are counts.
std::variant<std::size_t, double> parse_profile_threshold(const std::string& text);

DetectionConfig detection_config_from(const RunConfig& cfg);
std::vector<PredictionModel> engines_from(const RunConfig& cfg);

// Samples k distinct items whose rater count is strictly below the median
// count, the conventional choice of push targets. Deterministic in `seed`;
// result ascending.
std::vector<ItemId> sample_unpopular_targets(const RatingMatrix& m,
                                             const DatasetStats& stats, std::size_t k,
                                             std::uint64_t seed);

struct InspectOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> items;
  std::size_t top_n = 10;
};
void cmd_inspect(const InspectOptions& opts, std::ostream& out, std::ostream& err);

struct AttackOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> items;
  std::filesystem::path output;  // injected dataset; sidecar gets ".labels"
  AttackConfig attack;
  std::size_t auto_targets = 0;  // used when attack.target_items is empty
};
void cmd_attack(const AttackOptions& opts, std::ostream& out, std::ostream& err);

struct DetectOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> labels;  // default: dataset + ".labels"
  DetectionConfig detection;
  std::optional<std::filesystem::path> output;  // stdout when absent
  std::size_t workers = 1;
};
void cmd_detect(const DetectOptions& opts, std::ostream& out, std::ostream& err);

void cmd_experiment(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace shillkit
