#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shillkit/attack.hpp"
#include "shillkit/detect.hpp"
#include "shillkit/recommend.hpp"

namespace shillkit {

struct GroundTruth {
  std::vector<UserId> shilling_users;  // sorted, unique

  static GroundTruth from_profiles(std::span<const ShillingProfile> profiles);
  bool contains(UserId id) const;
};

struct DetectionScore {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

// Precision/recall/F-measure of a flagged set against ground truth.
// Degenerate denominators yield absent fields, never division faults.
DetectionScore score_detection(const DetectionReport& report, const GroundTruth& truth);
DetectionScore score_flagged(std::span<const UserId> flagged, const GroundTruth& truth,
                             std::span<const UserId> roster);

// Predictions keyed by (user, item).
using PredictionTable = std::map<std::pair<UserId, ItemId>, double>;

// Root mean squared difference between two prediction tables covering the
// same (user, target) pairs. Throws ValidationError on mismatched coverage,
// keys outside the target list, or empty tables.
double rmse_shift(const PredictionTable& pre, const PredictionTable& post,
                  std::span<const ItemId> targets);

struct ImpactScore {
  std::optional<double> rmse_shift_user_based;
  std::optional<double> rmse_shift_item_based;
  std::optional<double> rmse_shift_svd;
  std::vector<ItemId> target_items;
  std::size_t prediction_count = 0;  // evaluable (authentic user, target) pairs
  std::size_t skipped_rated = 0;     // pairs the user had already rated
  std::size_t failed_pairs = 0;      // engine failures, summed over engines
};

// Predicts every (authentic user, target) pair on both matrices with each
// engine and reports the prediction RMSE shift. Pairs whose rating already
// exists in m_pre are skipped and counted.
ImpactScore measure_impact(const RatingMatrix& m_pre, const RatingMatrix& m_post,
                           std::span<const ItemId> targets,
                           std::span<const PredictionModel> engines,
                           std::size_t workers = 1);

struct GridCell {
  AttackConfig attack;
  DetectionConfig detection;
};

struct ExperimentResult {
  GridCell cell;
  std::uint64_t cell_seed = 0;
  bool ok = false;
  std::string error;

  std::size_t profile_count = 0;
  std::size_t resolved_profile_threshold = 0;
  std::size_t flagged_count = 0;
  DetectionScore score;
  std::optional<ImpactScore> impact;

  double wall_ms = 0.0;  // volatile; excluded from serialized documents
};

// Per-cell seed: base folded with the model ordinal and the sizes in
// millionths, via mix_seed, in that order. Cells are reproducible in
// isolation from (base seed, model, attack_size, filler_size) alone.
std::uint64_t derive_cell_seed(std::uint64_t base_seed, AttackModel model,
                               double attack_size, double filler_size);

// Runs every cell: generate -> inject -> detect -> score (-> impact when
// engines are given). Per-cell errors are captured in the result; the run
// continues. Output order matches the input grid regardless of worker count.
std::vector<ExperimentResult> run_grid(const RatingMatrix& base,
                                       const DatasetStats& stats,
                                       std::span<const GridCell> grid,
                                       std::span<const PredictionModel> engines,
                                       std::uint64_t base_seed,
                                       std::size_t workers = 1);

}  // namespace shillkit
