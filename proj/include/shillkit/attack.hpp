#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shillkit/profile.hpp"
#include "shillkit/ratings.hpp"

namespace shillkit {

enum class AttackModel { random, average, bandwagon, segment };
enum class AttackIntent { push, nuke };

// Bandwagon fillers can follow either the random-attack or the
// average-attack rating rule; both are available.
enum class FillerStyle { random_style, average_style };

const char* to_string(AttackModel model);
const char* to_string(AttackIntent intent);
AttackModel attack_model_from_string(const std::string& name);
AttackIntent attack_intent_from_string(const std::string& name);

struct AttackConfig {
  AttackModel model = AttackModel::random;
  AttackIntent intent = AttackIntent::push;
  double attack_size = 0.10;   // fraction of authentic users
  double filler_size = 0.10;   // fraction of total items
  std::vector<ItemId> target_items;
  std::size_t selected_count = 10;  // bandwagon / segment
  FillerStyle bandwagon_filler = FillerStyle::random_style;
  std::string segment_genre;
  std::uint64_t seed = 1;
  double jitter_sigma = 0.0;
};

double target_rating(AttackIntent intent);

// Throws ValidationError / CapabilityError when the config cannot be
// applied to the matrix.
void validate_attack_config(const RatingMatrix& m, const AttackConfig& cfg);

// Profile generation. Deterministic given cfg.seed; the RNG stream is a
// single std::mt19937_64 consumed profile by profile:
//   for each profile: a partial Fisher-Yates over the eligible filler pool
//   (one uniform_index draw per filler slot), then, when jitter_sigma > 0,
//   one gaussian draw per filler in ascending item order.
// Fresh user ids are max roster id + 1, +2, ... so injected profiles always
// sort after authentic users. Overlap-avoidance removals (eligible pool
// smaller than the nominal filler count) are appended to `notes`.
std::vector<ShillingProfile> generate_random_attack(const RatingMatrix& m,
                                                    const DatasetStats& stats,
                                                    const AttackConfig& cfg,
                                                    std::vector<std::string>* notes = nullptr);
std::vector<ShillingProfile> generate_average_attack(const RatingMatrix& m,
                                                     const DatasetStats& stats,
                                                     const AttackConfig& cfg,
                                                     std::vector<std::string>* notes = nullptr);
std::vector<ShillingProfile> generate_bandwagon_attack(const RatingMatrix& m,
                                                       const DatasetStats& stats,
                                                       const AttackConfig& cfg,
                                                       std::vector<std::string>* notes = nullptr);
std::vector<ShillingProfile> generate_segment_attack(const RatingMatrix& m,
                                                     const DatasetStats& stats,
                                                     const AttackConfig& cfg,
                                                     std::vector<std::string>* notes = nullptr);

// Dispatches on cfg.model.
std::vector<ShillingProfile> generate_profiles(const RatingMatrix& m,
                                               const DatasetStats& stats,
                                               const AttackConfig& cfg,
                                               std::vector<std::string>* notes = nullptr);

// Items with the highest rater counts, ties broken by higher mean then
// lower id; the candidate pool for bandwagon selected items.
std::vector<ItemId> most_popular_items(const RatingMatrix& m, const DatasetStats& stats,
                                       std::size_t count,
                                       std::span<const ItemId> exclude);

struct AttackSummary {
  std::size_t profile_count = 0;
  std::size_t selected_ratings = 0;
  std::size_t filler_ratings = 0;
  std::size_t target_ratings = 0;
  std::size_t filler_per_profile_min = 0;
  std::size_t filler_per_profile_max = 0;
  std::array<std::size_t, 5> rating_histogram{};  // index 0 = rating 1

  std::size_t total_ratings() const {
    return selected_ratings + filler_ratings + target_ratings;
  }
};

AttackSummary describe_attack(std::span<const ShillingProfile> profiles);

}  // namespace shillkit
