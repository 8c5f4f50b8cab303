#include "shillkit/attack.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "shillkit/rng.hpp"

namespace shillkit {

const char* to_string(AttackModel model) {
  switch (model) {
    case AttackModel::random: return "random";
    case AttackModel::average: return "average";
    case AttackModel::bandwagon: return "bandwagon";
    case AttackModel::segment: return "segment";
  }
  return "?";
}

const char* to_string(AttackIntent intent) {
  return intent == AttackIntent::push ? "push" : "nuke";
}

AttackModel attack_model_from_string(const std::string& name) {
  if (name == "random") return AttackModel::random;
  if (name == "average") return AttackModel::average;
  if (name == "bandwagon") return AttackModel::bandwagon;
  if (name == "segment") return AttackModel::segment;
  throw ValidationError("unknown attack model '" + name + "'");
}

AttackIntent attack_intent_from_string(const std::string& name) {
  if (name == "push") return AttackIntent::push;
  if (name == "nuke") return AttackIntent::nuke;
  throw ValidationError("unknown attack intent '" + name + "'");
}

double target_rating(AttackIntent intent) {
  return intent == AttackIntent::push ? kRatingMax : kRatingMin;
}

void validate_attack_config(const RatingMatrix& m, const AttackConfig& cfg) {
  if (!(cfg.attack_size > 0.0 && cfg.attack_size <= 1.0))
    throw ValidationError("attack_size must be in (0,1]");
  if (!(cfg.filler_size > 0.0 && cfg.filler_size <= 1.0))
    throw ValidationError("filler_size must be in (0,1]");
  if (cfg.jitter_sigma < 0.0)
    throw ValidationError("jitter_sigma must be nonnegative");
  if (cfg.target_items.empty())
    throw ValidationError("target item list is empty");
  std::set<ItemId> seen;
  for (ItemId t : cfg.target_items) {
    if (!m.has_item(t))
      throw ValidationError("target item " + std::to_string(t) + " is not in the matrix");
    if (!seen.insert(t).second)
      throw ValidationError("duplicate target item " + std::to_string(t));
  }
  if (cfg.model == AttackModel::bandwagon || cfg.model == AttackModel::segment) {
    if (cfg.selected_count < 1)
      throw ValidationError("selected_count must be >= 1");
  }
  if (cfg.model == AttackModel::bandwagon) {
    if (cfg.selected_count >= m.item_count() - cfg.target_items.size())
      throw ValidationError("selected_count leaves no filler candidates");
  }
  if (cfg.model == AttackModel::segment) {
    if (!m.has_genres())
      throw CapabilityError("segment attack requires genre metadata (items file)");
    if (cfg.segment_genre.empty())
      throw ValidationError("segment_genre must be set for segment attacks");
    const auto in_genre = m.items_with_genre(cfg.segment_genre);
    if (in_genre.empty())
      throw ValidationError("no items carry genre '" + cfg.segment_genre + "'");
    bool any_non_target = false;
    for (ItemId id : in_genre) {
      if (!seen.contains(id)) {
        any_non_target = true;
        break;
      }
    }
    if (!any_non_target)
      throw ValidationError("every item with genre '" + cfg.segment_genre +
                            "' is already a target");
  }
}

std::vector<ItemId> most_popular_items(const RatingMatrix& m, const DatasetStats& stats,
                                       std::size_t count,
                                       std::span<const ItemId> exclude) {
  std::unordered_set<ItemId> skip(exclude.begin(), exclude.end());
  std::vector<ItemId> candidates;
  candidates.reserve(m.item_count());
  for (ItemId id : m.item_ids()) {
    if (!skip.contains(id)) candidates.push_back(id);
  }
  auto item_count = [&](ItemId id) {
    auto it = stats.per_item_count.find(id);
    return it == stats.per_item_count.end() ? std::size_t{0} : it->second;
  };
  auto item_mean = [&](ItemId id) {
    auto it = stats.per_item_mean.find(id);
    return it == stats.per_item_mean.end() ? 0.0 : it->second;
  };
  std::sort(candidates.begin(), candidates.end(), [&](ItemId a, ItemId b) {
    const std::size_t ca = item_count(a), cb = item_count(b);
    if (ca != cb) return ca > cb;
    const double ma = item_mean(a), mb = item_mean(b);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  if (candidates.size() > count) candidates.resize(count);
  return candidates;
}

namespace {

struct GenerationPlan {
  std::vector<ItemId> filler_pool;                 // ascending
  std::vector<std::pair<ItemId, double>> selected; // same for every profile
  std::size_t filler_count = 0;
  std::size_t profile_count = 0;
  UserId first_user_id = 0;
};

// Filler base value before jitter; always an integer on the rating scale.
using FillerBase = double (*)(const DatasetStats&, ItemId);

double global_mean_base(const DatasetStats& stats, ItemId) {
  return static_cast<double>(round_half_up(*stats.global_mean));
}

double item_mean_base(const DatasetStats& stats, ItemId item) {
  if (auto mean = stats.item_mean(item))
    return static_cast<double>(round_half_up(*mean));
  return global_mean_base(stats, item);
}

double constant_min_base(const DatasetStats&, ItemId) { return kRatingMin; }

GenerationPlan make_plan(const RatingMatrix& m, const AttackConfig& cfg,
                         std::vector<ItemId> filler_pool,
                         std::vector<std::pair<ItemId, double>> selected,
                         std::vector<std::string>* notes) {
  GenerationPlan plan;
  plan.filler_pool = std::move(filler_pool);
  plan.selected = std::move(selected);
  plan.profile_count = static_cast<std::size_t>(
      std::max<long>(0, round_half_up(cfg.attack_size *
                                      static_cast<double>(m.authentic_count()))));

  const std::size_t nominal = static_cast<std::size_t>(std::max<long>(
      1, round_half_up(cfg.filler_size * static_cast<double>(m.item_count()))));
  if (plan.filler_pool.empty())
    throw ValidationError("no items are eligible as fillers under this config");
  plan.filler_count = std::min(nominal, plan.filler_pool.size());
  if (notes && plan.filler_count < nominal) {
    notes->push_back("filler count reduced from " + std::to_string(nominal) + " to " +
                     std::to_string(plan.filler_count) +
                     " (eligible pool exhausted by overlap avoidance)");
  }
  plan.first_user_id = (m.user_count() == 0 ? 0 : m.user_ids().back()) + 1;
  return plan;
}

std::vector<ShillingProfile> run_plan(const GenerationPlan& plan, const AttackConfig& cfg,
                                      const DatasetStats& stats, FillerBase filler_base,
                                      bool jitter_fillers) {
  std::mt19937_64 rng(cfg.seed);
  const double target_value = target_rating(cfg.intent);

  std::vector<ShillingProfile> profiles;
  profiles.reserve(plan.profile_count);
  std::vector<ItemId> pool;
  for (std::size_t p = 0; p < plan.profile_count; ++p) {
    ShillingProfile profile;
    profile.user = plan.first_user_id + static_cast<UserId>(p);

    pool = plan.filler_pool;
    for (std::size_t j = 0; j < plan.filler_count; ++j) {
      const std::size_t pick =
          j + static_cast<std::size_t>(uniform_index(rng, pool.size() - j));
      std::swap(pool[j], pool[pick]);
    }
    std::sort(pool.begin(), pool.begin() + static_cast<long>(plan.filler_count));
    for (std::size_t j = 0; j < plan.filler_count; ++j) {
      const ItemId item = pool[j];
      double value = filler_base(stats, item);
      if (jitter_fillers && cfg.jitter_sigma > 0.0) {
        value = static_cast<double>(
            round_half_up(value + cfg.jitter_sigma * gaussian(rng)));
        value = clamp_rating(value);
      }
      profile.filler.emplace(item, value);
    }

    for (const auto& [item, value] : plan.selected) profile.selected.emplace(item, value);
    for (ItemId t : cfg.target_items) profile.target.emplace(t, target_value);
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

std::vector<ItemId> items_excluding(const RatingMatrix& m,
                                    const std::unordered_set<ItemId>& exclude) {
  std::vector<ItemId> out;
  out.reserve(m.item_count());
  for (ItemId id : m.item_ids()) {
    if (!exclude.contains(id)) out.push_back(id);
  }
  return out;
}

}  // namespace

std::vector<ShillingProfile> generate_random_attack(const RatingMatrix& m,
                                                    const DatasetStats& stats,
                                                    const AttackConfig& cfg,
                                                    std::vector<std::string>* notes) {
  if (cfg.model != AttackModel::random)
    throw ValidationError("config model is not 'random'");
  validate_attack_config(m, cfg);
  std::unordered_set<ItemId> exclude(cfg.target_items.begin(), cfg.target_items.end());
  auto plan = make_plan(m, cfg, items_excluding(m, exclude), {}, notes);
  return run_plan(plan, cfg, stats, &global_mean_base, true);
}

std::vector<ShillingProfile> generate_average_attack(const RatingMatrix& m,
                                                     const DatasetStats& stats,
                                                     const AttackConfig& cfg,
                                                     std::vector<std::string>* notes) {
  if (cfg.model != AttackModel::average)
    throw ValidationError("config model is not 'average'");
  validate_attack_config(m, cfg);
  std::unordered_set<ItemId> exclude(cfg.target_items.begin(), cfg.target_items.end());
  auto plan = make_plan(m, cfg, items_excluding(m, exclude), {}, notes);
  return run_plan(plan, cfg, stats, &item_mean_base, true);
}

std::vector<ShillingProfile> generate_bandwagon_attack(const RatingMatrix& m,
                                                       const DatasetStats& stats,
                                                       const AttackConfig& cfg,
                                                       std::vector<std::string>* notes) {
  if (cfg.model != AttackModel::bandwagon)
    throw ValidationError("config model is not 'bandwagon'");
  validate_attack_config(m, cfg);

  const auto popular =
      most_popular_items(m, stats, cfg.selected_count, cfg.target_items);
  std::vector<std::pair<ItemId, double>> selected;
  selected.reserve(popular.size());
  for (ItemId id : popular) selected.emplace_back(id, kRatingMax);

  std::unordered_set<ItemId> exclude(cfg.target_items.begin(), cfg.target_items.end());
  for (ItemId id : popular) exclude.insert(id);
  auto plan = make_plan(m, cfg, items_excluding(m, exclude), std::move(selected), notes);
  const FillerBase base = cfg.bandwagon_filler == FillerStyle::average_style
                              ? &item_mean_base
                              : &global_mean_base;
  return run_plan(plan, cfg, stats, base, true);
}

std::vector<ShillingProfile> generate_segment_attack(const RatingMatrix& m,
                                                     const DatasetStats& stats,
                                                     const AttackConfig& cfg,
                                                     std::vector<std::string>* notes) {
  if (cfg.model != AttackModel::segment)
    throw ValidationError("config model is not 'segment'");
  validate_attack_config(m, cfg);

  std::unordered_set<ItemId> target_set(cfg.target_items.begin(), cfg.target_items.end());
  const auto in_genre = m.items_with_genre(cfg.segment_genre);
  std::unordered_set<ItemId> genre_set(in_genre.begin(), in_genre.end());

  // Selected: the most-rated in-genre items, capped at selected_count.
  std::vector<ItemId> segment_candidates;
  for (ItemId id : in_genre) {
    if (!target_set.contains(id)) segment_candidates.push_back(id);
  }
  auto item_count = [&](ItemId id) {
    auto it = stats.per_item_count.find(id);
    return it == stats.per_item_count.end() ? std::size_t{0} : it->second;
  };
  std::sort(segment_candidates.begin(), segment_candidates.end(),
            [&](ItemId a, ItemId b) {
              const std::size_t ca = item_count(a), cb = item_count(b);
              if (ca != cb) return ca > cb;
              return a < b;
            });
  if (segment_candidates.size() > cfg.selected_count)
    segment_candidates.resize(cfg.selected_count);
  std::vector<std::pair<ItemId, double>> selected;
  for (ItemId id : segment_candidates) selected.emplace_back(id, kRatingMax);

  // Fillers come from outside the segment and are rated minimal, keeping
  // the profile dissimilar to users outside the targeted cluster.
  std::unordered_set<ItemId> exclude = target_set;
  for (ItemId id : genre_set) exclude.insert(id);
  auto plan = make_plan(m, cfg, items_excluding(m, exclude), std::move(selected), notes);
  return run_plan(plan, cfg, stats, &constant_min_base, false);
}

std::vector<ShillingProfile> generate_profiles(const RatingMatrix& m,
                                               const DatasetStats& stats,
                                               const AttackConfig& cfg,
                                               std::vector<std::string>* notes) {
  switch (cfg.model) {
    case AttackModel::random: return generate_random_attack(m, stats, cfg, notes);
    case AttackModel::average: return generate_average_attack(m, stats, cfg, notes);
    case AttackModel::bandwagon: return generate_bandwagon_attack(m, stats, cfg, notes);
    case AttackModel::segment: return generate_segment_attack(m, stats, cfg, notes);
  }
  throw ValidationError("unknown attack model");
}

AttackSummary describe_attack(std::span<const ShillingProfile> profiles) {
  AttackSummary s;
  s.profile_count = profiles.size();
  bool first = true;
  for (const ShillingProfile& p : profiles) {
    s.selected_ratings += p.selected.size();
    s.filler_ratings += p.filler.size();
    s.target_ratings += p.target.size();
    if (first) {
      s.filler_per_profile_min = s.filler_per_profile_max = p.filler.size();
      first = false;
    } else {
      s.filler_per_profile_min = std::min(s.filler_per_profile_min, p.filler.size());
      s.filler_per_profile_max = std::max(s.filler_per_profile_max, p.filler.size());
    }
    auto bucket = [&](double value) {
      const long r = round_half_up(value);
      if (r >= 1 && r <= 5) ++s.rating_histogram[static_cast<std::size_t>(r - 1)];
    };
    for (const auto& [item, value] : p.selected) bucket(value);
    for (const auto& [item, value] : p.filler) bucket(value);
    for (const auto& [item, value] : p.target) bucket(value);
  }
  return s;
}

}  // namespace shillkit
