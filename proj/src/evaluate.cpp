#include "shillkit/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "shillkit/parallel.hpp"
#include "shillkit/rng.hpp"
#include "shillkit/svd.hpp"

namespace shillkit {

GroundTruth GroundTruth::from_profiles(std::span<const ShillingProfile> profiles) {
  GroundTruth truth;
  truth.shilling_users.reserve(profiles.size());
  for (const ShillingProfile& p : profiles) truth.shilling_users.push_back(p.user);
  std::sort(truth.shilling_users.begin(), truth.shilling_users.end());
  truth.shilling_users.erase(
      std::unique(truth.shilling_users.begin(), truth.shilling_users.end()),
      truth.shilling_users.end());
  return truth;
}

bool GroundTruth::contains(UserId id) const {
  return std::binary_search(shilling_users.begin(), shilling_users.end(), id);
}

DetectionScore score_flagged(std::span<const UserId> flagged, const GroundTruth& truth,
                             std::span<const UserId> roster) {
  std::set<UserId> roster_set(roster.begin(), roster.end());
  for (UserId id : truth.shilling_users) {
    if (!roster_set.contains(id))
      throw ValidationError("ground-truth user " + std::to_string(id) +
                            " is not in the roster");
  }

  DetectionScore s;
  for (UserId id : flagged) {
    if (truth.contains(id)) {
      ++s.true_positives;
    } else {
      ++s.false_positives;
    }
  }
  s.false_negatives = truth.shilling_users.size() - s.true_positives;

  if (s.true_positives + s.false_positives > 0) {
    s.precision = static_cast<double>(s.true_positives) /
                  static_cast<double>(s.true_positives + s.false_positives);
  }
  if (s.true_positives + s.false_negatives > 0) {
    s.recall = static_cast<double>(s.true_positives) /
               static_cast<double>(s.true_positives + s.false_negatives);
  }
  if (s.precision && s.recall) {
    const double p = *s.precision;
    const double r = *s.recall;
    s.f_measure = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return s;
}

DetectionScore score_detection(const DetectionReport& report, const GroundTruth& truth) {
  return score_flagged(report.flagged, truth, report.user_ids);
}

double rmse_shift(const PredictionTable& pre, const PredictionTable& post,
                  std::span<const ItemId> targets) {
  if (pre.size() != post.size())
    throw ValidationError("prediction tables cover different pair counts");
  if (pre.empty()) throw ValidationError("prediction tables are empty");

  std::set<ItemId> target_set(targets.begin(), targets.end());
  double sum_sq = 0.0;
  auto it_post = post.begin();
  for (auto it_pre = pre.begin(); it_pre != pre.end(); ++it_pre, ++it_post) {
    if (it_pre->first != it_post->first)
      throw ValidationError("prediction tables cover different pairs");
    if (!target_set.contains(it_pre->first.second))
      throw ValidationError("prediction table contains a non-target item " +
                            std::to_string(it_pre->first.second));
    const double d = it_post->second - it_pre->second;
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / static_cast<double>(pre.size()));
}

namespace {

struct PairKey {
  UserId user;
  ItemId item;
};

// One engine's pre/post prediction pass over the evaluable pairs. NaN marks
// an engine failure for that pair.
struct EngineTables {
  std::vector<double> pre;
  std::vector<double> post;
};

EngineTables predict_pairs(const RatingMatrix& m_pre, const DatasetStats& stats_pre,
                           const RatingMatrix& m_post, const DatasetStats& stats_post,
                           const PredictionModel& engine,
                           std::span<const PairKey> pairs,
                           std::span<const ItemId> targets, std::size_t workers) {
  EngineTables t;
  t.pre.assign(pairs.size(), std::numeric_limits<double>::quiet_NaN());
  t.post.assign(pairs.size(), std::numeric_limits<double>::quiet_NaN());

  // Pair indices grouped per user, so each worker touches a contiguous
  // stretch and per-user caches stay thread-local.
  std::vector<std::size_t> user_starts;
  user_starts.push_back(0);
  for (std::size_t i = 1; i <= pairs.size(); ++i) {
    if (i == pairs.size() || pairs[i].user != pairs[i - 1].user)
      user_starts.push_back(i);
  }
  const std::size_t n_groups = user_starts.size() - 1;

  auto run_user_based = [&](const RatingMatrix& m, const DatasetStats& stats,
                            std::vector<double>& out) {
    parallel_for(n_groups, workers, [&](std::size_t g) {
      std::vector<double> sim_row(m.user_count(),
                                  std::numeric_limits<double>::quiet_NaN());
      const std::size_t k = m.user_index(pairs[user_starts[g]].user);
      for (std::size_t i = user_starts[g]; i < user_starts[g + 1]; ++i) {
        try {
          out[i] = detail::predict_user_based_by_index(
              m, stats, engine, k, m.item_index(pairs[i].item), sim_row.data());
        } catch (const Error&) {
          // leave NaN; counted by the caller
        }
      }
    });
  };

  auto run_item_based = [&](const RatingMatrix& m, std::vector<double>& out) {
    // Full similarity row per target, shared read-only by all workers.
    std::vector<std::vector<double>> target_sims;
    std::vector<std::size_t> target_index(targets.size());
    target_sims.reserve(targets.size());
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
      target_index[ti] = m.item_index(targets[ti]);
      std::vector<double> row(m.item_count(), 0.0);
      const std::size_t it = target_index[ti];
      for (std::size_t b = 0; b < m.item_count(); ++b) {
        row[b] = b == it ? 1.0
                         : detail::item_cosine_by_index(m, it, b, engine.min_overlap);
      }
      target_sims.push_back(std::move(row));
    }
    std::vector<std::size_t> target_slot(m.item_count(), 0);
    for (std::size_t ti = 0; ti < targets.size(); ++ti)
      target_slot[target_index[ti]] = ti;

    parallel_for(n_groups, workers, [&](std::size_t g) {
      const std::size_t k = m.user_index(pairs[user_starts[g]].user);
      for (std::size_t i = user_starts[g]; i < user_starts[g + 1]; ++i) {
        const std::size_t item = m.item_index(pairs[i].item);
        try {
          out[i] = detail::predict_item_based_by_index(
              m, engine, k, item, target_sims[target_slot[item]].data());
        } catch (const Error&) {
        }
      }
    });
  };

  switch (engine.kind) {
    case PredictionModel::Kind::user_based:
      run_user_based(m_pre, stats_pre, t.pre);
      run_user_based(m_post, stats_post, t.post);
      break;
    case PredictionModel::Kind::item_based:
      run_item_based(m_pre, t.pre);
      run_item_based(m_post, t.post);
      break;
    case PredictionModel::Kind::svd: {
      const std::size_t rank = engine.svd_rank.value_or(10);
      const FactorModel f_pre = svd_factorize(
          m_pre, stats_pre, std::min(rank, std::min(m_pre.user_count(), m_pre.item_count())));
      const FactorModel f_post = svd_factorize(
          m_post, stats_post,
          std::min(rank, std::min(m_post.user_count(), m_post.item_count())));
      parallel_for(pairs.size(), workers, [&](std::size_t i) {
        try {
          t.pre[i] = predict_svd(f_pre, pairs[i].user, pairs[i].item);
          t.post[i] = predict_svd(f_post, pairs[i].user, pairs[i].item);
        } catch (const Error&) {
        }
      });
      break;
    }
  }
  return t;
}

}  // namespace

ImpactScore measure_impact(const RatingMatrix& m_pre, const RatingMatrix& m_post,
                           std::span<const ItemId> targets,
                           std::span<const PredictionModel> engines,
                           std::size_t workers) {
  if (targets.empty()) throw ValidationError("target list is empty");
  for (ItemId t : targets) {
    if (!m_pre.has_item(t) || !m_post.has_item(t))
      throw ValidationError("target item " + std::to_string(t) +
                            " missing from one of the matrices");
  }
  for (UserId id : m_pre.user_ids()) {
    if (!m_post.has_user(id))
      throw ValidationError("post matrix is missing user " + std::to_string(id) +
                            "; it must be the pre matrix plus injected profiles");
  }

  ImpactScore impact;
  impact.target_items.assign(targets.begin(), targets.end());

  std::vector<PairKey> pairs;
  for (std::size_t ui = 0; ui < m_pre.user_count(); ++ui) {
    if (!m_pre.is_authentic_index(ui)) continue;
    const UserId user = m_pre.user_at(ui);
    for (ItemId t : targets) {
      if (m_pre.rating(user, t)) {
        ++impact.skipped_rated;
      } else {
        pairs.push_back({user, t});
      }
    }
  }
  impact.prediction_count = pairs.size();
  if (pairs.empty())
    throw ValidationError("every (authentic user, target) pair is already rated; "
                          "nothing to evaluate");

  const DatasetStats stats_pre = compute_stats(m_pre);
  const DatasetStats stats_post = compute_stats(m_post);

  for (const PredictionModel& engine : engines) {
    EngineTables t = predict_pairs(m_pre, stats_pre, m_post, stats_post, engine, pairs,
                                   targets, workers);
    PredictionTable table_pre, table_post;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (std::isnan(t.pre[i]) || std::isnan(t.post[i])) {
        ++failed;
        continue;
      }
      table_pre[{pairs[i].user, pairs[i].item}] = t.pre[i];
      table_post[{pairs[i].user, pairs[i].item}] = t.post[i];
    }
    impact.failed_pairs += failed;
    const double shift =
        table_pre.empty() ? 0.0 : rmse_shift(table_pre, table_post, targets);
    switch (engine.kind) {
      case PredictionModel::Kind::user_based: impact.rmse_shift_user_based = shift; break;
      case PredictionModel::Kind::item_based: impact.rmse_shift_item_based = shift; break;
      case PredictionModel::Kind::svd: impact.rmse_shift_svd = shift; break;
    }
  }
  return impact;
}

std::uint64_t derive_cell_seed(std::uint64_t base_seed, AttackModel model,
                               double attack_size, double filler_size) {
  std::uint64_t s = base_seed;
  s = mix_seed(s, static_cast<std::uint64_t>(model) + 1);
  s = mix_seed(s, static_cast<std::uint64_t>(round_half_up(attack_size * 1e6)));
  s = mix_seed(s, static_cast<std::uint64_t>(round_half_up(filler_size * 1e6)));
  return s;
}

std::vector<ExperimentResult> run_grid(const RatingMatrix& base,
                                       const DatasetStats& stats,
                                       std::span<const GridCell> grid,
                                       std::span<const PredictionModel> engines,
                                       std::uint64_t base_seed,
                                       std::size_t workers) {
  std::vector<ExperimentResult> results(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult& r = results[i];
    r.cell = grid[i];
    r.cell_seed = derive_cell_seed(base_seed, grid[i].attack.model,
                                   grid[i].attack.attack_size,
                                   grid[i].attack.filler_size);
    r.cell.attack.seed = r.cell_seed;
    try {
      const auto profiles = generate_profiles(base, stats, r.cell.attack);
      r.profile_count = profiles.size();
      const RatingMatrix injected = inject_profiles(base, profiles);
      const DetectionReport report = detect_shilling(injected, r.cell.detection);
      r.resolved_profile_threshold = report.resolved_profile_threshold;
      r.flagged_count = report.flagged.size();
      const GroundTruth truth = GroundTruth::from_profiles(profiles);
      r.score = score_detection(report, truth);
      if (!engines.empty()) {
        r.impact = measure_impact(base, injected, r.cell.attack.target_items, engines);
      }
      r.ok = true;
    } catch (const Error& e) {
      r.ok = false;
      r.error = e.what();
    }
    const auto end = std::chrono::steady_clock::now();
    r.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(end - start)
            .count();
  });
  return results;
}

}  // namespace shillkit
