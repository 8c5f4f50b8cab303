#include "shillkit/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace shillkit {

const char* to_string(PredictionModel::Kind kind) {
  switch (kind) {
    case PredictionModel::Kind::user_based: return "user_based";
    case PredictionModel::Kind::item_based: return "item_based";
    case PredictionModel::Kind::svd: return "svd";
  }
  return "?";
}

void validate_model(const PredictionModel& model) {
  if (model.min_overlap < 1)
    throw ValidationError("min_overlap must be >= 1");
  const bool is_svd = model.kind == PredictionModel::Kind::svd;
  if (is_svd != model.svd_rank.has_value())
    throw ValidationError("svd_rank must be present exactly when kind is svd");
  if (model.neighborhood_size && *model.neighborhood_size == 0)
    throw ValidationError("neighborhood_size must be >= 1 when given");
}

namespace detail {

namespace {

// Shared cosine kernel over two sorted sparse vectors. All sums are exact
// integer arithmetic, so the result is exactly symmetric and self-similarity
// comes out as exactly 1.0.
template <typename Entry, typename Key>
double cosine_sorted(std::span<const Entry> a, std::span<const Entry> b,
                     Key key, std::size_t min_overlap) {
  std::size_t i = 0, j = 0, count = 0;
  long long dot = 0, na = 0, nb = 0;
  while (i < a.size() && j < b.size()) {
    const auto ka = key(a[i]);
    const auto kb = key(b[j]);
    if (ka < kb) {
      ++i;
    } else if (kb < ka) {
      ++j;
    } else {
      const long long x = a[i].value;
      const long long y = b[j].value;
      dot += x * y;
      na += x * x;
      nb += y * y;
      ++count;
      ++i;
      ++j;
    }
  }
  if (count < min_overlap) return 0.0;
  if (na == 0 || nb == 0) return 0.0;
  return static_cast<double>(dot) / std::sqrt(static_cast<double>(na * nb));
}

double row_mean(std::span<const RatingEntry> row) {
  long long sum = 0;
  for (const RatingEntry& e : row) sum += e.value;
  return static_cast<double>(sum) / static_cast<double>(row.size());
}

struct Neighbor {
  std::uint32_t index;
  double sim;
  double value;
};

// Keeps the top-k by |sim|, ties resolved toward the lower index so the
// result does not depend on evaluation order.
void shrink_to_top_k(std::vector<Neighbor>& neighbors, std::size_t k) {
  if (neighbors.size() <= k) return;
  std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
    const double fa = std::fabs(a.sim);
    const double fb = std::fabs(b.sim);
    if (fa != fb) return fa > fb;
    return a.index < b.index;
  });
  neighbors.resize(k);
}

}  // namespace

double user_cosine_by_index(const RatingMatrix& m, std::size_t a, std::size_t b,
                            std::size_t min_overlap) {
  return cosine_sorted(m.user_ratings(a), m.user_ratings(b),
                       [](const RatingEntry& e) { return e.item; }, min_overlap);
}

double item_cosine_by_index(const RatingMatrix& m, std::size_t i, std::size_t j,
                            std::size_t min_overlap) {
  return cosine_sorted(m.item_raters(i), m.item_raters(j),
                       [](const RaterEntry& e) { return e.user; }, min_overlap);
}

double predict_user_based_by_index(const RatingMatrix& m, const DatasetStats& stats,
                                   const PredictionModel& model, std::size_t k,
                                   std::size_t item, double* sim_by_user) {
  const auto row = m.user_ratings(k);
  if (row.empty())
    throw ColdStartError("user " + std::to_string(m.user_at(k)) + " has no ratings");

  std::vector<Neighbor> neighbors;
  const auto raters = m.item_raters(item);
  neighbors.reserve(raters.size());
  for (const RaterEntry& e : raters) {
    if (e.user == k) continue;
    double sim;
    if (sim_by_user) {
      sim = sim_by_user[e.user];
      if (std::isnan(sim)) {
        sim = user_cosine_by_index(m, k, e.user, model.min_overlap);
        sim_by_user[e.user] = sim;
      }
    } else {
      sim = user_cosine_by_index(m, k, e.user, model.min_overlap);
    }
    if (sim == 0.0) continue;
    neighbors.push_back({e.user, sim, static_cast<double>(e.value)});
  }
  if (model.neighborhood_size) shrink_to_top_k(neighbors, *model.neighborhood_size);

  const double mean_k = row_mean(row);
  double num = 0.0, den = 0.0;
  for (const Neighbor& n : neighbors) {
    const double mean_u = stats.per_user_mean.at(m.user_at(n.index));
    num += n.sim * (n.value - mean_u);
    den += std::fabs(n.sim);
  }
  if (den == 0.0) return clamp_rating(mean_k);
  return clamp_rating(mean_k + num / den);
}

double predict_item_based_by_index(const RatingMatrix& m, const PredictionModel& model,
                                   std::size_t k, std::size_t item,
                                   double* sim_by_item) {
  const auto row = m.user_ratings(k);
  if (row.empty())
    throw ColdStartError("user " + std::to_string(m.user_at(k)) + " has no ratings");

  std::vector<Neighbor> neighbors;
  neighbors.reserve(row.size());
  for (const RatingEntry& e : row) {
    if (e.item == item) continue;
    double sim;
    if (sim_by_item) {
      sim = sim_by_item[e.item];
      if (std::isnan(sim)) {
        sim = item_cosine_by_index(m, item, e.item, model.min_overlap);
        sim_by_item[e.item] = sim;
      }
    } else {
      sim = item_cosine_by_index(m, item, e.item, model.min_overlap);
    }
    if (sim == 0.0) continue;
    neighbors.push_back({e.item, sim, static_cast<double>(e.value)});
  }
  if (model.neighborhood_size) shrink_to_top_k(neighbors, *model.neighborhood_size);

  double num = 0.0, den = 0.0;
  for (const Neighbor& n : neighbors) {
    num += n.sim * n.value;
    den += std::fabs(n.sim);
  }
  if (den == 0.0) return clamp_rating(row_mean(row));
  return clamp_rating(num / den);
}

}  // namespace detail

double user_cosine_similarity(const RatingMatrix& m, UserId a, UserId b,
                              std::size_t min_overlap) {
  return detail::user_cosine_by_index(m, m.user_index(a), m.user_index(b), min_overlap);
}

double item_cosine_similarity(const RatingMatrix& m, ItemId i, ItemId j,
                              std::size_t min_overlap) {
  return detail::item_cosine_by_index(m, m.item_index(i), m.item_index(j), min_overlap);
}

double predict_user_based(const RatingMatrix& m, const DatasetStats& stats,
                          const PredictionModel& model, UserId k, ItemId item) {
  return detail::predict_user_based_by_index(m, stats, model, m.user_index(k),
                                             m.item_index(item), nullptr);
}

double predict_item_based(const RatingMatrix& m, const PredictionModel& model,
                          UserId k, ItemId item) {
  return detail::predict_item_based_by_index(m, model, m.user_index(k),
                                             m.item_index(item), nullptr);
}

}  // namespace shillkit
