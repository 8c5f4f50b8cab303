#pragma once

#include <cstddef>
#include <optional>

#include "shillkit/ratings.hpp"

namespace shillkit {

// Engine selector shared by the prediction entry points and the evaluation
// harness. neighborhood_size absent means the whole database, matching the
// formulas' sums over all users/items.
struct PredictionModel {
  enum class Kind { user_based, item_based, svd };

  Kind kind = Kind::user_based;
  std::optional<std::size_t> neighborhood_size;
  std::size_t min_overlap = 3;
  std::optional<std::size_t> svd_rank;
};

const char* to_string(PredictionModel::Kind kind);

// Throws ValidationError when the field combination is inconsistent
// (svd_rank present iff kind == svd, min_overlap >= 1).
void validate_model(const PredictionModel& model);

// Cosine over the co-rated rating vectors, raw (no mean centering).
// Returns 0 when fewer than min_overlap items are co-rated or either
// vector has zero norm.
double user_cosine_similarity(const RatingMatrix& m, UserId a, UserId b,
                              std::size_t min_overlap);

// Same rule over the two items' common-rater vectors.
double item_cosine_similarity(const RatingMatrix& m, ItemId i, ItemId j,
                              std::size_t min_overlap);

// mean_k + sum_u sim(k,u) * (r_u - mean_u) / sum_u |sim(k,u)| over the users
// who rated the item (or the top-|neighborhood| of them by |sim|), clamped
// to [1,5]. Falls back to the user mean (then the global mean) when the
// denominator vanishes.
double predict_user_based(const RatingMatrix& m, const DatasetStats& stats,
                          const PredictionModel& model, UserId k, ItemId item);

// sum_b sim(item,b) * r_kb / sum_b |sim(item,b)| over the items rated by k,
// clamped to [1,5]; user-mean fallback as above.
double predict_item_based(const RatingMatrix& m, const PredictionModel& model,
                          UserId k, ItemId item);

namespace detail {

// Index-level kernels used by the batch evaluation paths.
double user_cosine_by_index(const RatingMatrix& m, std::size_t a, std::size_t b,
                            std::size_t min_overlap);
double item_cosine_by_index(const RatingMatrix& m, std::size_t i, std::size_t j,
                            std::size_t min_overlap);
// The sim caches are optional scratch rows sized to the user/item roster,
// NaN-initialized; computed similarities are written back so repeated
// predictions for one user (or one target item) share the work.
double predict_user_based_by_index(const RatingMatrix& m, const DatasetStats& stats,
                                   const PredictionModel& model, std::size_t k,
                                   std::size_t item, double* sim_by_user);
double predict_item_based_by_index(const RatingMatrix& m, const PredictionModel& model,
                                   std::size_t k, std::size_t item,
                                   double* sim_by_item);

}  // namespace detail

}  // namespace shillkit
