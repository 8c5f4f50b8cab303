#pragma once

#include <Eigen/Dense>
#include <unordered_map>
#include <vector>

#include "shillkit/ratings.hpp"

namespace shillkit {

// Truncated factorization X = U S V^T of the densified rating matrix.
// Columns of U and V are orthonormal, singular values nonincreasing, and
// the sign convention (largest-magnitude entry of each U column is
// nonnegative) makes factors deterministic.
struct FactorModel {
  Eigen::MatrixXd user_factors;     // n_users x r
  Eigen::VectorXd singular_values;  // r
  Eigen::MatrixXd item_factors;     // n_items x r
  std::vector<double> fill_values;  // per item: value used for missing cells

  std::vector<UserId> user_ids;
  std::vector<ItemId> item_ids;
  std::unordered_map<UserId, std::size_t> user_index;
  std::unordered_map<ItemId, std::size_t> item_index;

  std::size_t rank() const { return static_cast<std::size_t>(singular_values.size()); }
};

// Densifies missing cells with the item mean (global mean for unrated
// items) and computes the best rank-r approximation.
FactorModel svd_factorize(const RatingMatrix& m, const DatasetStats& stats,
                          std::size_t rank);

// row_k(U) . diag(S) . row_item(V), clamped to [1,5].
double predict_svd(const FactorModel& f, UserId k, ItemId item);

}  // namespace shillkit
