#include "shillkit/svd.hpp"

#include <Eigen/SVD>

namespace shillkit {

FactorModel svd_factorize(const RatingMatrix& m, const DatasetStats& stats,
                          std::size_t rank) {
  const std::size_t n_users = m.user_count();
  const std::size_t n_items = m.item_count();
  if (m.rating_count() == 0)
    throw ValidationError("cannot factorize an empty matrix");
  if (rank < 1 || rank > std::min(n_users, n_items))
    throw ValidationError("rank " + std::to_string(rank) +
                          " outside [1, min(n_users, n_items) = " +
                          std::to_string(std::min(n_users, n_items)) + "]");

  const double global_mean = *stats.global_mean;
  std::vector<double> fill(n_items, global_mean);
  for (std::size_t ii = 0; ii < n_items; ++ii) {
    if (auto mean = stats.item_mean(m.item_at(ii))) fill[ii] = *mean;
  }

  Eigen::MatrixXd dense(n_users, n_items);
  for (std::size_t ii = 0; ii < n_items; ++ii) dense.col(ii).setConstant(fill[ii]);
  for (std::size_t ui = 0; ui < n_users; ++ui) {
    for (const RatingEntry& e : m.user_ratings(ui))
      dense(static_cast<Eigen::Index>(ui), static_cast<Eigen::Index>(e.item)) =
          static_cast<double>(e.value);
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);

  FactorModel f;
  const Eigen::Index r = static_cast<Eigen::Index>(rank);
  f.user_factors = svd.matrixU().leftCols(r);
  f.item_factors = svd.matrixV().leftCols(r);
  f.singular_values = svd.singularValues().head(r);
  f.fill_values = std::move(fill);

  // Deterministic sign: the largest-magnitude entry of each U column is
  // made nonnegative, with the matching V column flipped alongside.
  for (Eigen::Index c = 0; c < r; ++c) {
    Eigen::Index row = 0;
    f.user_factors.col(c).cwiseAbs().maxCoeff(&row);
    if (f.user_factors(row, c) < 0.0) {
      f.user_factors.col(c) = -f.user_factors.col(c);
      f.item_factors.col(c) = -f.item_factors.col(c);
    }
  }

  f.user_ids = m.user_ids();
  f.item_ids = m.item_ids();
  f.user_index.reserve(n_users);
  for (std::size_t i = 0; i < n_users; ++i) f.user_index[f.user_ids[i]] = i;
  f.item_index.reserve(n_items);
  for (std::size_t i = 0; i < n_items; ++i) f.item_index[f.item_ids[i]] = i;
  return f;
}

double predict_svd(const FactorModel& f, UserId k, ItemId item) {
  const auto ku = f.user_index.find(k);
  if (ku == f.user_index.end())
    throw LookupError("unknown user id " + std::to_string(k));
  const auto ki = f.item_index.find(item);
  if (ki == f.item_index.end())
    throw LookupError("unknown item id " + std::to_string(item));

  const Eigen::Index u = static_cast<Eigen::Index>(ku->second);
  const Eigen::Index i = static_cast<Eigen::Index>(ki->second);
  double value = 0.0;
  for (Eigen::Index c = 0; c < f.singular_values.size(); ++c)
    value += f.user_factors(u, c) * f.singular_values(c) * f.item_factors(i, c);
  return clamp_rating(value);
}

}  // namespace shillkit
