#pragma once

// Brute-force reference implementations used as oracles. Everything here is
// written as directly as possible from the definitions (two-pass means,
// explicit neighborhoods, O(n^2) scans) and stays independent of the
// library's computation paths.

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "shillkit/ratings.hpp"

namespace shillkit::oracle {

// Plain nested-map copy of a rating matrix.
struct DenseView {
  std::vector<UserId> users;
  std::vector<ItemId> items;
  std::map<UserId, std::map<ItemId, double>> rows;

  static DenseView from(const RatingMatrix& m);
  std::optional<double> at(UserId u, ItemId i) const;
};

// Pairs of co-rated values (a's rating, b's rating) in ascending item order.
std::vector<std::pair<double, double>> co_rated_values(const DenseView& v, UserId a,
                                                       UserId b);

double cosine(const std::vector<std::pair<double, double>>& pairs,
              std::size_t min_overlap);
double pearson(const std::vector<std::pair<double, double>>& pairs,
               std::size_t min_overlap);

double user_cosine(const DenseView& v, UserId a, UserId b, std::size_t min_overlap);
double item_cosine(const DenseView& v, ItemId i, ItemId j, std::size_t min_overlap);

// Full-database prediction formulas, evaluated term by term.
double predict_user_based(const DenseView& v, UserId k, ItemId item,
                          std::size_t min_overlap);
double predict_item_based(const DenseView& v, UserId k, ItemId item,
                          std::size_t min_overlap);

double user_pearson(const DenseView& v, UserId a, UserId b, std::size_t min_overlap);

// The two-threshold flag rule, literally.
std::vector<UserId> detect(const DenseView& v, double correlation_threshold,
                           std::size_t profile_threshold, std::size_t min_overlap);

struct Prf {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
};
Prf prf(const std::set<UserId>& flagged, const std::set<UserId>& truth);

double rmse(const std::map<std::pair<UserId, ItemId>, double>& pre,
            const std::map<std::pair<UserId, ItemId>, double>& post);

// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, sorted
// descending. Used as the Gram-matrix oracle for singular values.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a);

}  // namespace shillkit::oracle
