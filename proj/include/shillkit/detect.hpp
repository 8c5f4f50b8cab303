#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "shillkit/ratings.hpp"

namespace shillkit {

// Parameters of the correlation-count detector. profile_threshold is either
// an absolute peer count or a fraction resolved against the authentic user
// count (all users, with a warning, when no labels are available).
struct DetectionConfig {
  double correlation_threshold = 0.95;
  std::variant<std::size_t, double> profile_threshold = 0.10;
  std::size_t min_overlap = 3;
};

// Pearson correlation over the co-rated items' ratings. Returns 0 when the
// overlap is below min_overlap or either co-rated vector is constant.
double pearson_correlation(const RatingMatrix& m, UserId a, UserId b,
                           std::size_t min_overlap);

namespace detail {
double pearson_by_index(const RatingMatrix& m, std::size_t a, std::size_t b,
                        std::size_t min_overlap);
}

// Dense symmetric matrix of pairwise user correlations, rows and columns in
// roster order. The diagonal is stored as 1 but never counted.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  CorrelationMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

CorrelationMatrix build_correlation_matrix(const RatingMatrix& m,
                                           std::size_t min_overlap,
                                           std::size_t workers = 1);

struct DetectionReport {
  std::vector<UserId> flagged;  // ascending
  std::vector<UserId> user_ids;            // roster order
  std::vector<std::size_t> high_corr_count;  // parallel to user_ids
  double correlation_threshold = 0.0;
  std::size_t resolved_profile_threshold = 0;
  std::size_t min_overlap = 0;
  bool resolved_against_authentic = false;
  double wall_ms = 0.0;
  std::vector<std::string> warnings;

  std::size_t count_for(UserId id) const;
  bool is_flagged(UserId id) const;
};

// Throws ValidationError for an empty matrix or an out-of-range config.
// The flag rule is strict at both thresholds: a user is flagged when the
// number of other users with correlation > correlation_threshold is
// > the resolved profile threshold.
DetectionReport detect_shilling(const RatingMatrix& m, const DetectionConfig& cfg,
                                std::size_t workers = 1);

// Exposed for the harness: resolves a fractional profile threshold against
// the matrix the way detect_shilling does.
std::size_t resolve_profile_threshold(const RatingMatrix& m, const DetectionConfig& cfg,
                                      bool* against_authentic = nullptr,
                                      std::vector<std::string>* warnings = nullptr);

}  // namespace shillkit
