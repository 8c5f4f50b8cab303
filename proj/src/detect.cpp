#include "shillkit/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "shillkit/parallel.hpp"

namespace shillkit {

namespace detail {

double pearson_by_index(const RatingMatrix& m, std::size_t a, std::size_t b,
                        std::size_t min_overlap) {
  const auto ra = m.user_ratings(a);
  const auto rb = m.user_ratings(b);
  std::size_t i = 0, j = 0;
  long long n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  while (i < ra.size() && j < rb.size()) {
    if (ra[i].item < rb[j].item) {
      ++i;
    } else if (rb[j].item < ra[i].item) {
      ++j;
    } else {
      const long long x = ra[i].value;
      const long long y = rb[j].value;
      ++n;
      sx += x;
      sy += y;
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
      ++i;
      ++j;
    }
  }
  if (n < static_cast<long long>(min_overlap)) return 0.0;
  const double var_x = static_cast<double>(n * sxx - sx * sx);
  const double var_y = static_cast<double>(n * syy - sy * sy);
  if (var_x <= 0.0 || var_y <= 0.0) return 0.0;  // constant vector guard
  const double num = static_cast<double>(n * sxy - sx * sy);
  return num / std::sqrt(var_x * var_y);
}

}  // namespace detail

double pearson_correlation(const RatingMatrix& m, UserId a, UserId b,
                           std::size_t min_overlap) {
  return detail::pearson_by_index(m, m.user_index(a), m.user_index(b), min_overlap);
}

CorrelationMatrix build_correlation_matrix(const RatingMatrix& m,
                                           std::size_t min_overlap,
                                           std::size_t workers) {
  if (m.user_count() == 0)
    throw ValidationError("cannot build a correlation matrix for an empty matrix");
  const std::size_t n = m.user_count();
  CorrelationMatrix corr(n);
  parallel_for(n, workers, [&](std::size_t i) {
    corr.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < n; ++j)
      corr.set(i, j, detail::pearson_by_index(m, i, j, min_overlap));
  });
  return corr;
}

std::size_t resolve_profile_threshold(const RatingMatrix& m, const DetectionConfig& cfg,
                                      bool* against_authentic,
                                      std::vector<std::string>* warnings) {
  std::size_t resolved = 0;
  bool authentic_base = false;
  if (std::holds_alternative<std::size_t>(cfg.profile_threshold)) {
    resolved = std::get<std::size_t>(cfg.profile_threshold);
    if (resolved < 1)
      throw ValidationError("profile_threshold count must be >= 1");
  } else {
    const double fraction = std::get<double>(cfg.profile_threshold);
    if (!(fraction > 0.0 && fraction <= 1.0))
      throw ValidationError("profile_threshold fraction must be in (0,1]");
    // Labels are available when the roster distinguishes injected users;
    // without them a fraction of the authentic users can only be
    // approximated against the full roster.
    authentic_base = m.authentic_count() < m.user_count();
    const std::size_t base = authentic_base ? m.authentic_count() : m.user_count();
    resolved = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(base)));
    if (resolved < 1) resolved = 1;
    if (!authentic_base && warnings) {
      warnings->push_back(
          "no ground-truth labels: profile threshold resolved against all " +
          std::to_string(base) + " users instead of the authentic count");
    }
  }
  if (against_authentic) *against_authentic = authentic_base;
  return resolved;
}

DetectionReport detect_shilling(const RatingMatrix& m, const DetectionConfig& cfg,
                                std::size_t workers) {
  if (m.user_count() == 0)
    throw ValidationError("cannot run detection on an empty matrix");
  if (!(cfg.correlation_threshold > 0.0 && cfg.correlation_threshold <= 1.0))
    throw ValidationError("correlation_threshold must be in (0,1]");
  if (cfg.correlation_threshold < 0.5)
    throw ValidationError("correlation_threshold below 0.5 would flag ordinary "
                          "profile agreement; refusing");

  DetectionReport report;
  report.correlation_threshold = cfg.correlation_threshold;
  report.min_overlap = cfg.min_overlap;
  if (cfg.correlation_threshold < 0.9) {
    report.warnings.push_back(
        "correlation_threshold below 0.9; the rule expects a very high bar "
        "and lower values may flag genuine profiles");
  }
  report.resolved_profile_threshold = resolve_profile_threshold(
      m, cfg, &report.resolved_against_authentic, &report.warnings);

  const auto start = std::chrono::steady_clock::now();
  const CorrelationMatrix corr =
      build_correlation_matrix(m, cfg.min_overlap, workers);

  const std::size_t n = m.user_count();
  report.user_ids = m.user_ids();
  report.high_corr_count.assign(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (corr.at(i, j) > cfg.correlation_threshold) ++count;
    }
    report.high_corr_count[i] = count;
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (report.high_corr_count[i] > report.resolved_profile_threshold)
      report.flagged.push_back(report.user_ids[i]);
  }

  const auto end = std::chrono::steady_clock::now();
  report.wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(end - start)
          .count();
  return report;
}

std::size_t DetectionReport::count_for(UserId id) const {
  auto it = std::lower_bound(user_ids.begin(), user_ids.end(), id);
  if (it == user_ids.end() || *it != id)
    throw LookupError("unknown user id " + std::to_string(id));
  return high_corr_count[static_cast<std::size_t>(it - user_ids.begin())];
}

bool DetectionReport::is_flagged(UserId id) const {
  return std::binary_search(flagged.begin(), flagged.end(), id);
}

}  // namespace shillkit
