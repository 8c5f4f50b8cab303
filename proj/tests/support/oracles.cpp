#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace shillkit::oracle {

DenseView DenseView::from(const RatingMatrix& m) {
  DenseView v;
  v.users = m.user_ids();
  v.items = m.item_ids();
  for (std::size_t ui = 0; ui < m.user_count(); ++ui) {
    const UserId user = m.user_at(ui);
    for (const RatingEntry& e : m.user_ratings(ui))
      v.rows[user][m.item_at(e.item)] = static_cast<double>(e.value);
  }
  return v;
}

std::optional<double> DenseView::at(UserId u, ItemId i) const {
  auto ru = rows.find(u);
  if (ru == rows.end()) return std::nullopt;
  auto ri = ru->second.find(i);
  if (ri == ru->second.end()) return std::nullopt;
  return ri->second;
}

std::vector<std::pair<double, double>> co_rated_values(const DenseView& v, UserId a,
                                                       UserId b) {
  std::vector<std::pair<double, double>> out;
  auto ra = v.rows.find(a);
  auto rb = v.rows.find(b);
  if (ra == v.rows.end() || rb == v.rows.end()) return out;
  for (const auto& [item, value] : ra->second) {
    auto other = rb->second.find(item);
    if (other != rb->second.end()) out.emplace_back(value, other->second);
  }
  return out;
}

double cosine(const std::vector<std::pair<double, double>>& pairs,
              std::size_t min_overlap) {
  if (pairs.size() < min_overlap) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [x, y] : pairs) {
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double pearson(const std::vector<std::pair<double, double>>& pairs,
               std::size_t min_overlap) {
  if (pairs.size() < min_overlap) return 0.0;
  const double n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (const auto& [x, y] : pairs) {
    cov += (x - mx) * (y - my);
    vx += (x - mx) * (x - mx);
    vy += (y - my) * (y - my);
  }
  if (vx <= 0.0 || vy <= 0.0) return 0.0;
  return cov / std::sqrt(vx * vy);
}

double user_cosine(const DenseView& v, UserId a, UserId b, std::size_t min_overlap) {
  return cosine(co_rated_values(v, a, b), min_overlap);
}

double item_cosine(const DenseView& v, ItemId i, ItemId j, std::size_t min_overlap) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& [user, row] : v.rows) {
    auto ri = row.find(i);
    auto rj = row.find(j);
    if (ri != row.end() && rj != row.end()) pairs.emplace_back(ri->second, rj->second);
  }
  return cosine(pairs, min_overlap);
}

double user_pearson(const DenseView& v, UserId a, UserId b, std::size_t min_overlap) {
  return pearson(co_rated_values(v, a, b), min_overlap);
}

namespace {

double user_mean(const DenseView& v, UserId u) {
  const auto& row = v.rows.at(u);
  double sum = 0.0;
  for (const auto& [item, value] : row) sum += value;
  return sum / static_cast<double>(row.size());
}

double clamp15(double x) { return std::min(5.0, std::max(1.0, x)); }

}  // namespace

double predict_user_based(const DenseView& v, UserId k, ItemId item,
                          std::size_t min_overlap) {
  const double mean_k = user_mean(v, k);
  double num = 0.0, den = 0.0;
  for (UserId u : v.users) {
    if (u == k) continue;
    auto rated = v.at(u, item);
    if (!rated) continue;
    const double sim = user_cosine(v, k, u, min_overlap);
    if (sim == 0.0) continue;
    num += sim * (*rated - user_mean(v, u));
    den += std::fabs(sim);
  }
  if (den == 0.0) return clamp15(mean_k);
  return clamp15(mean_k + num / den);
}

double predict_item_based(const DenseView& v, UserId k, ItemId item,
                          std::size_t min_overlap) {
  double num = 0.0, den = 0.0;
  for (const auto& [b, value] : v.rows.at(k)) {
    if (b == item) continue;
    const double sim = item_cosine(v, item, b, min_overlap);
    if (sim == 0.0) continue;
    num += sim * value;
    den += std::fabs(sim);
  }
  if (den == 0.0) return clamp15(user_mean(v, k));
  return clamp15(num / den);
}

std::vector<UserId> detect(const DenseView& v, double correlation_threshold,
                           std::size_t profile_threshold, std::size_t min_overlap) {
  std::vector<UserId> flagged;
  for (UserId u : v.users) {
    std::size_t count = 0;
    for (UserId other : v.users) {
      if (other == u) continue;
      if (user_pearson(v, u, other, min_overlap) > correlation_threshold) ++count;
    }
    if (count > profile_threshold) flagged.push_back(u);
  }
  return flagged;
}

Prf prf(const std::set<UserId>& flagged, const std::set<UserId>& truth) {
  std::size_t tp = 0;
  for (UserId id : flagged) {
    if (truth.contains(id)) ++tp;
  }
  const std::size_t fp = flagged.size() - tp;
  const std::size_t fn = truth.size() - tp;
  Prf out;
  if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (out.precision && out.recall) {
    const double p = *out.precision, r = *out.recall;
    out.f_measure = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return out;
}

double rmse(const std::map<std::pair<UserId, ItemId>, double>& pre,
            const std::map<std::pair<UserId, ItemId>, double>& post) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [key, value] : pre) {
    const double d = post.at(key) - value;
    sum += d * d;
    ++n;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

}  // namespace shillkit::oracle
