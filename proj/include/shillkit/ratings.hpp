#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "shillkit/errors.hpp"
#include "shillkit/profile.hpp"

namespace shillkit {

inline constexpr double kRatingMin = 1.0;
inline constexpr double kRatingMax = 5.0;

inline double clamp_rating(double v) {
  if (v < kRatingMin) return kRatingMin;
  if (v > kRatingMax) return kRatingMax;
  return v;
}

// Half-up rounding; attack sizing and filler ratings use this everywhere.
inline long round_half_up(double x) {
  return static_cast<long>(std::floor(x + 0.5));
}

// One rating as seen from a user's row (items in ascending roster order).
struct RatingEntry {
  std::uint32_t item;  // item index, not id
  std::int8_t value;
};

// One rating as seen from an item's column (users in ascending roster order).
struct RaterEntry {
  std::uint32_t user;  // user index, not id
  std::int8_t value;
};

// Sparse user x item rating matrix. Immutable after construction; injection
// and relabeling return new matrices. Rosters are kept in ascending id
// order, so injected users (whose ids exceed every authentic id) always
// form a suffix.
class RatingMatrix {
 public:
  class Builder {
   public:
    Builder& add_user(UserId id, bool authentic = true);
    Builder& add_item(ItemId id);
    Builder& add_rating(UserId user, ItemId item, double value,
                        bool authentic_user = true);
    Builder& set_genres(ItemId id, std::vector<std::string> genres);
    RatingMatrix build();

   private:
    struct UserDraft {
      bool authentic = true;
      std::vector<std::pair<ItemId, std::int8_t>> ratings;
    };
    std::unordered_map<UserId, UserDraft> users_;
    std::unordered_map<ItemId, std::vector<std::string>> genres_;
    std::vector<ItemId> declared_items_;
    bool has_genres_ = false;
  };

  std::size_t user_count() const { return users_.size(); }
  std::size_t item_count() const { return items_.size(); }
  std::size_t rating_count() const { return rating_count_; }
  std::size_t authentic_count() const { return authentic_count_; }

  const std::vector<UserId>& user_ids() const { return users_; }
  const std::vector<ItemId>& item_ids() const { return items_; }

  bool has_user(UserId id) const { return user_index_.contains(id); }
  bool has_item(ItemId id) const { return item_index_.contains(id); }

  // Index lookups throw LookupError for unknown ids.
  std::size_t user_index(UserId id) const;
  std::size_t item_index(ItemId id) const;
  UserId user_at(std::size_t idx) const { return users_[idx]; }
  ItemId item_at(std::size_t idx) const { return items_[idx]; }

  bool is_authentic(UserId id) const { return authentic_[user_index(id)]; }
  bool is_authentic_index(std::size_t idx) const { return authentic_[idx]; }

  std::span<const RatingEntry> user_ratings(std::size_t user_idx) const {
    return {rows_.data() + row_begin_[user_idx],
            row_begin_[user_idx + 1] - row_begin_[user_idx]};
  }
  std::span<const RaterEntry> item_raters(std::size_t item_idx) const {
    return {cols_.data() + col_begin_[item_idx],
            col_begin_[item_idx + 1] - col_begin_[item_idx]};
  }

  std::optional<double> rating(UserId user, ItemId item) const;

  bool has_genres() const { return has_genres_; }
  std::span<const std::string> item_genres(ItemId id) const;
  std::vector<ItemId> items_with_genre(const std::string& genre) const;

 private:
  friend class Builder;
  RatingMatrix() = default;

  std::vector<UserId> users_;      // ascending
  std::vector<ItemId> items_;     // ascending
  std::vector<bool> authentic_;   // parallel to users_
  std::unordered_map<UserId, std::uint32_t> user_index_;
  std::unordered_map<ItemId, std::uint32_t> item_index_;

  // CSR-style storage, row = user, col = item, both sides sorted.
  std::vector<RatingEntry> rows_;
  std::vector<std::size_t> row_begin_;
  std::vector<RaterEntry> cols_;
  std::vector<std::size_t> col_begin_;

  std::vector<std::vector<std::string>> genres_;  // per item index
  bool has_genres_ = false;
  std::size_t rating_count_ = 0;
  std::size_t authentic_count_ = 0;
};

struct DatasetStats {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t n_ratings = 0;
  std::optional<double> global_mean;
  std::unordered_map<UserId, double> per_user_mean;
  std::unordered_map<ItemId, double> per_item_mean;
  std::unordered_map<ItemId, std::size_t> per_item_count;

  std::optional<double> user_mean(UserId id) const {
    auto it = per_user_mean.find(id);
    if (it == per_user_mean.end()) return std::nullopt;
    return it->second;
  }
  std::optional<double> item_mean(ItemId id) const {
    auto it = per_item_mean.find(id);
    if (it == per_item_mean.end()) return std::nullopt;
    return it->second;
  }
};

DatasetStats compute_stats(const RatingMatrix& m);

// Items rated by both users, ascending by id. Symmetric in (a, b).
std::vector<ItemId> co_rated_items(const RatingMatrix& m, UserId a, UserId b);

// Returns a new matrix with the profiles appended as non-authentic users.
// The input is never modified. Profiles must reference known items and
// carry user ids that do not collide with the roster.
RatingMatrix inject_profiles(const RatingMatrix& m,
                             std::span<const ShillingProfile> profiles);

// Returns a copy of m with the given users flagged as injected. The ids
// must exist and must all exceed every unlisted id, matching the id
// allocation rule for injected profiles.
RatingMatrix with_ground_truth(const RatingMatrix& m,
                               std::span<const UserId> shilling_users);

// MovieLens u.data loader: tab-separated "user item rating timestamp" with
// integer ratings on [1,5]. The optional items file is the pipe-separated
// u.item format whose final 19 fields are genre flags.
RatingMatrix load_movielens(
    const std::filesystem::path& ratings_path,
    const std::optional<std::filesystem::path>& items_path = std::nullopt);

// Writes the matrix back in u.data format, rows ordered by (user, item),
// timestamps zeroed.
void save_movielens(const RatingMatrix& m, const std::filesystem::path& path);

// Ground-truth sidecar: one injected user id per line, ascending.
void save_ground_truth(std::span<const UserId> shilling_users,
                       const std::filesystem::path& path);
std::vector<UserId> load_ground_truth(const std::filesystem::path& path);

// The 19 canonical MovieLens genre labels, in u.item flag order.
const std::vector<std::string>& movielens_genres();

}  // namespace shillkit
