#include "shillkit/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace shillkit {

namespace {

bool is_integral_rating(double v) {
  return v == std::floor(v) && v >= kRatingMin && v <= kRatingMax;
}

}  // namespace

RatingMatrix::Builder& RatingMatrix::Builder::add_user(UserId id, bool authentic) {
  auto [it, inserted] = users_.try_emplace(id);
  it->second.authentic = authentic;
  return *this;
}

RatingMatrix::Builder& RatingMatrix::Builder::add_item(ItemId id) {
  declared_items_.push_back(id);
  return *this;
}

RatingMatrix::Builder& RatingMatrix::Builder::add_rating(UserId user, ItemId item,
                                                         double value,
                                                         bool authentic_user) {
  if (!is_integral_rating(value)) {
    throw ValidationError("rating for user " + std::to_string(user) + ", item " +
                          std::to_string(item) +
                          " is not an integer in [1,5]: " + std::to_string(value));
  }
  auto [it, inserted] = users_.try_emplace(user);
  if (inserted) it->second.authentic = authentic_user;
  it->second.ratings.emplace_back(item, static_cast<std::int8_t>(value));
  return *this;
}

RatingMatrix::Builder& RatingMatrix::Builder::set_genres(ItemId id,
                                                         std::vector<std::string> genres) {
  genres_[id] = std::move(genres);
  has_genres_ = true;
  return *this;
}

RatingMatrix RatingMatrix::Builder::build() {
  RatingMatrix m;

  m.users_.reserve(users_.size());
  for (const auto& [id, draft] : users_) m.users_.push_back(id);
  std::sort(m.users_.begin(), m.users_.end());

  std::set<ItemId> item_set(declared_items_.begin(), declared_items_.end());
  for (const auto& [id, draft] : users_)
    for (const auto& [item, value] : draft.ratings) item_set.insert(item);
  m.items_.assign(item_set.begin(), item_set.end());

  m.user_index_.reserve(m.users_.size());
  for (std::uint32_t i = 0; i < m.users_.size(); ++i) m.user_index_[m.users_[i]] = i;
  m.item_index_.reserve(m.items_.size());
  for (std::uint32_t i = 0; i < m.items_.size(); ++i) m.item_index_[m.items_[i]] = i;

  m.authentic_.resize(m.users_.size());
  m.row_begin_.assign(m.users_.size() + 1, 0);

  std::size_t total = 0;
  for (const auto& [id, draft] : users_) total += draft.ratings.size();
  m.rows_.reserve(total);

  std::vector<std::size_t> col_counts(m.items_.size(), 0);
  for (std::uint32_t ui = 0; ui < m.users_.size(); ++ui) {
    const UserDraft& draft = users_.at(m.users_[ui]);
    m.authentic_[ui] = draft.authentic;
    if (draft.authentic) ++m.authentic_count_;

    std::vector<RatingEntry> row;
    row.reserve(draft.ratings.size());
    for (const auto& [item, value] : draft.ratings)
      row.push_back({m.item_index_.at(item), value});
    std::sort(row.begin(), row.end(),
              [](const RatingEntry& a, const RatingEntry& b) { return a.item < b.item; });
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k].item == row[k - 1].item) {
        throw ValidationError("duplicate rating for user " +
                              std::to_string(m.users_[ui]) + ", item " +
                              std::to_string(m.items_[row[k].item]));
      }
    }
    for (const RatingEntry& e : row) ++col_counts[e.item];
    m.rows_.insert(m.rows_.end(), row.begin(), row.end());
    m.row_begin_[ui + 1] = m.rows_.size();
  }
  m.rating_count_ = m.rows_.size();

  m.col_begin_.assign(m.items_.size() + 1, 0);
  for (std::size_t i = 0; i < m.items_.size(); ++i)
    m.col_begin_[i + 1] = m.col_begin_[i] + col_counts[i];
  m.cols_.resize(m.rating_count_);
  std::vector<std::size_t> cursor(m.col_begin_.begin(), m.col_begin_.end() - 1);
  for (std::uint32_t ui = 0; ui < m.users_.size(); ++ui) {
    for (const RatingEntry& e : m.user_ratings(ui))
      m.cols_[cursor[e.item]++] = {ui, e.value};
  }

  m.has_genres_ = has_genres_;
  if (has_genres_) {
    m.genres_.resize(m.items_.size());
    for (auto& [id, labels] : genres_) {
      auto it = m.item_index_.find(id);
      if (it != m.item_index_.end()) m.genres_[it->second] = std::move(labels);
    }
  }
  return m;
}

std::size_t RatingMatrix::user_index(UserId id) const {
  auto it = user_index_.find(id);
  if (it == user_index_.end())
    throw LookupError("unknown user id " + std::to_string(id));
  return it->second;
}

std::size_t RatingMatrix::item_index(ItemId id) const {
  auto it = item_index_.find(id);
  if (it == item_index_.end())
    throw LookupError("unknown item id " + std::to_string(id));
  return it->second;
}

std::optional<double> RatingMatrix::rating(UserId user, ItemId item) const {
  const std::size_t ui = user_index(user);
  const std::uint32_t ii = static_cast<std::uint32_t>(item_index(item));
  auto row = user_ratings(ui);
  auto it = std::lower_bound(row.begin(), row.end(), ii,
                             [](const RatingEntry& e, std::uint32_t v) { return e.item < v; });
  if (it == row.end() || it->item != ii) return std::nullopt;
  return static_cast<double>(it->value);
}

std::span<const std::string> RatingMatrix::item_genres(ItemId id) const {
  const std::size_t ii = item_index(id);
  if (!has_genres_ || genres_[ii].empty()) return {};
  return genres_[ii];
}

std::vector<ItemId> RatingMatrix::items_with_genre(const std::string& genre) const {
  std::vector<ItemId> out;
  if (!has_genres_) return out;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& labels = genres_[i];
    if (std::find(labels.begin(), labels.end(), genre) != labels.end())
      out.push_back(items_[i]);
  }
  return out;
}

DatasetStats compute_stats(const RatingMatrix& m) {
  DatasetStats s;
  s.n_users = m.user_count();
  s.n_items = m.item_count();
  s.n_ratings = m.rating_count();

  long long total = 0;
  for (std::size_t ui = 0; ui < m.user_count(); ++ui) {
    auto row = m.user_ratings(ui);
    if (row.empty()) continue;
    long long sum = 0;
    for (const RatingEntry& e : row) sum += e.value;
    total += sum;
    s.per_user_mean[m.user_at(ui)] =
        static_cast<double>(sum) / static_cast<double>(row.size());
  }
  for (std::size_t ii = 0; ii < m.item_count(); ++ii) {
    auto col = m.item_raters(ii);
    if (col.empty()) continue;
    long long sum = 0;
    for (const RaterEntry& e : col) sum += e.value;
    s.per_item_mean[m.item_at(ii)] =
        static_cast<double>(sum) / static_cast<double>(col.size());
    s.per_item_count[m.item_at(ii)] = col.size();
  }
  if (s.n_ratings > 0)
    s.global_mean = static_cast<double>(total) / static_cast<double>(s.n_ratings);
  return s;
}

std::vector<ItemId> co_rated_items(const RatingMatrix& m, UserId a, UserId b) {
  auto ra = m.user_ratings(m.user_index(a));
  auto rb = m.user_ratings(m.user_index(b));
  std::vector<ItemId> out;
  std::size_t i = 0, j = 0;
  while (i < ra.size() && j < rb.size()) {
    if (ra[i].item < rb[j].item) {
      ++i;
    } else if (rb[j].item < ra[i].item) {
      ++j;
    } else {
      out.push_back(m.item_at(ra[i].item));
      ++i;
      ++j;
    }
  }
  return out;
}

RatingMatrix inject_profiles(const RatingMatrix& m,
                             std::span<const ShillingProfile> profiles) {
  RatingMatrix::Builder b;
  for (std::size_t ui = 0; ui < m.user_count(); ++ui) {
    const UserId id = m.user_at(ui);
    b.add_user(id, m.is_authentic_index(ui));
    for (const RatingEntry& e : m.user_ratings(ui))
      b.add_rating(id, m.item_at(e.item), e.value, m.is_authentic_index(ui));
  }
  for (ItemId item : m.item_ids()) b.add_item(item);
  if (m.has_genres()) {
    for (ItemId item : m.item_ids()) {
      auto g = m.item_genres(item);
      b.set_genres(item, std::vector<std::string>(g.begin(), g.end()));
    }
  }

  for (const ShillingProfile& p : profiles) {
    if (m.has_user(p.user)) {
      throw ValidationError("profile user id " + std::to_string(p.user) +
                            " collides with an existing user");
    }
    b.add_user(p.user, false);
    auto add_section = [&](const std::map<ItemId, double>& section) {
      for (const auto& [item, value] : section) {
        if (!m.has_item(item)) {
          throw ValidationError("profile for user " + std::to_string(p.user) +
                                " references unknown item " + std::to_string(item));
        }
        b.add_rating(p.user, item, value, false);
      }
    };
    // Disjointness across sections is a profile invariant; the duplicate
    // check in Builder::build catches any violation.
    add_section(p.selected);
    add_section(p.filler);
    add_section(p.target);
  }
  return b.build();
}

RatingMatrix with_ground_truth(const RatingMatrix& m,
                               std::span<const UserId> shilling_users) {
  std::set<UserId> shills(shilling_users.begin(), shilling_users.end());
  UserId max_authentic = 0;
  for (UserId id : m.user_ids()) {
    if (!shills.contains(id)) max_authentic = std::max(max_authentic, id);
  }
  for (UserId id : shills) {
    if (!m.has_user(id))
      throw ValidationError("ground-truth user " + std::to_string(id) +
                            " is not in the roster");
    if (id <= max_authentic)
      throw ValidationError("ground-truth user " + std::to_string(id) +
                            " does not follow the injected-id convention "
                            "(must exceed every authentic id)");
  }

  RatingMatrix::Builder b;
  for (std::size_t ui = 0; ui < m.user_count(); ++ui) {
    const UserId id = m.user_at(ui);
    const bool authentic = !shills.contains(id);
    b.add_user(id, authentic);
    for (const RatingEntry& e : m.user_ratings(ui))
      b.add_rating(id, m.item_at(e.item), e.value, authentic);
  }
  for (ItemId item : m.item_ids()) b.add_item(item);
  if (m.has_genres()) {
    for (ItemId item : m.item_ids()) {
      auto g = m.item_genres(item);
      b.set_genres(item, std::vector<std::string>(g.begin(), g.end()));
    }
  }
  return b.build();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

long long parse_int_field(const std::string& field, const std::filesystem::path& path,
                          std::size_t line_no, const char* what) {
  long long value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": non-numeric " + what + " field '" + field + "'");
  }
  return value;
}

}  // namespace

const std::vector<std::string>& movielens_genres() {
  static const std::vector<std::string> kGenres = {
      "unknown",  "Action",    "Adventure", "Animation", "Children's",
      "Comedy",   "Crime",     "Documentary", "Drama",   "Fantasy",
      "Film-Noir", "Horror",   "Musical",   "Mystery",   "Romance",
      "Sci-Fi",   "Thriller",  "War",       "Western"};
  return kGenres;
}

RatingMatrix load_movielens(const std::filesystem::path& ratings_path,
                            const std::optional<std::filesystem::path>& items_path) {
  std::ifstream in(ratings_path);
  if (!in) throw IoError("cannot open ratings file " + ratings_path.string());

  RatingMatrix::Builder b;
  std::unordered_map<UserId, std::set<ItemId>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError(ratings_path.string() + ":" + std::to_string(line_no) +
                       ": expected 4 tab-separated fields, got " +
                       std::to_string(fields.size()));
    }
    const long long user = parse_int_field(fields[0], ratings_path, line_no, "user");
    const long long item = parse_int_field(fields[1], ratings_path, line_no, "item");
    const long long rating = parse_int_field(fields[2], ratings_path, line_no, "rating");
    parse_int_field(fields[3], ratings_path, line_no, "timestamp");
    if (user <= 0 || item <= 0) {
      throw ParseError(ratings_path.string() + ":" + std::to_string(line_no) +
                       ": user and item ids must be positive");
    }
    if (rating < 1 || rating > 5) {
      throw ParseError(ratings_path.string() + ":" + std::to_string(line_no) +
                       ": rating " + std::to_string(rating) + " outside [1,5]");
    }
    const UserId uid = static_cast<UserId>(user);
    const ItemId iid = static_cast<ItemId>(item);
    if (!seen[uid].insert(iid).second) {
      throw ParseError(ratings_path.string() + ":" + std::to_string(line_no) +
                       ": duplicate rating for user " + fields[0] + ", item " +
                       fields[1]);
    }
    b.add_rating(uid, iid, static_cast<double>(rating));
  }

  if (items_path) {
    std::ifstream items(*items_path);
    if (!items) throw IoError("cannot open items file " + items_path->string());
    const auto& genre_names = movielens_genres();
    std::size_t item_line = 0;
    while (std::getline(items, line)) {
      ++item_line;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto fields = split(line, '|');
      if (fields.size() < 1 + genre_names.size()) {
        throw ParseError(items_path->string() + ":" + std::to_string(item_line) +
                         ": expected at least " +
                         std::to_string(1 + genre_names.size()) + " fields");
      }
      const long long item = parse_int_field(fields[0], *items_path, item_line, "item");
      if (item <= 0) {
        throw ParseError(items_path->string() + ":" + std::to_string(item_line) +
                         ": item id must be positive");
      }
      std::vector<std::string> labels;
      const std::size_t flag_base = fields.size() - genre_names.size();
      for (std::size_t g = 0; g < genre_names.size(); ++g) {
        const std::string& flag = fields[flag_base + g];
        if (flag == "1") {
          labels.push_back(genre_names[g]);
        } else if (flag != "0") {
          throw ParseError(items_path->string() + ":" + std::to_string(item_line) +
                           ": genre flag must be 0 or 1, got '" + flag + "'");
        }
      }
      b.set_genres(static_cast<ItemId>(item), std::move(labels));
    }
  }
  return b.build();
}

void save_movielens(const RatingMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t ui = 0; ui < m.user_count(); ++ui) {
    const UserId user = m.user_at(ui);
    for (const RatingEntry& e : m.user_ratings(ui)) {
      out << user << '\t' << m.item_at(e.item) << '\t'
          << static_cast<int>(e.value) << '\t' << 0 << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void save_ground_truth(std::span<const UserId> shilling_users,
                       const std::filesystem::path& path) {
  std::vector<UserId> sorted(shilling_users.begin(), shilling_users.end());
  std::sort(sorted.begin(), sorted.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (UserId id : sorted) out << id << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<UserId> load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ground-truth file " + path.string());
  std::vector<UserId> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const long long id = parse_int_field(line, path, line_no, "user");
    if (id <= 0) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": user id must be positive");
    }
    out.push_back(static_cast<UserId>(id));
  }
  return out;
}

}  // namespace shillkit
