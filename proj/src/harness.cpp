#include "shillkit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "shillkit/rng.hpp"
#include "shillkit/serialize.hpp"

namespace shillkit {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return exit_code::parse;
  if (dynamic_cast<const IoError*>(&e)) return exit_code::parse;
  if (dynamic_cast<const ValidationError*>(&e)) return exit_code::config;
  if (dynamic_cast<const CapabilityError*>(&e)) return exit_code::config;
  return exit_code::runtime;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string current;
  std::stringstream stream(value);
  while (std::getline(stream, current, ',')) {
    current = trim(current);
    if (!current.empty()) out.push_back(current);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': not a number: '" + text + "'");
  }
}

std::uint64_t parse_uint(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ValidationError("config key '" + key + "': not a nonnegative integer: '" +
                          text + "'");
  return v;
}

// Fractions may be written as "0.1", "10%", or "10" (percent when > 1).
double parse_fraction(const std::string& text, const std::string& key) {
  std::string t = text;
  bool percent = false;
  if (!t.empty() && t.back() == '%') {
    percent = true;
    t.pop_back();
  }
  double v = parse_double(trim(t), key);
  if (percent || v > 1.0) v /= 100.0;
  return v;
}

}  // namespace

std::variant<std::size_t, double> parse_profile_threshold(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw ValidationError("empty profile threshold");
  if (t.back() == '%') {
    t.pop_back();
    return parse_double(trim(t), "profile_threshold") / 100.0;
  }
  const double v = parse_double(t, "profile_threshold");
  if (v < 1.0) return v;  // fraction
  if (v != std::floor(v))
    throw ValidationError("profile threshold count must be an integer: '" + text + "'");
  return static_cast<std::size_t>(v);
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "data" || key == "dataset") {
    cfg.dataset = value;
  } else if (key == "items") {
    cfg.items = value;
  } else if (key == "out_dir" || key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "models") {
    cfg.models.clear();
    for (const auto& name : split_list(value))
      cfg.models.push_back(attack_model_from_string(name));
  } else if (key == "intents") {
    cfg.intents.clear();
    for (const auto& name : split_list(value))
      cfg.intents.push_back(attack_intent_from_string(name));
  } else if (key == "attack_sizes") {
    cfg.attack_sizes.clear();
    for (const auto& v : split_list(value))
      cfg.attack_sizes.push_back(parse_fraction(v, key));
  } else if (key == "filler_sizes") {
    cfg.filler_sizes.clear();
    for (const auto& v : split_list(value))
      cfg.filler_sizes.push_back(parse_fraction(v, key));
  } else if (key == "targets") {
    cfg.targets.clear();
    for (const auto& v : split_list(value))
      cfg.targets.push_back(static_cast<ItemId>(parse_uint(v, key)));
  } else if (key == "auto_targets") {
    cfg.auto_targets = static_cast<std::size_t>(parse_uint(value, key));
  } else if (key == "selected_count") {
    cfg.selected_count = static_cast<std::size_t>(parse_uint(value, key));
  } else if (key == "bandwagon_filler") {
    if (value == "random") {
      cfg.bandwagon_filler = FillerStyle::random_style;
    } else if (value == "average") {
      cfg.bandwagon_filler = FillerStyle::average_style;
    } else {
      throw ValidationError("bandwagon_filler must be 'random' or 'average'");
    }
  } else if (key == "segment_genre") {
    cfg.segment_genre = value;
  } else if (key == "jitter_sigma") {
    cfg.jitter_sigma = parse_double(value, key);
  } else if (key == "correlation_threshold") {
    cfg.correlation_threshold = parse_double(value, key);
  } else if (key == "profile_threshold") {
    parse_profile_threshold(value);  // validate now, stored as text
    cfg.profile_threshold = value;
  } else if (key == "min_overlap") {
    cfg.min_overlap = static_cast<std::size_t>(parse_uint(value, key));
  } else if (key == "engines") {
    cfg.engines = split_list(value);
  } else if (key == "svd_rank") {
    cfg.svd_rank = static_cast<std::size_t>(parse_uint(value, key));
  } else if (key == "seed") {
    cfg.seed = parse_uint(value, key);
  } else if (key == "workers") {
    cfg.workers = static_cast<std::size_t>(parse_uint(value, key));
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_entry(cfg, key, value);
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return cfg;
}

DetectionConfig detection_config_from(const RunConfig& cfg) {
  DetectionConfig d;
  d.correlation_threshold = cfg.correlation_threshold;
  d.profile_threshold = parse_profile_threshold(cfg.profile_threshold);
  d.min_overlap = cfg.min_overlap;
  return d;
}

std::vector<PredictionModel> engines_from(const RunConfig& cfg) {
  std::vector<PredictionModel> engines;
  for (const std::string& name : cfg.engines) {
    PredictionModel model;
    model.min_overlap = cfg.min_overlap;
    if (name == "user" || name == "user_based") {
      model.kind = PredictionModel::Kind::user_based;
    } else if (name == "item" || name == "item_based") {
      model.kind = PredictionModel::Kind::item_based;
    } else if (name == "svd") {
      model.kind = PredictionModel::Kind::svd;
      model.svd_rank = cfg.svd_rank;
    } else {
      throw ValidationError("unknown engine '" + name + "'");
    }
    validate_model(model);
    engines.push_back(model);
  }
  return engines;
}

std::vector<ItemId> sample_unpopular_targets(const RatingMatrix& m,
                                             const DatasetStats& stats, std::size_t k,
                                             std::uint64_t seed) {
  if (k == 0) throw ValidationError("target sample size must be >= 1");
  std::vector<std::size_t> counts;
  counts.reserve(m.item_count());
  for (ItemId id : m.item_ids()) {
    auto it = stats.per_item_count.find(id);
    counts.push_back(it == stats.per_item_count.end() ? 0 : it->second);
  }
  std::vector<std::size_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t median = sorted[sorted.size() / 2];

  std::vector<ItemId> pool;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < median) pool.push_back(m.item_at(i));
  }
  if (pool.size() < k) {
    throw ValidationError("only " + std::to_string(pool.size()) +
                          " items fall below the median popularity; cannot sample " +
                          std::to_string(k) + " targets");
  }
  std::mt19937_64 rng(mix_seed(seed, 0x746172676574ULL));  // "target"
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t pick =
        j + static_cast<std::size_t>(uniform_index(rng, pool.size() - j));
    std::swap(pool[j], pool[pick]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

void cmd_inspect(const InspectOptions& opts, std::ostream& out, std::ostream& err) {
  const RatingMatrix m = load_movielens(opts.dataset, opts.items);
  const DatasetStats stats = compute_stats(m);

  out << "users: " << stats.n_users << '\n';
  out << "items: " << stats.n_items << '\n';
  out << "ratings: " << stats.n_ratings << '\n';
  if (stats.global_mean) {
    out << "global_mean: " << std::fixed << std::setprecision(6) << *stats.global_mean
        << '\n';
    out.unsetf(std::ios::fixed);
  } else {
    out << "global_mean: n/a\n";
  }
  if (m.has_genres()) out << "genres: yes\n";

  const auto top = most_popular_items(m, stats, opts.top_n, {});
  if (!top.empty()) {
    out << "top items by raters:\n";
    for (ItemId id : top) {
      const auto count = stats.per_item_count.find(id);
      const auto mean = stats.per_item_mean.find(id);
      out << "  item " << id << ": " << (count == stats.per_item_count.end() ? 0 : count->second)
          << " ratings, mean "
          << std::fixed << std::setprecision(3)
          << (mean == stats.per_item_mean.end() ? 0.0 : mean->second) << '\n';
      out.unsetf(std::ios::fixed);
    }
  }
  (void)err;
}

void cmd_attack(const AttackOptions& opts, std::ostream& out, std::ostream& err) {
  const RatingMatrix m = load_movielens(opts.dataset, opts.items);
  const DatasetStats stats = compute_stats(m);

  AttackConfig attack = opts.attack;
  if (attack.target_items.empty() && opts.auto_targets > 0) {
    attack.target_items = sample_unpopular_targets(m, stats, opts.auto_targets, attack.seed);
    err << "sampled targets:";
    for (ItemId t : attack.target_items) err << ' ' << t;
    err << '\n';
  }

  std::vector<std::string> notes;
  const auto profiles = generate_profiles(m, stats, attack, &notes);
  for (const std::string& note : notes) err << "note: " << note << '\n';

  const RatingMatrix injected = inject_profiles(m, profiles);
  const GroundTruth truth = GroundTruth::from_profiles(profiles);

  save_movielens(injected, opts.output);
  std::filesystem::path sidecar = opts.output;
  sidecar += ".labels";
  save_ground_truth(truth.shilling_users, sidecar);

  nlohmann::json summary{{"attack", to_json(attack)},
                         {"summary", to_json(describe_attack(profiles))},
                         {"dataset", opts.output.string()},
                         {"labels", sidecar.string()},
                         {"users_total", injected.user_count()},
                         {"users_authentic", injected.authentic_count()}};
  out << summary.dump(2) << '\n';
}

void cmd_detect(const DetectOptions& opts, std::ostream& out, std::ostream& err) {
  std::filesystem::path labels_path;
  bool have_labels = false;
  if (opts.labels) {
    labels_path = *opts.labels;
    have_labels = true;
  } else {
    labels_path = opts.dataset;
    labels_path += ".labels";
    have_labels = std::filesystem::exists(labels_path);
    if (!have_labels)
      err << "warning: no ground-truth sidecar found at " << labels_path.string()
          << "; report will carry no detection score\n";
  }

  RatingMatrix m = load_movielens(opts.dataset);
  std::optional<GroundTruth> truth;
  if (have_labels) {
    GroundTruth t;
    t.shilling_users = load_ground_truth(labels_path);
    std::sort(t.shilling_users.begin(), t.shilling_users.end());
    m = with_ground_truth(m, t.shilling_users);
    truth = std::move(t);
  }

  const DetectionReport report = detect_shilling(m, opts.detection, opts.workers);
  for (const std::string& w : report.warnings) err << "warning: " << w << '\n';

  nlohmann::json doc = to_json(report);
  doc["dataset"] = opts.dataset.string();
  if (truth) {
    doc["labels"] = labels_path.string();
    doc["score"] = to_json(score_detection(report, *truth));
  }

  const std::string text = doc.dump(2) + "\n";
  if (opts.output) {
    write_text_file(*opts.output, text);
    err << "report written to " << opts.output->string() << '\n';
  } else {
    out << text;
  }
}

void cmd_experiment(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.dataset.empty()) throw ValidationError("no dataset given");
  if (cfg.models.empty()) throw ValidationError("model list is empty");
  if (cfg.intents.empty()) throw ValidationError("intent list is empty");
  if (cfg.attack_sizes.empty()) throw ValidationError("attack size list is empty");
  if (cfg.filler_sizes.empty()) throw ValidationError("filler size list is empty");
  for (double s : cfg.attack_sizes) {
    if (!(s > 0.0 && s <= 1.0)) throw ValidationError("attack sizes must be in (0,1]");
  }
  for (double s : cfg.filler_sizes) {
    if (!(s > 0.0 && s <= 1.0)) throw ValidationError("filler sizes must be in (0,1]");
  }
  const DetectionConfig detection = detection_config_from(cfg);
  const std::vector<PredictionModel> engines = engines_from(cfg);

  const RatingMatrix base = load_movielens(cfg.dataset, cfg.items);
  const DatasetStats stats = compute_stats(base);

  std::vector<ItemId> targets = cfg.targets;
  if (targets.empty()) {
    targets = sample_unpopular_targets(base, stats, cfg.auto_targets, cfg.seed);
    err << "sampled targets:";
    for (ItemId t : targets) err << ' ' << t;
    err << '\n';
  }

  std::vector<GridCell> grid;
  for (AttackModel model : cfg.models) {
    for (AttackIntent intent : cfg.intents) {
      for (double attack_size : cfg.attack_sizes) {
        for (double filler_size : cfg.filler_sizes) {
          GridCell cell;
          cell.attack.model = model;
          cell.attack.intent = intent;
          cell.attack.attack_size = attack_size;
          cell.attack.filler_size = filler_size;
          cell.attack.target_items = targets;
          cell.attack.selected_count = cfg.selected_count;
          cell.attack.bandwagon_filler = cfg.bandwagon_filler;
          cell.attack.segment_genre = cfg.segment_genre;
          cell.attack.jitter_sigma = cfg.jitter_sigma;
          cell.detection = detection;
          grid.push_back(std::move(cell));
        }
      }
    }
  }
  err << "running " << grid.size() << " grid cells on " << base.user_count()
      << " users, " << base.item_count() << " items\n";

  const auto results = run_grid(base, stats, grid, engines, cfg.seed, cfg.workers);

  std::filesystem::create_directories(cfg.output_dir);
  std::filesystem::create_directories(cfg.output_dir / "cells");

  nlohmann::json resolved{{"dataset", cfg.dataset.string()},
                          {"output_dir", cfg.output_dir.string()},
                          {"seed", cfg.seed},
                          {"targets", targets},
                          {"attack_sizes", cfg.attack_sizes},
                          {"filler_sizes", cfg.filler_sizes},
                          {"selected_count", cfg.selected_count},
                          {"jitter_sigma", cfg.jitter_sigma},
                          {"detection", to_json(detection)},
                          {"engines", cfg.engines},
                          {"min_overlap", cfg.min_overlap},
                          {"workers", cfg.workers}};
  if (cfg.items) resolved["items"] = cfg.items->string();
  {
    nlohmann::json model_names = nlohmann::json::array();
    for (AttackModel m : cfg.models) model_names.push_back(to_string(m));
    resolved["models"] = std::move(model_names);
    nlohmann::json intent_names = nlohmann::json::array();
    for (AttackIntent i : cfg.intents) intent_names.push_back(to_string(i));
    resolved["intents"] = std::move(intent_names);
  }

  nlohmann::json cells_json = nlohmann::json::array();
  double total_ms = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    nlohmann::json cell_doc{{"config", resolved}, {"result", to_json(results[i])}};
    char name[64];
    std::snprintf(name, sizeof(name), "cell_%03zu_%s_%s_a%04d_f%04d.json", i,
                  to_string(results[i].cell.attack.model),
                  to_string(results[i].cell.attack.intent),
                  static_cast<int>(round_half_up(results[i].cell.attack.attack_size * 10000)),
                  static_cast<int>(round_half_up(results[i].cell.attack.filler_size * 10000)));
    write_text_file(cfg.output_dir / "cells" / name, cell_doc.dump(2) + "\n");
    cells_json.push_back(to_json(results[i]));
    total_ms += results[i].wall_ms;
    if (!results[i].ok)
      err << "cell " << i << " failed: " << results[i].error << '\n';
  }

  nlohmann::json run_doc{{"config", resolved}, {"results", std::move(cells_json)}};
  write_text_file(cfg.output_dir / "results.json", run_doc.dump(2) + "\n");
  write_text_file(cfg.output_dir / "results.csv", results_csv(results));
  write_text_file(cfg.output_dir / "summary.txt", results_summary(results));

  err << "total cell time: " << std::fixed << std::setprecision(1) << total_ms
      << " ms\n";
  err.unsetf(std::ios::fixed);
  out << (cfg.output_dir / "results.csv").string() << '\n';
}

}  // namespace shillkit
