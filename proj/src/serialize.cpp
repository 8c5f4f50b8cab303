#include "shillkit/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace shillkit {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

nlohmann::json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

nlohmann::json to_json(const AttackConfig& cfg) {
  nlohmann::json j{{"model", to_string(cfg.model)},
                   {"intent", to_string(cfg.intent)},
                   {"attack_size", cfg.attack_size},
                   {"filler_size", cfg.filler_size},
                   {"target_items", cfg.target_items},
                   {"seed", cfg.seed},
                   {"jitter_sigma", cfg.jitter_sigma}};
  if (cfg.model == AttackModel::bandwagon || cfg.model == AttackModel::segment)
    j["selected_count"] = cfg.selected_count;
  if (cfg.model == AttackModel::bandwagon)
    j["bandwagon_filler"] = cfg.bandwagon_filler == FillerStyle::average_style
                                ? "average"
                                : "random";
  if (cfg.model == AttackModel::segment) j["segment_genre"] = cfg.segment_genre;
  return j;
}

nlohmann::json to_json(const DetectionConfig& cfg) {
  nlohmann::json j{{"correlation_threshold", cfg.correlation_threshold},
                   {"min_overlap", cfg.min_overlap}};
  if (std::holds_alternative<std::size_t>(cfg.profile_threshold)) {
    j["profile_threshold"] = std::get<std::size_t>(cfg.profile_threshold);
  } else {
    j["profile_threshold_fraction"] = std::get<double>(cfg.profile_threshold);
  }
  return j;
}

nlohmann::json to_json(const AttackSummary& summary) {
  return nlohmann::json{{"profiles", summary.profile_count},
                        {"selected_ratings", summary.selected_ratings},
                        {"filler_ratings", summary.filler_ratings},
                        {"target_ratings", summary.target_ratings},
                        {"filler_per_profile_min", summary.filler_per_profile_min},
                        {"filler_per_profile_max", summary.filler_per_profile_max},
                        {"total_ratings", summary.total_ratings()},
                        {"rating_histogram", summary.rating_histogram}};
}

nlohmann::json to_json(const DetectionScore& score) {
  return nlohmann::json{{"precision", opt_json(score.precision)},
                        {"recall", opt_json(score.recall)},
                        {"f_measure", opt_json(score.f_measure)},
                        {"true_positives", score.true_positives},
                        {"false_positives", score.false_positives},
                        {"false_negatives", score.false_negatives}};
}

nlohmann::json to_json(const ImpactScore& impact) {
  return nlohmann::json{{"rmse_shift_user_based", opt_json(impact.rmse_shift_user_based)},
                        {"rmse_shift_item_based", opt_json(impact.rmse_shift_item_based)},
                        {"rmse_shift_svd", opt_json(impact.rmse_shift_svd)},
                        {"target_items", impact.target_items},
                        {"prediction_count", impact.prediction_count},
                        {"skipped_rated", impact.skipped_rated},
                        {"failed_pairs", impact.failed_pairs}};
}

nlohmann::json to_json(const DetectionReport& report, bool include_timing) {
  nlohmann::json counts = nlohmann::json::array();
  for (std::size_t i = 0; i < report.user_ids.size(); ++i) {
    counts.push_back(nlohmann::json{{"user", report.user_ids[i]},
                                    {"count", report.high_corr_count[i]}});
  }
  nlohmann::json j{{"flagged", report.flagged},
                   {"high_corr_counts", std::move(counts)},
                   {"correlation_threshold", report.correlation_threshold},
                   {"profile_threshold", report.resolved_profile_threshold},
                   {"min_overlap", report.min_overlap},
                   {"resolved_against",
                    report.resolved_against_authentic ? "authentic_users" : "all_users"},
                   {"warnings", report.warnings}};
  if (include_timing) j["wall_ms"] = report.wall_ms;
  return j;
}

nlohmann::json to_json(const ExperimentResult& result) {
  nlohmann::json j{{"attack", to_json(result.cell.attack)},
                   {"detection", to_json(result.cell.detection)},
                   {"cell_seed", result.cell_seed},
                   {"ok", result.ok}};
  if (!result.ok) {
    j["error"] = result.error;
    return j;
  }
  j["profiles"] = result.profile_count;
  j["resolved_profile_threshold"] = result.resolved_profile_threshold;
  j["flagged"] = result.flagged_count;
  j["score"] = to_json(result.score);
  if (result.impact) j["impact"] = to_json(*result.impact);
  return j;
}

std::string results_csv(std::span<const ExperimentResult> results) {
  std::string out =
      "model,intent,attack_size,filler_size,precision,recall,f_measure,"
      "rmse_shift_user,rmse_shift_item,rmse_shift_svd\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? fixed6(*v) : std::string{};
  };
  for (const ExperimentResult& r : results) {
    out += to_string(r.cell.attack.model);
    out += ',';
    out += to_string(r.cell.attack.intent);
    out += ',';
    out += fixed4(r.cell.attack.attack_size);
    out += ',';
    out += fixed4(r.cell.attack.filler_size);
    out += ',';
    if (r.ok) {
      out += cell(r.score.precision);
      out += ',';
      out += cell(r.score.recall);
      out += ',';
      out += cell(r.score.f_measure);
      out += ',';
      out += r.impact ? cell(r.impact->rmse_shift_user_based) : std::string{};
      out += ',';
      out += r.impact ? cell(r.impact->rmse_shift_item_based) : std::string{};
      out += ',';
      out += r.impact ? cell(r.impact->rmse_shift_svd) : std::string{};
    } else {
      out += ",,,,,";
    }
    out += '\n';
  }
  return out;
}

std::string results_summary(std::span<const ExperimentResult> results) {
  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double fa = results[a].ok ? results[a].score.f_measure.value_or(-1.0) : -2.0;
    const double fb = results[b].ok ? results[b].score.f_measure.value_or(-1.0) : -2.0;
    return fa > fb;
  });

  std::string out = "cells ranked by F-measure\n";
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const ExperimentResult& r = results[order[rank]];
    out += std::to_string(rank + 1);
    out += ". ";
    out += to_string(r.cell.attack.model);
    out += ' ';
    out += to_string(r.cell.attack.intent);
    out += " attack=";
    out += fixed4(r.cell.attack.attack_size);
    out += " filler=";
    out += fixed4(r.cell.attack.filler_size);
    if (!r.ok) {
      out += "  FAILED: ";
      out += r.error;
    } else {
      out += "  F=";
      out += r.score.f_measure ? fixed6(*r.score.f_measure) : "n/a";
      out += " P=";
      out += r.score.precision ? fixed6(*r.score.precision) : "n/a";
      out += " R=";
      out += r.score.recall ? fixed6(*r.score.recall) : "n/a";
      out += " flagged=";
      out += std::to_string(r.flagged_count);
      out += "/";
      out += std::to_string(r.profile_count);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace shillkit
