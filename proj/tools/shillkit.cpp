#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shillkit/harness.hpp"

namespace {

using namespace shillkit;

int run(int argc, char** argv) {
  CLI::App app{"shilling-attack simulation and detection toolkit for "
               "collaborative-filtering recommenders"};
  app.require_subcommand(1);

  // inspect
  auto* inspect = app.add_subcommand("inspect", "print dataset statistics");
  InspectOptions inspect_opts;
  std::string inspect_items;
  inspect->add_option("--data", inspect_opts.dataset, "ratings file (u.data format)")
      ->required();
  inspect->add_option("--items", inspect_items, "item metadata file (u.item format)");
  inspect->add_option("--top", inspect_opts.top_n, "how many popular items to list");

  // attack
  auto* attack = app.add_subcommand("attack", "inject shilling profiles");
  AttackOptions attack_opts;
  std::string attack_items;
  std::string attack_model = "random";
  std::string attack_intent = "push";
  std::string bandwagon_filler = "random";
  std::vector<ItemId> attack_targets;
  attack->add_option("--data", attack_opts.dataset, "ratings file")->required();
  attack->add_option("--items", attack_items, "item metadata file");
  attack->add_option("--out", attack_opts.output, "output path for the injected dataset")
      ->required();
  attack->add_option("--model", attack_model, "random|average|bandwagon|segment");
  attack->add_option("--intent", attack_intent, "push|nuke");
  attack->add_option("--attack-size", attack_opts.attack.attack_size,
                     "profiles as a fraction of authentic users");
  attack->add_option("--filler-size", attack_opts.attack.filler_size,
                     "fillers per profile as a fraction of all items");
  attack->add_option("--targets", attack_targets, "target item ids");
  attack->add_option("--auto-targets", attack_opts.auto_targets,
                     "sample this many below-median-popularity targets");
  attack->add_option("--selected-count", attack_opts.attack.selected_count,
                     "selected items (bandwagon/segment)");
  attack->add_option("--bandwagon-filler", bandwagon_filler,
                     "filler rating style for bandwagon: random|average");
  attack->add_option("--segment-genre", attack_opts.attack.segment_genre,
                     "genre label for segment attacks");
  attack->add_option("--jitter-sigma", attack_opts.attack.jitter_sigma,
                     "gaussian jitter applied to filler ratings");
  attack->add_option("--seed", attack_opts.attack.seed, "RNG seed");

  // detect
  auto* detect = app.add_subcommand("detect", "flag suspected shilling profiles");
  DetectOptions detect_opts;
  std::string detect_labels;
  std::string detect_out;
  std::string profile_threshold = "10%";
  detect->add_option("--data", detect_opts.dataset, "ratings file")->required();
  detect->add_option("--labels", detect_labels,
                     "ground-truth sidecar (default: <data>.labels when present)");
  detect->add_option("--correlation-threshold", detect_opts.detection.correlation_threshold,
                     "minimum pairwise correlation that counts");
  detect->add_option("--profile-threshold", profile_threshold,
                     "peer count, fraction, or percentage of authentic users");
  detect->add_option("--min-overlap", detect_opts.detection.min_overlap,
                     "minimum co-rated items per correlation");
  detect->add_option("--out", detect_out, "write the report here instead of stdout");
  detect->add_option("--workers", detect_opts.workers, "worker threads");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run an attack/detection grid");
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  experiment->add_option("--config", config_path, "flat key=value config file");
  auto add_override = [&overrides](const std::string& key) {
    return [key, &overrides](const std::string& value) {
      overrides.emplace_back(key, value);
    };
  };
  experiment->add_option_function<std::string>("--data", add_override("data"),
                                               "ratings file");
  experiment->add_option_function<std::string>("--items", add_override("items"),
                                               "item metadata file");
  experiment->add_option_function<std::string>("--out-dir", add_override("out_dir"),
                                               "output directory");
  experiment->add_option_function<std::string>("--models", add_override("models"),
                                               "comma list of attack models");
  experiment->add_option_function<std::string>("--intents", add_override("intents"),
                                               "comma list of push/nuke");
  experiment->add_option_function<std::string>(
      "--attack-sizes", add_override("attack_sizes"), "comma list of fractions");
  experiment->add_option_function<std::string>(
      "--filler-sizes", add_override("filler_sizes"), "comma list of fractions");
  experiment->add_option_function<std::string>("--targets", add_override("targets"),
                                               "comma list of item ids");
  experiment->add_option_function<std::string>(
      "--auto-targets", add_override("auto_targets"), "sampled target count");
  experiment->add_option_function<std::string>(
      "--selected-count", add_override("selected_count"), "bandwagon selected items");
  experiment->add_option_function<std::string>(
      "--segment-genre", add_override("segment_genre"), "segment genre label");
  experiment->add_option_function<std::string>(
      "--jitter-sigma", add_override("jitter_sigma"), "filler jitter sigma");
  experiment->add_option_function<std::string>(
      "--correlation-threshold", add_override("correlation_threshold"),
      "detector correlation threshold");
  experiment->add_option_function<std::string>(
      "--profile-threshold", add_override("profile_threshold"),
      "detector profile threshold");
  experiment->add_option_function<std::string>(
      "--min-overlap", add_override("min_overlap"), "similarity overlap floor");
  experiment->add_option_function<std::string>("--engines", add_override("engines"),
                                               "comma list: user,item,svd");
  experiment->add_option_function<std::string>("--rank,--svd-rank",
                                               add_override("svd_rank"),
                                               "rank for the svd engine");
  experiment->add_option_function<std::string>("--seed", add_override("seed"),
                                               "base RNG seed");
  experiment->add_option_function<std::string>("--workers", add_override("workers"),
                                               "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_code::ok : exit_code::config;
  }

  try {
    if (inspect->parsed()) {
      if (!inspect_items.empty()) inspect_opts.items = inspect_items;
      cmd_inspect(inspect_opts, std::cout, std::cerr);
    } else if (attack->parsed()) {
      if (!attack_items.empty()) attack_opts.items = attack_items;
      attack_opts.attack.model = attack_model_from_string(attack_model);
      attack_opts.attack.intent = attack_intent_from_string(attack_intent);
      attack_opts.attack.target_items = attack_targets;
      if (bandwagon_filler == "average") {
        attack_opts.attack.bandwagon_filler = FillerStyle::average_style;
      } else if (bandwagon_filler != "random") {
        throw ValidationError("--bandwagon-filler must be 'random' or 'average'");
      }
      if (attack_opts.attack.target_items.empty() && attack_opts.auto_targets == 0)
        throw ValidationError("give --targets or --auto-targets");
      cmd_attack(attack_opts, std::cout, std::cerr);
    } else if (detect->parsed()) {
      if (!detect_labels.empty()) detect_opts.labels = detect_labels;
      if (!detect_out.empty()) detect_opts.output = detect_out;
      detect_opts.detection.profile_threshold = parse_profile_threshold(profile_threshold);
      cmd_detect(detect_opts, std::cout, std::cerr);
    } else if (experiment->parsed()) {
      RunConfig cfg;
      if (!config_path.empty()) cfg = load_run_config(config_path);
      for (const auto& [key, value] : overrides) apply_config_entry(cfg, key, value);
      cmd_experiment(cfg, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return exit_code::ok;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
