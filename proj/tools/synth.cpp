// Writes a deterministic MovieLens-100K-shaped dataset, for demos and test
// runs when the real files are not on disk.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "support/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a synthetic MovieLens-100K-shaped dataset"};
  std::string out_dir = "data";
  shillkit::synth::DatasetSpec spec;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--users", spec.n_users, "user count");
  app.add_option("--items", spec.n_items, "item count");
  app.add_option("--ratings", spec.n_ratings, "rating count");
  app.add_option("--seed", spec.seed, "RNG seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    const auto ratings = std::filesystem::path(out_dir) / "u.data";
    const auto items = std::filesystem::path(out_dir) / "u.item";
    shillkit::synth::write_dataset(spec, ratings, items);
    std::cout << ratings.string() << '\n' << items.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
