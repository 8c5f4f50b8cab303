#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "shillkit/ratings.hpp"

namespace shillkit::testutil {

inline std::filesystem::path data_dir() { return SHILLKIT_TEST_DATA_DIR; }

inline std::filesystem::path data_file(const std::string& name) {
  return data_dir() / name;
}

struct Cell {
  UserId user;
  ItemId item;
  double value;
};

inline RatingMatrix make_matrix(const std::vector<Cell>& cells) {
  RatingMatrix::Builder b;
  for (const Cell& c : cells) b.add_rating(c.user, c.item, c.value);
  return b.build();
}

// Writes content into a unique file under the build-tree scratch directory.
class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& suffix = ".data") {
    static int counter = 0;
    std::filesystem::create_directories("test_scratch");
    path_ = std::filesystem::path("test_scratch") /
            ("tmp" + std::to_string(counter++) + suffix);
    std::ofstream out(path_, std::ios::binary);
    out << content;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace shillkit::testutil
