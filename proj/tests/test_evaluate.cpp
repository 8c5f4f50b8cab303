#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "shillkit/evaluate.hpp"
#include "shillkit/serialize.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace shillkit;

namespace {

GroundTruth truth_of(std::initializer_list<UserId> ids) {
  GroundTruth t;
  t.shilling_users.assign(ids.begin(), ids.end());
  std::sort(t.shilling_users.begin(), t.shilling_users.end());
  return t;
}

std::vector<UserId> roster_to(UserId n) {
  std::vector<UserId> out;
  for (UserId id = 1; id <= n; ++id) out.push_back(id);
  return out;
}

}  // namespace

TEST_SUITE("evaluate") {

TEST_CASE("score_detection basics") {
  const auto roster = roster_to(10);

  SUBCASE("perfect detection") {
    const std::vector<UserId> flagged{7, 8};
    const DetectionScore s = score_flagged(flagged, truth_of({7, 8}), roster);
    CHECK(*s.precision == doctest::Approx(1.0));
    CHECK(*s.recall == doctest::Approx(1.0));
    CHECK(*s.f_measure == doctest::Approx(1.0));
  }
  SUBCASE("one false positive") {
    const std::vector<UserId> flagged{3, 7};
    const DetectionScore s = score_flagged(flagged, truth_of({7}), roster);
    CHECK(*s.precision == doctest::Approx(0.5));
    CHECK(*s.recall == doctest::Approx(1.0));
    CHECK(*s.f_measure == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.true_positives == 1);
    CHECK(s.false_positives == 1);
    CHECK(s.false_negatives == 0);
  }
  SUBCASE("nothing flagged but shills exist") {
    const DetectionScore s = score_flagged({}, truth_of({7, 8}), roster);
    CHECK(!s.precision.has_value());
    CHECK(*s.recall == doctest::Approx(0.0));
    CHECK(!s.f_measure.has_value());
  }
  SUBCASE("nothing flagged, nothing to find") {
    const DetectionScore s = score_flagged({}, truth_of({}), roster);
    CHECK(!s.precision.has_value());
    CHECK(!s.recall.has_value());
    CHECK(!s.f_measure.has_value());
  }
  SUBCASE("truth outside the roster is rejected") {
    CHECK_THROWS_AS(score_flagged({}, truth_of({99}), roster), ValidationError);
  }
}

TEST_CASE("score is invariant under consistent renumbering") {
  std::mt19937 rng(3);
  const auto roster = roster_to(30);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<UserId> flagged;
    std::vector<UserId> truth;
    for (UserId id = 1; id <= 30; ++id) {
      if (rng() % 3 == 0) flagged.push_back(id);
      if (rng() % 4 == 0) truth.push_back(id);
    }
    GroundTruth t;
    t.shilling_users = truth;
    const DetectionScore a = score_flagged(flagged, t, roster);

    auto renumber = [](UserId id) { return id * 11 + 5; };
    std::vector<UserId> flagged2, truth2, roster2;
    for (UserId id : flagged) flagged2.push_back(renumber(id));
    for (UserId id : truth) truth2.push_back(renumber(id));
    for (UserId id : roster) roster2.push_back(renumber(id));
    GroundTruth t2;
    t2.shilling_users = truth2;
    const DetectionScore b = score_flagged(flagged2, t2, roster2);

    CHECK(a.true_positives == b.true_positives);
    CHECK(a.precision == b.precision);
    CHECK(a.recall == b.recall);
    CHECK(a.f_measure == b.f_measure);
  }
}

TEST_CASE("harmonic mean bounds") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t tp = 1 + rng() % 50;
    const std::size_t fp = rng() % 50;
    const std::size_t fn = rng() % 50;
    std::vector<UserId> flagged, truth, roster;
    UserId next = 1;
    for (std::size_t i = 0; i < tp; ++i) {
      flagged.push_back(next);
      truth.push_back(next);
      ++next;
    }
    for (std::size_t i = 0; i < fp; ++i) flagged.push_back(next++);
    for (std::size_t i = 0; i < fn; ++i) truth.push_back(next++);
    for (UserId id = 1; id < next; ++id) roster.push_back(id);
    GroundTruth t;
    t.shilling_users = truth;
    const DetectionScore s = score_flagged(flagged, t, roster);
    REQUIRE(s.precision.has_value());
    REQUIRE(s.recall.has_value());
    REQUIRE(s.f_measure.has_value());
    const double p = *s.precision, r = *s.recall, f = *s.f_measure;
    CHECK(f >= std::min(p, r) - 1e-12);
    CHECK(f <= std::max(p, r) + 1e-12);
    if (p == r) {
      CHECK(f == doctest::Approx(p).epsilon(1e-12));
    } else {
      CHECK(f < std::max(p, r));
    }
  }
}

TEST_CASE("rmse_shift arithmetic") {
  const std::vector<ItemId> targets{9};
  PredictionTable pre{{{1, 9}, 3.0}, {{2, 9}, 4.0}, {{3, 9}, 2.0}};

  SUBCASE("identical tables") {
    CHECK(rmse_shift(pre, pre, targets) == 0.0);
  }
  SUBCASE("constant +1 shift") {
    PredictionTable post;
    for (const auto& [key, value] : pre) post[key] = value + 1.0;
    CHECK(rmse_shift(pre, post, targets) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("hand-evaluated mixed shifts") {
    PredictionTable post{{{1, 9}, 3.5}, {{2, 9}, 3.5}, {{3, 9}, 3.0}};
    CHECK(rmse_shift(pre, post, targets) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(rmse_shift(pre, post, targets) ==
          doctest::Approx(oracle::rmse(pre, post)).epsilon(1e-12));
  }
  SUBCASE("swap symmetry") {
    PredictionTable post{{{1, 9}, 4.5}, {{2, 9}, 1.0}, {{3, 9}, 2.5}};
    CHECK(rmse_shift(pre, post, targets) ==
          doctest::Approx(rmse_shift(post, pre, targets)).epsilon(1e-15));
  }
  SUBCASE("mismatched coverage is rejected") {
    PredictionTable post = pre;
    post.erase({3, 9});
    CHECK_THROWS_AS(rmse_shift(pre, post, targets), ValidationError);
    post[{4, 9}] = 2.0;
    CHECK_THROWS_AS(rmse_shift(pre, post, targets), ValidationError);
  }
  SUBCASE("keys outside the target list are rejected") {
    PredictionTable post = pre;
    CHECK_THROWS_AS(rmse_shift(pre, post, std::vector<ItemId>{1}), ValidationError);
  }
  SUBCASE("empty tables are rejected") {
    PredictionTable empty;
    CHECK_THROWS_AS(rmse_shift(empty, empty, targets), ValidationError);
  }
}

TEST_CASE("randomized rmse properties") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    PredictionTable pre, post;
    const std::size_t n = 1 + rng() % 20;
    bool equal = true;
    for (std::size_t i = 0; i < n; ++i) {
      const UserId u = static_cast<UserId>(1 + i);
      const double a = 1.0 + static_cast<double>(rng() % 400) / 100.0;
      const double b = 1.0 + static_cast<double>(rng() % 400) / 100.0;
      pre[{u, 1}] = a;
      post[{u, 1}] = b;
      if (a != b) equal = false;
    }
    const std::vector<ItemId> targets{1};
    const double shift = rmse_shift(pre, post, targets);
    CHECK(shift >= 0.0);
    CHECK(shift == doctest::Approx(rmse_shift(post, pre, targets)).epsilon(1e-15));
    CHECK((shift == 0.0) == equal);
  }
}

TEST_CASE("measure_impact") {
  const RatingMatrix m = load_movielens(testutil::data_file("toy_4x5.data"));
  const DatasetStats stats = compute_stats(m);

  PredictionModel user_engine;
  user_engine.min_overlap = 1;
  PredictionModel item_engine;
  item_engine.kind = PredictionModel::Kind::item_based;
  item_engine.min_overlap = 1;
  const std::vector<PredictionModel> engines{user_engine, item_engine};

  SUBCASE("zero injected profiles shift nothing") {
    const RatingMatrix same = inject_profiles(m, {});
    const std::vector<ItemId> targets{1, 5};
    const ImpactScore impact = measure_impact(m, same, targets, engines);
    CHECK(*impact.rmse_shift_user_based == 0.0);
    CHECK(*impact.rmse_shift_item_based == 0.0);
    // item 1 was rated by users 1-3, item 5 by users 2-4
    CHECK(impact.skipped_rated == 6);
    CHECK(impact.prediction_count == 2);
    CHECK(impact.failed_pairs == 0);
  }

  SUBCASE("push attack moves user-based predictions, oracle-checked") {
    // attackers rate every non-target item 3 and the target 5
    std::vector<ShillingProfile> profiles;
    for (UserId id : {5u, 6u}) {
      ShillingProfile p;
      p.user = id;
      p.filler = {{2, 3.0}, {3, 3.0}, {4, 3.0}, {5, 3.0}};
      p.target = {{1, 5.0}};
      profiles.push_back(std::move(p));
    }
    const RatingMatrix post = inject_profiles(m, profiles);
    const std::vector<ItemId> targets{1};
    const ImpactScore impact = measure_impact(m, post, targets, engines);
    REQUIRE(impact.rmse_shift_user_based.has_value());
    CHECK(*impact.rmse_shift_user_based > 0.0);

    // brute-force oracle over the one evaluable pair set: user 4 is the only
    // authentic user without a rating on item 1
    const auto pre_view = oracle::DenseView::from(m);
    const auto post_view = oracle::DenseView::from(post);
    PredictionTable pre_table, post_table;
    pre_table[{4, 1}] = oracle::predict_user_based(pre_view, 4, 1, 1);
    post_table[{4, 1}] = oracle::predict_user_based(post_view, 4, 1, 1);
    const double expected = oracle::rmse(pre_table, post_table);
    CHECK(*impact.rmse_shift_user_based == doctest::Approx(expected).epsilon(1e-9));

    PredictionTable pre_item, post_item;
    pre_item[{4, 1}] = oracle::predict_item_based(pre_view, 4, 1, 1);
    post_item[{4, 1}] = oracle::predict_item_based(post_view, 4, 1, 1);
    CHECK(*impact.rmse_shift_item_based ==
          doctest::Approx(oracle::rmse(pre_item, post_item)).epsilon(1e-9));
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(measure_impact(m, m, {}, engines), ValidationError);
    CHECK_THROWS_AS(measure_impact(m, m, std::vector<ItemId>{99}, engines),
                    ValidationError);
  }
}

TEST_CASE("cell seeds are deterministic and well spread") {
  const std::uint64_t a = derive_cell_seed(1, AttackModel::random, 0.10, 0.05);
  CHECK(a == derive_cell_seed(1, AttackModel::random, 0.10, 0.05));
  std::set<std::uint64_t> seen;
  for (AttackModel model : {AttackModel::random, AttackModel::average}) {
    for (double as : {0.05, 0.10, 0.15}) {
      for (double fs : {0.05, 0.10}) seen.insert(derive_cell_seed(1, model, as, fs));
    }
  }
  CHECK(seen.size() == 12);
  CHECK(derive_cell_seed(2, AttackModel::random, 0.10, 0.05) != a);
}

TEST_CASE("run_grid") {
  const RatingMatrix base = load_movielens(testutil::data_file("toy_10u.data"));
  const DatasetStats stats = compute_stats(base);
  DetectionConfig detection;
  detection.correlation_threshold = 0.95;
  detection.profile_threshold = std::size_t{2};

  SUBCASE("empty grid") {
    CHECK(run_grid(base, stats, {}, {}, 1).empty());
  }

  SUBCASE("3 models x 5 attack sizes x 3 filler sizes yields 45 cells") {
    std::vector<GridCell> grid;
    for (AttackModel model : {AttackModel::random, AttackModel::average,
                              AttackModel::bandwagon}) {
      for (double as : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        for (double fs : {0.17, 0.25, 0.33}) {
          GridCell cell;
          cell.attack.model = model;
          cell.attack.attack_size = as;
          cell.attack.filler_size = fs;
          cell.attack.target_items = {5};
          cell.attack.selected_count = 2;
          cell.detection = detection;
          grid.push_back(cell);
        }
      }
    }
    const auto results = run_grid(base, stats, grid, {}, 7);
    REQUIRE(results.size() == 45);
    for (const auto& r : results) {
      CHECK(r.ok);
      CHECK(r.profile_count == round_half_up(r.cell.attack.attack_size * 10));
    }

    SUBCASE("rerun serializes identically") {
      const auto again = run_grid(base, stats, grid, {}, 7);
      CHECK(results_csv(results) == results_csv(again));
      for (std::size_t i = 0; i < results.size(); ++i)
        CHECK(to_json(results[i]) == to_json(again[i]));
    }
  }

  SUBCASE("per-cell failures are captured and the run continues") {
    std::vector<GridCell> grid;
    GridCell good;
    good.attack.target_items = {5};
    good.attack.attack_size = 0.3;
    good.attack.filler_size = 0.25;
    good.detection = detection;
    GridCell bad = good;
    bad.attack.model = AttackModel::segment;  // toy has no genre metadata
    bad.attack.segment_genre = "Horror";
    grid.push_back(bad);
    grid.push_back(good);
    const auto results = run_grid(base, stats, grid, {}, 7);
    REQUIRE(results.size() == 2);
    CHECK(!results[0].ok);
    CHECK(!results[0].error.empty());
    CHECK(results[1].ok);
  }
}

TEST_CASE("csv formatting") {
  ExperimentResult r;
  r.cell.attack.model = AttackModel::average;
  r.cell.attack.intent = AttackIntent::push;
  r.cell.attack.attack_size = 0.10;
  r.cell.attack.filler_size = 0.05;
  r.ok = true;
  r.score.precision = 1.0;
  r.score.recall = 0.5;
  r.score.f_measure = 2.0 / 3.0;
  const std::vector<ExperimentResult> results{r};
  const std::string csv = results_csv(results);
  CHECK(csv ==
        "model,intent,attack_size,filler_size,precision,recall,f_measure,"
        "rmse_shift_user,rmse_shift_item,rmse_shift_svd\n"
        "average,push,0.1000,0.0500,1.000000,0.500000,0.666667,,,\n");
}

}  // TEST_SUITE
