#include <doctest.h>

#include <cmath>
#include <cstring>

#include "shillkit/recommend.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace shillkit;

namespace {

RatingMatrix toy_4x5() {
  return load_movielens(testutil::data_file("toy_4x5.data"));
}

}  // namespace

TEST_SUITE("recommend") {

TEST_CASE("user cosine basics") {
  // users 1 and 2 co-rate items 1 and 2 with opposite extremes
  const RatingMatrix m = testutil::make_matrix(
      {{1, 1, 5}, {1, 2, 1}, {2, 1, 1}, {2, 2, 5}, {3, 3, 3}});

  SUBCASE("direct arithmetic") {
    CHECK(user_cosine_similarity(m, 1, 2, 1) ==
          doctest::Approx(10.0 / 26.0).epsilon(1e-12));
  }
  SUBCASE("overlap floor zeroes the value") {
    CHECK(user_cosine_similarity(m, 1, 2, 3) == 0.0);
  }
  SUBCASE("disjoint users") {
    CHECK(user_cosine_similarity(m, 1, 3, 1) == 0.0);
  }
  SUBCASE("self similarity is exactly one") {
    CHECK(user_cosine_similarity(m, 1, 1, 1) == 1.0);
    CHECK(user_cosine_similarity(m, 1, 1, 2) == 1.0);
  }
  SUBCASE("identical co-rated vectors") {
    const RatingMatrix eq = testutil::make_matrix(
        {{1, 1, 4}, {1, 2, 2}, {1, 3, 5}, {2, 1, 4}, {2, 2, 2}, {2, 3, 5}});
    CHECK(user_cosine_similarity(eq, 1, 2, 3) == 1.0);
  }
  SUBCASE("unknown user") {
    CHECK_THROWS_AS(user_cosine_similarity(m, 1, 99, 1), LookupError);
  }
}

TEST_CASE("item cosine basics") {
  // items 1 and 2 share raters 1, 2 with values (3,4) and (4,3)
  const RatingMatrix m = testutil::make_matrix(
      {{1, 1, 3}, {1, 2, 4}, {2, 1, 4}, {2, 2, 3}, {3, 3, 1}});
  CHECK(item_cosine_similarity(m, 1, 2, 1) == doctest::Approx(0.96).epsilon(1e-12));
  CHECK(item_cosine_similarity(m, 1, 1, 1) == 1.0);
  CHECK(item_cosine_similarity(m, 1, 3, 1) == 0.0);
  CHECK_THROWS_AS(item_cosine_similarity(m, 1, 99, 1), LookupError);
}

TEST_CASE("similarity symmetry on the 10-user toy") {
  const RatingMatrix m = load_movielens(testutil::data_file("toy_10u.data"));
  for (UserId a : m.user_ids()) {
    for (UserId b : m.user_ids()) {
      CHECK(user_cosine_similarity(m, a, b, 3) == user_cosine_similarity(m, b, a, 3));
    }
  }
  for (ItemId i : m.item_ids()) {
    for (ItemId j : m.item_ids()) {
      CHECK(item_cosine_similarity(m, i, j, 2) == item_cosine_similarity(m, j, i, 2));
    }
  }
}

TEST_CASE("similarities match the oracle on the 10-user toy") {
  const RatingMatrix m = load_movielens(testutil::data_file("toy_10u.data"));
  const auto view = oracle::DenseView::from(m);
  for (UserId a : m.user_ids()) {
    for (UserId b : m.user_ids()) {
      CHECK(user_cosine_similarity(m, a, b, 3) ==
            doctest::Approx(oracle::user_cosine(view, a, b, 3)).epsilon(1e-12));
    }
  }
  for (ItemId i : m.item_ids()) {
    for (ItemId j : m.item_ids()) {
      CHECK(item_cosine_similarity(m, i, j, 2) ==
            doctest::Approx(oracle::item_cosine(view, i, j, 2)).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-neighbor user-based prediction") {
  // sim(1,2) = 1 over co-rated items {1,2}; the neighbor's mean is 3 and it
  // rated the queried item 5; user 1's mean is 2.
  const RatingMatrix m = testutil::make_matrix({{1, 1, 2},
                                                {1, 2, 2},
                                                {2, 1, 3},
                                                {2, 2, 3},
                                                {2, 3, 5},
                                                {2, 4, 1}});
  const DatasetStats stats = compute_stats(m);
  PredictionModel model;
  model.min_overlap = 2;
  CHECK(predict_user_based(m, stats, model, 1, 3) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("neighbors rating at their own mean leave the prediction at mean_k") {
  const RatingMatrix m = testutil::make_matrix({{1, 1, 2},
                                                {1, 2, 4},
                                                {2, 1, 3},
                                                {2, 2, 3},
                                                {2, 3, 3},
                                                {3, 1, 4},
                                                {3, 2, 4},
                                                {3, 3, 4}});
  const DatasetStats stats = compute_stats(m);
  PredictionModel model;
  model.min_overlap = 2;
  // both neighbors rate item 3 exactly at their means (3 and 4)
  CHECK(predict_user_based(m, stats, model, 1, 3) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("user-based predictions match the brute-force oracle on the 4x5 toy") {
  const RatingMatrix m = toy_4x5();
  const DatasetStats stats = compute_stats(m);
  const auto view = oracle::DenseView::from(m);
  for (std::size_t min_overlap : {1, 3}) {
    PredictionModel model;
    model.min_overlap = min_overlap;
    for (UserId k : m.user_ids()) {
      for (ItemId item : m.item_ids()) {
        if (m.rating(k, item)) continue;
        CHECK(predict_user_based(m, stats, model, k, item) ==
              doctest::Approx(oracle::predict_user_based(view, k, item, min_overlap))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("item-based predictions match the brute-force oracle on the 4x5 toy") {
  const RatingMatrix m = toy_4x5();
  const auto view = oracle::DenseView::from(m);
  for (std::size_t min_overlap : {1, 2}) {
    PredictionModel model;
    model.kind = PredictionModel::Kind::item_based;
    model.min_overlap = min_overlap;
    for (UserId k : m.user_ids()) {
      for (ItemId item : m.item_ids()) {
        if (m.rating(k, item)) continue;
        CHECK(predict_item_based(m, model, k, item) ==
              doctest::Approx(oracle::predict_item_based(view, k, item, min_overlap))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("full neighborhood equals the all-users formula") {
  const RatingMatrix m = toy_4x5();
  const DatasetStats stats = compute_stats(m);
  const auto view = oracle::DenseView::from(m);
  PredictionModel all;
  all.min_overlap = 1;
  PredictionModel capped = all;
  capped.neighborhood_size = m.user_count();
  for (UserId k : m.user_ids()) {
    for (ItemId item : m.item_ids()) {
      if (m.rating(k, item)) continue;
      const double lhs = predict_user_based(m, stats, capped, k, item);
      CHECK(lhs == predict_user_based(m, stats, all, k, item));
      CHECK(lhs ==
            doctest::Approx(oracle::predict_user_based(view, k, item, 1)).epsilon(1e-9));
    }
  }
}

TEST_CASE("weights cancel for a single rated item") {
  // user 2 rated only item 1; sim(2*, 1) is nonzero through raters 1 and 3
  const RatingMatrix m = testutil::make_matrix(
      {{1, 1, 5}, {1, 2, 4}, {3, 1, 2}, {3, 2, 5}, {2, 1, 4}});
  PredictionModel model;
  model.kind = PredictionModel::Kind::item_based;
  model.min_overlap = 2;
  CHECK(predict_item_based(m, model, 2, 2) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("zero denominator falls back to the user mean") {
  // no other user co-rates >= 3 items with user 1
  const RatingMatrix m = testutil::make_matrix(
      {{1, 1, 5}, {1, 2, 1}, {2, 1, 3}, {2, 3, 4}, {3, 3, 2}, {3, 2, 4}});
  const DatasetStats stats = compute_stats(m);
  PredictionModel model;  // min_overlap 3
  CHECK(predict_user_based(m, stats, model, 1, 3) == doctest::Approx(3.0).epsilon(1e-12));

  PredictionModel item_model;
  item_model.kind = PredictionModel::Kind::item_based;
  item_model.min_overlap = 3;
  CHECK(predict_item_based(m, item_model, 1, 3) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("predictions stay on the rating scale") {
  const RatingMatrix m = load_movielens(testutil::data_file("toy_10u.data"));
  const DatasetStats stats = compute_stats(m);
  PredictionModel user_model;
  user_model.min_overlap = 1;
  PredictionModel item_model;
  item_model.kind = PredictionModel::Kind::item_based;
  item_model.min_overlap = 1;
  for (UserId k : m.user_ids()) {
    for (ItemId item : m.item_ids()) {
      if (m.rating(k, item)) continue;
      const double u = predict_user_based(m, stats, user_model, k, item);
      const double i = predict_item_based(m, item_model, k, item);
      CHECK(u >= 1.0);
      CHECK(u <= 5.0);
      CHECK(i >= 1.0);
      CHECK(i <= 5.0);
    }
  }
}

TEST_CASE("error paths") {
  const RatingMatrix m = toy_4x5();
  const DatasetStats stats = compute_stats(m);
  PredictionModel model;

  SUBCASE("unknown ids") {
    CHECK_THROWS_AS(predict_user_based(m, stats, model, 99, 1), LookupError);
    CHECK_THROWS_AS(predict_user_based(m, stats, model, 1, 99), LookupError);
    CHECK_THROWS_AS(predict_item_based(m, model, 99, 1), LookupError);
  }

  SUBCASE("cold start") {
    RatingMatrix::Builder b;
    b.add_user(7);
    for (UserId u : m.user_ids()) b.add_user(u);
    b.add_rating(1, 1, 5.0).add_rating(2, 1, 3.0);
    const RatingMatrix cold = b.build();
    const DatasetStats cold_stats = compute_stats(cold);
    CHECK_THROWS_AS(predict_user_based(cold, cold_stats, model, 7, 1), ColdStartError);
    CHECK_THROWS_AS(predict_item_based(cold, model, 7, 1), ColdStartError);
  }
}

TEST_CASE("determinism: repeated calls produce identical bits") {
  const RatingMatrix m = toy_4x5();
  const DatasetStats stats = compute_stats(m);
  PredictionModel model;
  model.min_overlap = 1;
  const double a = predict_user_based(m, stats, model, 4, 1);
  const double b = predict_user_based(m, stats, model, 4, 1);
  CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
}

TEST_CASE("validate_model") {
  PredictionModel model;
  CHECK_NOTHROW(validate_model(model));
  model.min_overlap = 0;
  CHECK_THROWS_AS(validate_model(model), ValidationError);
  model.min_overlap = 3;
  model.svd_rank = 4;
  CHECK_THROWS_AS(validate_model(model), ValidationError);
  model.kind = PredictionModel::Kind::svd;
  CHECK_NOTHROW(validate_model(model));
  model.svd_rank.reset();
  CHECK_THROWS_AS(validate_model(model), ValidationError);
}

}  // TEST_SUITE
