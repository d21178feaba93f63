#include <cmath>

#include "doctest.h"

#include "imcorrect/correction.hpp"
#include "imcorrect/errors.hpp"
#include "imcorrect/rng.hpp"
#include "imcorrect/slim.hpp"

using namespace imc;

namespace {

MappingMatrix cross_mapping(double a, double b) {
  DenseRowMajor w(2, 2);
  w << 0.0, a, b, 0.0;
  return MappingMatrix::from_dense(w);
}

InteractionMatrix random_interactions(Index m, Index n, double density,
                                      Rng& rng) {
  std::vector<Cell> cells;
  for (Index u = 0; u < m; ++u) {
    for (Index i = 0; i < n; ++i) {
      if (rng.next_double() < density) cells.push_back({u, i});
    }
  }
  return InteractionMatrix::from_cells(m, n, std::move(cells));
}

double frobenius_distance(const MappingMatrix& a, const MappingMatrix& b) {
  return (a.to_dense() - b.to_dense()).norm();
}

}  // namespace

TEST_CASE("column scaling follows the count ratios") {
  const auto w = cross_mapping(0.5, 0.5);
  const ItemCounts c{4, 2};
  const ItemCounts c_bar{2, 1};
  const auto scaled = scale_mapping_columns(w, c, c_bar, Direction::Negative);
  CHECK(scaled.coeff(0, 1) == doctest::Approx(0.25));
  CHECK(scaled.coeff(1, 0) == doctest::Approx(0.25));
  CHECK(scaled.coeff(0, 0) == 0.0);

  const auto grown = scale_mapping_columns(w, c, c_bar, Direction::Positive);
  CHECK(grown.coeff(1, 0) == doctest::Approx(0.5 * 6.0 / 4.0));
  CHECK(grown.coeff(0, 1) == doctest::Approx(0.5 * 3.0 / 2.0));
}

TEST_CASE("zero flip counts scale by exactly one") {
  const auto w = cross_mapping(0.375, -0.125);
  const ItemCounts c{4, 2};
  const ItemCounts c_bar{0, 0};
  const auto scaled = scale_mapping_columns(w, c, c_bar, Direction::Negative);
  CHECK(scaled.equals_bitwise(w));
}

TEST_CASE("removing every interaction zeroes the column") {
  DenseRowMajor w(1, 1);
  w << 0.7;
  const auto scaled = scale_mapping_columns(MappingMatrix::from_dense(w),
                                            {3}, {3}, Direction::Negative);
  CHECK(scaled.coeff(0, 0) == 0.0);
}

TEST_CASE("count overflow is rejected for negative flips") {
  const auto w = cross_mapping(1.0, 1.0);
  CHECK_THROWS_AS(
      scale_mapping_columns(w, {4, 2}, {5, 1}, Direction::Negative),
      CountOverflowError);
  // Positive flips have no such cap.
  CHECK_NOTHROW(scale_mapping_columns(w, {4, 2}, {5, 1}, Direction::Positive));
}

TEST_CASE("cold items keep scale factor one") {
  const auto factors =
      correction_scale_factors({0, 4}, {0, 1}, Direction::Negative);
  CHECK(factors[0] == 1.0);
  CHECK(factors[1] == doctest::Approx(0.75));
}

TEST_CASE("bar weighting follows cbar over c") {
  const auto w_bar = cross_mapping(1.0, 1.0);

  SUBCASE("zero flips give the zero matrix") {
    const auto weighted = weight_bar_mapping(w_bar, {4, 2}, {0, 0});
    CHECK(weighted.max_abs() == 0.0);
  }
  SUBCASE("worked 2x2 example") {
    const auto weighted = weight_bar_mapping(w_bar, {4, 2}, {2, 1});
    CHECK(weighted.coeff(0, 1) == doctest::Approx(0.5));
    CHECK(weighted.coeff(1, 0) == doctest::Approx(0.5));
  }
  SUBCASE("cold-item columns keep full weight") {
    const auto weighted = weight_bar_mapping(w_bar, {0, 2}, {1, 1});
    CHECK(weighted.coeff(1, 0) == doctest::Approx(1.0));  // column 0, weight 1
    CHECK(weighted.coeff(0, 1) == doctest::Approx(0.5));  // column 1
  }
}

TEST_CASE("empty flip leaves the mapping bitwise unchanged") {
  const auto w = cross_mapping(0.3, 0.9);
  const auto w_bar = MappingMatrix::zero(2);
  const auto corrected =
      correct_mapping(w, w_bar, {4, 2}, {0, 0}, Direction::Negative);
  CHECK(corrected.equals_bitwise(w));
}

TEST_CASE("worked 2x2 correction combines scaling and bar subtraction") {
  const auto w = cross_mapping(0.5, 0.5);
  const auto w_bar = cross_mapping(1.0, 1.0);
  const auto corrected =
      correct_mapping(w, w_bar, {4, 2}, {2, 1}, Direction::Negative);
  CHECK(corrected.coeff(0, 1) == doctest::Approx(-0.25));
  CHECK(corrected.coeff(1, 0) == doctest::Approx(-0.25));
  CHECK(corrected.coeff(0, 0) == 0.0);
  CHECK(corrected.coeff(1, 1) == 0.0);
}

TEST_CASE("positive then negative with a shared bar model cancels") {
  Rng rng(83);
  const Index n = 10;
  DenseRowMajor wd(n, n), bard(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      wd(i, j) = rng.next_double();
      bard(i, j) = rng.next_double();
    }
  }
  const auto w = MappingMatrix::from_dense(wd);
  const auto w_bar = MappingMatrix::from_dense(bard);

  ItemCounts c(n), c_bar(n);
  for (Index i = 0; i < n; ++i) {
    c[i] = 2 + static_cast<std::uint32_t>(rng.below(8));
    c_bar[i] = static_cast<std::uint32_t>(rng.below(3));
  }

  const auto learned = correct_mapping(w, w_bar, c, c_bar, Direction::Positive);
  ItemCounts c_after(n);
  for (Index i = 0; i < n; ++i) c_after[i] = c[i] + c_bar[i];
  const auto forgotten =
      correct_mapping(learned, w_bar, c_after, c_bar, Direction::Negative);
  CHECK(frobenius_distance(forgotten, w) < 1e-10);
}

TEST_CASE("unlearn with an empty flip set is a no-op in every mode") {
  Rng rng(89);
  const auto r = random_interactions(8, 6, 0.3, rng);
  DenseRowMajor wd(6, 6);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) wd(i, j) = rng.next_double();
  }
  const auto w = MappingMatrix::from_dense(wd);
  const FlipSet empty{Direction::Negative, InteractionMatrix(8, 6)};

  int bar_fits = 0;
  const BarFitter counter = [&](const InteractionMatrix& cells) {
    ++bar_fits;
    return MappingMatrix::zero(cells.num_items());
  };
  const auto base = predict(r, w);
  for (CorrectionMode mode : {CorrectionMode::InteractionOnly,
                              CorrectionMode::MappingOnly,
                              CorrectionMode::Both}) {
    const auto res = unlearn(r, w, empty, mode, counter);
    const auto scores = corrected_predict(res, w);
    for (Index u = 0; u < 8; ++u) {
      for (Index j = 0; j < 6; ++j) CHECK(scores(u, j) == base(u, j));
    }
    if (res.corrected_mapping) CHECK(res.corrected_mapping->equals_bitwise(w));
  }
  CHECK(bar_fits == 0);
}

TEST_CASE("interaction-only predictions match a dense oracle") {
  Rng rng(97);
  const auto r = random_interactions(10, 8, 0.4, rng);
  DenseRowMajor wd(8, 8);
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 8; ++j) wd(i, j) = rng.next_double() - 0.5;
  }
  const auto w = MappingMatrix::from_dense(wd);

  std::vector<Cell> drop;
  for (const Cell& c : r.cells()) {
    if (rng.next_double() < 0.3) drop.push_back(c);
  }
  const FlipSet f{Direction::Negative,
                  InteractionMatrix::from_cells(10, 8, drop)};
  const auto res = unlearn(r, w, f, CorrectionMode::InteractionOnly,
                           [](const InteractionMatrix& cells) {
                             FAIL("bar fitter must not run");
                             return MappingMatrix::zero(cells.num_items());
                           });
  CHECK_FALSE(res.corrected_mapping.has_value());

  const auto r_after = apply_flip(r, f);
  const auto scores = corrected_predict(res, w);
  for (Index u = 0; u < 10; ++u) {
    for (Index j = 0; j < 8; ++j) {
      double oracle = 0.0;
      for (Index i = 0; i < 8; ++i) {
        oracle += (r_after.contains(u, i) ? 1.0 : 0.0) * wd(i, j);
      }
      CHECK(std::abs(scores(u, j) - oracle) < 1e-12);
    }
  }

  // A forgotten item contributes nothing: the score row equals the
  // aggregation over the remaining history only.
  for (Index u = 0; u < 10; ++u) {
    const auto row = predict_row(r_after, w, u);
    std::vector<double> manual(8, 0.0);
    for (Index i : r_after.row(u)) {
      for (Index j = 0; j < 8; ++j) manual[j] += wd(i, j);
    }
    for (Index j = 0; j < 8; ++j) CHECK(row[j] == doctest::Approx(manual[j]));
  }
}

TEST_CASE("distributivity: corrected predictions split into two products") {
  Rng rng(101);
  const auto r = random_interactions(12, 9, 0.35, rng);
  const SlimResult slim = fit_slim(r, {});
  const auto& w = slim.mapping;

  std::vector<Cell> drop;
  for (const Cell& c : r.cells()) {
    if (rng.next_double() < 0.25) drop.push_back(c);
  }
  if (drop.empty()) drop.push_back(r.cells().front());
  const FlipSet f{Direction::Negative,
                  InteractionMatrix::from_cells(12, 9, drop)};

  const BarFitter bar = [](const InteractionMatrix& cells) {
    return fit_slim(cells, {}).mapping;
  };
  const auto res = unlearn(r, w, f, CorrectionMode::Both, bar);
  REQUIRE(res.corrected_mapping.has_value());

  const ItemCounts c = item_counts(r);
  const ItemCounts c_bar = item_counts(f.cells);
  const auto w_scaled = scale_mapping_columns(w, c, c_bar, Direction::Negative);
  const auto w_bar = bar(f.cells);
  const auto w_bar_weighted = weight_bar_mapping(w_bar, c, c_bar);

  const auto r_after = apply_flip(r, f);
  const auto combined = predict(r_after, *res.corrected_mapping);
  const auto part1 = predict(r_after, w_scaled);
  const auto part2 = predict(r_after, w_bar_weighted);
  for (Index u = 0; u < 12; ++u) {
    for (Index j = 0; j < 9; ++j) {
      CHECK(std::abs(combined(u, j) - (part1(u, j) - part2(u, j))) < 1e-12);
    }
  }
}

TEST_CASE("forgetting every interaction of an item makes its column nonpositive") {
  Rng rng(103);
  const auto r = random_interactions(15, 10, 0.4, rng);
  const SlimResult slim = fit_slim(r, {});

  const Index victim = 3;
  std::vector<Cell> drop;
  for (Index u = 0; u < r.num_users(); ++u) {
    if (r.contains(u, victim)) drop.push_back({u, victim});
  }
  REQUIRE_FALSE(drop.empty());
  const FlipSet f{Direction::Negative,
                  InteractionMatrix::from_cells(15, 10, drop)};

  const auto res = unlearn(r, slim.mapping, f, CorrectionMode::Both,
                           [](const InteractionMatrix& cells) {
                             return fit_slim(cells, {}).mapping;
                           });
  const auto scores = corrected_predict(res, slim.mapping);
  for (Index u = 0; u < 15; ++u) {
    CHECK(scores(u, victim) <= 1e-12);
  }
}

TEST_CASE("corrected mapping lands closer to a retrained one") {
  Rng rng(107);
  const auto r = random_interactions(15, 10, 0.3, rng);
  const SlimResult slim = fit_slim(r, {});

  std::vector<Cell> drop;
  for (const Cell& c : r.cells()) {
    if (rng.next_double() < 0.2) drop.push_back(c);
  }
  REQUIRE_FALSE(drop.empty());
  const FlipSet f{Direction::Negative,
                  InteractionMatrix::from_cells(15, 10, drop)};
  const auto res = unlearn(r, slim.mapping, f, CorrectionMode::Both,
                           [](const InteractionMatrix& cells) {
                             return fit_slim(cells, {}).mapping;
                           });

  const auto retrained = fit_slim(apply_flip(r, f), {}).mapping;
  const double corrected_dist =
      frobenius_distance(*res.corrected_mapping, retrained);
  const double original_dist = frobenius_distance(slim.mapping, retrained);
  CHECK(corrected_dist < original_dist);
}

TEST_CASE("mapping-only mode keeps the interactions") {
  Rng rng(109);
  const auto r = random_interactions(8, 6, 0.5, rng);
  const SlimResult slim = fit_slim(r, {});
  std::vector<Cell> drop{r.cells().front()};
  const FlipSet f{Direction::Negative,
                  InteractionMatrix::from_cells(8, 6, drop)};
  const auto res = unlearn(r, slim.mapping, f, CorrectionMode::MappingOnly,
                           [](const InteractionMatrix& cells) {
                             return fit_slim(cells, {}).mapping;
                           });
  CHECK(res.corrected_interactions == r);
  CHECK(res.corrected_mapping.has_value());
}

TEST_CASE("forget_preference selects the most similar history items") {
  //     item:   0     1     2     3
  const auto r = InteractionMatrix::from_cells(
      2, 4, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}});
  DenseRowMajor wd(4, 4);
  wd.setZero();
  // Symmetrized similarities to item 0: item1 = 0.6, item2 = 0.2, item3 = 0.9.
  wd(1, 0) = 0.6;
  wd(0, 1) = 0.6;
  wd(2, 0) = 0.4;
  wd(0, 2) = 0.0;
  wd(3, 0) = 0.9;
  wd(0, 3) = 0.9;
  const auto w = MappingMatrix::from_dense(wd);

  SUBCASE("breadth zero keeps only the target") {
    const FlipSet f = forget_preference(r, w, 0, 0, 0);
    CHECK(f.direction == Direction::Negative);
    CHECK(f.cells.nnz() == 1);
    CHECK(f.cells.contains(0, 0));
  }
  SUBCASE("breadth one picks the closest item") {
    const FlipSet f = forget_preference(r, w, 0, 0, 1);
    CHECK(f.cells.nnz() == 2);
    CHECK(f.cells.contains(0, 3));
  }
  SUBCASE("breadth two picks the two closest") {
    const FlipSet f = forget_preference(r, w, 0, 0, 2);
    CHECK(f.cells.nnz() == 3);
    CHECK(f.cells.contains(0, 3));
    CHECK(f.cells.contains(0, 1));
  }
  SUBCASE("large breadth saturates to the whole history") {
    const FlipSet f = forget_preference(r, w, 0, 0, 99);
    CHECK(f.cells.nnz() == 4);
  }
  SUBCASE("unknown interactions are rejected") {
    CHECK_THROWS_AS(forget_preference(r, w, 1, 2, 1), UnknownInteractionError);
  }
}

TEST_CASE("similarity ties break by ascending item index") {
  const auto r = InteractionMatrix::from_cells(
      1, 4, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  DenseRowMajor wd(4, 4);
  wd.setZero();
  wd(1, 0) = 0.5;
  wd(2, 0) = 0.5;
  wd(3, 0) = 0.5;
  const auto w = MappingMatrix::from_dense(wd);
  const FlipSet f = forget_preference(r, w, 0, 0, 1);
  CHECK(f.cells.contains(0, 1));
  CHECK_FALSE(f.cells.contains(0, 2));
}
