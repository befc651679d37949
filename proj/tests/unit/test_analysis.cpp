#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "forgesim/analysis.hpp"
#include "forgesim/error.hpp"

using namespace forgesim;

namespace {

double textbook_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

WeightedSeries random_series(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WeightedSeries s;
  for (std::size_t i = 0; i < n; ++i) {
    s.x.push_back(g(rng));
    s.y.push_back(g(rng));
    s.x_err.push_back(u(rng));
  }
  return s;
}

std::vector<ShotSweepRow> rows_from(const std::vector<int>& shots, const std::vector<double>& r) {
  std::vector<ShotSweepRow> out;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    out.push_back({"x0", shots[i], 0, r[i] - 0.001});
    out.push_back({"x0", shots[i], 1, r[i] + 0.001});
  }
  return out;
}

}  // namespace

TEST_CASE("perfect correlation and anticorrelation") {
  WeightedSeries s{{1, 2, 3, 5}, {0, 0, 0, 0}, {1, 2, 3, 5}};
  CHECK(std::abs(weighted_pearson(s) - 1.0) < 1e-12);
  s.y = {-1, -2, -3, -5};
  CHECK(std::abs(weighted_pearson(s) + 1.0) < 1e-12);
}

TEST_CASE("hand-evaluated weighted cases") {
  // w = (1, 0.75, 1); X weighted mean 2, Y mean 2
  const WeightedSeries same{{1, 2, 3}, {0, 0.5, 0}, {1, 2, 3}};
  CHECK(std::abs(weighted_pearson(same) - 1.0) < 1e-12);
  // weighted mean of X = 6.5 / 2.75; numerator 12/11, X spread 51/11, Y spread 2
  const WeightedSeries uneven{{1, 2, 4}, {0, 0.5, 0}, {1, 3, 2}};
  CHECK(std::abs(weighted_pearson(uneven) - 12.0 / std::sqrt(1122.0)) < 1e-12);
  // weights on both sides: Y weighted mean 21/11, Y spread 19/11
  CHECK(std::abs(weighted_pearson(uneven, true) - 12.0 / std::sqrt(969.0)) < 1e-12);
}

TEST_CASE("zero errors reproduce the textbook coefficient") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    WeightedSeries s = random_series(rng, 2 + t % 30);
    std::fill(s.x_err.begin(), s.x_err.end(), 0.0);
    CHECK(std::abs(weighted_pearson(s) - textbook_pearson(s.x, s.y)) < 1e-12);
    CHECK(std::abs(weighted_pearson(s, true) - textbook_pearson(s.x, s.y)) < 1e-12);
  }
}

TEST_CASE("coefficient stays within [-1, 1]") {
  std::mt19937_64 rng(2);
  int worst = 0;
  for (int t = 0; t < 10000; ++t) {
    const WeightedSeries s = random_series(rng, 2 + t % 20);
    double r = 0.0;
    try {
      r = weighted_pearson(s);
    } catch (const NumericalError&) {
      continue;
    }
    if (std::abs(r) > 1.0 + 1e-12) ++worst;
  }
  CHECK(worst == 0);
}

TEST_CASE("affine and permutation invariance") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const WeightedSeries s = random_series(rng, 8);
    const double r = weighted_pearson(s);
    WeightedSeries a = s;
    for (double& x : a.x) x = 2.5 * x - 7.0;
    CHECK(std::abs(weighted_pearson(a) - r) < 1e-12);
    for (double& x : a.x) x = -x;
    CHECK(std::abs(weighted_pearson(a) + r) < 1e-12);

    std::vector<std::size_t> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    WeightedSeries p;
    for (std::size_t i : perm) {
      p.x.push_back(s.x[i]);
      p.x_err.push_back(s.x_err[i]);
      p.y.push_back(s.y[i]);
    }
    CHECK(std::abs(weighted_pearson(p) - r) < 1e-12);
  }
}

TEST_CASE("invalid series") {
  CHECK_THROWS_AS(weighted_pearson({{1, 2}, {0, 0}, {1, 2, 3}}), ValidationError);
  CHECK_THROWS_AS(weighted_pearson({{1}, {0}, {1}}), ValidationError);
  CHECK_THROWS_AS(weighted_pearson({{1, 2}, {0, 1.5}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(weighted_pearson({{1, 2}, {0, -0.1}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(weighted_pearson({{1, 1, 1}, {0, 0, 0}, {1, 2, 3}}), NumericalError);
  CHECK_THROWS_AS(weighted_pearson({{1, 2, 3}, {0, 0, 0}, {4, 4, 4}}), NumericalError);
  CHECK_THROWS_AS(weighted_pearson({{1, 2, 3}, {1, 1, 1}, {1, 2, 3}}), NumericalError);
}

TEST_CASE("plateau detection") {
  const std::vector<int> grid{100, 250, 500, 1000, 2500};
  SUBCASE("saturating at the third point") {
    const auto rows = rows_from(grid, {0.90, 0.95, 0.990, 0.992, 0.993});
    CHECK(detect_plateau(rows, "x0") == 500);
  }
  SUBCASE("still rising at the end of the grid") {
    const auto rows = rows_from(grid, {0.5, 0.6, 0.7, 0.8, 0.9});
    CHECK_FALSE(detect_plateau(rows, "x0").has_value());
  }
  SUBCASE("reached just before the last point") {
    const auto rows = rows_from(grid, {0.5, 0.6, 0.7, 0.897, 0.9});
    CHECK(detect_plateau(rows, "x0") == 1000);
  }
  SUBCASE("flat from the start") {
    const auto rows = rows_from(grid, {0.99, 0.99, 0.99, 0.99, 0.99});
    CHECK(detect_plateau(rows, "x0") == 100);
  }
  SUBCASE("threshold is configurable") {
    const auto rows = rows_from(grid, {0.90, 0.95, 0.990, 0.992, 0.993});
    CHECK(detect_plateau(rows, "x0", 0.05) == 250);
  }
  SUBCASE("too few shot values") {
    CHECK_THROWS_AS(detect_plateau(rows_from({1, 2}, {0.1, 0.2}), "x0"), ValidationError);
    CHECK_THROWS_AS(detect_plateau(rows_from(grid, {0.1, 0.2, 0.3, 0.4, 0.5}), "x1"),
                    ValidationError);
  }
}

TEST_CASE("shot sweep") {
  ForgedAnsatz a = make_ansatz(2, {0b10, 0b01});
  a.theta << 0.4;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};

  SUBCASE("exact tomography correlates perfectly") {
    const ShotSweepResult r = shot_sweep(a, {}, {0}, {1});
    CHECK(r.rows.size() == 6);
    for (const auto& row : r.rows) CHECK(std::abs(row.r_weighted - 1.0) < 1e-12);
    CHECK(r.plateau_shots.empty());
  }

  SUBCASE("mean r rises with shots") {
    const std::vector<int> grid{16, 64, 256, 1024, 4096};
    const ShotSweepResult r = shot_sweep(a, {"x0", "phi1_01"}, grid, seeds);
    CHECK(r.rows.size() == 2 * grid.size() * seeds.size());
    CHECK(std::is_sorted(r.rows.begin(), r.rows.end(), [](const auto& x, const auto& y) {
      return std::tie(x.prep_label, x.shots, x.seed) < std::tie(y.prep_label, y.shots, y.seed);
    }));
    for (const auto& row : r.rows) CHECK(std::abs(row.r_weighted) <= 1.0 + 1e-12);
    for (const std::string label : {"x0", "phi1_01"}) {
      const auto means = r.mean_r(label);
      double prev = -1.0;
      for (const auto& [shots, m] : means) {
        CHECK(m >= prev - 0.02);
        prev = m;
      }
      CHECK(r.plateau_shots.count(label) == 1);
    }
  }

  SUBCASE("jobs and reruns give identical rows") {
    SweepOptions o;
    const ShotSweepResult one = shot_sweep(a, {}, {64, 256}, {3, 4}, o);
    o.jobs = 3;
    const ShotSweepResult many = shot_sweep(a, {}, {64, 256}, {3, 4}, o);
    REQUIRE(one.rows.size() == many.rows.size());
    for (std::size_t i = 0; i < one.rows.size(); ++i)
      CHECK(one.rows[i].r_weighted == many.rows[i].r_weighted);
  }

  SUBCASE("bad input") {
    CHECK_THROWS_AS(shot_sweep(a, {"nope"}, {10}, {1}), ValidationError);
    CHECK_THROWS_AS(shot_sweep(a, {}, {100, 10}, {1}), ValidationError);
  }
}
