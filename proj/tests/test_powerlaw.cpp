#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "citemap/powerlaw.hpp"
#include "citemap/synthetic.hpp"

using namespace citemap;

namespace {

std::vector<double> exact_series(double c, double a, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t r = 0; r < n; ++r) v[r] = c * std::pow(static_cast<double>(r + 1), a);
  return v;
}

}  // namespace

TEST(RankSize, SortsDescendingAndDropsZeros) {
  const std::vector<double> v{3, 0, 10, 1};
  const auto s = rank_size(v);
  EXPECT_EQ(s.n_nonzero, 3u);
  EXPECT_EQ(s.pairs, (std::vector<RankSizePoint>{{1, 10}, {2, 3}, {3, 1}}));
}

TEST(RankSize, TiesAndSingleton) {
  EXPECT_EQ(rank_size(std::vector<double>{0, 5, 3, 5}).pairs, (std::vector<RankSizePoint>{{1, 5}, {2, 5}, {3, 3}}));
  EXPECT_EQ(rank_size(std::vector<double>{7}).pairs, (std::vector<RankSizePoint>{{1, 7}}));
}

TEST(RankSize, MatchesSortAndFilterOracle) {
  std::mt19937_64 rng(32);
  std::poisson_distribution<int> counts(2);
  std::vector<double> v(1000);
  for (auto& x : v) x = counts(rng);
  std::vector<double> expected;
  for (double x : v)
    if (x != 0.0) expected.push_back(x);
  std::sort(expected.begin(), expected.end(), [](double a, double b) { return a > b; });
  const auto s = rank_size(v);
  ASSERT_EQ(s.pairs.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_EQ(s.pairs[k].rank, k + 1);
    EXPECT_EQ(s.pairs[k].count, expected[k]);
  }
}

TEST(RankSize, AllZeroIsEmpty) {
  EXPECT_THROW(rank_size(std::vector<double>{0, 0}), EmptyInputError);
  EXPECT_THROW(rank_size(std::vector<double>{}), EmptyInputError);
}

TEST(FitLogLog, ExactLine) {
  // 100 * x^-1 at ranks 1..3: log10 counts are 2, 2 - log10 2, 2 - log10 3.
  const std::vector<double> v{100, 50, 100.0 / 3.0};
  const auto f = fit_loglog(rank_size(v));
  EXPECT_NEAR(f.slope, -1.0, 1e-12);
  EXPECT_NEAR(f.intercept, 2.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(FitLogLog, TenThousandPowerMinusOnePointFive) {
  const auto f = fit_loglog(rank_size(exact_series(1e4, -1.5, 200)));
  EXPECT_NEAR(f.slope, -1.5, 1e-9);
  EXPECT_NEAR(f.intercept, 4.0, 1e-9);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-9);
}

TEST(FitLogLog, ConstantSeriesIsDegenerate) {
  const auto f = fit_loglog(rank_size(std::vector<double>{7, 7, 7, 7}));
  EXPECT_TRUE(f.degenerate);
  EXPECT_EQ(f.slope, 0.0);
  EXPECT_EQ(f.r_squared, 0.0);
}

TEST(FitLogLog, TooFewPoints) {
  EXPECT_THROW(fit_loglog(rank_size(std::vector<double>{5, 3})), InsufficientDataError);
  EXPECT_THROW(fit_loglog(rank_size(std::vector<double>{9, 5, 3}), 10.0, 1), InsufficientDataError);
}

TEST(FitLogLog, BaseOnlyRescalesIntercept) {
  const auto s = rank_size(exact_series(250.0, -1.7, 50));
  const auto f10 = fit_loglog(s, 10.0), fe = fit_loglog(s, std::exp(1.0));
  EXPECT_NEAR(f10.slope, fe.slope, 1e-12);
  EXPECT_NEAR(f10.intercept * std::log(10.0), fe.intercept, 1e-10);
}

TEST(FitLogLog, RecoversSeededExactSeries) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = -3.0 + 2.999 * unit(rng);
    const double c = std::pow(10.0, 1.0 + 5.0 * unit(rng));
    const auto n = static_cast<std::size_t>(100 + 4900 * unit(rng));
    const auto f = fit_loglog(rank_size(exact_series(c, a, n)));
    EXPECT_NEAR(f.slope, a, 1e-9);
    EXPECT_NEAR(f.intercept, std::log10(c), 1e-9);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  }
}

TEST(HeadDeviation, DetectsPlantedHook) {
  auto v = exact_series(1000.0, -1.0, 200);
  for (std::size_t r = 0; r < 3; ++r) v[r] *= 3.0;
  const auto s = rank_size(v);
  const auto f = fit_loglog(s, 10.0, 3);
  EXPECT_NEAR(f.slope, -1.0, 1e-9);
  const auto h = head_deviation(s, f);
  EXPECT_EQ(h.head_size, 3u);
  EXPECT_NEAR(h.residuals[0].second, std::log10(3.0), 1e-9);
}

TEST(HeadDeviation, NoHookOnExactSeries) {
  const auto s = rank_size(exact_series(1000.0, -2.0, 50));
  EXPECT_EQ(head_deviation(s, fit_loglog(s)).head_size, 0u);
}

TEST(HeadDeviation, FirstFiveDoubled) {
  auto v = exact_series(5000.0, -1.2, 300);
  for (std::size_t r = 0; r < 5; ++r) v[r] *= 2.0;
  const auto s = rank_size(v);
  const auto f = fit_loglog(s, 10.0, 5);
  const auto h = head_deviation(s, f, std::log10(2.0) * 0.9);
  EXPECT_EQ(h.head_size, 5u);
  for (std::size_t r = 0; r < 5; ++r) EXPECT_NEAR(h.residuals[r].second, std::log10(2.0), 1e-9);
  EXPECT_EQ(head_deviation(s, f, std::numeric_limits<double>::infinity()).head_size, 0u);
}

TEST(PowerlawMatrix, RowsFitTheirExponents) {
  const auto pm = synthetic::powerlaw_matrix(30, 5);
  for (std::size_t i = 0; i < 30; ++i) {
    const auto f = fit_loglog(rank_size(pm.matrix.cited_profile(i)));
    EXPECT_NEAR(f.slope, pm.exponents[i], 1e-9);
    EXPECT_NEAR(f.intercept, std::log10(pm.scales[i]), 1e-9);
  }
}

TEST(PowerlawCsv, DegenerateRowPrintsNa) {
  const auto s = rank_size(std::vector<double>{5, 5, 5});
  const auto f = fit_loglog(s);
  const auto row = to_csv_row("J", s, f, head_deviation(s, f));
  EXPECT_EQ(row, "J,3,0," + text::format_number(f.intercept) + ",NA,0");
  EXPECT_NEAR(f.intercept, std::log10(5.0), 1e-15);
}

TEST(PowerlawSvg, WellFormedShell) {
  const auto s = rank_size(exact_series(100.0, -1.0, 20));
  const auto f = fit_loglog(s);
  const auto svg = powerlaw_svg("A & B", s, f, head_deviation(s, f));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("A &amp; B"), std::string::npos);
  std::size_t circles = 0;
  for (auto p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 20u);
}
