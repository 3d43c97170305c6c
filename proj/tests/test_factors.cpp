#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "citemap/factors.hpp"
#include "oracles.hpp"

using namespace citemap;

namespace {

Matrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
  return a;
}

Matrix reconstruct(const EigenSolution& e) {
  const std::size_t n = e.eigenvalues.size();
  Matrix lambda(n, n);
  for (std::size_t k = 0; k < n; ++k) lambda(k, k) = e.eigenvalues[k];
  return e.eigenvectors * lambda * e.eigenvectors.transposed();
}

// Blocks of equicorrelated variables.
Matrix block_correlation(std::size_t blocks, std::size_t size, double within, double between) {
  const std::size_t n = blocks * size;
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = i == j ? 1.0 : (i / size == j / size ? within : between);
  return r;
}

std::vector<JournalLabel> ids(std::size_t n) {
  std::vector<JournalLabel> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"v" + std::to_string(i + 1), "v" + std::to_string(i + 1), {}});
  return out;
}

LoadingMatrix random_loadings(std::size_t p, std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LoadingMatrix l{ids(p), Matrix(p, k), false, std::vector<double>(k, 0.0), 0, true, {}};
  for (std::size_t i = 0; i < p; ++i) {
    double h = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      l.loadings(i, j) = u(rng);
      h += l.loadings(i, j) * l.loadings(i, j);
    }
    const double scale = (0.3 + 0.65 * std::abs(u(rng))) / std::sqrt(h);
    for (std::size_t j = 0; j < k; ++j) l.loadings(i, j) *= scale;
  }
  return l;
}

}  // namespace

TEST(Eigendecompose, Identity) {
  const auto e = eigendecompose(Matrix::identity(4));
  EXPECT_EQ(e.eigenvalues, (std::vector<double>{1, 1, 1, 1}));
}

TEST(Eigendecompose, TwoByTwoCorrelation) {
  const auto e = eigendecompose(Matrix{{1, 0.5}, {0.5, 1}});
  EXPECT_NEAR(e.eigenvalues[0], 1.5, 1e-15);
  EXPECT_NEAR(e.eigenvalues[1], 0.5, 1e-15);
}

TEST(Eigendecompose, TwoByTwo) {
  const auto e = eigendecompose(Matrix{{2, 1}, {1, 2}});
  EXPECT_NEAR(e.eigenvalues[0], 3.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvectors(0, 0), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(e.eigenvectors(1, 0), std::sqrt(0.5), 1e-14);
}

TEST(Eigendecompose, RejectsAsymmetric) {
  EXPECT_THROW(eigendecompose(Matrix{{1, 2}, {0, 1}}), SymmetryError);
  EXPECT_THROW(eigendecompose(Matrix(2, 3)), DimensionError);
}

TEST(Eigendecompose, ReconstructsRandomMatrices) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_symmetric(10, rng);
    const auto e = eigendecompose(a);
    EXPECT_LE(max_abs_difference(reconstruct(e), a), 1e-10);
    EXPECT_LE(max_abs_difference(e.eigenvectors.transposed() * e.eigenvectors, Matrix::identity(10)), 1e-12);
    for (std::size_t k = 1; k < 10; ++k) EXPECT_GE(e.eigenvalues[k - 1], e.eigenvalues[k]);
  }
}

TEST(Eigendecompose, SignConvention) {
  std::mt19937_64 rng(11);
  const auto e = eigendecompose(random_symmetric(8, rng));
  for (std::size_t k = 0; k < 8; ++k) {
    std::size_t lead = 0;
    for (std::size_t i = 1; i < 8; ++i)
      if (std::abs(e.eigenvectors(i, k)) > std::abs(e.eigenvectors(lead, k))) lead = i;
    EXPECT_GT(e.eigenvectors(lead, k), 0.0);
  }
}

TEST(KaiserCount, StrictlyAboveOne) {
  EXPECT_EQ(kaiser_count({2.5, 1.3, 0.9, 0.3}), 2u);
  EXPECT_EQ(kaiser_count({2.5, 1.3, 1.0, 0.2}), 2u);
  EXPECT_EQ(kaiser_count({1.0, 1.0, 1.0}), 0u);
  EXPECT_EQ(kaiser_count({}), 0u);
}

TEST(KaiserCount, SixBlocks) {
  const auto e = eigendecompose(block_correlation(6, 5, 0.9, 0.05));
  EXPECT_EQ(kaiser_count(e.eigenvalues), 6u);
  const auto s = scree(e);
  EXPECT_EQ(s.front().first, 1u);
  EXPECT_GT(s[5].second, 1.0);
  EXPECT_LT(s[6].second, 1.0);
}

TEST(ExtractLoadings, Identity) {
  const auto l = extract_loadings(ids(3), Matrix::identity(3), 2, eigendecompose(Matrix::identity(3)));
  for (double h : l.communalities()) EXPECT_LE(h, 1.0 + 1e-12);
  EXPECT_NEAR(l.total_explained(), 2.0 / 3.0, 1e-12);
}

TEST(ExtractLoadings, FullRankReproducesCorrelation) {
  const auto r = block_correlation(3, 4, 0.7, 0.1);
  const auto l = extract_loadings(ids(12), r, 12, eigendecompose(r));
  EXPECT_LE(max_abs_difference(l.loadings * l.loadings.transposed(), r), 1e-10);
}

TEST(ExtractLoadings, PerfectPairRankOne) {
  const Matrix r{{1, 1}, {1, 1}};
  const auto l = extract_loadings(ids(2), r, 1, eigendecompose(r));
  EXPECT_NEAR(l.loadings(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(l.loadings(1, 0), 1.0, 1e-12);
}

TEST(ExtractLoadings, UncorrelatedPairIsPermutedIdentity) {
  const auto r = Matrix::identity(2);
  const auto l = extract_loadings(ids(2), r, 2, eigendecompose(r));
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(std::abs(l.loadings(0, k)) + std::abs(l.loadings(1, k)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(l.loadings(0, k) * l.loadings(1, k)), 0.0, 1e-12);
  }
}

TEST(ExtractLoadings, SixBlocksWithSixFactors) {
  const auto r = block_correlation(6, 5, 0.9, 0.05);
  const auto unrotated = extract_loadings(ids(30), r, 6, eigendecompose(r));
  EXPECT_GE(unrotated.total_explained(), 0.8);
  EXPECT_LE(unrotated.total_explained(), 1.0);
  // Five eigenvalues coincide, so the unrotated axes inside that subspace are
  // arbitrary; the block structure shows after rotation.
  const auto l = varimax(unrotated);
  for (std::size_t b = 0; b < 6; ++b) {
    std::size_t shared = 6;
    for (std::size_t k = 0; k < 6; ++k)
      if (l.loadings(5 * b, k) >= 0.8) shared = k;
    ASSERT_LT(shared, 6u) << "block " << b;
    for (std::size_t i = 5 * b; i < 5 * b + 5; ++i) EXPECT_GE(l.loadings(i, shared), 0.8);
  }
}

TEST(ExtractLoadings, BadFactorCount) {
  const auto r = Matrix::identity(3);
  EXPECT_THROW(extract_loadings(ids(3), r, 0, eigendecompose(r)), ParameterError);
  EXPECT_THROW(extract_loadings(ids(3), r, 4, eigendecompose(r)), ParameterError);
}

TEST(ExtractLoadings, NotPositiveSemidefinite) {
  const Matrix r{{1, 2}, {2, 1}};
  EXPECT_THROW(extract_loadings(ids(2), r, 2, eigendecompose(r)), NotPositiveSemidefiniteError);
}

TEST(Varimax, SimpleStructureIsFixedPoint) {
  LoadingMatrix l{ids(3), Matrix{{0.9, 0}, {0, 0.8}, {0.85, 0}}, false, {0, 0}, 0, true, {}};
  const auto r = varimax(l);
  EXPECT_LE(max_abs_difference(r.loadings, l.loadings), 1e-10);
  EXPECT_NEAR(varimax_criterion(r.loadings), varimax_criterion(l.loadings), 1e-12);
}

TEST(Varimax, RecoversFortyFiveDegreeRotation) {
  const double c = std::sqrt(0.5);
  Matrix simple{{0.9, 0}, {0.8, 0}, {0, 0.7}, {0, 0.6}};
  Matrix rotated(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    rotated(i, 0) = c * simple(i, 0) - c * simple(i, 1);
    rotated(i, 1) = c * simple(i, 0) + c * simple(i, 1);
  }
  const auto r = varimax(LoadingMatrix{ids(4), rotated, false, {0, 0}, 0, true, {}});
  EXPECT_LE(max_abs_difference(r.loadings, simple), 1e-8);
}

TEST(Varimax, SingleFactorUnchanged) {
  LoadingMatrix l{ids(3), Matrix{{0.5}, {0.6}, {0.7}}, false, {0.5}, 0, true, {}};
  EXPECT_EQ(varimax(l).loadings, l.loadings);
}

TEST(Varimax, CriterionNeverDecreases) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    for (bool normalize : {true, false}) {
      const auto r = varimax(random_loadings(15, 4, rng), {normalize, 1e-7, 100});
      for (std::size_t k = 1; k < r.criterion_history.size(); ++k)
        EXPECT_GE(r.criterion_history[k], r.criterion_history[k - 1] - 1e-12);
    }
  }
}

TEST(Varimax, PreservesCommunalitiesAndReproducedCorrelation) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const auto l = random_loadings(12, 3, rng);
    const auto r = varimax(l);
    const auto h0 = l.communalities(), h1 = r.communalities();
    for (std::size_t i = 0; i < h0.size(); ++i) EXPECT_NEAR(h0[i], h1[i], 1e-9);
    EXPECT_LE(max_abs_difference(l.loadings * l.loadings.transposed(), r.loadings * r.loadings.transposed()), 1e-9);
  }
}

TEST(Varimax, MatchesAngleGridOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto l = random_loadings(8, 2, rng);
    const auto r = varimax(l, {false, 1e-12, 100});
    std::vector<std::pair<double, double>> rows;
    for (std::size_t i = 0; i < 8; ++i) rows.emplace_back(l.loadings(i, 0), l.loadings(i, 1));
    EXPECT_NEAR(varimax_criterion(r.loadings), oracle::varimax_grid_maximum(rows, 1e-4), 1e-6);
  }
}

TEST(SuppressSmall, BlanksAndDropsLeadingZero) {
  LoadingMatrix l{ids(2), Matrix{{0.874, 0.05}, {-0.15, 0.62}}, true, {0, 0}, 0, true, {}};
  EXPECT_EQ(suppress_small(l, {0.1, 3, false, false}), "journal\t1\t2\nv1\t.874\t\nv2\t-.150\t.620\n");
  EXPECT_EQ(suppress_small(l, {0.1, 2, false, false}), "journal\t1\t2\nv1\t.87\t\nv2\t-.15\t.62\n");
  EXPECT_EQ(suppress_small(l, {0.0, 2, false, false}), "journal\t1\t2\nv1\t.87\t.05\nv2\t-.15\t.62\n");
  EXPECT_EQ(format_loading(0.0004, 3), ".000");
  EXPECT_THROW(suppress_small(l, {-1.0}), ParameterError);
}

TEST(SuppressSmall, SortsByDominantFactor) {
  LoadingMatrix l{ids(3), Matrix{{0.1, 0.9}, {0.8, 0.2}, {0.95, 0.0}}, true, {0, 0}, 0, true, {}};
  const auto table = suppress_small(l);
  EXPECT_LT(table.find("v3"), table.find("v2"));
  EXPECT_LT(table.find("v2"), table.find("v1"));
}

TEST(Scree, OneBasedPairs) {
  const auto s = scree(eigendecompose(Matrix{{2, 1}, {1, 2}}));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].first, 2u);
  EXPECT_NEAR(s[1].second, 1.0, 1e-14);
}

TEST(Scree, PassThroughAndFlat) {
  EigenSolution e{{3, 2, 1}, Matrix::identity(3)};
  EXPECT_EQ(scree(e), (std::vector<std::pair<std::size_t, double>>{{1, 3}, {2, 2}, {3, 1}}));
  for (const auto& [k, v] : scree(eigendecompose(Matrix::identity(5)))) EXPECT_EQ(v, 1.0);
}
