#pragma once

// Seeded synthetic citation matrices: a clustered compound-Poisson generator,
// exact powerlaw matrices, and the bundled 21-journal demo set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "citemap/citation_matrix.hpp"

namespace citemap::synthetic {

/// Cited-profile clusters nested in broader "fields".
///
/// Mean count for cell (i, j) is a_i * s_j * w, where a_i (cited scale) and s_j
/// (citing size) are log-uniform, and w is cluster_weight when i and j share a
/// cluster, field_weight when they only share a field, background otherwise.
/// Counts are Poisson with Gamma-distributed means (a compound Poisson).
struct ClusterSpec {
  std::size_t clusters = 6;
  std::size_t per_cluster = 5;
  std::vector<std::size_t> field_of_cluster{0, 0, 1, 1, 2, 3};
  double cluster_weight = 3000.0;
  double field_weight = 600.0;
  double background = 9.0;
  double gamma_shape = 4.0;
  double cited_decades = 1.0;
  double citing_decades = 1.0;
};

inline Matrix clustered_counts(const ClusterSpec& spec, std::uint64_t seed, const std::vector<std::size_t>& cluster_of) {
  const std::size_t n = cluster_of.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> cited(n), citing(n);
  for (auto& a : cited) a = std::pow(10.0, spec.cited_decades * unit(rng));
  for (auto& s : citing) s = std::pow(10.0, spec.citing_decades * unit(rng));
  auto field = [&](std::size_t i) {
    const auto c = cluster_of[i];
    return c < spec.field_of_cluster.size() ? spec.field_of_cluster[c] : c + 1000;
  };
  Matrix cells(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double w = cluster_of[i] == cluster_of[j] ? spec.cluster_weight
                       : field(i) == field(j)         ? spec.field_weight
                                                      : spec.background;
      const double mean = cited[i] * citing[j] * w;
      std::gamma_distribution<double> gamma(spec.gamma_shape, mean / spec.gamma_shape);
      std::poisson_distribution<long long> poisson(gamma(rng));
      cells(i, j) = static_cast<double>(poisson(rng));
    }
  return cells;
}

inline CitationMatrix clustered_matrix(const ClusterSpec& spec, std::uint64_t seed) {
  std::vector<std::size_t> cluster_of;
  std::vector<JournalLabel> labels;
  for (std::size_t c = 0; c < spec.clusters; ++c)
    for (std::size_t k = 0; k < spec.per_cluster; ++k) {
      cluster_of.push_back(c);
      const std::string id = "C" + std::to_string(c + 1) + "J" + std::to_string(k + 1);
      labels.push_back({id, id, "cluster " + std::to_string(c + 1)});
    }
  return {std::move(labels), clustered_counts(spec, seed, cluster_of)};
}

/// Each row i is an exact series scale_i * rank^exponent_i spread over the
/// citing journals in a seeded order. Optionally the first hook_size ranks of
/// every row are multiplied by hook_factor.
struct PowerlawMatrix {
  CitationMatrix matrix;
  std::vector<double> exponents;
  std::vector<double> scales;
};

inline PowerlawMatrix powerlaw_matrix(std::size_t n, std::uint64_t seed, std::size_t hook_size = 0,
                                      double hook_factor = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PowerlawMatrix out;
  Matrix cells(n, n);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("P" + std::to_string(i + 1));
    const double exponent = -0.5 - 2.5 * unit(rng);
    const double scale = std::pow(10.0, 1.0 + 3.0 * unit(rng));
    out.exponents.push_back(exponent);
    out.scales.push_back(scale);
    std::vector<std::size_t> column(n);
    for (std::size_t k = 0; k < n; ++k) column[k] = k;
    for (std::size_t k = n; k > 1; --k) std::swap(column[k - 1], column[rng() % k]);
    for (std::size_t r = 0; r < n; ++r) {
      double v = scale * std::pow(static_cast<double>(r + 1), exponent);
      if (r < hook_size) v *= hook_factor;
      cells(i, column[r]) = v;
    }
  }
  out.matrix = CitationMatrix::from_ids(ids, std::move(cells));
  return out;
}

struct DemoJournal {
  const char* id;
  const char* name;
  const char* class_group;
  std::size_t cluster;
};

// Journal set, names and Library of Congress class groups of the JACS
// citation environment (2003). Cluster membership is only a generator input.
inline const std::vector<DemoJournal>& demo_journals() {
  static const std::vector<DemoJournal> journals{
      {"Science", "Science", "Science (General)", 5},
      {"Angew Chem Int Edit", "Angewandte Chemie-International Edition", "Chemistry", 0},
      {"Chem Commun", "Chemical Communications", "Chemistry", 0},
      {"Chem-Eur J", "Chemistry-A European Journal", "Chemistry", 0},
      {"Chem Rev", "Chemical Reviews", "Chemistry", 0},
      {"J Am Chem Soc", "Journal of the American Chemical Society", "Chemistry", 0},
      {"Dalton T", "Dalton Transactions", "Inorganic chemistry", 2},
      {"Inorg Chem", "Inorganic Chemistry", "Inorganic chemistry", 2},
      {"J Org Chem", "Journal of Organic Chemistry", "Organic chemistry", 1},
      {"Org Biomol Chem", "Organic and Biomolecular Chemistry", "Organic chemistry", 1},
      {"Tetrahedron", "Tetrahedron", "Organic chemistry", 1},
      {"Tetrahedron Lett", "Tetrahedron Letters", "Organic chemistry", 1},
      {"Org Lett", "Organic Letters", "Organic chemistry", 1},
      {"Macromolecules", "Macromolecules", "Polymers. Macromolecules", 4},
      {"J Organomet Chem", "Journal of Organometallic Chemistry", "Organometallic chemistry and compounds", 2},
      {"Organometallics", "Organometallics", "Organometallic chemistry and compounds", 2},
      {"J Chem Phys", "Journal of Chemical Physics", "Physical and theoretical chemistry", 3},
      {"J Phys Chem A", "Journal of Physical Chemistry A", "Physical and theoretical chemistry", 3},
      {"J Phys Chem B", "Journal of Physical Chemistry B", "Physical and theoretical chemistry", 3},
      {"Langmuir", "Langmuir", "Surface chemistry", 4},
      {"Biochemistry-US", "Biochemistry-US", "Animal biochemistry", 5},
  };
  return journals;
}

// Published marginals the demo matrix reproduces exactly.
inline constexpr double kJacsSelfCitations = 20469;
inline constexpr double kScienceSelfCitations = 3397;
inline constexpr double kScienceCitingJacs = 304;
inline constexpr double kJacsCitingScience = 2776;

/// Seeded synthetic 21 x 21 matrix over the demo journals. Cell values are
/// invented except for the four published JACS/Science counts; the ordering
/// constraints around them also hold (Science is JACS's smallest citer, JACS is
/// Science's second-largest citer after Science itself, self-citation tops both rows).
inline CitationMatrix demo_matrix(std::uint64_t seed = 1) {
  const auto& journals = demo_journals();
  std::vector<JournalLabel> labels;
  std::vector<std::size_t> cluster_of;
  for (const auto& j : journals) {
    labels.push_back({j.id, j.name, j.class_group});
    cluster_of.push_back(j.cluster);
  }
  ClusterSpec spec;
  spec.clusters = 6;
  spec.field_of_cluster = {0, 1, 0, 2, 2, 3};
  spec.cluster_weight = 300.0;
  spec.field_weight = 60.0;
  spec.background = 4.0;
  spec.cited_decades = 1.0;
  spec.citing_decades = 1.0;
  Matrix cells = clustered_counts(spec, seed, cluster_of);

  const std::size_t jacs = 5, science = 0;
  const std::size_t n = journals.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (j != jacs) cells(jacs, j) = std::clamp(cells(jacs, j) * 4.0, kScienceCitingJacs + 1, kJacsSelfCitations - 1);
    if (j != science) cells(science, j) = std::min(cells(science, j), kJacsCitingScience - 1);
  }
  cells(jacs, jacs) = kJacsSelfCitations;
  cells(jacs, science) = kScienceCitingJacs;
  cells(science, science) = kScienceSelfCitations;
  cells(science, jacs) = kJacsCitingScience;
  for (std::size_t i = 0; i < n; ++i) {
    // Self-citation heads every cited-profile.
    double top = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) top = std::max(top, cells(i, j));
    if (i != jacs && i != science) cells(i, i) = std::max(cells(i, i), top + 1.0);
  }
  return {std::move(labels), std::move(cells)};
}

}  // namespace citemap::synthetic
