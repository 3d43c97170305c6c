#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "citemap/citation_matrix.hpp"
#include "citemap/dense.hpp"
#include "citemap/error.hpp"
#include "citemap/text.hpp"

namespace citemap {

enum class Measure { pearson, cosine };

inline std::string to_string(Measure m) { return m == Measure::pearson ? "pearson" : "cosine"; }

inline Measure measure_from_string(const std::string& s) {
  if (s == "pearson") return Measure::pearson;
  if (s == "cosine") return Measure::cosine;
  throw ParameterError("unknown similarity measure '" + s + "' (expected pearson or cosine)");
}

// Which profile a similarity compares: rows (cited-profiles, Q-mode) or
// columns (citing-profiles).
enum class Axis { cited, citing };

/// Product-moment correlation. Summation order is fixed (index order).
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("pearson: vectors differ in length");
  if (x.size() < 2) throw DimensionError("pearson: need at least two observations");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("pearson: constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double cosine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("cosine: vectors differ in length");
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    xx += x[k] * x[k];
    yy += y[k] * y[k];
    xy += x[k] * y[k];
  }
  if (xx == 0.0 || yy == 0.0) throw DegenerateInputError("cosine: zero vector");
  return std::clamp(xy / std::sqrt(xx * yy), -1.0, 1.0);
}

inline double similarity(Measure m, std::span<const double> x, std::span<const double> y) {
  return m == Measure::pearson ? pearson(x, y) : cosine(x, y);
}

struct SimilarityMatrix {
  std::vector<JournalLabel> labels;
  Matrix values;
  Measure measure = Measure::pearson;

  std::size_t size() const noexcept { return labels.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

inline SimilarityMatrix similarity_matrix(const CitationMatrix& m, Measure measure, Axis axis = Axis::cited) {
  const std::size_t n = m.size();
  if (n < 2) throw DimensionError("similarity matrix needs at least two journals");
  std::vector<std::vector<double>> profiles;
  profiles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    profiles.push_back(axis == Axis::cited ? m.cited_profile(i) : m.citing_profile(i));
    const auto& p = profiles.back();
    const bool constant = std::all_of(p.begin(), p.end(), [&](double v) { return v == p.front(); });
    const bool zero = std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; });
    if (measure == Measure::pearson && constant)
      throw DegenerateInputError("journal '" + m.label(i).id + "' has a constant profile (pearson undefined)");
    if (measure == Measure::cosine && zero)
      throw DegenerateInputError("journal '" + m.label(i).id + "' has an all-zero profile (cosine undefined)");
  }
  SimilarityMatrix s{m.labels(), Matrix(n, n), measure};
  for (std::size_t i = 0; i < n; ++i) {
    s.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = similarity(measure, profiles[i], profiles[j]);
      s.values(i, j) = v;
      s.values(j, i) = v;
    }
  }
  return s;
}

struct SimilarityEdge {
  std::size_t i;  // i < j
  std::size_t j;
  double weight;

  friend bool operator==(const SimilarityEdge&, const SimilarityEdge&) = default;
};

struct SimilarityGraph {
  std::vector<JournalLabel> nodes;
  std::vector<SimilarityEdge> edges;
  double threshold = 0.0;
};

/// Keeps every off-diagonal pair whose similarity is >= min_value.
inline SimilarityGraph threshold_graph(const SimilarityMatrix& s, double min_value = 0.0) {
  SimilarityGraph g{s.labels, {}, min_value};
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (s(i, j) >= min_value) g.edges.push_back({i, j, s(i, j)});
  return g;
}

inline std::string format_similarity_csv(const SimilarityMatrix& s) {
  return format_matrix(CitationMatrix(s.labels, s.values), MatrixFormat::csv);
}

inline void save_similarity(const SimilarityMatrix& s, const std::filesystem::path& path) {
  detail::write_file(path, format_similarity_csv(s));
}

inline std::string format_pajek_graph(const SimilarityGraph& g) {
  std::string out = "*Vertices " + std::to_string(g.nodes.size()) + "\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) out += std::to_string(i + 1) + " \"" + g.nodes[i].id + "\"\n";
  out += "*Edges\n";
  for (const auto& e : g.edges)
    out += std::to_string(e.i + 1) + ' ' + std::to_string(e.j + 1) + ' ' + text::format_number(e.weight) + '\n';
  return out;
}

}  // namespace citemap
