#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "citemap/dense.hpp"
#include "citemap/error.hpp"
#include "citemap/similarity.hpp"
#include "citemap/text.hpp"

namespace citemap {

struct EigenSolution {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]
};

struct JacobiOptions {
  double symmetry_tol = 1e-9;
  double off_diagonal_tol = 1e-12;
  int max_sweeps = 100;
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

/// Full spectrum of a symmetric matrix by cyclic Jacobi sweeps.
///
/// Eigenvalues come back in descending order with orthonormal eigenvectors as
/// columns. Each eigenvector is signed so its largest-magnitude component is
/// positive (the first such component on ties).
inline EigenSolution eigendecompose(const Matrix& input, const JacobiOptions& opts = {}) {
  if (!input.square()) throw DimensionError("eigendecompose: matrix is not square");
  const std::size_t n = input.rows();
  double scale = 1.0;
  for (double v : input.data()) {
    if (!std::isfinite(v)) throw DomainError("eigendecompose: non-finite entry");
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > opts.symmetry_tol * scale)
        throw SymmetryError("eigendecompose: entries (" + std::to_string(i) + "," + std::to_string(j) +
                            ") and transpose differ by more than tolerance");

  Matrix a = input;
  // Symmetrize exactly so rotations act on a truly symmetric matrix.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = Matrix::identity(n);

  const double stop = opts.off_diagonal_tol * std::max(1.0, detail::frobenius_norm(a));
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
          a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenSolution out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(lead, src))) lead = r;
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = sign * v(r, src);
  }
  return out;
}

/// Number of eigenvalues strictly greater than one.
inline std::size_t kaiser_count(const std::vector<double>& eigenvalues) {
  return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [](double l) { return l > 1.0; }));
}

/// (1-based index, eigenvalue) pairs in descending eigenvalue order.
inline std::vector<std::pair<std::size_t, double>> scree(const EigenSolution& e) {
  std::vector<double> values = e.eigenvalues;
  std::stable_sort(values.begin(), values.end(), std::greater<>{});
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t k = 0; k < values.size(); ++k) out.emplace_back(k + 1, values[k]);
  return out;
}

struct LoadingMatrix {
  std::vector<JournalLabel> labels;  // one per variable (row)
  Matrix loadings;                   // variables x factors
  bool rotated = false;
  std::vector<double> explained_variance;  // fraction of total variance per factor
  int iterations = 0;
  bool converged = true;
  // Varimax criterion before rotation and after every kept sweep.
  std::vector<double> criterion_history;

  std::size_t variables() const noexcept { return loadings.rows(); }
  std::size_t factors() const noexcept { return loadings.cols(); }

  std::vector<double> communalities() const {
    std::vector<double> h(variables(), 0.0);
    for (std::size_t i = 0; i < variables(); ++i)
      for (std::size_t k = 0; k < factors(); ++k) h[i] += loadings(i, k) * loadings(i, k);
    return h;
  }

  double total_explained() const {
    return std::accumulate(explained_variance.begin(), explained_variance.end(), 0.0);
  }
};

/// Principal-component loadings: column j = eigenvector_j * sqrt(lambda_j).
inline LoadingMatrix extract_loadings(const std::vector<JournalLabel>& labels, const Matrix& corr, std::size_t k,
                                      const EigenSolution& eig) {
  const std::size_t n = corr.rows();
  if (k < 1 || k > n) throw ParameterError("factor count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  const double psd_tol = 1e-9 * static_cast<double>(n);
  LoadingMatrix out{labels, Matrix(n, k), false, std::vector<double>(k), 0, true, {}};
  for (std::size_t j = 0; j < k; ++j) {
    const double lambda = eig.eigenvalues[j];
    if (lambda < -psd_tol)
      throw NotPositiveSemidefiniteError("eigenvalue " + std::to_string(j + 1) + " is " + text::format_number(lambda));
    const double root = std::sqrt(std::max(lambda, 0.0));
    for (std::size_t i = 0; i < n; ++i) out.loadings(i, j) = eig.eigenvectors(i, j) * root;
    out.explained_variance[j] = std::max(lambda, 0.0) / static_cast<double>(n);
  }
  return out;
}

inline LoadingMatrix extract_loadings(const SimilarityMatrix& corr, std::size_t k) {
  return extract_loadings(corr.labels, corr.values, k, eigendecompose(corr.values));
}

/// Sum over factors of the variance of squared loadings (times p).
inline double varimax_criterion(const Matrix& l) {
  const std::size_t p = l.rows();
  if (p == 0) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < l.cols(); ++k) {
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double sq = l(i, k) * l(i, k);
      s2 += sq;
      s4 += sq * sq;
    }
    total += s4 - s2 * s2 / static_cast<double>(p);
  }
  return total / static_cast<double>(p);
}

struct VarimaxOptions {
  bool kaiser_normalize = true;
  double tol = 1e-7;  // relative criterion change
  int max_iter = 100;
};

namespace detail {

// Flips each column so its largest-magnitude entry is positive and orders the
// columns by descending sum of squares.
inline void canonicalize_columns(LoadingMatrix& l) {
  const std::size_t p = l.variables(), k = l.factors();
  std::vector<double> ss(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t lead = 0;
    for (std::size_t i = 0; i < p; ++i) {
      ss[j] += l.loadings(i, j) * l.loadings(i, j);
      if (std::abs(l.loadings(i, j)) > std::abs(l.loadings(lead, j))) lead = i;
    }
    if (p > 0 && l.loadings(lead, j) < 0.0)
      for (std::size_t i = 0; i < p; ++i) l.loadings(i, j) = -l.loadings(i, j);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ss[a] > ss[b]; });
  Matrix sorted(p, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < p; ++i) sorted(i, j) = l.loadings(i, order[j]);
  l.loadings = std::move(sorted);
  l.explained_variance.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) l.explained_variance[j] = ss[order[j]] / static_cast<double>(p);
}

}  // namespace detail

/// Orthogonal varimax rotation by successive planar rotations of factor pairs
/// (Kaiser's algorithm). Each planar rotation is the exact maximizer of the
/// criterion in its plane, so the criterion never decreases across sweeps.
/// With kaiser_normalize the rows are scaled to unit communality during the
/// rotation and the criterion history refers to the normalized loadings.
inline LoadingMatrix varimax(const LoadingMatrix& input, const VarimaxOptions& opts = {}) {
  LoadingMatrix out = input;
  const std::size_t p = input.variables(), k = input.factors();
  if (k < 2) {
    out.iterations = 0;
    out.converged = true;
    out.criterion_history = {varimax_criterion(input.loadings)};
    return out;
  }

  Matrix a = input.loadings;
  std::vector<double> h(p, 1.0);
  if (opts.kaiser_normalize) {
    const auto comm = input.communalities();
    for (std::size_t i = 0; i < p; ++i) {
      h[i] = std::sqrt(comm[i]);
      if (h[i] > 0.0)
        for (std::size_t j = 0; j < k; ++j) a(i, j) /= h[i];
    }
  }

  const double pd = static_cast<double>(p);
  double current = varimax_criterion(a);
  out.criterion_history = {current};
  out.converged = false;
  int iter = 0;
  while (iter < opts.max_iter) {
    ++iter;
    const Matrix previous = a;
    for (std::size_t x = 0; x + 1 < k; ++x) {
      for (std::size_t y = x + 1; y < k; ++y) {
        double sum_u = 0.0, sum_v = 0.0, sum_c = 0.0, sum_d = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          const double u = a(i, x) * a(i, x) - a(i, y) * a(i, y);
          const double v = 2.0 * a(i, x) * a(i, y);
          sum_u += u;
          sum_v += v;
          sum_c += u * u - v * v;
          sum_d += 2.0 * u * v;
        }
        const double num = sum_d - 2.0 * sum_u * sum_v / pd;
        const double den = sum_c - (sum_u * sum_u - sum_v * sum_v) / pd;
        if (num == 0.0 && den >= 0.0) continue;
        const double phi = 0.25 * std::atan2(num, den);
        const double c = std::cos(phi), s = std::sin(phi);
        for (std::size_t i = 0; i < p; ++i) {
          const double ax = a(i, x), ay = a(i, y);
          a(i, x) = c * ax + s * ay;
          a(i, y) = -s * ax + c * ay;
        }
      }
    }
    const double next = varimax_criterion(a);
    if (next < current) {
      // No gain left at working precision.
      a = previous;
      out.converged = true;
      break;
    }
    out.criterion_history.push_back(next);
    const double change = std::abs(next - current);
    current = next;
    if (change <= opts.tol * std::max(std::abs(current), 1e-300)) {
      out.converged = true;
      break;
    }
  }

  if (opts.kaiser_normalize)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < k; ++j) a(i, j) *= h[i];

  out.loadings = std::move(a);
  out.rotated = true;
  out.iterations = iter;
  detail::canonicalize_columns(out);
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

struct LoadingTableOptions {
  double suppress_below = 0.1;  // |loading| below this renders blank
  int decimals = 3;
  bool sort_rows = true;  // group rows by dominant factor, strongest first
  bool show_class = true;
};

/// Loading value with the leading zero dropped: 0.874 -> ".874", -0.15 -> "-.150".
inline std::string format_loading(double value, int decimals) {
  std::string s = text::fixed(std::abs(value), decimals);
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  const bool zero = s.find_first_not_of("0.") == std::string::npos;
  return (value < 0.0 && !zero ? "-" : "") + s;
}

/// Tab-separated display table in the familiar "rotated component matrix"
/// layout. Only rendering changes; the loadings are untouched.
inline std::string suppress_small(const LoadingMatrix& l, const LoadingTableOptions& opts = {}) {
  if (opts.suppress_below < 0.0) throw ParameterError("suppression threshold must be >= 0");
  const std::size_t p = l.variables(), k = l.factors();
  std::vector<std::size_t> rows(p);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (opts.sort_rows) {
    auto dominant = [&](std::size_t i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < k; ++j)
        if (std::abs(l.loadings(i, j)) > std::abs(l.loadings(i, best))) best = j;
      return best;
    };
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      const auto fa = dominant(a), fb = dominant(b);
      if (fa != fb) return fa < fb;
      return std::abs(l.loadings(a, fa)) > std::abs(l.loadings(b, fb));
    });
  }
  const bool with_class =
      opts.show_class && std::any_of(l.labels.begin(), l.labels.end(), [](const auto& lab) { return lab.class_tag.has_value(); });

  std::string out = "journal";
  if (with_class) out += "\tclass";
  for (std::size_t j = 0; j < k; ++j) out += '\t' + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i : rows) {
    out += i < l.labels.size() ? l.labels[i].id : std::to_string(i + 1);
    if (with_class) out += '\t' + (i < l.labels.size() ? l.labels[i].class_tag.value_or("") : std::string{});
    for (std::size_t j = 0; j < k; ++j) {
      out += '\t';
      const double v = l.loadings(i, j);
      if (std::abs(v) >= opts.suppress_below) out += format_loading(v, opts.decimals);
    }
    out += '\n';
  }
  return out;
}

inline std::string format_loadings_csv(const LoadingMatrix& l) {
  std::string out = "journal";
  for (std::size_t j = 0; j < l.factors(); ++j) out += ",factor" + std::to_string(j + 1);
  out += ",communality\n";
  const auto h = l.communalities();
  for (std::size_t i = 0; i < l.variables(); ++i) {
    out += text::quote_if_needed(i < l.labels.size() ? l.labels[i].id : std::to_string(i + 1), ',');
    for (std::size_t j = 0; j < l.factors(); ++j) out += ',' + text::format_number(l.loadings(i, j));
    out += ',' + text::format_number(h[i]) + '\n';
  }
  return out;
}

}  // namespace citemap
