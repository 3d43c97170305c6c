#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "citemap/dense.hpp"
#include "citemap/error.hpp"
#include "citemap/similarity.hpp"
#include "citemap/text.hpp"

namespace citemap {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Graph-theoretic target distances; unreachable pairs hold +infinity.
struct DistanceMatrix {
  Matrix d;

  std::size_t size() const noexcept { return d.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return d(i, j); }
  bool finite(std::size_t i, std::size_t j) const { return std::isfinite(d(i, j)); }
  bool all_finite() const {
    return std::all_of(d.data().begin(), d.data().end(), [](double v) { return std::isfinite(v); });
  }
  double max_finite() const {
    double m = 0.0;
    for (double v : d.data())
      if (std::isfinite(v)) m = std::max(m, v);
    return m;
  }

  DistanceMatrix submatrix(const std::vector<std::size_t>& nodes) const {
    DistanceMatrix out{Matrix(nodes.size(), nodes.size())};
    for (std::size_t a = 0; a < nodes.size(); ++a)
      for (std::size_t b = 0; b < nodes.size(); ++b) out.d(a, b) = d(nodes[a], nodes[b]);
    return out;
  }
};

/// Spring length of an edge: 1 - similarity, clamped to [min_length, 1].
inline double edge_length(double weight, double min_length = 1e-3) { return std::clamp(1.0 - weight, min_length, 1.0); }

/// All-pairs shortest paths over edge lengths 1 - weight (Dijkstra from each node).
inline DistanceMatrix build_distances(const SimilarityGraph& g, double min_length = 1e-3) {
  const std::size_t n = g.nodes.size();
  if (n < 2) throw DimensionError("build_distances: graph needs at least two nodes");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Matrix length(n, n, inf);
  for (const auto& e : g.edges) {
    const double l = edge_length(e.weight, min_length);
    length(e.i, e.j) = std::min(length(e.i, e.j), l);
    length(e.j, e.i) = length(e.i, e.j);
  }
  DistanceMatrix out{Matrix(n, n, inf)};
  std::vector<bool> done(n);
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(done.begin(), done.end(), false);
    out.d(src, src) = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t u = n;
      for (std::size_t v = 0; v < n; ++v)
        if (!done[v] && std::isfinite(out.d(src, v)) && (u == n || out.d(src, v) < out.d(src, u))) u = v;
      if (u == n) break;
      done[u] = true;
      for (std::size_t v = 0; v < n; ++v)
        if (!done[v] && std::isfinite(length(u, v))) out.d(src, v) = std::min(out.d(src, v), out.d(src, u) + length(u, v));
    }
  }
  // Exact symmetry regardless of relaxation order.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.d(i, j) = out.d(j, i) = std::min(out.d(i, j), out.d(j, i));
  return out;
}

// ---------------------------------------------------------------------------
// Spring energy

namespace detail {

inline void require_connected(const DistanceMatrix& d) {
  if (!d.all_finite()) throw ComponentError("layout input has unreachable pairs; lay out components separately");
}

// Energy terms that involve node m, evaluated with node m at position p.
inline double node_energy(std::span<const Point> coords, const DistanceMatrix& d, std::size_t m, Point p) {
  double e = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i == m) continue;
    const double dij = d(m, i);
    const double stretch = distance(p, coords[i]) - dij;
    e += stretch * stretch / (dij * dij);
  }
  return e;
}

// Change in node_energy when node m moves to q, summed term by term so that
// small moves are not lost to cancellation.
inline double node_energy_delta(std::span<const Point> coords, const DistanceMatrix& d, std::size_t m, Point q) {
  const Point p = coords[m];
  const Point step{q.x - p.x, q.y - p.y};
  double delta = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i == m) continue;
    const double dij = d(m, i);
    const double r_old = distance(p, coords[i]), r_new = distance(q, coords[i]);
    const double sum = r_old + r_new;
    if (sum == 0.0) continue;
    // r_new^2 - r_old^2 = step . (p + q - 2 p_i)
    const double dr = (step.x * (p.x + q.x - 2.0 * coords[i].x) + step.y * (p.y + q.y - 2.0 * coords[i].y)) / sum;
    delta += dr * (sum - 2.0 * dij) / (dij * dij);
  }
  return delta;
}

inline Point node_gradient(std::span<const Point> coords, const DistanceMatrix& d, std::size_t m) {
  Point g;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i == m) continue;
    const double dx = coords[m].x - coords[i].x, dy = coords[m].y - coords[i].y;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) continue;
    const double dij = d(m, i);
    const double f = 2.0 / (dij * dij) * (1.0 - dij / r);
    g.x += f * dx;
    g.y += f * dy;
  }
  return g;
}

}  // namespace detail

/// E = sum over i<j of (|p_i - p_j| - d_ij)^2 / d_ij^2.
inline double kk_energy(std::span<const Point> coords, const DistanceMatrix& d) {
  if (coords.size() != d.size()) throw DimensionError("kk_energy: coordinate count differs from distance matrix");
  detail::require_connected(d);
  double e = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      const double dij = d(i, j);
      const double stretch = distance(coords[i], coords[j]) - dij;
      e += stretch * stretch / (dij * dij);
    }
  return e;
}

/// Analytic gradient of kk_energy with respect to every coordinate.
inline std::vector<Point> kk_gradient(std::span<const Point> coords, const DistanceMatrix& d) {
  if (coords.size() != d.size()) throw DimensionError("kk_gradient: coordinate count differs from distance matrix");
  detail::require_connected(d);
  std::vector<Point> g(coords.size());
  for (std::size_t m = 0; m < coords.size(); ++m) g[m] = detail::node_gradient(coords, d, m);
  return g;
}

struct LayoutOptions {
  std::uint64_t seed = 1;
  double grad_tol = 1e-12;
  int max_outer = 100000;  // node relaxations
  int max_inner = 50;      // Newton steps per relaxation
  bool newton = true;      // false: plain steepest descent with backtracking
  bool record_energy = false;
  // Called after every relaxation with the node, its previous position and
  // the updated coordinates.
  std::function<void(std::size_t, Point, std::span<const Point>)> on_relax;
};

struct LayoutResult {
  std::vector<Point> coordinates;
  double final_energy = 0.0;
  int iterations = 0;  // node relaxations performed
  bool converged = false;
  std::vector<double> energy_history;  // total energy before the first and after every relaxation
};

/// Circle of radius max(d)/2 with nodes placed in a seed-determined order.
inline std::vector<Point> circle_start(const DistanceMatrix& d, std::uint64_t seed) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::mt19937_64 rng(seed);
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng() % k]);
  const double radius = std::max(d.max_finite(), 1e-3) / 2.0;
  std::vector<Point> coords(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    coords[order[k]] = {radius * std::cos(angle), radius * std::sin(angle)};
  }
  return coords;
}

namespace detail {

// One line-searched step for node m. Returns false when no decrease was found.
inline bool relax_step(std::vector<Point>& coords, const DistanceMatrix& d, std::size_t m, bool newton) {
  const Point g = node_gradient(coords, d, m);
  Point dir{-g.x, -g.y};
  if (newton) {
    double hxx = 0.0, hyy = 0.0, hxy = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (i == m) continue;
      const double dx = coords[m].x - coords[i].x, dy = coords[m].y - coords[i].y;
      const double r = std::hypot(dx, dy);
      if (r == 0.0) continue;
      const double dij = d(m, i), k = 2.0 / (dij * dij), r3 = r * r * r;
      hxx += k * (1.0 - dij * dy * dy / r3);
      hyy += k * (1.0 - dij * dx * dx / r3);
      hxy += k * dij * dx * dy / r3;
    }
    const double det = hxx * hyy - hxy * hxy;
    if (det > 0.0 && hxx > 0.0) dir = {-(hyy * g.x - hxy * g.y) / det, -(hxx * g.y - hxy * g.x) / det};
  }
  const double slope = g.x * dir.x + g.y * dir.y;  // < 0 for a descent direction
  if (!(slope < 0.0)) return false;
  double t = 1.0;
  for (int k = 0; k < 60; ++k, t *= 0.5) {
    const Point trial{coords[m].x + t * dir.x, coords[m].y + t * dir.y};
    if (node_energy_delta(coords, d, m, trial) <= 1e-4 * t * slope) {
      coords[m] = trial;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Kamada-Kawai spring embedding from a given start.
///
/// Repeatedly picks the node with the largest gradient magnitude and relaxes it
/// with damped 2-D Newton steps (steepest descent when the local Hessian is not
/// positive definite) until every gradient magnitude is below grad_tol.
inline LayoutResult kamada_kawai(const DistanceMatrix& d, std::vector<Point> start, const LayoutOptions& opts = {}) {
  detail::require_connected(d);
  if (start.size() != d.size()) throw DimensionError("kamada_kawai: start has wrong node count");
  const std::size_t n = d.size();
  LayoutResult out;
  out.coordinates = std::move(start);
  auto& coords = out.coordinates;
  if (opts.record_energy) out.energy_history.push_back(kk_energy(coords, d));

  std::vector<double> grad_norm(n, 0.0);
  while (true) {
    std::size_t worst = 0;
    for (std::size_t m = 0; m < n; ++m) {
      const Point g = detail::node_gradient(coords, d, m);
      grad_norm[m] = std::hypot(g.x, g.y);
      if (grad_norm[m] > grad_norm[worst]) worst = m;
    }
    if (n < 2 || grad_norm[worst] < opts.grad_tol) {
      out.converged = true;
      break;
    }
    if (out.iterations >= opts.max_outer) break;
    ++out.iterations;
    const Point before = coords[worst];
    bool moved = false;
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      if (!detail::relax_step(coords, d, worst, opts.newton)) break;
      moved = true;
      const Point g = detail::node_gradient(coords, d, worst);
      if (std::hypot(g.x, g.y) < opts.grad_tol) break;
    }
    if (opts.record_energy) out.energy_history.push_back(kk_energy(coords, d));
    if (opts.on_relax) opts.on_relax(worst, before, coords);
    if (!moved) break;  // stationary to machine precision
  }
  out.final_energy = kk_energy(coords, d);
  return out;
}

inline LayoutResult kamada_kawai(const DistanceMatrix& d, const LayoutOptions& opts = {}) {
  detail::require_connected(d);
  return kamada_kawai(d, circle_start(d, opts.seed), opts);
}

// ---------------------------------------------------------------------------
// Whole-graph layout with disconnected components

inline std::vector<std::vector<std::size_t>> connected_components(const SimilarityGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<int> seen(n, 0);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp{s};
    seen[s] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
      for (auto v : adj[comp[head]])
        if (!seen[v]) {
          seen[v] = 1;
          comp.push_back(v);
        }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

struct GraphLayout {
  LayoutResult result;
  std::size_t components = 0;
  std::vector<std::size_t> isolated;  // nodes without any edge
};

/// Lays out each connected component separately and packs them on a grid,
/// largest component first.
inline GraphLayout layout_graph(const SimilarityGraph& g, const LayoutOptions& opts = {}, double min_length = 1e-3) {
  const std::size_t n = g.nodes.size();
  GraphLayout out;
  out.result.coordinates.assign(n, Point{});
  out.result.converged = true;
  if (n == 0) return out;
  const DistanceMatrix full = n >= 2 ? build_distances(g, min_length) : DistanceMatrix{Matrix(1, 1)};
  const auto comps = connected_components(g);
  out.components = comps.size();

  std::vector<std::vector<Point>> placed;
  double cell = 0.0;
  for (const auto& comp : comps) {
    std::vector<Point> coords(comp.size());
    if (comp.size() == 1) {
      out.isolated.push_back(comp[0]);
    } else {
      auto sub = full.submatrix(comp);
      auto r = kamada_kawai(sub, opts);
      out.result.final_energy += r.final_energy;
      out.result.iterations += r.iterations;
      out.result.converged = out.result.converged && r.converged;
      coords = std::move(r.coordinates);
    }
    double min_x = coords[0].x, min_y = coords[0].y, max_x = min_x, max_y = min_y;
    for (const auto& p : coords) {
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    for (auto& p : coords) p = {p.x - min_x, p.y - min_y};
    cell = std::max({cell, max_x - min_x, max_y - min_y});
    placed.push_back(std::move(coords));
  }
  if (comps.size() == 1) {
    for (std::size_t a = 0; a < comps[0].size(); ++a) out.result.coordinates[comps[0][a]] = placed[0][a];
    return out;
  }
  cell = std::max(cell, 1.0) * 1.25;
  const auto columns = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(comps.size()))));
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const double ox = static_cast<double>(c % columns) * cell, oy = static_cast<double>(c / columns) * cell;
    for (std::size_t a = 0; a < comps[c].size(); ++a)
      out.result.coordinates[comps[c][a]] = {placed[c][a].x + ox, placed[c][a].y + oy};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exporters

/// Uniformly scales coordinates into [0,1] x [0,1] (aspect ratio kept).
inline std::vector<Point> normalize_coordinates(std::span<const Point> coords) {
  if (coords.empty()) return {};
  double min_x = coords[0].x, min_y = coords[0].y, max_x = min_x, max_y = min_y;
  for (const auto& p : coords) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("layout coordinates must be finite");
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const double extent = std::max(max_x - min_x, max_y - min_y);
  std::vector<Point> out;
  out.reserve(coords.size());
  for (const auto& p : coords) {
    if (extent > 0.0)
      out.push_back({(p.x - min_x) / extent, (p.y - min_y) / extent});
    else
      out.push_back({0.5, 0.5});
  }
  return out;
}

enum class LayoutFormat { svg, dot, pajek_net };

inline std::string layout_svg(std::span<const Point> coords, const SimilarityGraph& g) {
  constexpr double size = 1000.0, margin = 0.05 * size;
  const auto unit = normalize_coordinates(coords);
  auto sx = [&](const Point& p) { return margin + p.x * (size - 2 * margin); };
  // SVG y grows downwards.
  auto sy = [&](const Point& p) { return size - margin - p.y * (size - 2 * margin); };
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n"
      "<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
  for (const auto& e : g.edges) {
    const double w = 0.5 + 4.0 * std::clamp(e.weight, 0.0, 1.0);
    out += "<line x1=\"" + text::fixed(sx(unit[e.i]), 2) + "\" y1=\"" + text::fixed(sy(unit[e.i]), 2) + "\" x2=\"" +
           text::fixed(sx(unit[e.j]), 2) + "\" y2=\"" + text::fixed(sy(unit[e.j]), 2) +
           "\" stroke=\"#888888\" stroke-width=\"" + text::fixed(w, 3) + "\"/>\n";
  }
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const auto cx = text::fixed(sx(unit[i]), 2), cy = text::fixed(sy(unit[i]), 2);
    out += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"8\" fill=\"#1f77b4\"/>\n";
    out += "<text x=\"" + cx + "\" y=\"" + text::fixed(sy(unit[i]) - 12.0, 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
           text::xml_escape(i < g.nodes.size() ? g.nodes[i].id : std::to_string(i + 1)) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

/// Undirected DOT graph with pinned positions in points (720 pt square).
inline std::string layout_dot(std::span<const Point> coords, const SimilarityGraph& g) {
  const auto unit = normalize_coordinates(coords);
  std::string out = "graph citemap {\n  node [shape=circle];\n";
  for (std::size_t i = 0; i < unit.size(); ++i)
    out += "  " + dot_quote(g.nodes[i].id) + " [pos=\"" + text::fixed(unit[i].x * 720.0, 3) + ',' +
           text::fixed(unit[i].y * 720.0, 3) + "!\"];\n";
  for (const auto& e : g.edges)
    out += "  " + dot_quote(g.nodes[e.i].id) + " -- " + dot_quote(g.nodes[e.j].id) + " [similarity=" +
           text::format_number(e.weight) + ", penwidth=" + text::fixed(0.5 + 4.0 * std::clamp(e.weight, 0.0, 1.0), 3) +
           "];\n";
  out += "}\n";
  return out;
}

/// Pajek network with [0,1]-normalized coordinates in the *Vertices section.
inline std::string layout_pajek(std::span<const Point> coords, const SimilarityGraph& g) {
  const auto unit = normalize_coordinates(coords);
  std::string out = "*Vertices " + std::to_string(unit.size()) + "\n";
  for (std::size_t i = 0; i < unit.size(); ++i)
    out += std::to_string(i + 1) + " \"" + g.nodes[i].id + "\" " + text::format_number(unit[i].x) + ' ' +
           text::format_number(unit[i].y) + "\n";
  out += "*Edges\n";
  for (const auto& e : g.edges)
    out += std::to_string(e.i + 1) + ' ' + std::to_string(e.j + 1) + ' ' + text::format_number(e.weight) + '\n';
  return out;
}

inline std::string format_layout(std::span<const Point> coords, const SimilarityGraph& g, LayoutFormat format) {
  if (coords.size() != g.nodes.size()) throw DimensionError("layout and graph differ in node count");
  switch (format) {
    case LayoutFormat::svg: return layout_svg(coords, g);
    case LayoutFormat::dot: return layout_dot(coords, g);
    case LayoutFormat::pajek_net: return layout_pajek(coords, g);
  }
  throw ParameterError("unknown layout format");
}

inline void export_layout(const LayoutResult& l, const SimilarityGraph& g, LayoutFormat format,
                          const std::filesystem::path& path) {
  detail::write_file(path, format_layout(l.coordinates, g, format));
}

}  // namespace citemap
