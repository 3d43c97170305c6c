#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citemap/error.hpp"
#include "citemap/text.hpp"

namespace citemap {

struct RankSizePoint {
  std::size_t rank;  // 1-based
  double count;      // > 0

  friend bool operator==(const RankSizePoint&, const RankSizePoint&) = default;
};

struct RankSizeSeries {
  std::vector<RankSizePoint> pairs;  // ascending rank, non-increasing count
  std::size_t n_nonzero = 0;
};

/// Positive counts sorted descending (ties keep input order), ranked 1..n.
inline RankSizeSeries rank_size(std::span<const double> v) {
  if (v.empty()) throw EmptyInputError("rank_size: empty vector");
  std::vector<double> positive;
  for (double x : v)
    if (x > 0.0) positive.push_back(x);
  if (positive.empty()) throw EmptyInputError("rank_size: no positive counts");
  std::stable_sort(positive.begin(), positive.end(), std::greater<>{});
  RankSizeSeries s;
  s.n_nonzero = positive.size();
  s.pairs.reserve(positive.size());
  for (std::size_t r = 0; r < positive.size(); ++r) s.pairs.push_back({r + 1, positive[r]});
  return s;
}

struct PowerlawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool degenerate = false;  // zero-variance response: r_squared undefined
  double base = 10.0;
  std::pair<std::size_t, std::size_t> fit_range{0, 0};  // first and last rank, inclusive

  // Fitted log_base(count) at a rank.
  double predict_log(std::size_t rank) const {
    return intercept + slope * std::log(static_cast<double>(rank)) / std::log(base);
  }
};

/// Ordinary least squares of log_base(count) on log_base(rank), skipping the
/// first exclude_head ranks.
inline PowerlawFit fit_loglog(const RankSizeSeries& s, double base = 10.0, std::size_t exclude_head = 0) {
  if (!(base > 1.0)) throw ParameterError("powerlaw base must be > 1");
  if (s.pairs.size() < exclude_head + 3)
    throw InsufficientDataError("log-log fit needs at least 3 points after excluding " + std::to_string(exclude_head) +
                                " head ranks (have " + std::to_string(s.pairs.size()) + ")");
  const double ln_base = std::log(base);
  const auto first = s.pairs.begin() + static_cast<std::ptrdiff_t>(exclude_head);
  const std::size_t m = static_cast<std::size_t>(s.pairs.end() - first);
  std::vector<double> xs, ys;
  xs.reserve(m);
  ys.reserve(m);
  for (auto it = first; it != s.pairs.end(); ++it) {
    xs.push_back(std::log(static_cast<double>(it->rank)) / ln_base);
    ys.push_back(std::log(it->count) / ln_base);
  }
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(m);
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(m);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = xs[k] - mean_x, dy = ys[k] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  PowerlawFit fit;
  fit.base = base;
  fit.fit_range = {first->rank, s.pairs.back().rank};
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  if (syy == 0.0) {
    fit.slope = 0.0;
    fit.intercept = mean_y;
    fit.degenerate = true;
    fit.r_squared = 0.0;
  } else {
    fit.r_squared = std::min(1.0, sxy * sxy / (sxx * syy));
  }
  return fit;
}

struct HeadReport {
  std::size_t head_size = 0;
  std::vector<std::pair<std::size_t, double>> residuals;  // (rank, observed - fitted), log units
  double threshold = 0.1;
};

/// Residuals of every rank against the fitted line; head_size is the length of
/// the initial run whose residuals exceed the threshold in magnitude.
inline HeadReport head_deviation(const RankSizeSeries& s, const PowerlawFit& f, double threshold = 0.1) {
  HeadReport report;
  report.threshold = threshold;
  const double ln_base = std::log(f.base);
  bool in_head = true;
  for (const auto& point : s.pairs) {
    const double residual = std::log(point.count) / ln_base - f.predict_log(point.rank);
    report.residuals.emplace_back(point.rank, residual);
    if (in_head && std::abs(residual) > threshold)
      ++report.head_size;
    else
      in_head = false;
  }
  return report;
}

inline std::string powerlaw_csv_header() { return "journal,n_nonzero,slope,intercept,r_squared,head_size"; }

/// One row of the batch table: journal id, n_nonzero, slope, intercept, r^2.
inline std::string to_csv_row(const std::string& id, const RankSizeSeries& s, const PowerlawFit& f,
                              const HeadReport& head) {
  return text::quote_if_needed(id, ',') + ',' + std::to_string(s.n_nonzero) + ',' + text::format_number(f.slope) + ',' +
         text::format_number(f.intercept) + ',' + (f.degenerate ? std::string("NA") : text::format_number(f.r_squared)) +
         ',' + std::to_string(head.head_size);
}

/// Log-log scatter of a rank-size series with the fitted line; head ranks are
/// drawn in a second colour.
inline std::string powerlaw_svg(const std::string& title, const RankSizeSeries& s, const PowerlawFit& f,
                                const HeadReport& head) {
  constexpr double width = 640, height = 480, margin = 60;
  const double ln_base = std::log(f.base);
  auto lx = [&](double rank) { return std::log(rank) / ln_base; };
  auto ly = [&](double count) { return std::log(count) / ln_base; };
  const double x_max = std::max(lx(static_cast<double>(s.pairs.back().rank)), 1e-9);
  double y_min = ly(s.pairs.back().count), y_max = ly(s.pairs.front().count);
  y_min = std::min(y_min, f.predict_log(s.pairs.back().rank));
  y_max = std::max(y_max, f.predict_log(1));
  if (y_max - y_min < 1e-9) y_max = y_min + 1.0;
  auto px = [&](double x) { return margin + x / x_max * (width - 2 * margin); };
  auto py = [&](double y) { return height - margin - (y - y_min) / (y_max - y_min) * (height - 2 * margin); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         text::xml_escape(title) + "</text>\n";
  out += "<line x1=\"60\" y1=\"420\" x2=\"580\" y2=\"420\" stroke=\"black\"/>\n";
  out += "<line x1=\"60\" y1=\"60\" x2=\"60\" y2=\"420\" stroke=\"black\"/>\n";
  out += "<text x=\"320\" y=\"460\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log rank</text>\n";
  out += "<text x=\"20\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 20 240)\">log count</text>\n";
  for (std::size_t k = 0; k < s.pairs.size(); ++k) {
    const auto& point = s.pairs[k];
    const bool hooked = k < head.head_size;
    out += "<circle cx=\"" + text::fixed(px(lx(static_cast<double>(point.rank))), 2) + "\" cy=\"" +
           text::fixed(py(ly(point.count)), 2) + "\" r=\"3\" fill=\"" + (hooked ? "#d62728" : "#1f77b4") + "\"/>\n";
  }
  out += "<line x1=\"" + text::fixed(px(0.0), 2) + "\" y1=\"" + text::fixed(py(f.predict_log(1)), 2) + "\" x2=\"" +
         text::fixed(px(x_max), 2) + "\" y2=\"" + text::fixed(py(f.predict_log(s.pairs.back().rank)), 2) +
         "\" stroke=\"black\" stroke-dasharray=\"4 2\"/>\n";
  out += "<text x=\"570\" y=\"80\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">log(y) = " +
         text::fixed(f.slope, 2) + " log(x) + " + text::fixed(f.intercept, 2) +
         (f.degenerate ? std::string(", r2 NA") : ", r2 = " + text::fixed(f.r_squared, 3)) + ", head = " +
         std::to_string(head.head_size) + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace citemap
