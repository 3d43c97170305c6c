#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "citemap/error.hpp"
#include "citemap/text.hpp"
#include "json.hpp"

namespace citemap {

enum class DistributionLabel { compound_poisson_contagious, lognormal_like, indeterminate };

inline std::string to_string(DistributionLabel label) {
  switch (label) {
    case DistributionLabel::compound_poisson_contagious: return "compound_poisson_contagious";
    case DistributionLabel::lognormal_like: return "lognormal_like";
    case DistributionLabel::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

enum class VarianceDenominator { sample, population };

struct ClassifyThresholds {
  double vmr_high = 10.0;
  double vmr_low = 1.0;
};

struct DistributionSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> vmr;             // absent when mean == 0
  std::optional<double> geometric_mean;  // absent unless every value > 0
  double skewness = 0.0;                 // adjusted Fisher-Pearson; 0 for n < 3 or zero variance
  DistributionLabel label = DistributionLabel::indeterminate;
};

/// Label from the variance-to-mean ratio alone.
inline DistributionLabel classify(const DistributionSummary& s, const ClassifyThresholds& t = {}) {
  if (!s.vmr) return DistributionLabel::indeterminate;
  if (*s.vmr > t.vmr_high) return DistributionLabel::compound_poisson_contagious;
  if (*s.vmr < t.vmr_low) return DistributionLabel::lognormal_like;
  return DistributionLabel::indeterminate;
}

inline DistributionSummary summarize(std::span<const double> v,
                                     VarianceDenominator denominator = VarianceDenominator::sample,
                                     const ClassifyThresholds& thresholds = {}) {
  if (v.empty()) throw EmptyInputError("cannot summarize an empty vector");
  DistributionSummary s;
  s.n = v.size();
  const double n = static_cast<double>(s.n);

  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / n;

  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    const double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double dof = denominator == VarianceDenominator::sample ? n - 1.0 : n;
  s.variance = dof > 0.0 ? m2 / dof : 0.0;

  if (s.mean > 0.0) s.vmr = s.variance / s.mean;

  if (std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; })) {
    double log_sum = 0.0;
    for (double x : v) log_sum += std::log(x);
    s.geometric_mean = std::exp(log_sum / n);
  }

  if (s.n >= 3 && m2 > 0.0) {
    const double g1 = (m3 / n) / std::pow(m2 / n, 1.5);
    s.skewness = std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
  }

  s.label = classify(s, thresholds);
  return s;
}

struct Histogram {
  std::array<double, 11> bin_edges{};
  std::array<std::size_t, 10> counts{};
  bool degenerate = false;  // max == min: everything sits in bin 0
};

/// Ten equal-width bins over [min, max]. A value equal to an interior edge
/// belongs to the higher bin; the maximum belongs to the last bin.
inline Histogram decile_histogram(std::span<const double> v) {
  if (v.empty()) throw EmptyInputError("cannot bin an empty vector");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  Histogram h;
  if (!(hi > lo)) {
    h.bin_edges.fill(lo);
    h.counts[0] = v.size();
    h.degenerate = true;
    return h;
  }
  const double width = (hi - lo) / 10.0;
  for (std::size_t k = 0; k < 10; ++k) h.bin_edges[k] = lo + static_cast<double>(k) * width;
  h.bin_edges[10] = hi;

  for (double x : v) {
    auto bin = static_cast<std::size_t>(std::clamp(std::floor((x - lo) / width), 0.0, 9.0));
    // The division can land a hair on either side of an edge.
    while (bin < 9 && x >= h.bin_edges[bin + 1]) ++bin;
    while (bin > 0 && x < h.bin_edges[bin]) --bin;
    ++h.counts[bin];
  }
  return h;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const DistributionSummary& s) {
  nlohmann::json j;
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["vmr"] = s.vmr ? nlohmann::json(*s.vmr) : nlohmann::json(nullptr);
  j["geometric_mean"] = s.geometric_mean ? nlohmann::json(*s.geometric_mean) : nlohmann::json(nullptr);
  j["skewness"] = s.skewness;
  j["label"] = to_string(s.label);
  return j;
}

inline nlohmann::json to_json(const Histogram& h) {
  return {{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"degenerate", h.degenerate}};
}

inline std::string summary_csv_header() { return "n,mean,variance,vmr,geometric_mean,skewness,label"; }

inline std::string to_csv_row(const DistributionSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? text::format_number(*v) : std::string("NA"); };
  return std::to_string(s.n) + ',' + text::format_number(s.mean) + ',' + text::format_number(s.variance) + ',' +
         opt(s.vmr) + ',' + opt(s.geometric_mean) + ',' + text::format_number(s.skewness) + ',' + to_string(s.label);
}

inline std::string histogram_csv_header() {
  std::string h = "degenerate";
  for (int k = 0; k <= 10; ++k) h += ",edge" + std::to_string(k);
  for (int k = 0; k < 10; ++k) h += ",count" + std::to_string(k);
  return h;
}

inline std::string to_csv_row(const Histogram& h) {
  std::string row = h.degenerate ? "1" : "0";
  for (double e : h.bin_edges) row += ',' + text::format_number(e);
  for (auto c : h.counts) row += ',' + std::to_string(c);
  return row;
}

}  // namespace citemap
