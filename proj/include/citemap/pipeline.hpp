#pragma once

// Report-producing commands that chain the library modules. The CLI in
// tools/ is a thin wrapper around these functions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "citemap/citation_matrix.hpp"
#include "citemap/factors.hpp"
#include "citemap/layout.hpp"
#include "citemap/powerlaw.hpp"
#include "citemap/similarity.hpp"
#include "citemap/stats.hpp"
#include "citemap/synthetic.hpp"
#include "citemap/text.hpp"
#include "json.hpp"

namespace citemap {

enum class Transform { none, log, arcsinh };

inline std::string to_string(Transform t) {
  switch (t) {
    case Transform::none: return "none";
    case Transform::log: return "log";
    case Transform::arcsinh: return "arcsinh";
  }
  return "none";
}

inline Transform transform_from_string(const std::string& s) {
  if (s == "none") return Transform::none;
  if (s == "log") return Transform::log;
  if (s == "arcsinh" || s == "asinh") return Transform::arcsinh;
  throw ParameterError("unknown transform '" + s + "' (expected none, log or arcsinh)");
}

struct PipelineConfig {
  std::filesystem::path input;
  std::optional<MatrixFormat> format;  // default: from the file extension
  std::filesystem::path labels;        // optional id,name,class_tag file
  Transform transform = Transform::log;
  double log_base = 10.0;
  double offset = 1.0;
  Measure measure = Measure::pearson;
  Axis axis = Axis::cited;
  std::optional<std::size_t> fixed_factors;  // unset: Kaiser criterion
  bool rotate = true;
  double suppress = 0.1;
  double threshold = 0.0;  // similarity graph edge threshold
  double powerlaw_base = 10.0;
  std::size_t exclude_head = 0;
  double head_threshold = 0.1;
  std::uint64_t seed = 1;
  double grad_tol = 1e-12;
  int max_outer = 100000;
  std::filesystem::path out_dir = "citemap-out";
};

/// Applies "key = value" lines ('#' starts a comment). Keys match the long CLI
/// flag names without the leading dashes.
inline void apply_config_text(PipelineConfig& c, const std::string& contents) {
  std::size_t line_no = 0;
  for (const auto& raw : detail::lines_of(contents)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no, 1);
    const std::string key{text::trim(line.substr(0, eq))};
    const std::string value{text::trim(line.substr(eq + 1))};
    auto number = [&]() {
      auto v = text::parse_number(value);
      if (!v) throw ParseError("'" + key + "' needs a number, got '" + value + "'", line_no, eq + 2);
      return *v;
    };
    auto boolean = [&]() {
      if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
      if (value == "false" || value == "0" || value == "no" || value == "off") return false;
      throw ParseError("'" + key + "' needs true/false, got '" + value + "'", line_no, eq + 2);
    };
    if (key == "input") c.input = value;
    else if (key == "format") c.format = format_from_string(value);
    else if (key == "labels") c.labels = value;
    else if (key == "transform") c.transform = transform_from_string(value);
    else if (key == "log-base") c.log_base = number();
    else if (key == "offset") c.offset = number();
    else if (key == "measure") c.measure = measure_from_string(value);
    else if (key == "axis") c.axis = value == "citing" ? Axis::citing : Axis::cited;
    else if (key == "factors") {
      if (value == "kaiser") c.fixed_factors.reset();
      else c.fixed_factors = static_cast<std::size_t>(number());
    } else if (key == "rotate") c.rotate = boolean();
    else if (key == "no-rotate") c.rotate = !boolean();
    else if (key == "suppress") c.suppress = number();
    else if (key == "threshold") c.threshold = number();
    else if (key == "powerlaw-base") c.powerlaw_base = number();
    else if (key == "exclude-head") c.exclude_head = static_cast<std::size_t>(number());
    else if (key == "head-threshold") c.head_threshold = number();
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(number());
    else if (key == "grad-tol") c.grad_tol = number();
    else if (key == "max-outer") c.max_outer = static_cast<int>(number());
    else if (key == "out-dir") c.out_dir = value;
    else throw ParseError("unknown config key '" + key + "'", line_no, 1);
  }
}

struct Report {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  nlohmann::json summary;
  std::string text;  // human-readable output
};

namespace detail {

inline void emit(Report& r, const std::filesystem::path& path, const std::string& contents) {
  write_file(path, contents);
  r.files.push_back(path);
}

inline std::filesystem::path prepare_out_dir(const PipelineConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + c.out_dir.string() + "': " + ec.message());
  return c.out_dir;
}

inline std::string file_stem_for(const std::string& id) {
  std::string s;
  for (char ch : id) s += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return s.empty() ? std::string("journal") : s;
}

}  // namespace detail

inline CitationMatrix load_input(const PipelineConfig& c) {
  if (c.input.empty()) throw ParameterError("no input matrix given (use --input)");
  if (!std::filesystem::exists(c.input)) throw IoError("input file '" + c.input.string() + "' does not exist");
  auto m = load_matrix(c.input, c.format.value_or(format_from_path(c.input)));
  if (!c.labels.empty()) m = attach_labels(m, c.labels);
  return m;
}

inline CitationMatrix apply_transform(const CitationMatrix& m, const PipelineConfig& c) {
  switch (c.transform) {
    case Transform::none: return m;
    case Transform::log: return log_transform(m, {c.log_base, c.offset});
    case Transform::arcsinh: return arcsinh_transform(m);
  }
  return m;
}

// Variants analysed by classify and map: the raw matrix, plus the transformed
// one when a transform is configured.
inline std::vector<std::pair<std::string, CitationMatrix>> analysis_variants(const CitationMatrix& m,
                                                                             const PipelineConfig& c) {
  std::vector<std::pair<std::string, CitationMatrix>> v{{"raw", m}};
  if (c.transform != Transform::none) v.emplace_back(to_string(c.transform), apply_transform(m, c));
  return v;
}

// ---------------------------------------------------------------------------

/// Per-journal distribution summaries and decile histograms, raw and transformed.
inline Report cmd_stats(const PipelineConfig& c, const CitationMatrix& m) {
  Report r;
  const auto dir = detail::prepare_out_dir(c);
  const auto variants = analysis_variants(m, c);
  std::string summaries = "journal,variant," + summary_csv_header() + '\n';
  std::string histograms = "journal,variant," + histogram_csv_header() + '\n';
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    nlohmann::json entry{{"journal", m.label(i).id}};
    for (const auto& [name, matrix] : variants) {
      const auto profile = matrix.cited_profile(i);
      const auto s = summarize(profile);
      const auto h = decile_histogram(profile);
      const auto id = text::quote_if_needed(m.label(i).id, ',');
      summaries += id + ',' + name + ',' + to_csv_row(s) + '\n';
      histograms += id + ',' + name + ',' + to_csv_row(h) + '\n';
      entry[name] = {{"summary", to_json(s)}, {"histogram", to_json(h)}};
      if (h.degenerate) r.warnings.push_back("journal '" + m.label(i).id + "' (" + name + "): constant profile, degenerate histogram");
    }
    doc.push_back(std::move(entry));
  }
  detail::emit(r, dir / "stats.csv", summaries);
  detail::emit(r, dir / "histograms.csv", histograms);
  detail::emit(r, dir / "stats.json", doc.dump(2) + '\n');
  r.summary = doc;
  return r;
}

inline std::string scree_svg(const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  constexpr double width = 640, height = 480, margin = 60;
  std::size_t count = 1;
  double top = 1.0;
  for (const auto& [name, values] : series) {
    count = std::max(count, values.size());
    for (double v : values) top = std::max(top, v);
  }
  auto px = [&](std::size_t k) {
    return margin + (count > 1 ? static_cast<double>(k) / static_cast<double>(count - 1) : 0.5) * (width - 2 * margin);
  };
  auto py = [&](double v) { return height - margin - std::max(v, 0.0) / top * (height - 2 * margin); };
  const std::array<const char*, 4> colours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out += "<line x1=\"60\" y1=\"420\" x2=\"580\" y2=\"420\" stroke=\"black\"/>\n";
  out += "<line x1=\"60\" y1=\"60\" x2=\"60\" y2=\"420\" stroke=\"black\"/>\n";
  out += "<line x1=\"60\" y1=\"" + text::fixed(py(1.0), 2) + "\" x2=\"580\" y2=\"" + text::fixed(py(1.0), 2) +
         "\" stroke=\"#aaaaaa\" stroke-dasharray=\"4 2\"/>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& [name, values] = series[s];
    const char* colour = colours[s % colours.size()];
    std::string points;
    for (std::size_t k = 0; k < values.size(); ++k)
      points += text::fixed(px(k), 2) + ',' + text::fixed(py(values[k]), 2) + ' ';
    out += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + colour + "\"/>\n";
    out += "<text x=\"570\" y=\"" + std::to_string(80 + 18 * s) + "\" text-anchor=\"end\" font-family=\"sans-serif\" " +
           "font-size=\"12\" fill=\"" + colour + "\">" + text::xml_escape(name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

/// Correlation matrix, scree, Kaiser count and rotated loading table for the
/// raw matrix and (when configured) the transformed one.
inline Report cmd_classify(const PipelineConfig& c, const CitationMatrix& m) {
  Report r;
  const auto dir = detail::prepare_out_dir(c);
  nlohmann::json variants_json = nlohmann::json::array();
  std::vector<std::pair<std::string, std::vector<double>>> scree_series;
  for (const auto& [name, matrix] : analysis_variants(m, c)) {
    const auto sim = similarity_matrix(matrix, c.measure, c.axis);
    detail::emit(r, dir / ("correlation_" + name + ".csv"), format_similarity_csv(sim));
    const auto eig = eigendecompose(sim.values);
    const auto pairs = scree(eig);
    std::string scree_csv = "index,eigenvalue\n";
    for (const auto& [k, v] : pairs) scree_csv += std::to_string(k) + ',' + text::format_number(v) + '\n';
    detail::emit(r, dir / ("scree_" + name + ".csv"), scree_csv);
    scree_series.emplace_back(name, eig.eigenvalues);

    const std::size_t kaiser = kaiser_count(eig.eigenvalues);
    const bool forced = c.fixed_factors.has_value();
    const std::size_t k = forced ? *c.fixed_factors : kaiser;
    nlohmann::json v{{"variant", name},
                     {"measure", to_string(c.measure)},
                     {"kaiser_count", kaiser},
                     {"factors", k},
                     {"forced", forced},
                     {"eigenvalues", eig.eigenvalues}};
    std::string table = "Variant: " + name + " (" + to_string(c.measure) + ")\nKaiser criterion (eigenvalue > 1): " +
                        std::to_string(kaiser) + " factor(s)\n";
    if (k == 0) {
      table += "No factors retained: no eigenvalue exceeds 1.\n";
      v["explained_total"] = 0.0;
    } else {
      auto loadings = extract_loadings(sim.labels, sim.values, k, eig);
      if (c.rotate && k >= 2) {
        loadings = varimax(loadings, {});
        if (!loadings.converged)
          r.warnings.push_back(name + ": varimax did not converge in " + std::to_string(loadings.iterations) + " iterations");
      }
      if (forced)
        table += "Note: factor count forced to " + std::to_string(k) + " (Kaiser criterion gives " +
                 std::to_string(kaiser) + ").\n";
      table += std::string(loadings.rotated ? "Rotated" : "Unrotated") + " component matrix\n";
      LoadingTableOptions topts;
      topts.suppress_below = c.suppress;
      table += suppress_small(loadings, topts);
      table += "Extraction: principal components.";
      if (loadings.rotated)
        table += " Rotation: varimax with Kaiser normalization, " + std::string(loadings.converged ? "converged" : "stopped") +
                 " after " + std::to_string(loadings.iterations) + " iterations.";
      table += "\nExplained variance: " + text::fixed(100.0 * loadings.total_explained(), 1) + "%\n";
      detail::emit(r, dir / ("loadings_" + name + ".csv"), format_loadings_csv(loadings));
      v["explained_variance"] = loadings.explained_variance;
      v["explained_total"] = loadings.total_explained();
      v["iterations"] = loadings.iterations;
      v["converged"] = loadings.converged;
    }
    detail::emit(r, dir / ("loadings_" + name + ".txt"), table);
    variants_json.push_back(std::move(v));
  }
  detail::emit(r, dir / "scree.svg", scree_svg(scree_series));
  r.summary = {{"variants", variants_json}};
  detail::emit(r, dir / "classify.json", r.summary.dump(2) + '\n');
  return r;
}

/// Rank-size powerlaw fit of every cited-profile of the raw counts.
inline Report cmd_powerlaw(const PipelineConfig& c, const CitationMatrix& m) {
  Report r;
  const auto dir = detail::prepare_out_dir(c);
  std::filesystem::create_directories(dir / "powerlaw");
  std::string csv = powerlaw_csv_header() + '\n';
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& id = m.label(i).id;
    const auto profile = m.cited_profile(i);
    if (std::none_of(profile.begin(), profile.end(), [](double v) { return v > 0.0; })) {
      r.warnings.push_back("journal '" + id + "': no citations, skipped");
      continue;
    }
    const auto series = rank_size(profile);
    try {
      const auto fit = fit_loglog(series, c.powerlaw_base, c.exclude_head);
      const auto head = head_deviation(series, fit, c.head_threshold);
      csv += to_csv_row(id, series, fit, head) + '\n';
      rows.push_back({{"journal", id},
                      {"n_nonzero", series.n_nonzero},
                      {"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"r_squared", fit.degenerate ? nlohmann::json(nullptr) : nlohmann::json(fit.r_squared)},
                      {"head_size", head.head_size}});
      detail::emit(r, dir / "powerlaw" / (detail::file_stem_for(id) + ".svg"), powerlaw_svg(id, series, fit, head));
    } catch (const InsufficientDataError& e) {
      csv += text::quote_if_needed(id, ',') + ',' + std::to_string(series.n_nonzero) + ",NA,NA,NA,NA\n";
      rows.push_back({{"journal", id}, {"n_nonzero", series.n_nonzero}, {"error", e.what()}});
      r.warnings.push_back("journal '" + id + "': " + e.what());
    }
  }
  detail::emit(r, dir / "powerlaw.csv", csv);
  r.summary = rows;
  return r;
}

/// Thresholded similarity graph laid out by Kamada-Kawai and exported as SVG,
/// Pajek and DOT.
inline Report cmd_map(const PipelineConfig& c, const CitationMatrix& m) {
  Report r;
  const auto dir = detail::prepare_out_dir(c);
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& [name, matrix] : analysis_variants(m, c)) {
    const auto sim = similarity_matrix(matrix, c.measure, c.axis);
    const auto graph = threshold_graph(sim, c.threshold);
    LayoutOptions lopts;
    lopts.seed = c.seed;
    lopts.grad_tol = c.grad_tol;
    lopts.max_outer = c.max_outer;
    const auto laid = layout_graph(graph, lopts);
    for (auto node : laid.isolated)
      r.warnings.push_back(name + ": journal '" + graph.nodes[node].id + "' has no edge at threshold " +
                           text::format_number(c.threshold) + "; placed on the packing grid");
    if (!laid.result.converged) r.warnings.push_back(name + ": layout stopped before reaching the gradient tolerance");
    detail::emit(r, dir / ("map_" + name + ".svg"), format_layout(laid.result.coordinates, graph, LayoutFormat::svg));
    detail::emit(r, dir / ("map_" + name + ".net"), format_layout(laid.result.coordinates, graph, LayoutFormat::pajek_net));
    detail::emit(r, dir / ("map_" + name + ".dot"), format_layout(laid.result.coordinates, graph, LayoutFormat::dot));
    maps.push_back({{"variant", name},
                    {"edges", graph.edges.size()},
                    {"components", laid.components},
                    {"energy", laid.result.final_energy},
                    {"relaxations", laid.result.iterations},
                    {"converged", laid.result.converged}});
  }
  r.summary = {{"maps", maps}};
  return r;
}

struct LogEffect {
  double pearson_raw, cosine_raw, pearson_log, cosine_log;
};

/// The two-variable example: v1 = 1, 10, 100, 1000 and v2 with its top two
/// values swapped. The logged series are taken as 1, 2, 3, 4 and 1, 2, 4, 3,
/// i.e. log10(v) + 1.
inline LogEffect log_effect_values() {
  const std::vector<double> v1{1, 10, 100, 1000}, v2{1, 10, 1000, 100};
  std::vector<double> l1, l2;
  for (double x : v1) l1.push_back(std::log10(x) + 1.0);
  for (double x : v2) l2.push_back(std::log10(x) + 1.0);
  return {pearson(v1, v2), cosine(v1, v2), pearson(l1, l2), cosine(l1, l2)};
}

inline Report cmd_table5() {
  const auto t = log_effect_values();
  auto signed3 = [](double v) { return (v >= 0.0 ? "+" : "") + text::fixed(v, 3); };
  Report r;
  r.text = "              v1 vs v2   log(v1) vs log(v2)\n";
  r.text += "Pearson's r   " + signed3(t.pearson_raw) + "     " + signed3(t.pearson_log) + "\n";
  r.text += "Cosine        " + signed3(t.cosine_raw) + "     " + signed3(t.cosine_log) + "\n";
  r.summary = {{"pearson_raw", t.pearson_raw}, {"cosine_raw", t.cosine_raw}, {"pearson_log", t.pearson_log}, {"cosine_log", t.cosine_log}};
  return r;
}

/// Writes the seeded 21-journal demo matrix and its label file.
inline Report cmd_demo(const PipelineConfig& c) {
  Report r;
  const auto dir = detail::prepare_out_dir(c);
  const auto m = synthetic::demo_matrix(c.seed);
  detail::emit(r, dir / "demo.csv", format_matrix(m, MatrixFormat::csv));
  std::string labels = "id,name,class_tag\n";
  for (const auto& l : m.labels())
    labels += text::quote_if_needed(l.id, ',') + ',' + text::quote_if_needed(l.name, ',') + ',' +
              text::quote_if_needed(l.class_tag.value_or(""), ',') + '\n';
  detail::emit(r, dir / "demo_labels.csv", labels);
  return r;
}

}  // namespace citemap
