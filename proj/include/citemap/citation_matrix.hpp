#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citemap/dense.hpp"
#include "citemap/error.hpp"
#include "citemap/text.hpp"

namespace citemap {

struct JournalLabel {
  std::string id;    // short key, e.g. an ISI abbreviation
  std::string name;  // display string
  std::optional<std::string> class_tag;

  friend bool operator==(const JournalLabel&, const JournalLabel&) = default;
};

inline void validate_labels(const std::vector<JournalLabel>& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (label.id.empty()) throw ParameterError("journal id must not be empty");
    if (!seen.insert(label.id).second) throw DuplicateLabelError("duplicate journal id '" + label.id + "'");
  }
}

/// Square journal-to-journal citation matrix.
///
/// cell(i, j) holds the citations FROM citing journal j TO cited journal i, so
/// row i is the cited-profile of journal i. Raw matrices hold non-negative
/// counts; transformed matrices may hold any finite value. Instances are
/// immutable: transforms return new matrices.
class CitationMatrix {
 public:
  CitationMatrix() = default;

  CitationMatrix(std::vector<JournalLabel> labels, Matrix cells)
      : labels_(std::move(labels)), cells_(std::move(cells)) {
    if (!cells_.square()) throw DimensionError("citation matrix must be square");
    if (cells_.rows() != labels_.size())
      throw DimensionError("label count " + std::to_string(labels_.size()) + " does not match matrix order " +
                           std::to_string(cells_.rows()));
    validate_labels(labels_);
    for (double v : cells_.data())
      if (!std::isfinite(v)) throw DomainError("citation matrix cells must be finite");
  }

  // Convenience: labels made of bare ids.
  static CitationMatrix from_ids(const std::vector<std::string>& ids, Matrix cells) {
    std::vector<JournalLabel> labels;
    labels.reserve(ids.size());
    for (const auto& id : ids) labels.push_back({id, id, std::nullopt});
    return {std::move(labels), std::move(cells)};
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<JournalLabel>& labels() const noexcept { return labels_; }
  const JournalLabel& label(std::size_t i) const { return labels_.at(i); }
  const Matrix& cells() const noexcept { return cells_; }

  double operator()(std::size_t cited, std::size_t citing) const { return cells_(cited, citing); }

  std::optional<std::size_t> index_of(const std::string& id) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i].id == id) return i;
    return std::nullopt;
  }

  bool has_negative() const {
    for (double v : cells_.data())
      if (v < 0.0) return true;
    return false;
  }

  bool has_zero() const {
    for (double v : cells_.data())
      if (v == 0.0) return true;
    return false;
  }

  /// Citations received by journal i from every journal in the set, self-citation
  /// included on the diagonal.
  std::vector<double> cited_profile(std::size_t i) const {
    if (i >= size()) throw IndexError("journal index " + std::to_string(i) + " out of range [0, " +
                                      std::to_string(size()) + ")");
    auto r = cells_.row(i);
    return {r.begin(), r.end()};
  }

  /// Citations given by journal j to every journal in the set.
  std::vector<double> citing_profile(std::size_t j) const {
    if (j >= size()) throw IndexError("journal index " + std::to_string(j) + " out of range [0, " +
                                      std::to_string(size()) + ")");
    return cells_.column(j);
  }

  CitationMatrix with_cells(Matrix cells) const { return {labels_, std::move(cells)}; }
  CitationMatrix with_labels(std::vector<JournalLabel> labels) const { return {std::move(labels), cells_}; }

  friend bool operator==(const CitationMatrix&, const CitationMatrix&) = default;

 private:
  std::vector<JournalLabel> labels_;
  Matrix cells_;
};

inline std::vector<double> cited_profile(const CitationMatrix& m, std::size_t i) { return m.cited_profile(i); }

// ---------------------------------------------------------------------------
// Transforms

struct LogOptions {
  double base = 10.0;
  // Unset: 1 when the matrix contains a zero, else 0.
  std::optional<double> offset;
};

/// cell' = log_base(cell + offset), applied to every cell.
inline CitationMatrix log_transform(const CitationMatrix& m, const LogOptions& opts = {}) {
  if (!(opts.base > 1.0) || !std::isfinite(opts.base)) throw ParameterError("log base must be a finite real > 1");
  const double offset = opts.offset.value_or(m.has_zero() ? 1.0 : 0.0);
  if (!(offset >= 0.0)) throw ParameterError("log offset must be >= 0");
  const double ln_base = std::log(opts.base);
  Matrix out(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double shifted = m(i, j) + offset;
      if (!(shifted > 0.0))
        throw DomainError("log undefined for cell (" + m.label(i).id + ", " + m.label(j).id + ") + offset = " +
                          text::format_number(shifted));
      out(i, j) = std::log(shifted) / ln_base;
    }
  return m.with_cells(std::move(out));
}

/// Inverse of log_transform: base^cell - offset.
inline CitationMatrix exp_transform(const CitationMatrix& m, double base, double offset) {
  Matrix out(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = std::pow(base, m(i, j)) - offset;
  return m.with_cells(std::move(out));
}

inline CitationMatrix arcsinh_transform(const CitationMatrix& m) {
  Matrix out(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = std::asinh(m(i, j));
  return m.with_cells(std::move(out));
}

// ---------------------------------------------------------------------------
// File formats

enum class MatrixFormat { csv, tsv, pajek_net };

inline MatrixFormat format_from_string(const std::string& s) {
  if (s == "csv") return MatrixFormat::csv;
  if (s == "tsv") return MatrixFormat::tsv;
  if (s == "pajek" || s == "net" || s == "pajek_net") return MatrixFormat::pajek_net;
  throw ParameterError("unknown matrix format '" + s + "' (expected csv, tsv or pajek_net)");
}

inline MatrixFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".tsv" || ext == ".tab") return MatrixFormat::tsv;
  if (ext == ".net") return MatrixFormat::pajek_net;
  return MatrixFormat::csv;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

inline std::vector<std::string> lines_of(const std::string& contents) {
  std::vector<std::string> lines;
  std::istringstream in(contents);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

inline CitationMatrix parse_delimited(const std::string& contents, char sep) {
  std::vector<std::pair<std::size_t, std::string>> lines;  // (1-based line number, text)
  std::size_t number = 0;
  for (auto& line : lines_of(contents)) {
    ++number;
    if (!text::trim(line).empty()) lines.emplace_back(number, std::move(line));
  }
  if (lines.empty()) throw ParseError("empty matrix file", 1, 1);

  auto header = text::split_delimited(lines[0].second, sep);
  std::vector<std::string> ids;
  for (std::size_t k = 1; k < header.size(); ++k) ids.emplace_back(text::trim(header[k]));
  const std::size_t n = ids.size();
  if (lines.size() - 1 != n)
    throw DimensionError("header names " + std::to_string(n) + " citing journals but body has " +
                         std::to_string(lines.size() - 1) + " rows");

  std::vector<JournalLabel> labels;
  for (std::size_t k = 0; k < n; ++k) {
    if (ids[k].empty()) throw ParseError("empty journal id in header", lines[0].first, k + 2);
    labels.push_back({ids[k], ids[k], std::nullopt});
  }
  validate_labels(labels);

  Matrix cells(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [line_no, line] = lines[i + 1];
    auto fields = text::split_delimited(line, sep);
    if (fields.size() != n + 1)
      throw DimensionError("row " + std::to_string(line_no) + " has " + std::to_string(fields.size() - 1) +
                           " cells, expected " + std::to_string(n));
    const std::string row_id{text::trim(fields[0])};
    if (row_id != ids[i])
      throw ParseError("row id '" + row_id + "' does not match header id '" + ids[i] + "'", line_no, 1);
    for (std::size_t j = 0; j < n; ++j) {
      auto value = text::parse_number(fields[j + 1]);
      if (!value || !std::isfinite(*value)) throw ParseError("non-numeric cell '" + fields[j + 1] + "'", line_no, j + 2);
      if (*value < 0.0) throw ParseError("negative cell " + fields[j + 1], line_no, j + 2);
      cells(i, j) = *value;
    }
  }
  return {std::move(labels), std::move(cells)};
}

inline std::string format_delimited(const CitationMatrix& m, char sep) {
  std::string out;
  for (const auto& label : m.labels()) {
    out += sep;
    out += text::quote_if_needed(label.id, sep);
  }
  out += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += text::quote_if_needed(m.label(i).id, sep);
    for (std::size_t j = 0; j < m.size(); ++j) {
      out += sep;
      out += text::format_number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

// Splits a Pajek line into tokens; "quoted names" stay one token (quotes removed).
inline std::vector<std::string> pajek_tokens(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    } else if (line[i] == '"') {
      const auto close = line.find('"', i + 1);
      const auto end = close == std::string_view::npos ? line.size() : close;
      tokens.emplace_back(line.substr(i + 1, end - i - 1));
      i = end + 1;
    } else {
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      tokens.emplace_back(line.substr(i, j - i));
      i = j;
    }
  }
  return tokens;
}

inline std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

/// Parsed Pajek network: vertex names, optional coordinates, and directed or
/// undirected weighted links (0-based indices).
struct PajekNetwork {
  struct Link {
    std::size_t from;
    std::size_t to;
    double weight;
    bool directed;
  };
  std::vector<std::string> names;
  std::vector<std::optional<std::pair<double, double>>> coordinates;
  std::vector<Link> links;
};

inline PajekNetwork parse_pajek(const std::string& contents) {
  PajekNetwork net;
  enum class Section { none, vertices, arcs, edges } section = Section::none;
  std::size_t line_no = 0;
  std::size_t declared = 0;
  for (const auto& raw : detail::lines_of(contents)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '%') continue;
    auto tokens = detail::pajek_tokens(line);
    if (tokens[0].front() == '*') {
      const auto keyword = detail::lowercase(tokens[0]);
      if (keyword == "*vertices") {
        if (tokens.size() < 2) throw ParseError("*Vertices needs a count", line_no, 1);
        auto count = text::parse_number(tokens[1]);
        if (!count || *count < 0 || *count != std::floor(*count)) throw ParseError("bad vertex count", line_no, 2);
        declared = static_cast<std::size_t>(*count);
        net.names.assign(declared, std::string{});
        net.coordinates.assign(declared, std::nullopt);
        for (std::size_t k = 0; k < declared; ++k) net.names[k] = std::to_string(k + 1);
        section = Section::vertices;
      } else if (keyword == "*arcs") {
        section = Section::arcs;
      } else if (keyword == "*edges") {
        section = Section::edges;
      } else {
        throw ParseError("unsupported Pajek section " + tokens[0], line_no, 1);
      }
      continue;
    }
    auto index_at = [&](std::size_t k) {
      auto v = text::parse_number(tokens[k]);
      if (!v || *v < 1 || *v > static_cast<double>(declared) || *v != std::floor(*v))
        throw ParseError("vertex index '" + tokens[k] + "' out of range", line_no, k + 1);
      return static_cast<std::size_t>(*v) - 1;
    };
    switch (section) {
      case Section::none:
        throw ParseError("data before *Vertices", line_no, 1);
      case Section::vertices: {
        const auto v = index_at(0);
        if (tokens.size() >= 2) net.names[v] = tokens[1];
        if (tokens.size() >= 4) {
          auto x = text::parse_number(tokens[2]);
          auto y = text::parse_number(tokens[3]);
          if (!x || !y) throw ParseError("bad vertex coordinate", line_no, 3);
          net.coordinates[v] = std::pair{*x, *y};
        }
        break;
      }
      case Section::arcs:
      case Section::edges: {
        if (tokens.size() < 2) throw ParseError("link needs two vertex indices", line_no, 1);
        const auto from = index_at(0);
        const auto to = index_at(1);
        double weight = 1.0;
        if (tokens.size() >= 3) {
          auto w = text::parse_number(tokens[2]);
          if (!w || !std::isfinite(*w)) throw ParseError("non-numeric weight '" + tokens[2] + "'", line_no, 3);
          weight = *w;
        }
        net.links.push_back({from, to, weight, section == Section::arcs});
        break;
      }
    }
  }
  return net;
}

inline CitationMatrix parse_pajek_matrix(const std::string& contents) {
  auto net = parse_pajek(contents);
  std::vector<JournalLabel> labels;
  for (const auto& name : net.names) labels.push_back({name, name, std::nullopt});
  validate_labels(labels);
  const std::size_t n = labels.size();
  Matrix cells(n, n);
  for (const auto& link : net.links) {
    if (link.weight < 0.0) throw ParseError("negative arc weight", link.from + 1, link.to + 1);
    // An arc "j i w" is w citations from citing j to cited i.
    cells(link.to, link.from) += link.weight;
    if (!link.directed && link.to != link.from) cells(link.from, link.to) += link.weight;
  }
  return {std::move(labels), std::move(cells)};
}

inline std::string format_pajek_matrix(const CitationMatrix& m) {
  std::string out = "*Vertices " + std::to_string(m.size()) + "\n";
  for (std::size_t i = 0; i < m.size(); ++i) out += std::to_string(i + 1) + " \"" + m.label(i).id + "\"\n";
  out += "*Arcs\n";
  for (std::size_t citing = 0; citing < m.size(); ++citing)
    for (std::size_t cited = 0; cited < m.size(); ++cited) {
      const double w = m(cited, citing);
      if (w == 0.0) continue;
      out += std::to_string(citing + 1) + ' ' + std::to_string(cited + 1) + ' ' + text::format_number(w) + '\n';
    }
  return out;
}

inline CitationMatrix parse_matrix(const std::string& contents, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::csv: return detail::parse_delimited(contents, ',');
    case MatrixFormat::tsv: return detail::parse_delimited(contents, '\t');
    case MatrixFormat::pajek_net: return parse_pajek_matrix(contents);
  }
  throw ParameterError("unknown matrix format");
}

inline std::string format_matrix(const CitationMatrix& m, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::csv: return detail::format_delimited(m, ',');
    case MatrixFormat::tsv: return detail::format_delimited(m, '\t');
    case MatrixFormat::pajek_net: return format_pajek_matrix(m);
  }
  throw ParameterError("unknown matrix format");
}

inline CitationMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  return parse_matrix(detail::read_file(path), format);
}

inline CitationMatrix load_matrix(const std::filesystem::path& path) { return load_matrix(path, format_from_path(path)); }

inline void save_matrix(const CitationMatrix& m, const std::filesystem::path& path, MatrixFormat format) {
  detail::write_file(path, format_matrix(m, format));
}

/// Reads "id,name,class_tag" rows (header line optional) and attaches them to m
/// by id. Ids missing from the file keep their current label.
inline CitationMatrix attach_labels(const CitationMatrix& m, const std::filesystem::path& path) {
  auto labels = m.labels();
  std::size_t line_no = 0;
  for (const auto& line : detail::lines_of(detail::read_file(path))) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto fields = text::split_delimited(line, ',');
    const std::string id{text::trim(fields[0])};
    if (line_no == 1 && id == "id") continue;
    auto index = m.index_of(id);
    if (!index) throw ParseError("label file names unknown journal '" + id + "'", line_no, 1);
    if (fields.size() >= 2 && !text::trim(fields[1]).empty()) labels[*index].name = std::string{text::trim(fields[1])};
    if (fields.size() >= 3 && !text::trim(fields[2]).empty())
      labels[*index].class_tag = std::string{text::trim(fields[2])};
  }
  return m.with_labels(std::move(labels));
}

}  // namespace citemap
