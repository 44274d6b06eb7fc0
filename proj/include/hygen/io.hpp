#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hygen/error.hpp"
#include "hygen/hypergraph.hpp"
#include "hygen/model.hpp"

namespace hygen {

namespace detail {

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path + " for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  return out;
}

template <class Int>
std::optional<Int> parse_int(std::string_view token) {
  Int value{};
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || token.empty()) return std::nullopt;
  return value;
}

inline std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t') ++pos;
    if (pos > start) out.push_back(s.substr(start, pos - start));
  }
  return out;
}

inline std::string where(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no) + ": ";
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* name,
                                        std::int64_t rows, std::int64_t cols) {
  if (!j.is_array() || static_cast<std::int64_t>(j.size()) != rows) {
    fail(ErrorCode::DimensionMismatch,
         std::string("\"") + name + "\" must have " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<std::int64_t>(row.size()) != cols) {
      fail(ErrorCode::DimensionMismatch, std::string("\"") + name + "\" row " +
                                             std::to_string(r) + " must have " +
                                             std::to_string(cols) + " entries");
    }
    for (std::int64_t c = 0; c < cols; ++c) {
      const auto& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) {
        fail(ErrorCode::MalformedInput, std::string("\"") + name + "\" entries must be numbers");
      }
      m(r, c) = x.get<double>();
    }
  }
  return m;
}

}  // namespace detail

/// Builds ModelParams from the parameter document: "N", "K", "max_size",
/// "u" (N x K), "w" (K x K) and optional "kappa" ("default" | "binomial" |
/// "unit" | array of values for sizes 2..max_size).
inline ModelParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::MalformedInput, "parameter document must be an object");
  for (const char* key : {"N", "K", "max_size", "u", "w"}) {
    if (!j.contains(key)) fail(ErrorCode::MalformedInput, std::string("missing field \"") + key + "\"");
  }
  for (const char* key : {"N", "K", "max_size"}) {
    if (!j[key].is_number_integer()) {
      fail(ErrorCode::MalformedInput, std::string("\"") + key + "\" must be an integer");
    }
  }
  const auto n = j["N"].get<std::int64_t>();
  const auto k = j["K"].get<std::int64_t>();
  if (n < 2 || k < 1) fail(ErrorCode::DimensionMismatch, "need N >= 2 and K >= 1");
  if (j["max_size"].get<std::int64_t>() > std::numeric_limits<int>::max()) {
    fail(ErrorCode::InvalidMaxSize, "max_size too large");
  }
  const int max_size = j["max_size"].get<int>();

  NormalizationScheme kappa = NormalizationScheme::make_default();
  if (j.contains("kappa")) {
    const auto& kj = j["kappa"];
    if (kj.is_string()) {
      const auto name = kj.get<std::string>();
      if (name == "default") {
        kappa = NormalizationScheme::make_default();
      } else if (name == "binomial") {
        kappa = NormalizationScheme::binomial();
      } else if (name == "unit") {
        kappa = NormalizationScheme::unit();
      } else {
        fail(ErrorCode::InvalidKappa, "unknown kappa scheme \"" + name + "\"");
      }
    } else if (kj.is_array()) {
      std::vector<double> table;
      for (const auto& x : kj) {
        if (!x.is_number()) fail(ErrorCode::InvalidKappa, "kappa entries must be numbers");
        table.push_back(x.get<double>());
      }
      kappa = NormalizationScheme::user_table(std::move(table));
    } else {
      fail(ErrorCode::InvalidKappa, "\"kappa\" must be a scheme name or an array");
    }
  }
  return ModelParams(detail::matrix_from_json(j["u"], "u", n, k),
                     detail::matrix_from_json(j["w"], "w", k, k), max_size, std::move(kappa));
}

inline nlohmann::json params_to_json(const ModelParams& params) {
  auto rows = [](const Eigen::MatrixXd& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      out.push_back(std::move(row));
    }
    return out;
  };
  nlohmann::json j;
  j["N"] = params.n_nodes();
  j["K"] = params.n_communities();
  j["max_size"] = params.max_size();
  j["u"] = rows(params.u());
  j["w"] = rows(params.w());
  switch (params.kappa().kind()) {
    case NormalizationScheme::Kind::Default: j["kappa"] = "default"; break;
    case NormalizationScheme::Kind::Binomial: j["kappa"] = "binomial"; break;
    case NormalizationScheme::Kind::Unit: j["kappa"] = "unit"; break;
    case NormalizationScheme::Kind::UserTable: j["kappa"] = params.kappa().table(); break;
  }
  return j;
}

inline ModelParams read_params(const std::string& path) {
  auto in = detail::open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedInput, path + ": " + e.what());
  }
  return params_from_json(j);
}

inline void write_params(const ModelParams& params, const std::string& path) {
  auto out = detail::open_out(path);
  out << params_to_json(params).dump(2) << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing " + path);
}

/// Parses "WEIGHT<TAB>node node ..." lines. Empty lines are skipped.
///
/// When every node token is a nonnegative integer the tokens are used as ids
/// directly and the node count is max id + 1 (or `n_nodes` if given, which
/// must cover every id). Otherwise tokens are treated as labels, mapped to
/// ids in order of first appearance, and the label table is kept.
inline Hypergraph parse_hypergraph(std::istream& in, const std::string& name = "<input>",
                                   std::optional<std::size_t> n_nodes = std::nullopt) {
  struct Line {
    std::int64_t weight;
    std::vector<std::string> tokens;
    std::size_t line_no;
  };
  std::vector<Line> lines;
  bool numeric = true;
  std::int64_t max_id = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(ErrorCode::MalformedInput, detail::where(name, line_no) + "expected WEIGHT<TAB>nodes");
    }
    const auto weight = detail::parse_int<std::int64_t>(std::string_view(line).substr(0, tab));
    if (!weight) fail(ErrorCode::MalformedInput, detail::where(name, line_no) + "bad weight");
    if (*weight <= 0) {
      fail(ErrorCode::NonPositiveWeight, detail::where(name, line_no) + "weight must be >= 1");
    }
    Line parsed{*weight, {}, line_no};
    for (auto tok : detail::split_spaces(std::string_view(line).substr(tab + 1))) {
      parsed.tokens.emplace_back(tok);
      const auto id = detail::parse_int<std::int32_t>(tok);
      if (!id || *id < 0) {
        numeric = false;
      } else {
        max_id = std::max<std::int64_t>(max_id, *id);
      }
    }
    if (parsed.tokens.size() < 2) {
      fail(ErrorCode::InvalidHyperedgeSize, detail::where(name, line_no) + "need at least two nodes");
    }
    lines.push_back(std::move(parsed));
  }

  if (numeric) {
    const auto needed = static_cast<std::size_t>(max_id + 1);
    const std::size_t n = n_nodes.value_or(needed);
    if (n < needed) {
      fail(ErrorCode::NodeOutOfRange, name + ": node id " + std::to_string(max_id) +
                                          " outside [0, " + std::to_string(n) + ")");
    }
    Hypergraph h(n);
    for (const auto& l : lines) {
      NodeSet e;
      for (const auto& tok : l.tokens) e.push_back(*detail::parse_int<std::int32_t>(tok));
      try {
        h.add(std::move(e), l.weight);
      } catch (const Error& err) {
        fail(err.code(), detail::where(name, l.line_no) + err.what());
      }
    }
    return h;
  }

  std::unordered_map<std::string, Node> ids;
  std::vector<std::string> labels;
  std::vector<std::pair<NodeSet, std::int64_t>> edges;
  for (const auto& l : lines) {
    NodeSet e;
    for (const auto& tok : l.tokens) {
      auto [it, inserted] = ids.emplace(tok, static_cast<Node>(labels.size()));
      if (inserted) labels.push_back(tok);
      e.push_back(it->second);
    }
    edges.emplace_back(std::move(e), l.weight);
  }
  const std::size_t n = n_nodes.value_or(labels.size());
  if (n < labels.size()) {
    fail(ErrorCode::NodeOutOfRange, name + ": " + std::to_string(labels.size()) +
                                        " distinct labels exceed node count " + std::to_string(n));
  }
  Hypergraph h(n);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    try {
      h.add(std::move(edges[i].first), edges[i].second);
    } catch (const Error& err) {
      fail(err.code(), detail::where(name, lines[i].line_no) + err.what());
    }
  }
  h.set_labels(std::move(labels));
  return h;
}

inline Hypergraph ingest_hypergraph(const std::string& path,
                                    std::optional<std::size_t> n_nodes = std::nullopt) {
  auto in = detail::open_in(path);
  return parse_hypergraph(in, path, n_nodes);
}

/// One "WEIGHT<TAB>n1 n2 ..." line per hyperedge, ascending ids, LF endings.
inline void format_hypergraph(const Hypergraph& h, std::ostream& out) {
  for (const auto& e : h.hyperedges()) {
    out << e.weight << '\t';
    for (std::size_t k = 0; k < e.nodes.size(); ++k) {
      if (k > 0) out << ' ';
      out << e.nodes[k];
    }
    out << '\n';
  }
}

inline void write_hypergraph(const Hypergraph& h, const std::string& path) {
  auto out = detail::open_out(path);
  format_hypergraph(h, out);
  if (!out) fail(ErrorCode::Io, "failed writing " + path);
}

/// One nonnegative integer per line.
inline DegreeSequence read_degree_sequence(const std::string& path) {
  auto in = detail::open_in(path);
  DegreeSequence d;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    const auto tokens = detail::split_spaces(line);
    if (tokens.empty()) continue;
    const auto v = tokens.size() == 1 ? detail::parse_int<std::int64_t>(tokens[0]) : std::nullopt;
    if (!v || *v < 0) {
      fail(ErrorCode::MalformedInput, detail::where(path, line_no) + "expected a nonnegative integer");
    }
    d.push_back(*v);
  }
  return d;
}

/// Lines "size count".
inline SizeSequence read_size_sequence(const std::string& path) {
  auto in = detail::open_in(path);
  SizeSequence k;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    const auto tokens = detail::split_spaces(line);
    if (tokens.empty()) continue;
    std::optional<int> size;
    std::optional<std::int64_t> count;
    if (tokens.size() == 2) {
      size = detail::parse_int<int>(tokens[0]);
      count = detail::parse_int<std::int64_t>(tokens[1]);
    }
    if (!size || !count || *size < 2 || *count < 0) {
      fail(ErrorCode::MalformedInput, detail::where(path, line_no) + "expected \"size count\"");
    }
    if (!k.emplace(*size, *count).second) {
      fail(ErrorCode::MalformedInput, detail::where(path, line_no) + "size listed twice");
    }
  }
  return k;
}

inline void write_degree_sequence(const DegreeSequence& d, const std::string& path) {
  auto out = detail::open_out(path);
  for (auto v : d) out << v << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing " + path);
}

inline void write_size_sequence(const SizeSequence& k, const std::string& path) {
  auto out = detail::open_out(path);
  for (auto [size, count] : k) out << size << ' ' << count << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing " + path);
}

}  // namespace hygen
