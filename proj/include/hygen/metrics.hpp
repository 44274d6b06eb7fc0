#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hygen/error.hpp"
#include "hygen/hypergraph.hpp"

namespace hygen {

/// Upper-triangular entry (i < j) of a symmetric node-level matrix.
struct AdjacencyEntry {
  Node i;
  Node j;
  std::int64_t value;

  friend bool operator==(const AdjacencyEntry&, const AdjacencyEntry&) = default;
};

/// Weighted clique-expansion adjacency X_ij = sum of A_e over hyperedges
/// containing both i and j. Stored as sorted upper-triangular triplets.
class Adjacency {
 public:
  Adjacency(std::size_t n_nodes, std::vector<AdjacencyEntry> entries)
      : n_(n_nodes), entries_(std::move(entries)) {}

  std::size_t n_nodes() const noexcept { return n_; }
  const std::vector<AdjacencyEntry>& entries() const noexcept { return entries_; }

  std::int64_t at(Node i, Node j) const {
    if (i == j) return 0;
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{i, j},
                               [](const AdjacencyEntry& e, const std::pair<Node, Node>& key) {
                                 return std::pair{e.i, e.j} < key;
                               });
    return it != entries_.end() && it->i == i && it->j == j ? it->value : 0;
  }

  Eigen::MatrixXd dense() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : entries_) {
      x(e.i, e.j) = x(e.j, e.i) = static_cast<double>(e.value);
    }
    return x;
  }

 private:
  std::size_t n_;
  std::vector<AdjacencyEntry> entries_;
};

inline Adjacency adjacency(const Hypergraph& h) {
  std::unordered_map<std::uint64_t, std::int64_t> acc;
  for (const auto& e : h.hyperedges()) {
    for (std::size_t a = 0; a < e.nodes.size(); ++a) {
      for (std::size_t b = a + 1; b < e.nodes.size(); ++b) {
        const auto key = (static_cast<std::uint64_t>(e.nodes[a]) << 32) |
                         static_cast<std::uint32_t>(e.nodes[b]);
        acc[key] += e.weight;
      }
    }
  }
  std::vector<AdjacencyEntry> entries;
  entries.reserve(acc.size());
  for (auto [key, value] : acc) {
    entries.push_back({static_cast<Node>(key >> 32), static_cast<Node>(key & 0xffffffffu), value});
  }
  std::sort(entries.begin(), entries.end(), [](const AdjacencyEntry& x, const AdjacencyEntry& y) {
    return std::pair{x.i, x.j} < std::pair{y.i, y.j};
  });
  return Adjacency(h.n_nodes(), std::move(entries));
}

/// For every size n from 2 to (max hyperedge size - 1): the number of pairs
/// (e, f) with |e| = n, |f| = n + 1 and e ⊂ f. Weights are ignored.
inline std::map<int, std::int64_t> inclusion_counts(const Hypergraph& h) {
  std::map<int, std::int64_t> counts;
  std::unordered_map<NodeSet, std::int64_t, NodeSetHash> multiplicity;
  int largest = 0;
  for (const auto& e : h.hyperedges()) {
    ++multiplicity[e.nodes];
    largest = std::max(largest, static_cast<int>(e.nodes.size()));
  }
  for (int n = 2; n < largest; ++n) counts[n] = 0;
  NodeSet sub;
  for (const auto& f : h.hyperedges()) {
    if (f.nodes.size() < 3) continue;
    for (std::size_t drop = 0; drop < f.nodes.size(); ++drop) {
      sub.clear();
      for (std::size_t k = 0; k < f.nodes.size(); ++k) {
        if (k != drop) sub.push_back(f.nodes[k]);
      }
      auto it = multiplicity.find(sub);
      if (it != multiplicity.end()) counts[static_cast<int>(sub.size())] += it->second;
    }
  }
  return counts;
}

namespace detail {

// Union-find over nodes; hyperedges sharing a node land in one component.
inline std::vector<std::size_t> dual_components(const Hypergraph& h) {
  std::vector<std::size_t> parent(h.n_nodes());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : h.hyperedges()) {
    const auto root = find(static_cast<std::size_t>(e.nodes.front()));
    for (Node v : e.nodes) parent[find(static_cast<std::size_t>(v))] = root;
  }
  std::vector<std::size_t> comp;
  comp.reserve(h.size());
  for (const auto& e : h.hyperedges()) comp.push_back(find(static_cast<std::size_t>(e.nodes.front())));
  return comp;
}

}  // namespace detail

/// Binary dual graph: one vertex per hyperedge, adjacent when the two
/// hyperedges share a node. Neighbor lists are sorted and deduplicated.
inline std::vector<std::vector<std::size_t>> dual_graph(const Hypergraph& h) {
  std::vector<std::vector<std::size_t>> incident(h.n_nodes());
  for (std::size_t e = 0; e < h.size(); ++e) {
    for (Node v : h.hyperedges()[e].nodes) incident[static_cast<std::size_t>(v)].push_back(e);
  }
  std::vector<std::vector<std::size_t>> nbrs(h.size());
  std::vector<std::size_t> stamp(h.size(), h.size());
  for (std::size_t e = 0; e < h.size(); ++e) {
    stamp[e] = e;
    for (Node v : h.hyperedges()[e].nodes) {
      for (std::size_t f : incident[static_cast<std::size_t>(v)]) {
        if (stamp[f] != e) {
          stamp[f] = e;
          nbrs[e].push_back(f);
        }
      }
    }
    std::sort(nbrs[e].begin(), nbrs[e].end());
  }
  return nbrs;
}

/// Leading eigenvector of the binary dual adjacency, unit L2 norm and
/// nonnegative, computed on the largest connected component of the dual
/// (ties: the component of the lowest-index hyperedge); hyperedges outside
/// it get 0, as do all of them when the dual has no edges.
///
/// Power iteration runs on A + I, which has the same eigenvectors and a
/// strictly dominant leading eigenvalue even when the dual is bipartite.
inline std::vector<double> dual_eigenvector_centrality(const Hypergraph& h, double tol = 1e-10,
                                                       int max_iter = 10000) {
  std::vector<double> out(h.size(), 0.0);
  if (h.size() < 2) return out;

  const auto comp = detail::dual_components(h);
  std::map<std::size_t, std::size_t> comp_size;
  for (auto c : comp) ++comp_size[c];
  std::size_t best = comp.front();
  for (std::size_t e = 0; e < comp.size(); ++e) {
    if (comp_size[comp[e]] > comp_size[best]) best = comp[e];
  }
  if (comp_size[best] < 2) return out;

  std::vector<std::size_t> members;
  std::vector<std::size_t> local(h.size(), h.size());
  for (std::size_t e = 0; e < comp.size(); ++e) {
    if (comp[e] == best) {
      local[e] = members.size();
      members.push_back(e);
    }
  }
  const auto nbrs = dual_graph(h);
  const std::size_t m = members.size();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m),
                                                1.0 / std::sqrt(static_cast<double>(m)));
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  double residual = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t a = 0; a < m; ++a) {
      double sum = x(static_cast<Eigen::Index>(a));
      for (std::size_t f : nbrs[members[a]]) sum += x(static_cast<Eigen::Index>(local[f]));
      y(static_cast<Eigen::Index>(a)) = sum;
    }
    y /= y.norm();
    residual = (y - x).norm();
    x.swap(y);
    if (residual <= tol) {
      for (std::size_t a = 0; a < m; ++a) out[members[a]] = x(static_cast<Eigen::Index>(a));
      return out;
    }
  }
  throw ConvergenceError("dual eigenvector centrality did not converge in " +
                             std::to_string(max_iter) + " iterations",
                         residual);
}

enum class CentralityScaling { Raw, SpectralNormalized };

inline constexpr std::size_t kMaxDenseNodes = 10000;

/// Diagonal of exp(X) for the clique-expansion adjacency X, through the
/// symmetric eigendecomposition X = Φ diag(μ) Φ^T. With SpectralNormalized,
/// X is first divided by its spectral radius.
inline std::vector<double> subhypergraph_centrality(
    const Hypergraph& h, CentralityScaling scaling = CentralityScaling::SpectralNormalized) {
  if (h.n_nodes() > kMaxDenseNodes) {
    fail(ErrorCode::SizeGuardExceeded, "sub-hypergraph centrality is dense; N must be <= " +
                                           std::to_string(kMaxDenseNodes));
  }
  const Eigen::MatrixXd x = adjacency(h).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
  Eigen::VectorXd mu = eig.eigenvalues();
  if (scaling == CentralityScaling::SpectralNormalized) {
    const double radius = mu.cwiseAbs().maxCoeff();
    if (radius > 0.0) mu /= radius;
  }
  const Eigen::MatrixXd& phi = eig.eigenvectors();
  const Eigen::VectorXd sc = phi.cwiseAbs2() * mu.array().exp().matrix();
  return {sc.data(), sc.data() + sc.size()};
}

/// |E1 ∩ E2| / |E1 ∪ E2| over distinct node sets; 1 when both are empty.
inline double jaccard(const Hypergraph& h1, const Hypergraph& h2) {
  std::set<NodeSet> a;
  std::set<NodeSet> b;
  for (const auto& e : h1.hyperedges()) a.insert(e.nodes);
  for (const auto& e : h2.hyperedges()) b.insert(e.nodes);
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& e : a) shared += b.count(e);
  return static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
}

/// Hard label of every node: argmax of its membership row, lowest index on
/// ties; std::nullopt for all-zero rows.
inline std::vector<std::optional<int>> hard_labels(const Eigen::MatrixXd& u) {
  std::vector<std::optional<int>> labels(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    Eigen::Index best = 0;
    const double top = u.row(i).maxCoeff(&best);
    if (top > 0.0) labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

namespace detail {

inline std::map<int, int> label_counts(std::span<const Node> e,
                                       const std::vector<std::optional<int>>& labels) {
  std::map<int, int> counts;
  for (Node v : e) {
    if (v < 0 || static_cast<std::size_t>(v) >= labels.size()) {
      fail(ErrorCode::NodeOutOfRange, "node " + std::to_string(v));
    }
    const auto& label = labels[static_cast<std::size_t>(v)];
    if (!label) {
      fail(ErrorCode::ZeroMembership, "node " + std::to_string(v) + " has an all-zero membership row");
    }
    ++counts[*label];
  }
  return counts;
}

}  // namespace detail

/// -sum_k r_k ln r_k over the hard-label proportions r_k inside e.
inline double community_entropy(std::span<const Node> e,
                                const std::vector<std::optional<int>>& labels) {
  double h = 0.0;
  for (auto [label, count] : detail::label_counts(e, labels)) {
    const double r = static_cast<double>(count) / static_cast<double>(e.size());
    h -= r * std::log(r);
  }
  return h;
}

inline double community_entropy(std::span<const Node> e, const Eigen::MatrixXd& u) {
  return community_entropy(e, hard_labels(u));
}

/// Share of e's nodes carrying e's most frequent hard label.
inline double majority_ratio(std::span<const Node> e,
                             const std::vector<std::optional<int>>& labels) {
  int top = 0;
  for (auto [label, count] : detail::label_counts(e, labels)) top = std::max(top, count);
  return static_cast<double>(top) / static_cast<double>(e.size());
}

inline double majority_ratio(std::span<const Node> e, const Eigen::MatrixXd& u) {
  return majority_ratio(e, hard_labels(u));
}

struct EntropySummary {
  std::vector<double> per_hyperedge;
  double mean = 0.0;
  /// Equal-width bins over [0, ln K]; the last bin is closed.
  std::vector<double> bin_edges;
  std::vector<std::int64_t> histogram;
};

inline EntropySummary hypergraph_entropy(const Hypergraph& h, const Eigen::MatrixXd& u,
                                         int n_bins = 10) {
  const auto labels = hard_labels(u);
  EntropySummary s;
  s.per_hyperedge.reserve(h.size());
  for (const auto& e : h.hyperedges()) s.per_hyperedge.push_back(community_entropy(e.nodes, labels));
  if (!s.per_hyperedge.empty()) {
    s.mean = std::accumulate(s.per_hyperedge.begin(), s.per_hyperedge.end(), 0.0) /
             static_cast<double>(s.per_hyperedge.size());
  }
  const double top = std::log(static_cast<double>(std::max<Eigen::Index>(u.cols(), 2)));
  for (int b = 0; b <= n_bins; ++b) s.bin_edges.push_back(top * b / n_bins);
  s.histogram.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : s.per_hyperedge) {
    auto bin = static_cast<int>(v / top * n_bins);
    ++s.histogram[static_cast<std::size_t>(std::clamp(bin, 0, n_bins - 1))];
  }
  return s;
}

/// Statistics compared between a dataset and its samples.
struct StatsReport {
  Adjacency adjacency{0, {}};
  std::map<int, std::int64_t> inclusion_counts;
  std::vector<double> dual_centrality;
  std::vector<double> subhypergraph_centrality;
  DegreeSequence degree_seq;
  SizeSequence size_seq;
  /// Present when memberships were supplied.
  std::optional<EntropySummary> entropy;
  std::vector<double> majority_ratios;
};

inline StatsReport compute_stats(const Hypergraph& h, const Eigen::MatrixXd* u = nullptr,
                                 CentralityScaling scaling = CentralityScaling::SpectralNormalized) {
  StatsReport r;
  r.adjacency = adjacency(h);
  r.inclusion_counts = inclusion_counts(h);
  r.dual_centrality = dual_eigenvector_centrality(h);
  r.subhypergraph_centrality = subhypergraph_centrality(h, scaling);
  std::tie(r.degree_seq, r.size_seq) = sequences_of(h);
  if (u != nullptr) {
    r.entropy = hypergraph_entropy(h, *u);
    const auto labels = hard_labels(*u);
    for (const auto& e : h.hyperedges()) r.majority_ratios.push_back(majority_ratio(e.nodes, labels));
  }
  return r;
}

}  // namespace hygen
