#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hygen/error.hpp"

namespace hygen {

using Node = std::int32_t;

/// A hyperedge as a set of node ids, kept in ascending order.
using NodeSet = std::vector<Node>;

/// Per-node count of binary hyperedges containing the node.
using DegreeSequence = std::vector<std::int64_t>;

/// Per-size count of binary hyperedges. Sizes with a zero count may be absent.
using SizeSequence = std::map<int, std::int64_t>;

struct NodeSetHash {
  std::size_t operator()(const NodeSet& e) const noexcept {
    // FNV-1a over the node ids.
    std::uint64_t h = 1469598103934665603ULL;
    for (Node v : e) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Sorts `e` and rejects repeated nodes.
inline void canonicalize(NodeSet& e) {
  std::sort(e.begin(), e.end());
  if (std::adjacent_find(e.begin(), e.end()) != e.end()) {
    fail(ErrorCode::DuplicateNodeInHyperedge,
         "node " + std::to_string(*std::adjacent_find(e.begin(), e.end())) +
             " appears twice in a hyperedge");
  }
}

inline void check_nodes_in_range(std::span<const Node> e, std::size_t n_nodes) {
  for (Node v : e) {
    if (v < 0 || static_cast<std::size_t>(v) >= n_nodes) {
      fail(ErrorCode::NodeOutOfRange, "node id " + std::to_string(v) + " outside [0, " +
                                          std::to_string(n_nodes) + ")");
    }
  }
}

struct WeightedHyperedge {
  NodeSet nodes;
  std::int64_t weight = 1;

  friend bool operator==(const WeightedHyperedge&, const WeightedHyperedge&) = default;
};

/// Weighted hypergraph over dense node ids [0, n_nodes).
///
/// Hyperedges are stored in insertion order, in canonical (ascending) form,
/// with weight >= 1. The list is a multiset: the same node set may appear
/// more than once, which is how the chain stage represents repeated
/// hyperedges before they are merged.
class Hypergraph {
 public:
  Hypergraph() = default;
  explicit Hypergraph(std::size_t n_nodes) : n_nodes_(n_nodes) {}

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  const std::vector<WeightedHyperedge>& hyperedges() const noexcept { return edges_; }

  /// Optional external labels; labels()[id] is the original token of node `id`.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<std::string> labels) { labels_ = std::move(labels); }

  void add(NodeSet nodes, std::int64_t weight = 1) {
    if (weight <= 0) {
      fail(ErrorCode::NonPositiveWeight, "hyperedge weight must be >= 1, got " +
                                             std::to_string(weight));
    }
    canonicalize(nodes);
    if (nodes.size() < 2) {
      fail(ErrorCode::InvalidHyperedgeSize, "hyperedges need at least two nodes");
    }
    check_nodes_in_range(nodes, n_nodes_);
    edges_.push_back({std::move(nodes), weight});
  }

  /// The binary configuration: node sets only, in storage order.
  std::vector<NodeSet> binary() const {
    std::vector<NodeSet> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(e.nodes);
    return out;
  }

  friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
    return a.n_nodes_ == b.n_nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_nodes_ = 0;
  std::vector<WeightedHyperedge> edges_;
  std::vector<std::string> labels_;
};

/// Drops zero counts so that two size sequences compare structurally.
inline SizeSequence normalized(const SizeSequence& k) {
  SizeSequence out;
  for (auto [size, count] : k) {
    if (count != 0) out.emplace(size, count);
  }
  return out;
}

/// Binary degree and size sequences of a hyperedge list (multiset semantics).
inline std::pair<DegreeSequence, SizeSequence> sequences_of(std::span<const NodeSet> hyperedges,
                                                            std::size_t n_nodes) {
  DegreeSequence d(n_nodes, 0);
  SizeSequence k;
  for (const auto& e : hyperedges) {
    check_nodes_in_range(e, n_nodes);
    for (Node v : e) ++d[static_cast<std::size_t>(v)];
    ++k[static_cast<int>(e.size())];
  }
  return {std::move(d), std::move(k)};
}

inline std::pair<DegreeSequence, SizeSequence> sequences_of(const Hypergraph& h) {
  const auto config = h.binary();
  return sequences_of(config, h.n_nodes());
}

}  // namespace hygen
