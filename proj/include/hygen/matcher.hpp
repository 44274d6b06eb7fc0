#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hygen/error.hpp"
#include "hygen/hypergraph.hpp"

namespace hygen {

/// Which sequence the matcher reproduces exactly when d and k disagree.
enum class Priority { DegreeSeq, SizeSeq };

/// Remaining degrees during hyperedge construction, ordered by
/// (remaining degree descending, node id ascending).
class ResidualDegrees {
 public:
  explicit ResidualDegrees(DegreeSequence d) : d_(std::move(d)) {
    for (std::size_t v = 0; v < d_.size(); ++v) {
      if (d_[v] < 0) fail(ErrorCode::InvalidArgument, "degrees must be nonnegative");
      if (d_[v] > 0) {
        order_.emplace(d_[v], static_cast<Node>(v));
        sum_ += d_[v];
      }
    }
  }

  std::size_t n_nodes() const noexcept { return d_.size(); }
  std::size_t positive_count() const noexcept { return order_.size(); }
  std::int64_t total() const noexcept { return sum_; }
  std::int64_t max() const noexcept { return order_.empty() ? 0 : order_.begin()->first; }
  const DegreeSequence& degrees() const noexcept { return d_; }

  /// Whether some multiset of hyperedges with sizes in [2, max_size] has
  /// exactly these degrees: every hyperedge through the top node needs a
  /// partner, and with pairs only the total must be even.
  static bool realizable(std::int64_t total, std::int64_t max, int max_size) {
    if (total == 0) return true;
    return 2 * max <= total && (max_size >= 3 || total % 2 == 0);
  }

  bool realizable(int max_size) const { return realizable(sum_, max(), max_size); }

  /// Up to `count` (degree, node) entries with the highest remaining degree.
  std::vector<std::pair<std::int64_t, Node>> top(std::size_t count) const {
    std::vector<std::pair<std::int64_t, Node>> out;
    out.reserve(std::min(count, order_.size()));
    for (auto it = order_.begin(); it != order_.end() && out.size() < count; ++it) {
      out.push_back(*it);
    }
    return out;
  }

  /// Whether taking the first `t` entries of `top_entries` (which must hold
  /// at least t+1 entries when available) leaves a realizable residual.
  bool realizable_after(const std::vector<std::pair<std::int64_t, Node>>& top_entries,
                        std::size_t t, int max_size) const {
    if (t == 0) return realizable(max_size);
    std::int64_t next = t < top_entries.size() ? top_entries[t].first : 0;
    return realizable(sum_ - static_cast<std::int64_t>(t),
                      std::max(top_entries.front().first - 1, next), max_size);
  }

  void decrement(Node v) {
    auto& dv = d_[static_cast<std::size_t>(v)];
    if (dv <= 0) return;
    order_.erase({dv, v});
    --dv;
    --sum_;
    if (dv > 0) order_.emplace(dv, v);
  }

  /// The s highest-degree nodes among those with remaining
  /// degree; under SizeSeq priority, random zero-degree nodes pad the
  /// hyperedge to exactly s nodes. Selected nodes lose one unit of degree.
  template <class Urbg>
  NodeSet extract(int s, Priority priority, Urbg& rng) {
    if (s < 2) fail(ErrorCode::InvalidHyperedgeSize, "hyperedge size must be >= 2");
    if (static_cast<std::size_t>(s) > d_.size()) {
      fail(ErrorCode::InvalidHyperedgeSize, "hyperedge size " + std::to_string(s) +
                                                " exceeds node count " +
                                                std::to_string(d_.size()));
    }
    NodeSet e;
    for (const auto& [deg, v] : top(static_cast<std::size_t>(s))) e.push_back(v);
    for (Node v : e) decrement(v);
    if (priority == Priority::SizeSeq && e.size() < static_cast<std::size_t>(s)) {
      pad(e, static_cast<std::size_t>(s), rng);
    }
    std::sort(e.begin(), e.end());
    return e;
  }

 private:
  struct HigherFirst {
    bool operator()(const std::pair<std::int64_t, Node>& a,
                    const std::pair<std::int64_t, Node>& b) const {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    }
  };

  // Every node outside `e` has zero remaining degree at this point.
  template <class Urbg>
  void pad(NodeSet& e, std::size_t s, Urbg& rng) {
    const std::size_t n = d_.size();
    if (2 * s > n) {
      std::vector<char> taken(n, 0);
      for (Node v : e) taken[static_cast<std::size_t>(v)] = 1;
      std::vector<Node> free;
      for (std::size_t v = 0; v < n; ++v) {
        if (!taken[v]) free.push_back(static_cast<Node>(v));
      }
      std::shuffle(free.begin(), free.end(), rng);
      free.resize(s - e.size());
      e.insert(e.end(), free.begin(), free.end());
      return;
    }
    std::unordered_set<Node> taken(e.begin(), e.end());
    std::uniform_int_distribution<Node> pick(0, static_cast<Node>(n - 1));
    while (e.size() < s) {
      const Node v = pick(rng);
      if (taken.insert(v).second) e.push_back(v);
    }
  }

  DegreeSequence d_;
  std::set<std::pair<std::int64_t, Node>, HigherFirst> order_;
  std::int64_t sum_ = 0;
};

/// One call of the extraction routine on a caller-owned degree sequence.
/// The returned set may hold fewer than s nodes under DegreeSeq priority.
template <class Urbg>
NodeSet extract_hyperedge(int s, DegreeSequence& d, Priority priority, Urbg& rng) {
  ResidualDegrees residual(d);
  NodeSet e = residual.extract(s, priority, rng);
  d = residual.degrees();
  return e;
}

namespace detail {

// DegreeSeq priority, one requested hyperedge of size s. While the residual
// degrees are realizable, the hyperedge is shrunk (or dropped) so that they
// stay realizable; otherwise the plain extraction applies.
template <class Urbg>
void extract_degree_priority(int s, int max_size, ResidualDegrees& residual,
                             std::vector<NodeSet>& out, Urbg& rng) {
  if (!residual.realizable(max_size)) {
    NodeSet e = residual.extract(s, Priority::DegreeSeq, rng);
    if (e.size() > 1) out.push_back(std::move(e));
    return;
  }
  const auto entries = residual.top(static_cast<std::size_t>(s) + 1);
  std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(s), entries.size());
  while (t >= 2 && !residual.realizable_after(entries, t, max_size)) --t;
  if (t < 2) return;
  NodeSet e;
  for (std::size_t j = 0; j < t; ++j) e.push_back(entries[j].second);
  for (Node v : e) residual.decrement(v);
  std::sort(e.begin(), e.end());
  out.push_back(std::move(e));
}

}  // namespace detail

/// Combines a degree and a size sequence into an initial binary hyperedge
/// list. Sizes are consumed in ascending order taking the highest remaining
/// degrees first. The priority sequence is reproduced exactly whenever it is
/// realizable at all; when (d, k) are compatible both are reproduced.
template <class Urbg>
std::vector<NodeSet> build_initial_configuration(const DegreeSequence& d, const SizeSequence& k,
                                                 Priority priority, int max_size, Urbg& rng) {
  if (max_size < 2) fail(ErrorCode::InvalidMaxSize, "max size must be >= 2");
  for (auto [size, count] : k) {
    if (count < 0) fail(ErrorCode::InvalidArgument, "size counts must be nonnegative");
    if (count > 0 && (size < 2 || size > max_size)) {
      fail(ErrorCode::InvalidHyperedgeSize, "size sequence has size " + std::to_string(size) +
                                                " outside [2, " + std::to_string(max_size) +
                                                "]");
    }
    if (count > 0 && static_cast<std::size_t>(size) > d.size()) {
      fail(ErrorCode::InvalidHyperedgeSize, "size " + std::to_string(size) +
                                                " exceeds node count " +
                                                std::to_string(d.size()));
    }
  }

  ResidualDegrees residual(d);
  std::vector<NodeSet> out;
  for (auto [size, count] : k) {
    for (std::int64_t j = 0; j < count; ++j) {
      if (priority == Priority::SizeSeq) {
        out.push_back(residual.extract(size, Priority::SizeSeq, rng));
      } else {
        detail::extract_degree_priority(size, max_size, residual, out, rng);
      }
    }
  }

  if (priority == Priority::DegreeSeq) {
    while (residual.positive_count() >= 2) {
      const int max_dim = static_cast<int>(
          std::min<std::size_t>(residual.positive_count(), static_cast<std::size_t>(max_size)));
      int s = std::uniform_int_distribution<int>(2, max_dim)(rng);
      if (residual.realizable(max_size)) {
        const auto head = residual.top(static_cast<std::size_t>(s) + 1);
        if (!residual.realizable_after(head, static_cast<std::size_t>(s), max_size)) {
          // Redraw uniformly among the sizes that keep the residual realizable.
          const auto entries = residual.top(static_cast<std::size_t>(max_dim) + 1);
          std::vector<int> valid;
          for (int t = 2; t <= max_dim; ++t) {
            if (residual.realizable_after(entries, static_cast<std::size_t>(t), max_size)) {
              valid.push_back(t);
            }
          }
          if (!valid.empty()) {
            s = valid[std::uniform_int_distribution<std::size_t>(0, valid.size() - 1)(rng)];
          }
        }
      }
      out.push_back(residual.extract(s, Priority::DegreeSeq, rng));
    }
  }
  return out;
}

}  // namespace hygen
