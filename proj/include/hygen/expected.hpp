#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hygen/error.hpp"
#include "hygen/hypergraph.hpp"
#include "hygen/model.hpp"

namespace hygen {

/// Inclusive range of hyperedge sizes an expectation is restricted to.
struct SizeRange {
  int lo = 2;
  int hi = 2;

  static SizeRange full(const ModelParams& params) { return {2, params.max_size()}; }

  void check(const ModelParams& params) const {
    if (lo < 2 || hi > params.max_size() || lo > hi) {
      fail(ErrorCode::InvalidArgument, "size range [" + std::to_string(lo) + ", " +
                                           std::to_string(hi) + "] not within [2, " +
                                           std::to_string(params.max_size()) + "]");
    }
  }
};

/// log kappa_n of the default scheme, n(n-1)/2 * C(N-2, n-2).
inline double kappa_default(int n, std::size_t n_nodes) {
  if (n < 2 || static_cast<std::size_t>(n) > n_nodes) {
    fail(ErrorCode::InvalidHyperedgeSize, "kappa_default needs 2 <= n <= N");
  }
  return NormalizationScheme::make_default().log_kappa(n, n_nodes);
}

/// Sum over unordered pairs j < m in S of u_j^T w u_m in O(|S| K) time,
/// as (s^T w s - sum_j u_j^T w u_j) / 2 with s the summed memberships.
inline double pair_interaction_sum(std::span<const Node> nodes, const ModelParams& params) {
  check_nodes_in_range(nodes, params.n_nodes());
  if (nodes.size() < 2) return 0.0;
  const auto K = static_cast<Eigen::Index>(params.n_communities());
  Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(K);
  Eigen::RowVectorXd sw = Eigen::RowVectorXd::Zero(K);
  double diagonal = 0.0;
  for (Node v : nodes) {
    s += params.u().row(v);
    sw += params.uw().row(v);
    diagonal += params.self_interaction()(v);
  }
  const double total = sw.dot(s);
  return std::max(0.0, 0.5 * (total - diagonal));
}

namespace detail {

struct RangeConstants {
  double pair = 0.0;    // sum_n C(N-2, n-2) / kappa_n
  double triple = 0.0;  // sum_{n>=3} C(N-3, n-3) / kappa_n
  double mean = 0.0;    // sum_n C(N-2, n-2) n / kappa_n
};

inline double pair_multiplicity(const ModelParams& params, int n) {
  const auto N = static_cast<double>(params.n_nodes());
  return std::exp(log_binomial(N - 2.0, n - 2.0) - params.log_kappa(n));
}

inline RangeConstants range_constants(const ModelParams& params, SizeRange range) {
  range.check(params);
  const auto N = static_cast<double>(params.n_nodes());
  RangeConstants c;
  for (int n = range.lo; n <= range.hi; ++n) {
    const double log_k = params.log_kappa(n);
    const double per_pair = std::exp(log_binomial(N - 2.0, n - 2.0) - log_k);
    c.pair += per_pair;
    c.mean += per_pair * n;
    if (n >= 3) c.triple += std::exp(log_binomial(N - 3.0, n - 3.0) - log_k);
  }
  return c;
}

struct GlobalSums {
  Eigen::RowVectorXd s;   // sum_j u_j
  Eigen::RowVectorXd sw;  // sum_j u_j^T w
  double diagonal = 0.0;  // sum_j u_j^T w u_j
};

inline GlobalSums global_sums(const ModelParams& params) {
  GlobalSums g;
  g.s = params.u().colwise().sum();
  g.sw = params.uw().colwise().sum();
  g.diagonal = params.self_interaction().sum();
  return g;
}

inline double all_pairs_sum(const GlobalSums& g) {
  return std::max(0.0, 0.5 * (g.sw.dot(g.s) - g.diagonal));
}

inline double node_degree(Node i, const ModelParams& params, const RangeConstants& c,
                          const GlobalSums& g) {
  const auto ui = params.u().row(i);
  const auto uwi = params.uw().row(i);
  const Eigen::RowVectorXd rest = g.s - ui;
  const Eigen::RowVectorXd rest_w = g.sw - uwi;
  const double with_i = uwi.dot(rest);
  const double without_i =
      std::max(0.0, 0.5 * (rest_w.dot(rest) - (g.diagonal - params.self_interaction()(i))));
  return c.pair * with_i + c.triple * without_i;
}

}  // namespace detail

/// Expected weighted degree of node i over hyperedges with sizes in `range`.
inline double expected_node_degree(Node i, const ModelParams& params, SizeRange range) {
  if (i < 0 || static_cast<std::size_t>(i) >= params.n_nodes()) {
    fail(ErrorCode::NodeOutOfRange, "node " + std::to_string(i));
  }
  const auto c = detail::range_constants(params, range);
  return detail::node_degree(i, params, c, detail::global_sums(params));
}

/// expected_node_degree for every node, O(N K^2) overall.
inline std::vector<double> expected_node_degrees(const ModelParams& params, SizeRange range) {
  const auto c = detail::range_constants(params, range);
  const auto g = detail::global_sums(params);
  std::vector<double> out(params.n_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = detail::node_degree(static_cast<Node>(i), params, c, g);
  }
  return out;
}

/// Expected average weighted degree <d^w>.
inline double expected_mean_degree(const ModelParams& params, SizeRange range) {
  const auto c = detail::range_constants(params, range);
  const double pairs = detail::all_pairs_sum(detail::global_sums(params));
  return c.mean * pairs / static_cast<double>(params.n_nodes());
}

/// Expected weighted number of hyperedges of each size in `range`;
/// entry j corresponds to size range.lo + j.
inline std::vector<double> expected_size_counts(const ModelParams& params, SizeRange range) {
  range.check(params);
  const double pairs = detail::all_pairs_sum(detail::global_sums(params));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(range.hi - range.lo + 1));
  for (int n = range.lo; n <= range.hi; ++n) {
    out.push_back(detail::pair_multiplicity(params, n) * pairs);
  }
  return out;
}

/// Affinity matrix scaled so that expected_mean_degree over `range` hits the target.
inline Eigen::MatrixXd rescale_affinity(const ModelParams& params, double target_mean_degree,
                                        SizeRange range) {
  if (!(target_mean_degree >= 0.0) || !std::isfinite(target_mean_degree)) {
    fail(ErrorCode::InvalidArgument, "target mean degree must be finite and >= 0");
  }
  const double current = expected_mean_degree(params, range);
  if (current <= 0.0) {
    fail(ErrorCode::ZeroExpectation, "expected mean degree is 0; w cannot be rescaled");
  }
  return params.w() * (target_mean_degree / current);
}

inline Eigen::MatrixXd rescale_affinity(const ModelParams& params, double target_mean_degree) {
  return rescale_affinity(params, target_mean_degree, SizeRange::full(params));
}

}  // namespace hygen
