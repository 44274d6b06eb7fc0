#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hygen/error.hpp"
#include "hygen/hypergraph.hpp"
#include "hygen/model.hpp"
#include "hygen/rng.hpp"

namespace hygen {

/// Inverse cdf of the zero-truncated Poisson with mean exp(log_lambda): the
/// smallest v >= 1 with F_X(v) >= e^-lambda + p (1 - e^-lambda).
///
/// The truncated pmf lambda^m / (m! (e^lambda - 1)) is accumulated from m = 1
/// in log space, which is the same threshold test without the cancellation
/// in 1 - e^-lambda for small lambda. Means too small for a double still work.
inline std::int64_t ztp_quantile_from_log(double p, double log_lambda) {
  if (!std::isfinite(log_lambda) || log_lambda > std::log(std::numeric_limits<double>::max())) {
    fail(ErrorCode::InvalidArgument, "zero-truncated Poisson needs a finite mean > 0");
  }
  if (!(p >= 0.0)) fail(ErrorCode::InvalidArgument, "quantile level must lie in [0, 1)");
  if (p >= 1.0) p = std::nextafter(1.0, 0.0);

  const double lambda = std::exp(log_lambda);
  double log_term = log_lambda - detail::log_expm1_from_log(log_lambda);
  double cdf = 0.0;
  for (std::int64_t m = 1;; ++m) {
    const double term = std::exp(log_term);
    cdf += term;
    if (cdf >= p) return m;
    // Past the mode with a vanishing term, rounding keeps cdf from reaching p.
    if (static_cast<double>(m) > lambda && term < 1e-17 * cdf) return m;
    log_term += log_lambda - std::log(static_cast<double>(m + 1));
  }
}

inline std::int64_t ztp_quantile(double p, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::InvalidArgument, "zero-truncated Poisson needs a finite mean > 0");
  }
  return ztp_quantile_from_log(p, std::log(lambda));
}

/// Weighted hypergraph from a binary configuration, plus how many repeated
/// copies were folded into their first occurrence.
struct WeightAssignment {
  Hypergraph hypergraph;
  std::size_t merged_duplicates = 0;
};

/// Merges repeated hyperedges, then gives every distinct hyperedge a weight
/// drawn from the zero-truncated Poisson with mean lambda_e / kappa_|e|.
template <class Urbg>
WeightAssignment sample_weights(std::span<const NodeSet> config, const ModelParams& params,
                                Urbg& rng) {
  WeightAssignment out{Hypergraph(params.n_nodes()), 0};
  std::unordered_map<NodeSet, char, NodeSetHash> seen;
  seen.reserve(config.size());
  for (const NodeSet& e : config) {
    if (!seen.emplace(e, 1).second) {
      ++out.merged_duplicates;
      continue;
    }
    const double lam = hyperedge_lambda(e, params);
    if (lam <= 0.0) {
      fail(ErrorCode::ZeroDensityHyperedge,
           "configuration holds a hyperedge with lambda = 0 (probability-zero hyperedge)");
    }
    const double log_mean = std::log(lam) - params.log_kappa(static_cast<int>(e.size()));
    out.hypergraph.add(e, ztp_quantile_from_log(uniform01(rng), log_mean));
  }
  return out;
}

namespace detail {

// Weight of one pair with Poisson mean `mean` given the uniform `u`, or 0
// when the pair is absent. Presence is u < 1 - e^-mean; conditional on it,
// u / (1 - e^-mean) is uniform and drives the truncated quantile.
inline std::int64_t poisson_pair_weight(double mean, double u) {
  if (mean <= 0.0) return 0;
  const double present = -std::expm1(-mean);
  if (u >= present) return 0;
  return ztp_quantile(u / present, mean);
}

}  // namespace detail

/// Exact Poisson draw for every node pair, A_ij ~ Pois(u_i^T w u_j / kappa_2),
/// keeping the positive ones, sorted by (i, j).
///
/// Nodes with identical membership rows share every pair rate. When there
/// are few such groups (hard assignments), each block of pairs is scanned by
/// geometric skipping, which is exact and costs O(N + |E| + G^2) instead of
/// O(N^2).
template <class Urbg>
std::vector<WeightedHyperedge> sample_dyadic_exact(const ModelParams& params, Urbg& rng) {
  const std::size_t n = params.n_nodes();
  const double kappa2 = std::exp(params.log_kappa(2));
  std::vector<WeightedHyperedge> out;

  std::map<std::vector<double>, std::size_t> group_of_row;
  std::vector<std::vector<Node>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(params.u().row(static_cast<Eigen::Index>(i)).begin(),
                            params.u().row(static_cast<Eigen::Index>(i)).end());
    auto [it, inserted] = group_of_row.emplace(std::move(row), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(static_cast<Node>(i));
  }

  if (groups.size() * groups.size() > n) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = params.uw().row(static_cast<Eigen::Index>(i));
      for (std::size_t j = i + 1; j < n; ++j) {
        const double mean = row.dot(params.u().row(static_cast<Eigen::Index>(j))) / kappa2;
        if (mean <= 0.0) continue;
        const std::int64_t a = detail::poisson_pair_weight(mean, uniform01(rng));
        if (a > 0) out.push_back({{static_cast<Node>(i), static_cast<Node>(j)}, a});
      }
    }
    return out;
  }

  for (std::size_t ga = 0; ga < groups.size(); ++ga) {
    for (std::size_t gb = ga; gb < groups.size(); ++gb) {
      const auto& A = groups[ga];
      const auto& B = groups[gb];
      const double mean = params.interaction(A.front(), B.front()) / kappa2;
      if (mean <= 0.0) continue;
      const double present = -std::expm1(-mean);
      const bool same = ga == gb;
      const auto n_pairs = same ? static_cast<std::int64_t>(A.size() * (A.size() - 1) / 2)
                                : static_cast<std::int64_t>(A.size() * B.size());
      if (n_pairs == 0) continue;

      std::int64_t row = 0;
      std::int64_t row_start = 0;
      auto emit = [&](std::int64_t idx) {
        Node x;
        Node y;
        if (same) {
          const auto len = [&](std::int64_t r) {
            return static_cast<std::int64_t>(A.size()) - 1 - r;
          };
          while (idx >= row_start + len(row)) {
            row_start += len(row);
            ++row;
          }
          x = A[static_cast<std::size_t>(row)];
          y = A[static_cast<std::size_t>(row + 1 + (idx - row_start))];
        } else {
          const auto nb = static_cast<std::int64_t>(B.size());
          x = A[static_cast<std::size_t>(idx / nb)];
          y = B[static_cast<std::size_t>(idx % nb)];
        }
        const std::int64_t weight = ztp_quantile(uniform01(rng), mean);
        out.push_back({{std::min(x, y), std::max(x, y)}, weight});
      };

      if (present >= 1.0) {
        for (std::int64_t idx = 0; idx < n_pairs; ++idx) emit(idx);
        continue;
      }
      // Failures before the next present pair, computed in double so that
      // tiny rates cannot overflow the index.
      const double log_absent = -mean;
      auto gap = [&] { return std::floor(std::log1p(-uniform01(rng)) / log_absent); };
      for (double idx = gap(); idx < static_cast<double>(n_pairs); idx += 1.0 + gap()) {
        emit(static_cast<std::int64_t>(idx));
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const WeightedHyperedge& a, const WeightedHyperedge& b) { return a.nodes < b.nodes; });
  return out;
}

}  // namespace hygen
