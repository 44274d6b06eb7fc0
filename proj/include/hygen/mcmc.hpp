#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hygen/error.hpp"
#include "hygen/expected.hpp"
#include "hygen/hypergraph.hpp"
#include "hygen/model.hpp"
#include "hygen/rng.hpp"

namespace hygen {

/// Chain lengths and the log-ratio threshold below which exp(x) - 1 is
/// replaced by x in the acceptance ratio.
struct MCMCConfig {
  std::int64_t n_burn_in = 100000;
  std::int64_t n_intermediate = 20000;
  double tau = std::log(100.0);

  void validate() const {
    if (n_burn_in < 0) fail(ErrorCode::InvalidArgument, "burn-in steps must be >= 0");
    if (n_intermediate < 1) fail(ErrorCode::InvalidArgument, "intermediate steps must be >= 1");
    if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCode::InvalidArgument, "tau must be > 0");
  }
};

/// Swaps the non-shared nodes of two hyperedges: the nodes outside e1 ∩ e2
/// are split uniformly at random into groups of the original residual sizes.
template <class Urbg>
std::pair<NodeSet, NodeSet> shuffle_pair(const NodeSet& e1, const NodeSet& e2, Urbg& rng) {
  NodeSet shared;
  std::set_intersection(e1.begin(), e1.end(), e2.begin(), e2.end(), std::back_inserter(shared));
  const std::size_t only1 = e1.size() - shared.size();
  std::vector<Node> pool;
  pool.reserve(only1 + e2.size() - shared.size());
  std::set_difference(e1.begin(), e1.end(), shared.begin(), shared.end(),
                      std::back_inserter(pool));
  std::set_difference(e2.begin(), e2.end(), shared.begin(), shared.end(),
                      std::back_inserter(pool));
  if (pool.empty()) return {e1, e2};
  std::shuffle(pool.begin(), pool.end(), rng);

  NodeSet a = shared;
  NodeSet b = shared;
  a.insert(a.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(only1));
  b.insert(b.end(), pool.begin() + static_cast<std::ptrdiff_t>(only1), pool.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {std::move(a), std::move(b)};
}

namespace detail {

// log of (exp(new/kappa) - 1) / (exp(old/kappa) - 1) for same-size
// hyperedges with positive lambdas.
inline double pair_log_ratio(double lambda_old, double lambda_new, double log_kappa, double tau) {
  const double log_old = std::log(lambda_old);
  const double log_new = std::log(lambda_new);
  if (log_kappa - log_old > tau || log_kappa - log_new > tau) return log_new - log_old;
  return log_expm1_from_log(log_new - log_kappa) - log_expm1_from_log(log_old - log_kappa);
}

}  // namespace detail

/// Log Metropolis-Hastings ratio of replacing (e1, e2) by (e1', e2').
///
/// A hyperedge with lambda = 0 has zero density. A proposal that adds
/// zero-density hyperedges gets -inf; when the current pair already holds
/// some (`current_zero_density`), a proposal removing them gets +inf and one
/// keeping their number compares only the positive factors.
struct AcceptanceRatio {
  double log_ratio = 0.0;
  bool current_zero_density = false;
};

inline AcceptanceRatio acceptance_log_ratio_from_lambdas(double lambda1, double lambda2,
                                                         double lambda1_new, double lambda2_new,
                                                         int size1, int size2,
                                                         const ModelParams& params, double tau) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const int zeros_old = (lambda1 <= 0.0) + (lambda2 <= 0.0);
  const int zeros_new = (lambda1_new <= 0.0) + (lambda2_new <= 0.0);
  AcceptanceRatio r;
  r.current_zero_density = zeros_old > 0;
  if (zeros_new > zeros_old) {
    r.log_ratio = -inf;
    return r;
  }
  if (zeros_new < zeros_old) {
    r.log_ratio = inf;
    return r;
  }
  const double log_k1 = params.log_kappa(size1);
  const double log_k2 = params.log_kappa(size2);
  auto lone = [&](double lam, double log_k) {
    return lam > 0.0 ? detail::log_expm1_from_log(std::log(lam) - log_k) : 0.0;
  };
  double total = 0.0;
  if (lambda1 > 0.0 && lambda1_new > 0.0) {
    total += detail::pair_log_ratio(lambda1, lambda1_new, log_k1, tau);
  } else {
    total += lone(lambda1_new, log_k1) - lone(lambda1, log_k1);
  }
  if (lambda2 > 0.0 && lambda2_new > 0.0) {
    total += detail::pair_log_ratio(lambda2, lambda2_new, log_k2, tau);
  } else {
    total += lone(lambda2_new, log_k2) - lone(lambda2, log_k2);
  }
  r.log_ratio = total;
  return r;
}

inline AcceptanceRatio acceptance_log_ratio(const NodeSet& e1, const NodeSet& e2,
                                            const NodeSet& e1_new, const NodeSet& e2_new,
                                            const ModelParams& params, double tau) {
  if (e1.size() != e1_new.size() || e2.size() != e2_new.size()) {
    fail(ErrorCode::InvalidArgument, "proposal must preserve hyperedge sizes");
  }
  return acceptance_log_ratio_from_lambdas(
      hyperedge_lambda(e1, params), hyperedge_lambda(e2, params), hyperedge_lambda(e1_new, params),
      hyperedge_lambda(e2_new, params), static_cast<int>(e1.size()), static_cast<int>(e2.size()),
      params, tau);
}

/// The binary configuration a chain is mixing, with per-hyperedge lambdas
/// and a multiplicity index. Sizes and node degrees never change.
class ChainState {
 public:
  ChainState(std::vector<NodeSet> hyperedges, const ModelParams& params)
      : hyperedges_(std::move(hyperedges)) {
    lambdas_.reserve(hyperedges_.size());
    for (auto& e : hyperedges_) {
      canonicalize(e);
      check_hyperedge(e, params);
      if (static_cast<int>(e.size()) > params.max_size()) {
        fail(ErrorCode::InvalidHyperedgeSize, "hyperedge larger than max size");
      }
      const double lam = hyperedge_lambda(e, params);
      lambdas_.push_back(lam);
      if (lam <= 0.0) ++zero_density_;
      if (++multiplicity_[e] > 1) ++duplicates_;
    }
  }

  const std::vector<NodeSet>& hyperedges() const noexcept { return hyperedges_; }
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  std::size_t size() const noexcept { return hyperedges_.size(); }

  std::uint64_t steps_taken() const noexcept { return steps_taken_; }
  std::uint64_t steps_accepted() const noexcept { return steps_accepted_; }

  /// Hyperedges with lambda = 0 currently in the configuration.
  std::size_t zero_density_count() const noexcept { return zero_density_; }
  /// Extra copies of repeated hyperedges (sum of multiplicity - 1).
  std::size_t duplicate_count() const noexcept { return duplicates_; }

  /// Change in duplicate_count if hyperedges i, j were replaced by a, b.
  long duplicate_delta(std::size_t i, std::size_t j, const NodeSet& a, const NodeSet& b) const {
    std::vector<std::pair<const NodeSet*, long>> local;
    auto slot = [&](const NodeSet& e) -> long& {
      for (auto& [key, c] : local) {
        if (*key == e) return c;
      }
      auto it = multiplicity_.find(e);
      local.emplace_back(&e, it == multiplicity_.end() ? 0 : it->second);
      return local.back().second;
    };
    auto excess = [&] {
      long total = 0;
      for (const auto& [key, c] : local) total += std::max(0L, c - 1);
      return total;
    };
    slot(hyperedges_[i]);
    slot(hyperedges_[j]);
    slot(a);
    slot(b);
    const long before = excess();
    --slot(hyperedges_[i]);
    --slot(hyperedges_[j]);
    ++slot(a);
    ++slot(b);
    return excess() - before;
  }

  void replace(std::size_t i, std::size_t j, NodeSet a, NodeSet b, double lambda_a,
               double lambda_b) {
    release(i);
    release(j);
    hyperedges_[i] = std::move(a);
    hyperedges_[j] = std::move(b);
    lambdas_[i] = lambda_a;
    lambdas_[j] = lambda_b;
    acquire(i);
    acquire(j);
  }

  void record_step(bool accepted) noexcept {
    ++steps_taken_;
    if (accepted) ++steps_accepted_;
  }

 private:
  void release(std::size_t i) {
    if (lambdas_[i] <= 0.0) --zero_density_;
    auto it = multiplicity_.find(hyperedges_[i]);
    if (it->second > 1) --duplicates_;
    if (--it->second == 0) multiplicity_.erase(it);
  }

  void acquire(std::size_t i) {
    if (lambdas_[i] <= 0.0) ++zero_density_;
    if (++multiplicity_[hyperedges_[i]] > 1) ++duplicates_;
  }

  std::vector<NodeSet> hyperedges_;
  std::vector<double> lambdas_;
  std::unordered_map<NodeSet, long, NodeSetHash> multiplicity_;
  std::size_t zero_density_ = 0;
  std::size_t duplicates_ = 0;
  std::uint64_t steps_taken_ = 0;
  std::uint64_t steps_accepted_ = 0;
};

/// One reshuffling proposal on a uniformly chosen pair of distinct
/// hyperedges, accepted with probability min(1, exp(log ratio)). Proposals
/// that would raise the number of repeated hyperedges are rejected. Returns
/// whether the proposal was accepted; a state with fewer than two hyperedges
/// is left untouched.
template <class Urbg>
bool mcmc_step(ChainState& state, const ModelParams& params, const MCMCConfig& config,
               Urbg& rng) {
  const std::size_t m = state.size();
  if (m < 2) return false;
  const std::size_t i = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
  std::size_t j = std::uniform_int_distribution<std::size_t>(0, m - 2)(rng);
  if (j >= i) ++j;

  const NodeSet& e1 = state.hyperedges()[i];
  const NodeSet& e2 = state.hyperedges()[j];
  auto [a, b] = shuffle_pair(e1, e2, rng);

  // Drawing the uniform unconditionally keeps the stream layout independent
  // of the acceptance path.
  const double log_u = std::log(uniform01(rng));

  if (state.duplicate_delta(i, j, a, b) > 0) {
    state.record_step(false);
    return false;
  }
  const double lambda_a = hyperedge_lambda(a, params);
  const double lambda_b = hyperedge_lambda(b, params);
  const auto ratio = acceptance_log_ratio_from_lambdas(
      state.lambdas()[i], state.lambdas()[j], lambda_a, lambda_b, static_cast<int>(e1.size()),
      static_cast<int>(e2.size()), params, config.tau);
  const bool accept = ratio.log_ratio >= 0.0 || log_u < ratio.log_ratio;
  if (accept) state.replace(i, j, std::move(a), std::move(b), lambda_a, lambda_b);
  state.record_step(accept);
  return accept;
}

/// Accepted and proposed counts of one run_chain call.
struct ChainRun {
  std::uint64_t taken = 0;
  std::uint64_t accepted = 0;

  /// accepted / taken, or 0 when no step was taken.
  double acceptance_rate() const noexcept {
    return taken == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(taken);
  }
};

template <class Urbg>
ChainRun run_chain(ChainState& state, const ModelParams& params, const MCMCConfig& config,
                   std::int64_t n_steps, Urbg& rng) {
  ChainRun run;
  if (state.size() < 2) return run;
#ifndef NDEBUG
  const auto initial = sequences_of(state.hyperedges(), params.n_nodes());
#endif
  for (std::int64_t step = 0; step < n_steps; ++step) {
    ++run.taken;
    if (mcmc_step(state, params, config, rng)) ++run.accepted;
#ifndef NDEBUG
    if ((step + 1) % 10000 == 0) {
      assert(sequences_of(state.hyperedges(), params.n_nodes()) == initial);
    }
#endif
  }
  return run;
}

}  // namespace hygen
