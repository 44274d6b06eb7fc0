#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hygen/error.hpp"
#include "hygen/hypergraph.hpp"

namespace hygen {

/// log C(a, b) through log-gamma; never forms the binomial itself.
inline double log_binomial(double a, double b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

/// Rule assigning the size normalization kappa_n > 0 to every hyperedge size.
class NormalizationScheme {
 public:
  enum class Kind { Default, Binomial, Unit, UserTable };

  /// kappa_n = n(n-1)/2 * C(N-2, n-2); kappa_2 = 1.
  static NormalizationScheme make_default() { return NormalizationScheme(Kind::Default, {}); }
  /// kappa_n = C(N-2, n-2).
  static NormalizationScheme binomial() { return NormalizationScheme(Kind::Binomial, {}); }
  /// kappa_n = 1.
  static NormalizationScheme unit() { return NormalizationScheme(Kind::Unit, {}); }
  /// Explicit values; table[0] is kappa_2, table[i] is kappa_{i+2}.
  static NormalizationScheme user_table(std::vector<double> table) {
    for (double v : table) {
      if (!std::isfinite(v) || v <= 0.0) {
        fail(ErrorCode::InvalidKappa, "user kappa values must be finite and > 0");
      }
    }
    return NormalizationScheme(Kind::UserTable, std::move(table));
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& table() const noexcept { return table_; }

  /// log kappa_n for hyperedge size n on N nodes.
  double log_kappa(int n, std::size_t n_nodes) const {
    const auto N = static_cast<double>(n_nodes);
    if (n < 2 || static_cast<std::size_t>(n) > n_nodes) {
      fail(ErrorCode::InvalidHyperedgeSize,
           "kappa requested for size " + std::to_string(n) + " on " + std::to_string(n_nodes) +
               " nodes");
    }
    switch (kind_) {
      case Kind::Default:
        return std::log(n * (n - 1.0) / 2.0) + log_binomial(N - 2.0, n - 2.0);
      case Kind::Binomial:
        return log_binomial(N - 2.0, n - 2.0);
      case Kind::Unit:
        return 0.0;
      case Kind::UserTable:
        if (static_cast<std::size_t>(n - 2) >= table_.size()) {
          fail(ErrorCode::InvalidKappa, "no user kappa for size " + std::to_string(n));
        }
        return std::log(table_[static_cast<std::size_t>(n - 2)]);
    }
    return 0.0;
  }

 private:
  NormalizationScheme(Kind kind, std::vector<double> table)
      : kind_(kind), table_(std::move(table)) {}

  Kind kind_;
  std::vector<double> table_;
};

inline constexpr double kAffinitySymmetryTolerance = 1e-12;

/// Validated model parameters: memberships u (N x K), affinity w (K x K),
/// maximum hyperedge size D and the kappa scheme. Immutable once built.
class ModelParams {
 public:
  ModelParams(Eigen::MatrixXd u, Eigen::MatrixXd w, int max_size, NormalizationScheme kappa)
      : u_(std::move(u)), w_(std::move(w)), max_size_(max_size), kappa_(std::move(kappa)) {
    validate();
    uw_ = u_ * w_;
    self_ = (uw_.array() * u_.array()).rowwise().sum();
    log_kappa_.assign(static_cast<std::size_t>(max_size_) + 1,
                      std::numeric_limits<double>::quiet_NaN());
    for (int n = 2; n <= max_size_; ++n) {
      log_kappa_[static_cast<std::size_t>(n)] = kappa_.log_kappa(n, n_nodes());
    }
  }

  std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(u_.rows()); }
  std::size_t n_communities() const noexcept { return static_cast<std::size_t>(u_.cols()); }
  int max_size() const noexcept { return max_size_; }

  const Eigen::MatrixXd& u() const noexcept { return u_; }
  const Eigen::MatrixXd& w() const noexcept { return w_; }
  const NormalizationScheme& kappa() const noexcept { return kappa_; }

  /// Rows of u * w, so that u_i^T w u_j = uw().row(i).dot(u().row(j)).
  const Eigen::MatrixXd& uw() const noexcept { return uw_; }
  /// u_i^T w u_i per node.
  const Eigen::VectorXd& self_interaction() const noexcept { return self_; }

  double interaction(Node i, Node j) const {
    return uw_.row(i).dot(u_.row(j));
  }

  double log_kappa(int n) const {
    if (n < 2 || n > max_size_) {
      fail(ErrorCode::InvalidHyperedgeSize, "size " + std::to_string(n) + " outside [2, " +
                                                std::to_string(max_size_) + "]");
    }
    return log_kappa_[static_cast<std::size_t>(n)];
  }

  /// Same memberships and kappa with a different affinity matrix.
  ModelParams with_affinity(Eigen::MatrixXd w) const {
    return ModelParams(u_, std::move(w), max_size_, kappa_);
  }

 private:
  void validate() {
    if (u_.rows() < 2) fail(ErrorCode::DimensionMismatch, "need at least two nodes");
    if (u_.cols() < 1) fail(ErrorCode::DimensionMismatch, "need at least one community");
    if (w_.rows() != u_.cols() || w_.cols() != u_.cols()) {
      fail(ErrorCode::DimensionMismatch,
           "w must be " + std::to_string(u_.cols()) + "x" + std::to_string(u_.cols()));
    }
    if (!u_.allFinite() || !w_.allFinite()) {
      fail(ErrorCode::NonFiniteEntry, "u and w must be finite");
    }
    if ((u_.array() < 0.0).any() || (w_.array() < 0.0).any()) {
      fail(ErrorCode::NegativeEntry, "u and w must be nonnegative");
    }
    for (Eigen::Index a = 0; a < w_.rows(); ++a) {
      for (Eigen::Index b = a + 1; b < w_.cols(); ++b) {
        const double x = w_(a, b);
        const double y = w_(b, a);
        const double scale = std::max(std::abs(x), std::abs(y));
        if (std::abs(x - y) > kAffinitySymmetryTolerance * scale) {
          fail(ErrorCode::AsymmetricAffinity, "w(" + std::to_string(a) + "," +
                                                  std::to_string(b) + ") != w(" +
                                                  std::to_string(b) + "," + std::to_string(a) +
                                                  ")");
        }
        w_(a, b) = w_(b, a) = 0.5 * (x + y);
      }
    }
    if (max_size_ < 2 || static_cast<std::size_t>(max_size_) > n_nodes()) {
      fail(ErrorCode::InvalidMaxSize, "max size must lie in [2, N], got " +
                                          std::to_string(max_size_));
    }
    if (kappa_.kind() == NormalizationScheme::Kind::UserTable &&
        kappa_.table().size() < static_cast<std::size_t>(max_size_ - 1)) {
      fail(ErrorCode::InvalidKappa, "user kappa table must cover sizes 2.." +
                                        std::to_string(max_size_));
    }
  }

  Eigen::MatrixXd u_;
  Eigen::MatrixXd w_;
  int max_size_;
  NormalizationScheme kappa_;
  Eigen::MatrixXd uw_;
  Eigen::VectorXd self_;
  std::vector<double> log_kappa_;
};

inline ModelParams validate_params(Eigen::MatrixXd u, Eigen::MatrixXd w, int max_size,
                                   NormalizationScheme kappa) {
  return ModelParams(std::move(u), std::move(w), max_size, std::move(kappa));
}

inline void check_hyperedge(std::span<const Node> e, const ModelParams& params) {
  if (e.size() < 2) fail(ErrorCode::InvalidHyperedgeSize, "hyperedges need at least two nodes");
  check_nodes_in_range(e, params.n_nodes());
}

/// Sufficient statistic lambda_e: sum of u_i^T w u_j over node pairs of e,
/// accumulated in lexicographic pair order.
inline double lambda(std::span<const Node> e, const ModelParams& params) {
  check_hyperedge(e, params);
  double sum = 0.0;
  for (std::size_t a = 0; a < e.size(); ++a) {
    const auto row = params.uw().row(e[a]);
    for (std::size_t b = a + 1; b < e.size(); ++b) {
      sum += row.dot(params.u().row(e[b]));
    }
  }
  return sum;
}

/// log(lambda_e / kappa_|e|); -infinity when lambda_e == 0.
inline double log_poisson_mean(std::span<const Node> e, const ModelParams& params) {
  const double lam = lambda(e, params);
  if (lam <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(lam) - params.log_kappa(static_cast<int>(e.size()));
}

/// Probability that hyperedge e is present: 1 - exp(-lambda_e / kappa_|e|).
inline double existence_prob(std::span<const Node> e, const ModelParams& params) {
  const double log_mean = log_poisson_mean(e, params);
  return -std::expm1(-std::exp(log_mean));
}

/// lambda_e for the chain's hot path. Large hyperedges use the linear-time
/// pair-sum identity; near-total cancellation falls back to the pair loop so
/// that exact zeros stay exact.
inline double hyperedge_lambda(std::span<const Node> e, const ModelParams& params) {
  if (e.size() <= 12) return lambda(e, params);
  check_hyperedge(e, params);
  const auto K = static_cast<Eigen::Index>(params.n_communities());
  Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(K);
  Eigen::RowVectorXd sw = Eigen::RowVectorXd::Zero(K);
  double diagonal = 0.0;
  for (Node v : e) {
    s += params.u().row(v);
    sw += params.uw().row(v);
    diagonal += params.self_interaction()(v);
  }
  const double total = sw.dot(s);
  const double pairs = 0.5 * (total - diagonal);
  if (pairs > 1e-9 * total) return pairs;
  return lambda(e, params);
}

namespace detail {

// log(exp(x) - 1) given log x.
inline double log_expm1_from_log(double log_x) {
  if (log_x < -20.0) {
    const double x = std::exp(log_x);
    return log_x + std::log1p(0.5 * x);
  }
  const double x = std::exp(log_x);
  if (x > 35.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

}  // namespace detail

}  // namespace hygen
