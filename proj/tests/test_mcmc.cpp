#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "hygen/mcmc.hpp"
#include "oracles.hpp"

using namespace hygen;

namespace {

ModelParams two_blocks(int n, int max_size) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, 2);
  for (int i = 0; i < n; ++i) u(i, i < n / 2 ? 0 : 1) = 1.0;
  return ModelParams(u, Eigen::MatrixXd::Identity(2, 2), max_size, NormalizationScheme::make_default());
}

std::multiset<NodeSet> as_multiset(const std::vector<NodeSet>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(ShufflePair, IdenticalHyperedgesUnchanged) {
  Engine rng(1);
  const NodeSet e{1, 4, 6};
  const auto [a, b] = shuffle_pair(e, e, rng);
  EXPECT_EQ(a, e);
  EXPECT_EQ(b, e);
}

TEST(ShufflePair, TwoPossiblePartitions) {
  std::set<std::pair<NodeSet, NodeSet>> seen;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Engine rng(s);
    seen.insert(shuffle_pair({1, 2}, {1, 3}, rng));
  }
  const std::set<std::pair<NodeSet, NodeSet>> expected{{{1, 2}, {1, 3}}, {{1, 3}, {1, 2}}};
  EXPECT_EQ(seen, expected);
}

TEST(ShufflePair, PreservesSizesAndMemberships) {
  std::mt19937_64 gen(3);
  Engine rng(4);
  for (int rep = 0; rep < 100000; ++rep) {
    const auto pair = oracle::random_hyperedges(12, 2, 7, gen);
    if (pair.size() < 2) continue;
    const auto [a, b] = shuffle_pair(pair[0], pair[1], rng);
    ASSERT_EQ(a.size(), pair[0].size());
    ASSERT_EQ(b.size(), pair[1].size());
    std::multiset<Node> before(pair[0].begin(), pair[0].end());
    before.insert(pair[1].begin(), pair[1].end());
    std::multiset<Node> after(a.begin(), a.end());
    after.insert(b.begin(), b.end());
    ASSERT_EQ(before, after);
    ASSERT_TRUE(std::is_sorted(a.begin(), a.end()));
    ASSERT_TRUE(std::adjacent_find(a.begin(), a.end()) == a.end());
    ASSERT_TRUE(std::adjacent_find(b.begin(), b.end()) == b.end());
  }
}

TEST(ShufflePair, UniformOverPartitions) {
  // {0,1,2} vs {3,4}: C(5,3) = 10 equally likely outcomes.
  Engine rng(5);
  std::map<NodeSet, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[shuffle_pair({0, 1, 2}, {3, 4}, rng).first];
  ASSERT_EQ(counts.size(), 10u);
  for (const auto& [e, c] : counts) EXPECT_NEAR(c / double(draws), 0.1, 0.005);
}

TEST(AcceptanceLogRatio, NoOpProposalIsZero) {
  std::mt19937_64 gen(6);
  auto inst = oracle::random_instance(8, 2, gen);
  const ModelParams p(inst.u, inst.w, 4, NormalizationScheme::make_default());
  const NodeSet e1{0, 1, 2};
  const NodeSet e2{3, 4};
  EXPECT_EQ(acceptance_log_ratio(e1, e2, e1, e2, p, std::log(100.0)).log_ratio, 0.0);
}

TEST(AcceptanceLogRatio, HandEvaluatedLogTwo) {
  // kappa_2 = 1 so lambda / kappa = lambda.
  const double l1 = std::log(2.0);
  const double l1n = std::log(3.0);
  const ModelParams p(Eigen::MatrixXd::Ones(4, 1), Eigen::MatrixXd::Ones(1, 1), 2,
                      NormalizationScheme::make_default());
  const auto r = acceptance_log_ratio_from_lambdas(l1, 0.7, l1n, 0.7, 2, 2, p, std::log(100.0));
  EXPECT_NEAR(r.log_ratio, std::log(2.0), 1e-12);
}

TEST(AcceptanceLogRatio, DeepSparseLinearization) {
  const ModelParams p(Eigen::MatrixXd::Ones(4, 1), Eigen::MatrixXd::Ones(1, 1), 2,
                      NormalizationScheme::make_default());
  const auto r = acceptance_log_ratio_from_lambdas(1e-9, 0.5, 2e-9, 0.5, 2, 2, p, std::log(100.0));
  EXPECT_NEAR(r.log_ratio, std::log(2.0), 1e-12);
  const long double exact = std::log(std::expm1(2e-9L) / std::expm1(1e-9L));
  EXPECT_LT(std::abs(static_cast<long double>(r.log_ratio) - exact), 0.005L);
}

TEST(AcceptanceLogRatio, ExactBranchMatchesDirectFormula) {
  std::mt19937_64 gen(7);
  auto inst = oracle::random_instance(9, 3, gen);
  const ModelParams p(inst.u, inst.w, 5, NormalizationScheme::unit());
  const NodeSet e1{0, 1, 2, 3};
  const NodeSet e2{4, 5, 6};
  const NodeSet a{0, 1, 4, 5};
  const NodeSet b{2, 3, 6};
  auto f = [&](const NodeSet& e) { return std::expm1(oracle::lambda(e, inst.u, inst.w)); };
  const double direct = std::log(f(a) * f(b) / (f(e1) * f(e2)));
  EXPECT_NEAR(acceptance_log_ratio(e1, e2, a, b, p, std::log(100.0)).log_ratio, direct, 1e-10);
  EXPECT_THROW(acceptance_log_ratio(e1, e2, b, a, p, std::log(100.0)), Error);
}

TEST(AcceptanceLogRatio, ZeroDensityProposalAndCurrent) {
  const auto p = two_blocks(4, 2);
  const auto into_zero = acceptance_log_ratio({0, 1}, {2, 3}, {0, 2}, {1, 3}, p, 1.0);
  EXPECT_EQ(into_zero.log_ratio, -std::numeric_limits<double>::infinity());
  EXPECT_FALSE(into_zero.current_zero_density);
  const auto out_of_zero = acceptance_log_ratio({0, 2}, {1, 3}, {0, 1}, {2, 3}, p, 1.0);
  EXPECT_EQ(out_of_zero.log_ratio, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(out_of_zero.current_zero_density);
}

TEST(McmcStep, UniformParamsAcceptEverything) {
  const ModelParams p(Eigen::MatrixXd::Ones(60, 1), Eigen::MatrixXd::Ones(1, 1), 4,
                      NormalizationScheme::make_default());
  std::vector<NodeSet> config;
  for (int j = 0; j < 15; ++j) config.push_back({4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3});
  ChainState state(config, p);
  Engine rng(8);
  const auto run = run_chain(state, p, MCMCConfig{}, 5000, rng);
  EXPECT_EQ(run.accepted, run.taken);
  EXPECT_DOUBLE_EQ(run.acceptance_rate(), 1.0);
  EXPECT_EQ(state.steps_taken(), 5000u);
}

TEST(McmcStep, ZeroDensityProposalAlwaysRejected) {
  const auto p = two_blocks(4, 2);
  ChainState state({{0, 1}, {2, 3}}, p);
  Engine rng(9);
  const auto run = run_chain(state, p, MCMCConfig{}, 10000, rng);
  EXPECT_EQ(as_multiset(state.hyperedges()), as_multiset({{0, 1}, {2, 3}}));
  // Half of the proposals are the identity ({0,1},{2,3}) in one of its two orders.
  EXPECT_GT(run.accepted, 0u);
  EXPECT_EQ(state.zero_density_count(), 0u);
}

TEST(McmcStep, FewerThanTwoHyperedgesIsNoOp) {
  const auto p = two_blocks(4, 2);
  ChainState state({{0, 1}}, p);
  Engine rng(10);
  EXPECT_FALSE(mcmc_step(state, p, MCMCConfig{}, rng));
  EXPECT_EQ(state.steps_taken(), 0u);
}

TEST(RunChain, ZeroStepsReportsZeroOfZero) {
  const auto p = two_blocks(6, 3);
  ChainState state({{0, 1, 2}, {3, 4, 5}}, p);
  Engine rng(11);
  const auto run = run_chain(state, p, MCMCConfig{}, 0, rng);
  EXPECT_EQ(run.taken, 0u);
  EXPECT_EQ(run.acceptance_rate(), 0.0);
}

TEST(RunChain, SequencesInvariantAndDuplicatesNeverGrow) {
  std::mt19937_64 gen(12);
  const int n = 40;
  auto inst = oracle::random_instance(n, 3, gen);
  const ModelParams p(inst.u, inst.w, 6, NormalizationScheme::make_default());
  const auto config = oracle::random_hyperedges(n, 80, 6, gen);
  ChainState state(config, p);
  const auto before = sequences_of(config, n);
  Engine rng(13);
  for (int block = 0; block < 20; ++block) {
    run_chain(state, p, MCMCConfig{}, 5000, rng);
    ASSERT_EQ(sequences_of(state.hyperedges(), n), before);
    ASSERT_EQ(state.duplicate_count(), 0u);
  }
  EXPECT_GT(state.steps_accepted(), 0u);
}

TEST(RunChain, DeterministicUnderSeed) {
  std::mt19937_64 gen(14);
  auto inst = oracle::random_instance(30, 2, gen);
  const ModelParams p(inst.u, inst.w, 5, NormalizationScheme::make_default());
  const auto config = oracle::random_hyperedges(30, 40, 5, gen);
  ChainState a(config, p);
  ChainState b(config, p);
  Engine ra(15);
  Engine rb(15);
  run_chain(a, p, MCMCConfig{}, 20000, ra);
  run_chain(b, p, MCMCConfig{}, 20000, rb);
  EXPECT_EQ(a.hyperedges(), b.hyperedges());
  EXPECT_EQ(a.steps_accepted(), b.steps_accepted());
}

TEST(RunChain, LeavesZeroDensityStates) {
  // Start in a zero-density matching; the chain moves to the positive ones.
  const auto p = two_blocks(4, 2);
  ChainState state({{0, 2}, {1, 3}}, p);
  EXPECT_EQ(state.zero_density_count(), 2u);
  Engine rng(16);
  run_chain(state, p, MCMCConfig{}, 1000, rng);
  EXPECT_EQ(state.zero_density_count(), 0u);
}

TEST(RunChain, StationaryOnFourNodes) {
  std::mt19937_64 gen(17);
  auto inst = oracle::random_instance(4, 2, gen);
  const ModelParams p(inst.u, inst.w, 2, NormalizationScheme::make_default());
  const std::vector<std::set<NodeSet>> matchings{
      {{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
  std::vector<double> target;
  for (const auto& m : matchings) {
    double w = 1.0;
    for (const auto& e : m) w *= std::expm1(oracle::lambda(e, inst.u, inst.w));
    target.push_back(w);
  }
  const double z = target[0] + target[1] + target[2];
  ChainState state({{0, 1}, {2, 3}}, p);
  Engine rng(18);
  std::vector<double> visits(3, 0.0);
  const int steps = 200000;
  for (int s = 0; s < steps; ++s) {
    mcmc_step(state, p, MCMCConfig{}, rng);
    const std::set<NodeSet> cur(state.hyperedges().begin(), state.hyperedges().end());
    for (std::size_t m = 0; m < 3; ++m) {
      if (cur == matchings[m]) visits[m] += 1.0;
    }
  }
  double tv = 0.0;
  for (std::size_t m = 0; m < 3; ++m) tv += std::abs(visits[m] / steps - target[m] / z);
  EXPECT_LT(0.5 * tv, 0.02);
}

TEST(ChainState, CachedRatesAndCountersMatchRecomputation) {
  std::mt19937_64 gen(31);
  const auto inst = oracle::random_instance(20, 2, gen);
  Eigen::MatrixXd u = inst.u;
  for (int i = 0; i < 5; ++i) u.row(i).setZero();
  const ModelParams params(u, inst.w, 5, NormalizationScheme::make_default());
  auto config = oracle::random_hyperedges(20, 40, 5, gen);
  config.push_back(config.front());
  ChainState state(config, params);
  Engine rng(32);
  for (int round = 0; round < 20; ++round) {
    run_chain(state, params, MCMCConfig{}, 500, rng);
    std::map<NodeSet, int> copies;
    std::size_t zeros = 0;
    std::size_t repeats = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      const auto& e = state.hyperedges()[i];
      EXPECT_NEAR(state.lambdas()[i], oracle::lambda(e, u, inst.w), 1e-12);
      if (oracle::lambda(e, u, inst.w) <= 0.0) ++zeros;
      if (++copies[e] > 1) ++repeats;
    }
    EXPECT_EQ(state.zero_density_count(), zeros);
    EXPECT_EQ(state.duplicate_count(), repeats);
  }
}
