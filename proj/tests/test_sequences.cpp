#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "hygen/rng.hpp"
#include "hygen/sequences.hpp"
#include "oracles.hpp"

using namespace hygen;

TEST(CltDegreeMoments, ZeroMembershipsGiveZeroMeans) {
  const ModelParams p(Eigen::MatrixXd::Zero(6, 2), Eigen::MatrixXd::Identity(2, 2), 3,
                      NormalizationScheme::make_default());
  for (const auto& m : clt_degree_moments(p)) {
    EXPECT_EQ(m.mean, 0.0);
    EXPECT_EQ(m.variance, 0.0);
  }
}

TEST(CltDegreeMoments, MatchesEnumeration) {
  std::mt19937_64 rng(13);
  const int n = 6;
  auto inst = oracle::random_instance(n, 2, rng);
  const ModelParams p(inst.u, inst.w, 4, NormalizationScheme::make_default());
  std::vector<double> ref(n, 0.0);
  for (const auto& e : oracle::enumerate_hyperedges(n, 2, 4)) {
    const double mean = oracle::lambda(e, inst.u, inst.w) /
                        oracle::kappa_default(static_cast<int>(e.size()), n);
    for (Node v : e) ref[static_cast<std::size_t>(v)] += mean;
  }
  const auto moments = clt_degree_moments(p);
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(moments[static_cast<std::size_t>(i)].mean, ref[static_cast<std::size_t>(i)],
                1e-9 * ref[static_cast<std::size_t>(i)]);
    EXPECT_EQ(moments[static_cast<std::size_t>(i)].mean,
              moments[static_cast<std::size_t>(i)].variance);
  }
}

TEST(CltDegreeMoments, UniformPairsUnitKappa) {
  const double c = 0.7;
  const int n = 9;
  const ModelParams p(Eigen::MatrixXd::Ones(n, 1), Eigen::MatrixXd::Constant(1, 1, c), 2,
                      NormalizationScheme::unit());
  for (const auto& m : clt_degree_moments(p)) EXPECT_NEAR(m.mean, (n - 1) * c, 1e-12);
}

TEST(CltSizeMoments, UniformPairsDefaultKappa) {
  const double c = 0.4;
  const int n = 12;
  const ModelParams p(Eigen::MatrixXd::Ones(n, 1), Eigen::MatrixXd::Constant(1, 1, c), 6,
                      NormalizationScheme::make_default());
  for (const auto& [size, m] : clt_size_moments(p)) {
    EXPECT_NEAR(m.mean, c * n * (n - 1) / (size * (size - 1.0)), 1e-10);
    EXPECT_EQ(m.mean, m.variance);
  }
  const ModelParams q(Eigen::MatrixXd::Ones(10, 1), Eigen::MatrixXd::Ones(1, 1), 3,
                      NormalizationScheme::make_default());
  EXPECT_NEAR(clt_size_moments(q).at(2).mean, 45.0, 1e-10);
}

TEST(CltSizeMoments, ZeroAffinity) {
  const ModelParams p(Eigen::MatrixXd::Ones(5, 2), Eigen::MatrixXd::Zero(2, 2), 4,
                      NormalizationScheme::make_default());
  for (const auto& [size, m] : clt_size_moments(p)) EXPECT_EQ(m.mean, 0.0);
}

TEST(DrawCount, DegenerateAndClamped) {
  Engine rng(1);
  EXPECT_EQ(draw_count({3.0, 0.0}, rng), 3);
  EXPECT_EQ(draw_count({-0.4, 0.0}, rng), 0);
  for (int i = 0; i < 1000; ++i) EXPECT_GE(draw_count({-0.4, 1.0}, rng), 0);
}

TEST(DrawCount, EmpiricalMean) {
  Engine rng(2);
  const int draws = 10000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(draw_count({100.0, 100.0}, rng));
  EXPECT_NEAR(sum / draws, 100.0, 3.0 * 10.0 / 100.0);
}

TEST(SampleSizeSequence, RangeAndZeroMeans) {
  Engine rng(3);
  const ModelParams p(Eigen::MatrixXd::Ones(8, 1), Eigen::MatrixXd::Ones(1, 1), 2,
                      NormalizationScheme::make_default());
  const auto k = sample_size_sequence(p, rng);
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k.begin()->first, 2);
  const ModelParams z(Eigen::MatrixXd::Ones(8, 1), Eigen::MatrixXd::Zero(1, 1), 5,
                      NormalizationScheme::make_default());
  for (auto [size, count] : sample_size_sequence(z, rng)) EXPECT_EQ(count, 0);
}

TEST(SampleSizeSequence, EmpiricalMeanWithinThreeStandardErrors) {
  std::mt19937_64 gen(5);
  auto inst = oracle::random_instance(30, 2, gen);
  const ModelParams p(inst.u, inst.w, 3, NormalizationScheme::make_default());
  const double mean = clt_size_moments(p).at(2).mean;
  Engine rng(6);
  const int draws = 10000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_size_sequence(p, rng).at(2));
  EXPECT_NEAR(sum / draws, mean, 3.0 * std::sqrt(mean / draws) + 0.5 / draws);
}

TEST(SampleDegreeSequence, DeterministicUnderSeed) {
  std::mt19937_64 gen(8);
  auto inst = oracle::random_instance(40, 3, gen);
  const ModelParams p(inst.u, inst.w, 5, NormalizationScheme::make_default());
  auto a = make_stream(42, "degree-sequence");
  auto b = make_stream(42, "degree-sequence");
  const auto da = sample_degree_sequence(p, a);
  EXPECT_EQ(da, sample_degree_sequence(p, b));
  for (auto v : da) EXPECT_GE(v, 0);
}

TEST(SampleDegreeSequence, SparseRegimeAgreesWithBernoulliSums) {
  // With every mean below 0.01 the Poisson means and exact presence
  // probabilities agree to within 1%.
  std::mt19937_64 gen(9);
  const int n = 8;
  auto inst = oracle::random_instance(n, 2, gen);
  inst.w *= 1e-3;
  const ModelParams p(inst.u, inst.w, 4, NormalizationScheme::make_default());
  std::vector<double> exact(n, 0.0);
  for (const auto& e : oracle::enumerate_hyperedges(n, 2, 4)) {
    const double mean = oracle::lambda(e, inst.u, inst.w) /
                        oracle::kappa_default(static_cast<int>(e.size()), n);
    ASSERT_LT(mean, 0.01);
    for (Node v : e) exact[static_cast<std::size_t>(v)] += -std::expm1(-mean);
  }
  const auto moments = clt_degree_moments(p);
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(moments[static_cast<std::size_t>(i)].mean, exact[static_cast<std::size_t>(i)],
                0.01 * exact[static_cast<std::size_t>(i)]);
  }
}

TEST(Rng, StreamsAreIndependentOfEachOther) {
  EXPECT_NE(derive_seed(1, "chain", 0), derive_seed(1, "chain", 1));
  EXPECT_NE(derive_seed(1, "chain", 0), derive_seed(1, "weights", 0));
  EXPECT_NE(derive_seed(1, "chain", 0), derive_seed(2, "chain", 0));
  EXPECT_EQ(derive_seed(7, "dyadic", 3), derive_seed(7, "dyadic", 3));
}
