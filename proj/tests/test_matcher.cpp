#include <random>

#include <gtest/gtest.h>

#include "hygen/matcher.hpp"
#include "hygen/rng.hpp"
#include "oracles.hpp"

using namespace hygen;

TEST(ExtractHyperedge, DegreePriorityTopTwo) {
  Engine rng(1);
  DegreeSequence d{3, 1, 0};
  EXPECT_EQ(extract_hyperedge(2, d, Priority::DegreeSeq, rng), (NodeSet{0, 1}));
  EXPECT_EQ(d, (DegreeSequence{2, 0, 0}));
}

TEST(ExtractHyperedge, SizePriorityPadsWithZeroDegreeNodes) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Engine rng(seed);
    DegreeSequence d{1, 1, 0, 0};
    const auto e = extract_hyperedge(3, d, Priority::SizeSeq, rng);
    ASSERT_EQ(e.size(), 3u);
    EXPECT_EQ(e[0], 0);
    EXPECT_EQ(e[1], 1);
    EXPECT_TRUE(e[2] == 2 || e[2] == 3);
    EXPECT_EQ(d, (DegreeSequence{0, 0, 0, 0}));
  }
}

TEST(ExtractHyperedge, PaddingCoversBothCandidates) {
  std::set<Node> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Engine rng(seed);
    DegreeSequence d{1, 1, 0, 0};
    seen.insert(extract_hyperedge(3, d, Priority::SizeSeq, rng)[2]);
  }
  EXPECT_EQ(seen, (std::set<Node>{2, 3}));
}

TEST(ExtractHyperedge, DegreePriorityShortReturn) {
  Engine rng(1);
  DegreeSequence d{1, 0, 0};
  EXPECT_EQ(extract_hyperedge(3, d, Priority::DegreeSeq, rng), (NodeSet{0}));
  EXPECT_EQ(d, (DegreeSequence{0, 0, 0}));
}

TEST(ExtractHyperedge, SizeBeyondNodeCount) {
  Engine rng(1);
  DegreeSequence d{1, 1, 1};
  try {
    extract_hyperedge(4, d, Priority::SizeSeq, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidHyperedgeSize);
  }
}

TEST(BuildInitialConfiguration, CompatibleUniqueRealization) {
  for (auto pr : {Priority::DegreeSeq, Priority::SizeSeq}) {
    Engine rng(2);
    const auto out = build_initial_configuration({1, 1}, {{2, 1}}, pr, 2, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0], (NodeSet{0, 1}));
  }
}

TEST(BuildInitialConfiguration, TiesBrokenByLowestIndex) {
  Engine rng(3);
  const auto out = build_initial_configuration({2, 1, 1}, {{2, 2}}, Priority::DegreeSeq, 2, rng);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], (NodeSet{0, 1}));
  EXPECT_EQ(out[1], (NodeSet{0, 2}));
}

TEST(BuildInitialConfiguration, IncompatibleDegreePriority) {
  Engine rng(4);
  const auto out = build_initial_configuration({1, 1}, {{2, 2}}, Priority::DegreeSeq, 2, rng);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (NodeSet{0, 1}));
  const auto [d, k] = sequences_of(out, 2);
  EXPECT_EQ(d, (DegreeSequence{1, 1}));
}

TEST(BuildInitialConfiguration, EmptyInputs) {
  Engine rng(5);
  EXPECT_TRUE(build_initial_configuration({}, {}, Priority::DegreeSeq, 3, rng).empty());
  EXPECT_TRUE(build_initial_configuration({0, 0, 0}, {}, Priority::SizeSeq, 3, rng).empty());
}

TEST(BuildInitialConfiguration, RejectsSizesAboveMax) {
  Engine rng(6);
  EXPECT_THROW(build_initial_configuration({1, 1, 1}, {{3, 1}}, Priority::SizeSeq, 2, rng), Error);
}

TEST(BuildInitialConfiguration, DegreeTailLoopExhaustsDegrees) {
  Engine rng(7);
  const DegreeSequence d{3, 2, 2, 1, 1, 1};
  const auto out = build_initial_configuration(d, {}, Priority::DegreeSeq, 4, rng);
  EXPECT_EQ(sequences_of(out, d.size()).first, d);
  for (const auto& e : out) {
    EXPECT_GE(e.size(), 2u);
    EXPECT_LE(e.size(), 4u);
  }
}

TEST(SequencesOf, DirectCounts) {
  const auto [d0, k0] = sequences_of(std::vector<NodeSet>{}, 3);
  EXPECT_EQ(d0, (DegreeSequence{0, 0, 0}));
  EXPECT_TRUE(k0.empty());
  const auto [d, k] = sequences_of(std::vector<NodeSet>{{0, 1}, {0, 1, 2}}, 3);
  EXPECT_EQ(d, (DegreeSequence{2, 2, 1}));
  EXPECT_EQ(k, (SizeSequence{{2, 1}, {3, 1}}));
  EXPECT_THROW(sequences_of(std::vector<NodeSet>{{0, 3}}, 3), Error);
}

TEST(BuildInitialConfiguration, CompatiblePairsReproduceBothSequences) {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = std::uniform_int_distribution<int>(6, 30)(gen);
    const int m = std::uniform_int_distribution<int>(1, 3 * n)(gen);
    const int max_size = std::uniform_int_distribution<int>(2, std::min(n, 6))(gen);
    const auto h = oracle::random_hyperedges(n, m, max_size, gen);
    const auto [d, k] = sequences_of(h, static_cast<std::size_t>(n));
    for (auto pr : {Priority::DegreeSeq, Priority::SizeSeq}) {
      Engine rng(static_cast<std::uint64_t>(rep));
      const auto out = build_initial_configuration(d, k, pr, max_size, rng);
      const auto [d2, k2] = sequences_of(out, static_cast<std::size_t>(n));
      EXPECT_EQ(d2, d);
      EXPECT_EQ(normalized(k2), normalized(k));
    }
  }
}

TEST(BuildInitialConfiguration, SizePriorityExactForArbitraryInputs) {
  std::mt19937_64 gen(22);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = std::uniform_int_distribution<int>(5, 40)(gen);
    const int max_size = std::uniform_int_distribution<int>(2, std::min(n, 8))(gen);
    DegreeSequence d(static_cast<std::size_t>(n));
    for (auto& v : d) v = std::uniform_int_distribution<int>(0, 6)(gen);
    SizeSequence k;
    for (int s = 2; s <= max_size; ++s) k[s] = std::uniform_int_distribution<int>(0, 10)(gen);
    Engine rng(static_cast<std::uint64_t>(rep));
    const auto out = build_initial_configuration(d, k, Priority::SizeSeq, max_size, rng);
    EXPECT_EQ(normalized(sequences_of(out, d.size()).second), normalized(k));
    for (const auto& e : out) {
      EXPECT_TRUE(std::adjacent_find(e.begin(), e.end()) == e.end());
    }
  }
}

TEST(BuildInitialConfiguration, DegreePriorityExactForRealizableInputs) {
  std::mt19937_64 gen(23);
  int realizable_cases = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const int n = std::uniform_int_distribution<int>(5, 40)(gen);
    const int max_size = std::uniform_int_distribution<int>(2, std::min(n, 8))(gen);
    DegreeSequence d(static_cast<std::size_t>(n));
    std::int64_t total = 0;
    std::int64_t top = 0;
    for (auto& v : d) {
      v = std::uniform_int_distribution<int>(0, 6)(gen);
      total += v;
      top = std::max(top, v);
    }
    if (!ResidualDegrees::realizable(total, top, max_size)) continue;
    ++realizable_cases;
    SizeSequence k;
    for (int s = 2; s <= max_size; ++s) k[s] = std::uniform_int_distribution<int>(0, 10)(gen);
    Engine rng(static_cast<std::uint64_t>(rep));
    const auto out = build_initial_configuration(d, k, Priority::DegreeSeq, max_size, rng);
    EXPECT_EQ(sequences_of(out, d.size()).first, d);
    for (const auto& e : out) {
      EXPECT_GE(e.size(), 2u);
      EXPECT_LE(static_cast<int>(e.size()), max_size);
    }
  }
  EXPECT_GT(realizable_cases, 200);
}
