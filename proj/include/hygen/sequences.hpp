#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "hygen/expected.hpp"
#include "hygen/hypergraph.hpp"
#include "hygen/model.hpp"

namespace hygen {

/// Gaussian moments used to draw one count.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Per-node moments of the binary degree. Under the first-order
/// approximation both equal the expected weighted degree.
inline std::vector<Moments> clt_degree_moments(const ModelParams& params, SizeRange range) {
  const auto degrees = expected_node_degrees(params, range);
  std::vector<Moments> out;
  out.reserve(degrees.size());
  for (double m : degrees) out.push_back({m, m});
  return out;
}

inline std::vector<Moments> clt_degree_moments(const ModelParams& params) {
  return clt_degree_moments(params, SizeRange::full(params));
}

/// Per-size moments of the hyperedge count, keyed by size.
inline std::map<int, Moments> clt_size_moments(const ModelParams& params, SizeRange range) {
  const auto counts = expected_size_counts(params, range);
  std::map<int, Moments> out;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    out.emplace(range.lo + static_cast<int>(j), Moments{counts[j], counts[j]});
  }
  return out;
}

inline std::map<int, Moments> clt_size_moments(const ModelParams& params) {
  return clt_size_moments(params, SizeRange::full(params));
}

/// Gaussian draw rounded to the nearest integer and clamped below at zero.
template <class Urbg>
std::int64_t draw_count(Moments m, Urbg& rng) {
  double x = m.mean;
  if (m.variance > 0.0) {
    x = std::normal_distribution<double>(m.mean, std::sqrt(m.variance))(rng);
  }
  return std::max<std::int64_t>(0, std::llround(x));
}

template <class Urbg>
DegreeSequence sample_degree_sequence(const ModelParams& params, SizeRange range, Urbg& rng) {
  const auto moments = clt_degree_moments(params, range);
  DegreeSequence d;
  d.reserve(moments.size());
  for (const auto& m : moments) d.push_back(draw_count(m, rng));
  return d;
}

template <class Urbg>
DegreeSequence sample_degree_sequence(const ModelParams& params, Urbg& rng) {
  return sample_degree_sequence(params, SizeRange::full(params), rng);
}

/// Independent per-size draws; sizes whose draw is zero are kept with count 0.
template <class Urbg>
SizeSequence sample_size_sequence(const ModelParams& params, SizeRange range, Urbg& rng) {
  SizeSequence k;
  for (const auto& [size, m] : clt_size_moments(params, range)) k[size] = draw_count(m, rng);
  return k;
}

template <class Urbg>
SizeSequence sample_size_sequence(const ModelParams& params, Urbg& rng) {
  return sample_size_sequence(params, SizeRange::full(params), rng);
}

}  // namespace hygen
