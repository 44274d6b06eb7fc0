#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hygen/error.hpp"
#include "hygen/expected.hpp"
#include "hygen/hypergraph.hpp"
#include "hygen/matcher.hpp"
#include "hygen/mcmc.hpp"
#include "hygen/model.hpp"
#include "hygen/rng.hpp"
#include "hygen/sequences.hpp"
#include "hygen/weights.hpp"

namespace hygen {

/// Degree sequence given; the size sequence is drawn from the model.
struct FixedDegrees {
  DegreeSequence d;
};

/// Size sequence given; the degree sequence is drawn from the model.
struct FixedSizes {
  SizeSequence k;
};

struct FixedBoth {
  DegreeSequence d;
  SizeSequence k;
};

/// An observed binary configuration used as the chain's starting state.
struct FixedConfiguration {
  std::vector<NodeSet> hyperedges;
};

using Conditioning =
    std::variant<std::monostate, FixedDegrees, FixedSizes, FixedBoth, FixedConfiguration>;

struct SamplingJob {
  ModelParams params;
  MCMCConfig mcmc{};
  std::int64_t n_samples = 1;
  std::uint64_t master_seed = 0;
  Conditioning conditioning{};
  /// Draw size-2 hyperedges exactly and independently per sample; the
  /// sequence and chain stages then cover sizes 3..max_size only. Unset: on
  /// without conditioning, off otherwise. Cannot be on under conditioning.
  std::optional<bool> exact_dyadic{};

  bool uses_exact_dyadic() const noexcept {
    return exact_dyadic.value_or(std::holds_alternative<std::monostate>(conditioning));
  }
  /// Which sequence the matcher reproduces when d and k disagree. Unset:
  /// DegreeSeq for FixedDegrees, SizeSeq otherwise.
  std::optional<Priority> priority{};

  void validate() const {
    if (n_samples < 1) fail(ErrorCode::InvalidArgument, "number of samples must be >= 1");
    mcmc.validate();
    const auto n = params.n_nodes();
    auto check_d = [&](const DegreeSequence& d) {
      if (d.size() != n) {
        fail(ErrorCode::DimensionMismatch, "degree sequence has " + std::to_string(d.size()) +
                                               " entries, expected " + std::to_string(n));
      }
      for (auto v : d) {
        if (v < 0) fail(ErrorCode::InvalidArgument, "degrees must be nonnegative");
      }
    };
    auto check_k = [&](const SizeSequence& k) {
      for (auto [size, count] : k) {
        if (count < 0) fail(ErrorCode::InvalidArgument, "size counts must be nonnegative");
        if (count > 0 && (size < 2 || size > params.max_size())) {
          fail(ErrorCode::InvalidHyperedgeSize,
               "size " + std::to_string(size) + " outside [2, " +
                   std::to_string(params.max_size()) + "]");
        }
      }
    };
    if (const auto* c = std::get_if<FixedDegrees>(&conditioning)) check_d(c->d);
    if (const auto* c = std::get_if<FixedSizes>(&conditioning)) check_k(c->k);
    if (const auto* c = std::get_if<FixedBoth>(&conditioning)) {
      check_d(c->d);
      check_k(c->k);
    }
    if (const auto* c = std::get_if<FixedConfiguration>(&conditioning)) {
      for (const auto& e : c->hyperedges) {
        check_hyperedge(e, params);
        if (static_cast<int>(e.size()) > params.max_size()) {
          fail(ErrorCode::InvalidHyperedgeSize, "configuration hyperedge larger than max size");
        }
      }
    }
    if (exact_dyadic.value_or(false) && !std::holds_alternative<std::monostate>(conditioning)) {
      fail(ErrorCode::InvalidArgument, "exact dyadic sampling cannot be combined with conditioning");
    }
  }
};

/// One emitted sample.
struct Sample {
  std::int64_t index = 0;
  Hypergraph hypergraph;
  /// Acceptance rate of the chain steps run since the previous sample
  /// (burn-in included for the first one).
  double acceptance_rate = 0.0;
  std::uint64_t chain_steps = 0;
  /// Extra steps spent leaving zero-density or repeated-hyperedge states.
  std::uint64_t repair_steps = 0;
  /// Repeated hyperedges folded into one at weight assignment.
  std::size_t merged_duplicates = 0;
};

/// Runs the three sampling stages for one job and yields samples one at a
/// time. Sequences and the initial configuration are fixed at construction;
/// the chain state carries over between samples.
///
/// Random streams are named by stage and sample index, so sample s is the
/// same whatever the total number of samples requested.
class Sampler {
 public:
  explicit Sampler(SamplingJob job) : job_(std::move(job)) {
    job_.validate();
    prepare();
  }

  const SamplingJob& job() const noexcept { return job_; }

  /// d and k handed to the matcher (drawn or given); empty for
  /// FixedConfiguration.
  const DegreeSequence& degree_sequence() const noexcept { return d_; }
  const SizeSequence& size_sequence() const noexcept { return k_; }

  /// Sequences of the chain's configuration; every sample without exact
  /// dyadic edges reproduces them exactly.
  const DegreeSequence& fixed_degree_sequence() const noexcept { return fixed_d_; }
  const SizeSequence& fixed_size_sequence() const noexcept { return fixed_k_; }

  const ChainState& chain() const noexcept { return *chain_; }

  std::int64_t emitted() const noexcept { return next_index_; }
  bool done() const noexcept { return next_index_ >= job_.n_samples; }

  Sample next() {
    if (done()) fail(ErrorCode::InvalidArgument, "all samples already emitted");
    const auto s = next_index_;
    const auto& params = job_.params;
    Sample out;
    out.index = s;

    ChainRun run;
    auto rng = make_stream(job_.master_seed, "chain", static_cast<std::uint64_t>(s));
    if (s == 0) {
      auto burn = make_stream(job_.master_seed, "burn-in");
      run = run_chain(*chain_, params, job_.mcmc, job_.mcmc.n_burn_in, burn);
    }
    const auto between = run_chain(*chain_, params, job_.mcmc, job_.mcmc.n_intermediate, rng);
    run.taken += between.taken;
    run.accepted += between.accepted;
    out.acceptance_rate = run.acceptance_rate();
    out.chain_steps = run.taken;
    out.repair_steps = repair(rng);

    auto weights_rng = make_stream(job_.master_seed, "weights", static_cast<std::uint64_t>(s));
    auto assigned = sample_weights(chain_->hyperedges(), params, weights_rng);
    out.merged_duplicates = assigned.merged_duplicates;
    out.hypergraph = std::move(assigned.hypergraph);

    if (dyadic_) {
      auto dyadic_rng = make_stream(job_.master_seed, "dyadic", static_cast<std::uint64_t>(s));
      for (auto& e : sample_dyadic_exact(params, dyadic_rng)) {
        out.hypergraph.add(std::move(e.nodes), e.weight);
      }
    }
    ++next_index_;
    return out;
  }

 private:
  Priority resolved_priority() const {
    if (job_.priority) return *job_.priority;
    return std::holds_alternative<FixedDegrees>(job_.conditioning) ? Priority::DegreeSeq
                                                                   : Priority::SizeSeq;
  }

  void prepare() {
    const auto& params = job_.params;
    dyadic_ = job_.uses_exact_dyadic();
    std::vector<NodeSet> initial;

    if (const auto* c = std::get_if<FixedConfiguration>(&job_.conditioning)) {
      initial = c->hyperedges;
      for (auto& e : initial) {
        canonicalize(e);
        if (hyperedge_lambda(e, params) <= 0.0) {
          fail(ErrorCode::ZeroDensityHyperedge,
               "configuration hyperedge has zero density under the parameters; "
               "memberships and data do not match");
        }
      }
    } else {
      const bool chain_sizes = !dyadic_ || params.max_size() >= 3;
      if (chain_sizes) {
        const SizeRange range{dyadic_ ? 3 : 2, params.max_size()};
        std::visit(
            [&](const auto& c) {
              using C = std::decay_t<decltype(c)>;
              if constexpr (std::is_same_v<C, FixedDegrees> || std::is_same_v<C, FixedBoth>) {
                d_ = c.d;
              } else {
                auto rng = make_stream(job_.master_seed, "degree-sequence");
                d_ = sample_degree_sequence(params, range, rng);
              }
              if constexpr (std::is_same_v<C, FixedSizes> || std::is_same_v<C, FixedBoth>) {
                k_ = c.k;
              } else if constexpr (!std::is_same_v<C, FixedConfiguration>) {
                auto rng = make_stream(job_.master_seed, "size-sequence");
                k_ = sample_size_sequence(params, range, rng);
              }
            },
            job_.conditioning);
        auto rng = make_stream(job_.master_seed, "matcher");
        initial = build_initial_configuration(d_, k_, resolved_priority(), params.max_size(), rng);

        std::int64_t requested = 0;
        for (auto [size, count] : k_) requested += count;
        if (requested > 0 && initial.empty()) {
          fail(ErrorCode::EmptyConfiguration,
               "the size sequence requests hyperedges but the degree sequence left none");
        }
      } else {
        d_.assign(params.n_nodes(), 0);
      }
    }

    std::tie(fixed_d_, fixed_k_) = sequences_of(initial, params.n_nodes());
    chain_.emplace(std::move(initial), params);
  }

  /// Keeps stepping while the state holds zero-density or repeated
  /// hyperedges, up to a budget. Repeats alone stop the loop as soon as a
  /// chunk fails to reduce them (dense sequences may force them). Zero
  /// density left at the end is an error; leftover repeats are merged by
  /// weight assignment.
  std::uint64_t repair(Engine& rng) {
    const auto& params = job_.params;
    if (chain_->size() < 2) {
      if (chain_->zero_density_count() > 0) throw_zero_density();
      return 0;
    }
    const auto chunk = static_cast<std::int64_t>(std::max<std::size_t>(chain_->size(), 1000));
    const auto budget = 100 * std::max<std::int64_t>(job_.mcmc.n_burn_in, chunk);
    std::int64_t spent = 0;
    while ((chain_->zero_density_count() > 0 || chain_->duplicate_count() > 0) && spent < budget) {
      const auto repeats = chain_->duplicate_count();
      run_chain(*chain_, params, job_.mcmc, chunk, rng);
      spent += chunk;
      if (chain_->zero_density_count() == 0 && chain_->duplicate_count() >= repeats) break;
    }
    if (chain_->zero_density_count() > 0) throw_zero_density();
    return static_cast<std::uint64_t>(spent);
  }

  [[noreturn]] void throw_zero_density() const {
    fail(ErrorCode::ZeroDensityHyperedge,
         std::to_string(chain_->zero_density_count()) +
             " hyperedges with zero density remain after reshuffling; the sequences are not "
             "compatible with the memberships");
  }

  SamplingJob job_;
  bool dyadic_ = false;
  DegreeSequence d_;
  SizeSequence k_;
  DegreeSequence fixed_d_;
  SizeSequence fixed_k_;
  std::optional<ChainState> chain_;
  std::int64_t next_index_ = 0;
};

/// Runs a whole job, handing each sample to `sink` as soon as it exists.
inline void sample(SamplingJob job, const std::function<void(Sample&&)>& sink) {
  Sampler sampler(std::move(job));
  while (!sampler.done()) sink(sampler.next());
}

/// Conditions on an observed hypergraph: its binarized hyperedges become the
/// chain's initial state and the sequence stage is skipped.
inline Sampler sampler_conditioned_on_data(SamplingJob job, const Hypergraph& dataset) {
  if (dataset.n_nodes() > job.params.n_nodes()) {
    fail(ErrorCode::DimensionMismatch, "dataset has " + std::to_string(dataset.n_nodes()) +
                                           " nodes, parameters cover " +
                                           std::to_string(job.params.n_nodes()));
  }
  job.conditioning = FixedConfiguration{dataset.binary()};
  return Sampler(std::move(job));
}

inline void sample_conditioned_on_data(SamplingJob job, const Hypergraph& dataset,
                                       const std::function<void(Sample&&)>& sink) {
  auto sampler = sampler_conditioned_on_data(std::move(job), dataset);
  while (!sampler.done()) sink(sampler.next());
}

}  // namespace hygen
