#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hygen/hygen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hygen");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("HYGEN_LOG")) {
    const auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && std::string(level) != "off") {
      spdlog::warn("unknown HYGEN_LOG level '{}', keeping info", level);
    } else {
      spdlog::set_level(parsed);
    }
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) hygen::fail(hygen::ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
}

std::ofstream open_file(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) hygen::fail(hygen::ErrorCode::Io, "cannot open " + p.string() + " for writing");
  return out;
}

void write_labels(const hygen::Hypergraph& h, const fs::path& path) {
  auto out = open_file(path);
  for (std::size_t id = 0; id < h.labels().size(); ++id) out << id << '\t' << h.labels()[id] << '\n';
}

struct SampleOptions {
  std::string params;
  std::string degree_seq;
  std::string size_seq;
  std::string priority;
  std::string condition_on;
  std::int64_t samples = 1;
  std::uint64_t seed = 0;
  hygen::MCMCConfig mcmc{};
  std::string exact_dyadic;
  std::string dump_sequences;
  std::string out;
  std::size_t queue_capacity = 2;
};

int run_sample(const SampleOptions& opt) {
  auto params = hygen::read_params(opt.params);
  hygen::SamplingJob job{params, opt.mcmc, opt.samples, opt.seed};
  if (!opt.priority.empty()) {
    job.priority = opt.priority == "degree" ? hygen::Priority::DegreeSeq : hygen::Priority::SizeSeq;
  }
  if (!opt.exact_dyadic.empty()) job.exact_dyadic = opt.exact_dyadic == "on";

  std::optional<hygen::Hypergraph> dataset;
  if (!opt.condition_on.empty()) {
    if (!opt.degree_seq.empty() || !opt.size_seq.empty()) {
      hygen::fail(hygen::ErrorCode::InvalidArgument,
                  "--condition-on cannot be combined with --degree-seq or --size-seq");
    }
    dataset = hygen::ingest_hypergraph(opt.condition_on, params.n_nodes());
    spdlog::info("conditioning on {} hyperedges from {}", dataset->size(), opt.condition_on);
  } else if (!opt.degree_seq.empty() && !opt.size_seq.empty()) {
    job.conditioning = hygen::FixedBoth{hygen::read_degree_sequence(opt.degree_seq),
                                        hygen::read_size_sequence(opt.size_seq)};
  } else if (!opt.degree_seq.empty()) {
    job.conditioning = hygen::FixedDegrees{hygen::read_degree_sequence(opt.degree_seq)};
  } else if (!opt.size_seq.empty()) {
    job.conditioning = hygen::FixedSizes{hygen::read_size_sequence(opt.size_seq)};
  }

  ensure_dir(opt.out);
  auto sampler = dataset ? hygen::sampler_conditioned_on_data(std::move(job), *dataset)
                         : hygen::Sampler(std::move(job));
  spdlog::info("initial configuration: {} hyperedges, exact dyadic {}", sampler.chain().size(),
               sampler.job().uses_exact_dyadic() ? "on" : "off");
  if (dataset && !dataset->labels().empty()) write_labels(*dataset, fs::path(opt.out) / "labels.tsv");

  if (!opt.dump_sequences.empty()) {
    ensure_dir(opt.dump_sequences);
    const bool drawn = !dataset;
    const auto& d = drawn ? sampler.degree_sequence() : sampler.fixed_degree_sequence();
    const auto& k = drawn ? sampler.size_sequence() : sampler.fixed_size_sequence();
    hygen::write_degree_sequence(d, (fs::path(opt.dump_sequences) / "degree_sequence.txt").string());
    hygen::write_size_sequence(k, (fs::path(opt.dump_sequences) / "size_sequence.txt").string());
  }

  // Generation and disk output overlap through a bounded hand-off.
  hygen::BoundedQueue<hygen::Sample> queue(opt.queue_capacity);
  std::exception_ptr producer_error;
  std::thread producer([&] {
    try {
      while (!sampler.done()) {
        if (!queue.push(sampler.next())) break;
      }
    } catch (...) {
      producer_error = std::current_exception();
    }
    queue.close();
  });

  std::exception_ptr consumer_error;
  try {
    while (auto s = queue.pop()) {
      const auto path = fs::path(opt.out) / ("sample_" + std::to_string(s->index) + ".txt");
      hygen::write_hypergraph(s->hypergraph, path.string());
      spdlog::info("sample={} accept_rate={:.6f}", s->index, s->acceptance_rate);
      spdlog::debug("sample={} hyperedges={} steps={} repair_steps={}", s->index,
                    s->hypergraph.size(), s->chain_steps, s->repair_steps);
      if (s->merged_duplicates > 0) {
        spdlog::warn("sample={} merged {} repeated hyperedges", s->index, s->merged_duplicates);
      }
    }
  } catch (...) {
    consumer_error = std::current_exception();
    queue.close();
  }
  producer.join();
  if (producer_error) std::rethrow_exception(producer_error);
  if (consumer_error) std::rethrow_exception(consumer_error);
  return 0;
}

int run_stats(const std::string& input, const std::string& params_path, const std::string& out,
              const std::string& scaling_name) {
  const auto params = hygen::read_params(params_path);
  const auto h = hygen::ingest_hypergraph(input, params.n_nodes());
  ensure_dir(out);
  const fs::path dir(out);
  const auto scaling = scaling_name == "raw" ? hygen::CentralityScaling::Raw
                                             : hygen::CentralityScaling::SpectralNormalized;

  const auto adj = hygen::adjacency(h);
  const auto inclusions = hygen::inclusion_counts(h);
  const auto dual = hygen::dual_eigenvector_centrality(h);
  std::optional<std::vector<double>> sc;
  if (h.n_nodes() <= hygen::kMaxDenseNodes) {
    sc = hygen::subhypergraph_centrality(h, scaling);
  } else {
    spdlog::warn("skipping sub-hypergraph centrality: {} nodes exceed the dense limit {}",
                 h.n_nodes(), hygen::kMaxDenseNodes);
  }
  const auto [degrees, sizes] = hygen::sequences_of(h);
  const auto labels = hygen::hard_labels(params.u());
  const auto entropy = hygen::hypergraph_entropy(h, params.u());

  json report;
  report["n_nodes"] = h.n_nodes();
  report["n_hyperedges"] = h.size();
  report["adjacency_nonzero_pairs"] = adj.entries().size();
  report["degree_seq"] = degrees;
  json size_json = json::object();
  for (auto [size, count] : sizes) size_json[std::to_string(size)] = count;
  report["size_seq"] = size_json;
  json incl_json = json::object();
  for (auto [size, count] : inclusions) incl_json[std::to_string(size)] = count;
  report["inclusion_counts"] = incl_json;
  report["dual_centrality"] = dual;
  report["subhypergraph_centrality"] = sc ? json(*sc) : json(nullptr);
  report["subhypergraph_centrality_scaling"] = scaling_name;
  report["entropy"] = {{"mean", entropy.mean},
                       {"bin_edges", entropy.bin_edges},
                       {"histogram", entropy.histogram}};
  std::vector<double> majority;
  majority.reserve(h.size());
  for (const auto& e : h.hyperedges()) majority.push_back(hygen::majority_ratio(e.nodes, labels));
  double majority_mean = 0.0;
  for (double m : majority) majority_mean += m;
  report["majority_ratio_mean"] = majority.empty() ? 0.0 : majority_mean / static_cast<double>(majority.size());
  open_file(dir / "stats.json") << report.dump(2) << '\n';

  {
    auto f = open_file(dir / "adjacency.csv");
    f << "i,j,x\n";
    for (const auto& e : adj.entries()) f << e.i << ',' << e.j << ',' << e.value << '\n';
  }
  {
    auto f = open_file(dir / "inclusion_counts.csv");
    f << "size,count\n";
    for (auto [size, count] : inclusions) f << size << ',' << count << '\n';
  }
  {
    auto f = open_file(dir / "node_centrality.csv");
    f << std::setprecision(17) << "node,degree,subhypergraph_centrality\n";
    for (std::size_t i = 0; i < h.n_nodes(); ++i) {
      f << i << ',' << degrees[i] << ',';
      if (sc) f << (*sc)[i];
      f << '\n';
    }
  }
  {
    auto f = open_file(dir / "hyperedge_metrics.csv");
    f << std::setprecision(17) << "hyperedge,size,weight,dual_centrality,entropy,majority_ratio\n";
    for (std::size_t j = 0; j < h.size(); ++j) {
      f << j << ',' << h.hyperedges()[j].nodes.size() << ',' << h.hyperedges()[j].weight << ','
        << dual[j] << ',' << entropy.per_hyperedge[j] << ',' << majority[j] << '\n';
    }
  }
  spdlog::info("wrote statistics for {} hyperedges to {}", h.size(), out);
  return 0;
}

int run_expected(const std::string& params_path, const std::string& out) {
  const auto params = hygen::read_params(params_path);
  const auto range = hygen::SizeRange::full(params);
  json j;
  j["mean_degree"] = hygen::expected_mean_degree(params, range);
  j["per_node_degree"] = hygen::expected_node_degrees(params, range);
  j["per_size_mean_counts"] = hygen::expected_size_counts(params, range);
  j["sizes"] = [&] {
    std::vector<int> s;
    for (int n = range.lo; n <= range.hi; ++n) s.push_back(n);
    return s;
  }();
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    open_file(out) << j.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Sample weighted hypergraphs with planted communities"};
  app.require_subcommand(1);

  SampleOptions so;
  auto* sample = app.add_subcommand("sample", "draw hypergraphs from the model");
  sample->add_option("--params", so.params, "parameter JSON file")->required()->check(CLI::ExistingFile);
  sample->add_option("--degree-seq", so.degree_seq, "fixed degree sequence file")->check(CLI::ExistingFile);
  sample->add_option("--size-seq", so.size_seq, "fixed size sequence file")->check(CLI::ExistingFile);
  sample->add_option("--priority", so.priority, "sequence kept exact when d and k disagree")
      ->check(CLI::IsMember({"degree", "size"}));
  sample->add_option("--condition-on", so.condition_on, "hyperedge file whose configuration is kept")
      ->check(CLI::ExistingFile);
  sample->add_option("--samples", so.samples, "number of samples")->check(CLI::PositiveNumber);
  sample->add_option("--seed", so.seed, "master seed");
  sample->add_option("--burn-in", so.mcmc.n_burn_in, "burn-in steps")->capture_default_str();
  sample->add_option("--intermediate-steps", so.mcmc.n_intermediate, "steps between samples")
      ->capture_default_str();
  sample->add_option("--tau", so.mcmc.tau, "log-ratio linearization threshold")->capture_default_str();
  sample->add_option("--exact-dyadic", so.exact_dyadic,
                     "draw size-2 hyperedges exactly (default: on without conditioning)")
      ->check(CLI::IsMember({"on", "off"}));
  sample->add_option("--dump-sequences", so.dump_sequences, "directory for the sampled d and k");
  sample->add_option("--queue", so.queue_capacity, "samples buffered before generation waits")
      ->check(CLI::PositiveNumber);
  sample->add_option("--out", so.out, "output directory")->required();

  std::string stats_input;
  std::string stats_params;
  std::string stats_out;
  std::string stats_scaling = "normalized";
  auto* stats = app.add_subcommand("stats", "statistics of a hypergraph file");
  stats->add_option("--input", stats_input, "hyperedge file")->required()->check(CLI::ExistingFile);
  stats->add_option("--params", stats_params, "parameter JSON file")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stats_out, "output directory")->required();
  stats->add_option("--centrality", stats_scaling, "sub-hypergraph centrality scaling")
      ->check(CLI::IsMember({"raw", "normalized"}))
      ->capture_default_str();

  std::string expected_params;
  std::string expected_out;
  auto* expected = app.add_subcommand("expected-stats", "closed-form expected degrees and sizes");
  expected->add_option("--params", expected_params, "parameter JSON file")->required()->check(CLI::ExistingFile);
  expected->add_option("--out", expected_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) return run_sample(so);
    if (*stats) return run_stats(stats_input, stats_params, stats_out, stats_scaling);
    if (*expected) return run_expected(expected_params, expected_out);
  } catch (const hygen::Error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
