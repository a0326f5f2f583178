#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fedhgn/federation.hpp"
#include "fedhgn/hypergraph.hpp"

namespace fedhgn {

// The five ablation arms:
//   local     trimmed border edges, isolated training
//   local-hc  hyperedge completion, isolated training
//   fed       trimmed border edges, FedAvg
//   fed-hc    hyperedge completion, FedAvg
//   global    one client holding the whole graph
enum class Mode { Local, LocalHc, Fed, FedHc, Global };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);
TransportKind parse_transport(std::string_view text);
std::string_view to_string(TransportKind kind);

// "42:5" -> 42..46, "1,7,9" -> {1,7,9}, "3" -> {3}.
std::vector<std::uint64_t> parse_seeds(std::string_view text);

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  bool simple_graph = false;
  Mode mode = Mode::FedHc;
  std::size_t num_clients = 3;
  double beta = 10000.0;
  std::size_t num_layers = 2;
  std::size_t hidden_dim = 16;
  double dropout = 0.5;
  double learning_rate = 0.01;
  std::size_t rounds = 150;
  std::size_t local_iters = 3;
  double train_ratio = 0.1;
  double val_ratio = 0.2;
  double test_ratio = 0.4;
  std::vector<std::uint64_t> seeds{42, 43, 44, 45, 46};
  TransportKind transport = TransportKind::InProcess;
  bool allow_unlabeled_partition = false;
  std::size_t jobs = 1;
  std::filesystem::path output_path;
};

struct MetricsRecord {
  std::uint64_t seed = 0;
  std::size_t round = 0;
  double train_loss = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> records;
  std::size_t border_edges = 0;
  std::size_t messages = 0;
  std::size_t bytes = 0;
};

struct ExperimentSummary {
  std::vector<double> final_test_acc;  // one per seed
  double mean_test_acc = 0.0;
  double std_test_acc = 0.0;           // sample standard deviation
};

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  std::vector<SeedOutcome> per_seed;
  ExperimentSummary summary;
};

SeedOutcome run_seed(const Hypergraph& hg, const ExperimentConfig& cfg, std::uint64_t seed);
ExperimentResult run_experiment(const Hypergraph& hg, const ExperimentConfig& cfg);
// Loads cfg.dataset_path (as a simple graph if cfg.simple_graph) first.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

ExperimentSummary summarize(const std::vector<SeedOutcome>& outcomes);

inline constexpr std::string_view kMetricsHeader = "seed,round,train_loss,val_acc,test_acc";

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const ExperimentConfig& cfg, const std::string& dataset_name,
                       const ExperimentSummary& summary);

// Writes the per-round CSV to `path` and the one-line summary next to it
// (<stem>.summary.csv).
void emit_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& path);
void emit_summary(const ExperimentConfig& cfg, const std::string& dataset_name, const ExperimentSummary& summary,
                  const std::filesystem::path& metrics_path);
std::filesystem::path summary_path_for(const std::filesystem::path& metrics_path);

}  // namespace fedhgn
