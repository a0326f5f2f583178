#include "fedhgn/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fedhgn/dataset_io.hpp"
#include "fedhgn/error.hpp"
#include "fedhgn/partition.hpp"
#include "fedhgn/seed.hpp"

namespace fedhgn {

namespace {

template <typename T>
T parse_number(std::string_view tok, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(ErrorKind::ParseError, std::string("bad ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

void put_real(std::ostream& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, ptr - buf);
}

bool uses_hc(Mode m) { return m == Mode::LocalHc || m == Mode::FedHc; }
bool shares_parameters(Mode m) { return m == Mode::Fed || m == Mode::FedHc; }

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Local: return "local";
    case Mode::LocalHc: return "local-hc";
    case Mode::Fed: return "fed";
    case Mode::FedHc: return "fed-hc";
    case Mode::Global: return "global";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::Local, Mode::LocalHc, Mode::Fed, Mode::FedHc, Mode::Global}) {
    if (to_string(m) == text) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(TransportKind kind) { return kind == TransportKind::Wire ? "wire" : "inproc"; }

TransportKind parse_transport(std::string_view text) {
  if (text == "inproc") return TransportKind::InProcess;
  if (text == "wire") return TransportKind::Wire;
  throw Error(ErrorKind::InvalidArgument, "unknown transport '" + std::string(text) + "'");
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    const auto base = parse_number<std::uint64_t>(text.substr(0, colon), "seed base");
    const auto count = parse_number<std::uint64_t>(text.substr(colon + 1), "seed count");
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(base + i);
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto tok = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      seeds.push_back(parse_number<std::uint64_t>(tok, "seed"));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  if (seeds.empty()) throw Error(ErrorKind::InvalidArgument, "seed list is empty");
  return seeds;
}

SeedOutcome run_seed(const Hypergraph& hg, const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.num_layers < 1) throw Error(ErrorKind::InvalidArgument, "num_layers must be >= 1");
  const bool global = cfg.mode == Mode::Global;
  const std::size_t k = global ? 1 : cfg.num_clients;
  const PartitionSpec spec{k, cfg.beta, derive_seed(seed, seed_stream::kPartition)};

  Assignment assignment;
  if (global || k == 1) {
    assignment.assign(hg.num_nodes, 0);
  } else if (cfg.allow_unlabeled_partition && !hg.fully_labeled()) {
    assignment = uniform_partition(hg.num_nodes, spec);
  } else {
    assignment = dirichlet_partition(hg, spec);
  }
  auto parts = split_subgraphs(hg, assignment, k);

  SeedOutcome outcome;
  outcome.seed = seed;
  outcome.border_edges = parts.border.size();

  const ClientMode client_mode = uses_hc(cfg.mode) || global ? ClientMode::Hc : ClientMode::Basic;
  std::vector<ClientState> clients;
  clients.reserve(k);
  for (auto& sub : parts.clients) {
    sub.masks = make_masks(sub, cfg.train_ratio, cfg.val_ratio, cfg.test_ratio,
                           derive_seed(seed, seed_stream::kMasks, sub.client_id));
    clients.emplace_back(std::move(sub), client_mode);
  }

  auto transport = make_transport(cfg.transport);
  ServerState server(std::move(parts.border), k);
  if (global) {
    const auto idx = build_incidence(hg);
    const auto deg = compute_degrees(hg, idx);
    auto& c = clients.front();
    for (std::size_t n = 0; n < cfg.num_layers; ++n) {
      c.layer_embeddings.push_back(propagate_step(hg, idx, deg, c.layer_embeddings.back()));
    }
  } else if (uses_hc(cfg.mode)) {
    run_hc_pretraining(clients, server, cfg.num_layers, *transport);
  } else {
    for (auto& c : clients) basic_local_propagate(c, cfg.num_layers);
  }

  FederatedTrainingOptions options;
  options.train = TrainConfig{cfg.learning_rate, cfg.dropout, cfg.hidden_dim, cfg.rounds, cfg.local_iters, seed};
  options.num_classes = hg.num_classes;
  options.num_blocks = cfg.num_layers;
  options.share_parameters = shares_parameters(cfg.mode);
  const auto history = run_federated_training(clients, server, options, *transport);

  outcome.records.reserve(history.size());
  for (const auto& h : history) outcome.records.push_back({seed, h.round, h.train_loss, h.val_acc, h.test_acc});
  outcome.messages = transport->messages_delivered();
  outcome.bytes = transport->bytes_delivered();
  return outcome;
}

ExperimentSummary summarize(const std::vector<SeedOutcome>& outcomes) {
  ExperimentSummary s;
  for (const auto& o : outcomes) s.final_test_acc.push_back(o.records.empty() ? 0.0 : o.records.back().test_acc);
  const double n = static_cast<double>(s.final_test_acc.size());
  if (s.final_test_acc.empty()) return s;
  s.mean_test_acc = std::accumulate(s.final_test_acc.begin(), s.final_test_acc.end(), 0.0) / n;
  if (s.final_test_acc.size() > 1) {
    double ss = 0.0;
    for (double a : s.final_test_acc) ss += (a - s.mean_test_acc) * (a - s.mean_test_acc);
    s.std_test_acc = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

ExperimentResult run_experiment(const Hypergraph& hg, const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw Error(ErrorKind::InvalidArgument, "no seeds configured");
  ExperimentResult result;
  result.per_seed.resize(cfg.seeds.size());
  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  for (std::size_t start = 0; start < cfg.seeds.size(); start += jobs) {
    const std::size_t end = std::min(cfg.seeds.size(), start + jobs);
    std::vector<std::future<SeedOutcome>> pending;
    for (std::size_t i = start; i < end; ++i) {
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                   [&hg, &cfg, seed = cfg.seeds[i]] { return run_seed(hg, cfg, seed); }));
    }
    for (std::size_t i = start; i < end; ++i) result.per_seed[i] = pending[i - start].get();
  }
  for (const auto& o : result.per_seed) result.records.insert(result.records.end(), o.records.begin(), o.records.end());
  result.summary = summarize(result.per_seed);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Hypergraph hg = cfg.simple_graph ? load_simple_graph(cfg.dataset_path) : load_dataset(cfg.dataset_path);
  return run_experiment(hg, cfg);
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    out << r.seed << ',' << r.round << ',';
    put_real(out, r.train_loss);
    out << ',';
    put_real(out, r.val_acc);
    out << ',';
    put_real(out, r.test_acc);
    out << '\n';
  }
}

std::vector<MetricsRecord> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw Error(ErrorKind::ParseError, "metrics CSV must start with '" + std::string(kMetricsHeader) + "'");
  }
  std::vector<MetricsRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols.size() != 5) {
      throw Error(ErrorKind::ParseError, "metrics line " + std::to_string(lineno) + " has " +
                                             std::to_string(cols.size()) + " columns");
    }
    records.push_back({parse_number<std::uint64_t>(cols[0], "seed"), parse_number<std::size_t>(cols[1], "round"),
                       parse_number<double>(cols[2], "train_loss"), parse_number<double>(cols[3], "val_acc"),
                       parse_number<double>(cols[4], "test_acc")});
  }
  return records;
}

void write_summary_csv(std::ostream& out, const ExperimentConfig& cfg, const std::string& dataset_name,
                       const ExperimentSummary& summary) {
  out << "dataset,mode,clients,beta,layers,seeds,mean_test_acc,std_test_acc\n";
  out << dataset_name << ',' << to_string(cfg.mode) << ',' << (cfg.mode == Mode::Global ? 1 : cfg.num_clients)
      << ',';
  put_real(out, cfg.beta);
  out << ',' << cfg.num_layers << ',' << summary.final_test_acc.size() << ',';
  put_real(out, summary.mean_test_acc);
  out << ',';
  put_real(out, summary.std_test_acc);
  out << '\n';
}

std::filesystem::path summary_path_for(const std::filesystem::path& metrics_path) {
  auto p = metrics_path;
  p.replace_extension();
  p += ".summary.csv";
  return p;
}

void emit_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_metrics_csv(out, records);
  if (!out) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

void emit_summary(const ExperimentConfig& cfg, const std::string& dataset_name, const ExperimentSummary& summary,
                  const std::filesystem::path& metrics_path) {
  const auto path = summary_path_for(metrics_path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_summary_csv(out, cfg, dataset_name, summary);
  if (!out) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

}  // namespace fedhgn
