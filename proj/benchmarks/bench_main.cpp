#include <benchmark/benchmark.h>

#include "fedhgn/federation.hpp"
#include "fedhgn/messages.hpp"
#include "fedhgn/synthetic.hpp"

namespace {

using namespace fedhgn;

Hypergraph graph(std::size_t nodes) {
  SyntheticSpec spec;
  spec.num_nodes = nodes;
  return make_community_hypergraph(spec);
}

void BM_PropagateGlobal(benchmark::State& state) {
  const auto hg = graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(propagate_global(hg, hg.features, {2}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(hg.num_nodes));
}
BENCHMARK(BM_PropagateGlobal)->Arg(1000)->Arg(4000)->Arg(16000)->Unit(benchmark::kMillisecond);

void BM_HcPretraining(benchmark::State& state) {
  const auto hg = graph(4000);
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  const auto parts = split_subgraphs(hg, dirichlet_partition(hg, {k, 10000.0, 1}), k);
  for (auto _ : state) {
    std::vector<ClientState> clients;
    for (const auto& c : parts.clients) clients.emplace_back(c, ClientMode::Hc);
    ServerState server(parts.border, k);
    InProcessTransport transport;
    run_hc_pretraining(clients, server, 2, transport);
    benchmark::DoNotOptimize(clients.back().final_features().values().data());
  }
}
BENCHMARK(BM_HcPretraining)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_TrainerStep(benchmark::State& state) {
  const auto hg = graph(2000);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < hg.num_nodes; i += 10) rows.push_back(i);
  TrainConfig cfg;
  LocalTrainer trainer(hg.features, hg.labels, rows, init_params(hg.feature_dim(), 16, hg.num_classes, 2, 1), cfg, 2);
  for (auto _ : state) trainer.step();
}
BENCHMARK(BM_TrainerStep)->Unit(benchmark::kMicrosecond);

void BM_WireRoundTrip(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  HcUploadMsg msg{0, 0, {}};
  for (EdgeId e = 0; e < 1000; ++e) {
    std::vector<double> v(64);
    for (double& x : v) x = g(rng);
    msg.entries.push_back({e, std::move(v), 3});
  }
  const Message m(msg);
  for (auto _ : state) benchmark::DoNotOptimize(decode_message(encode_message(m)));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(encode_message(m).size()));
}
BENCHMARK(BM_WireRoundTrip)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
