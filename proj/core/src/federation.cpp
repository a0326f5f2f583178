#include "fedhgn/federation.hpp"

#include <algorithm>
#include <string>

#include "fedhgn/error.hpp"
#include "fedhgn/seed.hpp"

namespace fedhgn {

namespace {

std::vector<std::size_t> labeled_rows(const std::vector<bool>& mask, const std::vector<Label>& labels) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] && i < labels.size() && labels[i] != kNoLabel) rows.push_back(i);
  }
  return rows;
}

}  // namespace

Message Transport::deliver(Message msg) {
  std::size_t bytes = 0;
  Message out = carry(std::move(msg), bytes);
  ++messages_;
  bytes_ += bytes;
  return out;
}

Message InProcessTransport::carry(Message msg, std::size_t& /*bytes*/) { return msg; }

Message WireTransport::carry(Message msg, std::size_t& bytes) {
  const auto frame = encode_message(msg);
  bytes = frame.size();
  return decode_message(frame);
}

std::unique_ptr<Transport> make_transport(TransportKind kind) {
  if (kind == TransportKind::Wire) return std::make_unique<WireTransport>();
  return std::make_unique<InProcessTransport>();
}

ClientState::ClientState(ClientSubgraph sub, ClientMode m) : subgraph(std::move(sub)), mode(m) {
  layer_embeddings.push_back(subgraph.local_features);
}

// ---------------------------------------------------------------------------

ServerState::ServerState(BorderIndex border, std::size_t num_clients)
    : border_(std::move(border)), num_clients_(num_clients) {}

void ServerState::submit_hc(HcUploadMsg msg) {
  if (msg.client_id >= num_clients_) {
    throw Error(ErrorKind::ProtocolViolation, "upload from unknown client " + std::to_string(msg.client_id));
  }
  if (finished_layers_.contains(msg.layer)) {
    throw Error(ErrorKind::DuplicateUpload, "layer " + std::to_string(msg.layer) + " already aggregated");
  }
  auto& staged = staged_hc_[msg.layer];
  const ClientId id = msg.client_id;
  if (!staged.try_emplace(id, std::move(msg)).second) {
    throw Error(ErrorKind::DuplicateUpload, "client " + std::to_string(id) + " already uploaded this layer");
  }
}

std::map<ClientId, HcBroadcastMsg> ServerState::aggregate_hc(std::size_t layer) {
  auto it = staged_hc_.find(layer);
  const std::size_t have = it == staged_hc_.end() ? 0 : it->second.size();
  if (have != num_clients_) {
    throw Error(ErrorKind::IncompleteRound, std::to_string(have) + " of " + std::to_string(num_clients_) +
                                                " clients reported for layer " + std::to_string(layer));
  }
  std::vector<HcUploadMsg> uploads;
  for (auto& [id, msg] : it->second) uploads.push_back(std::move(msg));
  staged_hc_.erase(it);
  finished_layers_.insert(layer);

  auto out = hc_server_aggregate(uploads, border_);
  // Clients without border edges still get an (empty) broadcast to advance.
  for (ClientId k = 0; k < num_clients_; ++k) out.try_emplace(k, HcBroadcastMsg{layer, {}});
  return out;
}

void ServerState::submit_params(ParamUploadMsg msg) {
  if (msg.client_id >= num_clients_) {
    throw Error(ErrorKind::ProtocolViolation, "upload from unknown client " + std::to_string(msg.client_id));
  }
  const ClientId id = msg.client_id;
  if (!staged_params_.try_emplace(id, std::move(msg)).second) {
    throw Error(ErrorKind::DuplicateUpload, "client " + std::to_string(id) + " already uploaded this round");
  }
}

ParamBroadcastMsg ServerState::aggregate_params() {
  if (staged_params_.size() != num_clients_) {
    throw Error(ErrorKind::IncompleteRound, std::to_string(staged_params_.size()) + " of " +
                                                std::to_string(num_clients_) + " clients uploaded parameters");
  }
  std::vector<ParamUploadMsg> uploads;
  for (auto& [id, msg] : staged_params_) uploads.push_back(std::move(msg));
  staged_params_.clear();
  auto out = fedavg_aggregate(uploads);
  global_ = ClassifierParams{out.param_blocks};
  ++rounds_;
  return out;
}

// ---------------------------------------------------------------------------

HcUploadMsg hc_client_round(const ClientState& state, std::size_t layer) {
  if (layer >= state.layer_embeddings.size()) {
    throw Error(ErrorKind::MissingLayer, "client " + std::to_string(state.subgraph.client_id) + " has no layer " +
                                             std::to_string(layer));
  }
  const Matrix& x = state.layer_embeddings[layer];
  HcUploadMsg msg{state.subgraph.client_id, layer, {}};
  msg.entries.reserve(state.subgraph.border_edges.size());
  for (const auto& edge : state.subgraph.border_edges) {
    msg.entries.push_back(
        {edge.id, edge_gather(edge.members, x, state.subgraph.node_degree_local), edge.members.size()});
  }
  return msg;
}

std::map<ClientId, HcBroadcastMsg> hc_server_aggregate(const std::vector<HcUploadMsg>& uploads,
                                                       const BorderIndex& border) {
  std::map<ClientId, const HcUploadMsg*> by_client;
  std::optional<std::size_t> layer;
  for (const auto& up : uploads) {
    if (!by_client.try_emplace(up.client_id, &up).second) {
      throw Error(ErrorKind::DuplicateUpload, "two uploads from client " + std::to_string(up.client_id));
    }
    if (layer && *layer != up.layer) throw Error(ErrorKind::LayerSkew, "uploads span several layers");
    layer = up.layer;
  }

  struct Partial {
    std::vector<double> sum;
    std::size_t count = 0;
    std::vector<ClientId> contributors;
  };
  std::map<EdgeId, Partial> partials;
  for (const auto& [client, up] : by_client) {
    EdgeId prev = 0;
    bool first = true;
    for (const auto& entry : up->entries) {
      if (!first && entry.edge_id <= prev) {
        throw Error(ErrorKind::ProtocolViolation, "client " + std::to_string(client) +
                                                      " uploaded edges out of order or twice");
      }
      first = false;
      prev = entry.edge_id;
      auto bit = border.entries.find(entry.edge_id);
      if (bit == border.entries.end() ||
          !std::binary_search(bit->second.clients.begin(), bit->second.clients.end(), client)) {
        throw Error(ErrorKind::ProtocolViolation, "client " + std::to_string(client) +
                                                      " uploaded edge " + std::to_string(entry.edge_id) +
                                                      " it does not border");
      }
      auto& p = partials[entry.edge_id];
      if (p.sum.empty()) {
        p.sum.assign(entry.embedding.size(), 0.0);
      } else if (p.sum.size() != entry.embedding.size()) {
        throw Error(ErrorKind::DimensionMismatch, "edge " + std::to_string(entry.edge_id) +
                                                      " embeddings differ in width");
      }
      for (std::size_t k = 0; k < p.sum.size(); ++k) p.sum[k] += entry.embedding[k];
      p.count += entry.member_count;
      p.contributors.push_back(client);
    }
  }

  std::map<ClientId, HcBroadcastMsg> out;
  for (const auto& [edge, entry] : border.entries) {
    auto pit = partials.find(edge);
    const std::size_t got = pit == partials.end() ? 0 : pit->second.contributors.size();
    if (got != entry.clients.size()) {
      throw Error(ErrorKind::IncompleteRound, "edge " + std::to_string(edge) + " has " + std::to_string(got) +
                                                  " of " + std::to_string(entry.clients.size()) + " uploads");
    }
    const Partial& p = pit->second;
    if (p.count != entry.total_members) {
      throw Error(ErrorKind::CountMismatch, "edge " + std::to_string(edge) + " member counts sum to " +
                                                std::to_string(p.count) + ", expected " +
                                                std::to_string(entry.total_members));
    }
    for (ClientId client : entry.clients) {
      auto& msg = out.try_emplace(client, HcBroadcastMsg{layer.value_or(0), {}}).first->second;
      msg.entries.push_back({edge, p.sum, p.count, entry.weight});
    }
  }
  return out;
}

void hc_client_apply(ClientState& state, const HcBroadcastMsg& msg) {
  const auto& sub = state.subgraph;
  if (msg.layer != state.current_layer()) {
    throw Error(ErrorKind::LayerSkew, "client " + std::to_string(sub.client_id) + " is at layer " +
                                          std::to_string(state.current_layer()) + ", broadcast is for layer " +
                                          std::to_string(msg.layer));
  }
  const Matrix& x = state.layer_embeddings.back();
  const std::size_t dim = x.cols();
  const std::size_t n = sub.num_nodes();

  Matrix internal_emb(sub.internal_edges.size(), dim);
  std::vector<std::vector<IncidentEdge>> local_incident(n);
  for (std::size_t i = 0; i < sub.internal_edges.size(); ++i) {
    const auto& edge = sub.internal_edges[i];
    edge_gather_into(edge.members, x, sub.node_degree_local, internal_emb.row(i));
    for (NodeId v : edge.members) {
      local_incident[v].push_back({edge.weight, edge.members.size(), internal_emb.row(i)});
    }
  }

  std::map<EdgeId, const HcBroadcastEntry*> received;
  for (const auto& entry : msg.entries) {
    if (entry.embedding.size() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "broadcast for edge " + std::to_string(entry.edge_id) +
                                                    " has width " + std::to_string(entry.embedding.size()));
    }
    received[entry.edge_id] = &entry;
  }
  std::vector<std::vector<IncidentEdge>> border_incident(n);
  for (const auto& edge : sub.border_edges) {
    auto it = received.find(edge.id);
    if (it == received.end()) {
      throw Error(ErrorKind::ProtocolViolation, "client " + std::to_string(sub.client_id) +
                                                    " received no embedding for border edge " +
                                                    std::to_string(edge.id));
    }
    const auto& entry = *it->second;
    for (NodeId v : edge.members) {
      border_incident[v].push_back({entry.weight, entry.edge_degree, entry.embedding});
    }
  }

  Matrix next(n, dim);
  std::vector<double> local_phi(dim);
  std::vector<double> border_phi(dim);
  for (NodeId v = 0; v < n; ++v) {
    std::fill(local_phi.begin(), local_phi.end(), 0.0);
    std::fill(border_phi.begin(), border_phi.end(), 0.0);
    node_aggregate_into(local_incident[v], sub.node_degree_local[v], local_phi);
    node_aggregate_into(border_incident[v], sub.node_degree_local[v], border_phi);
    const auto combined = propagate_combined(local_phi, border_phi);
    std::copy(combined.begin(), combined.end(), next.row(v).begin());
  }
  state.layer_embeddings.push_back(std::move(next));
}

void run_hc_pretraining(std::vector<ClientState>& clients, ServerState& server, std::size_t num_layers,
                        Transport& transport) {
  for (const auto& c : clients) {
    if (c.mode != ClientMode::Hc) {
      throw Error(ErrorKind::InvalidArgument, "client " + std::to_string(c.subgraph.client_id) +
                                                  " is not in hc mode");
    }
  }
  for (std::size_t layer = 0; layer < num_layers; ++layer) {
    for (const auto& c : clients) server.submit_hc(transport.send(hc_client_round(c, layer)));
    auto broadcasts = server.aggregate_hc(layer);
    for (auto& c : clients) {
      hc_client_apply(c, transport.send(std::move(broadcasts.at(c.subgraph.client_id))));
    }
  }
}

void basic_local_propagate(ClientState& state, std::size_t num_layers) {
  if (state.mode != ClientMode::Basic) {
    throw Error(ErrorKind::InvalidArgument, "client " + std::to_string(state.subgraph.client_id) +
                                                " is not in basic mode");
  }
  const Hypergraph local = trimmed_local_hypergraph(state.subgraph);
  const auto idx = build_incidence(local);
  const auto deg = compute_degrees(local, idx);
  state.layer_embeddings.resize(1);
  for (std::size_t layer = 0; layer < num_layers; ++layer) {
    state.layer_embeddings.push_back(propagate_step(local, idx, deg, state.layer_embeddings.back()));
  }
}

// ---------------------------------------------------------------------------

ParamBroadcastMsg fedavg_aggregate(const std::vector<ParamUploadMsg>& uploads) {
  if (uploads.empty()) throw Error(ErrorKind::IncompleteRound, "no parameter uploads");
  std::map<ClientId, const ParamUploadMsg*> ordered;
  std::size_t total = 0;
  for (const auto& up : uploads) {
    if (!ordered.try_emplace(up.client_id, &up).second) {
      throw Error(ErrorKind::DuplicateUpload, "two parameter uploads from client " + std::to_string(up.client_id));
    }
    total += up.train_node_count;
  }
  if (total == 0) throw Error(ErrorKind::InvalidArgument, "no client reported training nodes");

  const auto& shape = uploads.front().param_blocks;
  for (const auto& up : uploads) {
    bool ok = up.param_blocks.size() == shape.size();
    for (std::size_t b = 0; ok && b < shape.size(); ++b) ok = up.param_blocks[b].same_shape(shape[b]);
    if (!ok) {
      throw Error(ErrorKind::ShapeMismatch, "client " + std::to_string(up.client_id) +
                                                " uploaded blocks of a different shape");
    }
  }

  ParamBroadcastMsg out;
  for (const auto& b : shape) out.param_blocks.emplace_back(b.rows(), b.cols());
  for (const auto& [client, up] : ordered) {
    const double weight = static_cast<double>(up->train_node_count) / static_cast<double>(total);
    for (std::size_t b = 0; b < shape.size(); ++b) {
      auto dst = out.param_blocks[b].values();
      auto src = up->param_blocks[b].values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += weight * src[i];
    }
  }
  return out;
}

RoundMetrics pooled_metrics(const std::vector<ClientState>& clients, std::size_t round) {
  RoundMetrics m;
  m.round = round;
  double loss_sum = 0.0;
  std::size_t train_total = 0;
  std::size_t val_correct = 0;
  std::size_t val_total = 0;
  std::size_t test_correct = 0;
  std::size_t test_total = 0;
  for (const auto& c : clients) {
    if (!c.trainer) continue;
    const auto& masks = c.subgraph.masks;
    const std::size_t n_train = c.trainer->train_count();
    if (n_train > 0) {
      loss_sum += static_cast<double>(n_train) * c.trainer->train_loss();
      train_total += n_train;
    }
    const auto val_rows = labeled_rows(masks.val, c.trainer->labels());
    const auto test_rows = labeled_rows(masks.test, c.trainer->labels());
    val_correct += c.trainer->correct(val_rows);
    val_total += val_rows.size();
    test_correct += c.trainer->correct(test_rows);
    test_total += test_rows.size();
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  m.train_loss = train_total == 0 ? 0.0 : loss_sum / static_cast<double>(train_total);
  m.val_acc = ratio(val_correct, val_total);
  m.test_acc = ratio(test_correct, test_total);
  return m;
}

std::vector<RoundMetrics> run_federated_training(std::vector<ClientState>& clients, ServerState& server,
                                                 const FederatedTrainingOptions& options, Transport& transport) {
  if (clients.empty()) throw Error(ErrorKind::InvalidArgument, "no clients");
  const std::size_t in_dim = clients.front().final_features().cols();
  const auto& cfg = options.train;

  server.set_global_params(init_params(in_dim, cfg.hidden_dim, options.num_classes, options.num_blocks,
                                       derive_seed(cfg.seed, seed_stream::kInit)));
  for (auto& c : clients) {
    auto initial = transport.send(ParamBroadcastMsg{server.global_params()->blocks});
    std::vector<Label> labels = c.subgraph.local_labels;
    if (labels.size() != c.subgraph.num_nodes()) labels.assign(c.subgraph.num_nodes(), kNoLabel);
    auto train_rows = labeled_rows(c.subgraph.masks.train, labels);
    c.trainer.emplace(c.final_features(), std::move(labels), std::move(train_rows),
                      ClassifierParams{std::move(initial.param_blocks)}, cfg,
                      derive_seed(cfg.seed, seed_stream::kDropout, c.subgraph.client_id));
  }

  std::vector<RoundMetrics> history;
  history.reserve(cfg.rounds);
  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    for (auto& c : clients) c.trainer->run(cfg.local_iters);
    if (options.share_parameters) {
      for (const auto& c : clients) {
        server.submit_params(
            transport.send(ParamUploadMsg{c.subgraph.client_id, c.trainer->params().blocks, c.trainer->train_count()}));
      }
      const auto global = server.aggregate_params();
      for (auto& c : clients) c.trainer->set_params(ClassifierParams{transport.send(global).param_blocks});
    }
    history.push_back(pooled_metrics(clients, round));
  }
  return history;
}

}  // namespace fedhgn
