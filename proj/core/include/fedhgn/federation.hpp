#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "fedhgn/messages.hpp"
#include "fedhgn/partition.hpp"
#include "fedhgn/propagation.hpp"
#include "fedhgn/training.hpp"

namespace fedhgn {

// ---------------------------------------------------------------------------
// Transport

// Carries a message from one party to another. Implementations may rewrite
// the representation but must hand back an equal value.
class Transport {
 public:
  virtual ~Transport() = default;

  Message deliver(Message msg);

  template <typename T>
  T send(T msg) {
    return std::get<T>(deliver(Message(std::move(msg))));
  }

  std::size_t messages_delivered() const noexcept { return messages_; }
  std::size_t bytes_delivered() const noexcept { return bytes_; }

 protected:
  virtual Message carry(Message msg, std::size_t& bytes) = 0;

 private:
  std::size_t messages_ = 0;
  std::size_t bytes_ = 0;
};

class InProcessTransport final : public Transport {
 protected:
  Message carry(Message msg, std::size_t& bytes) override;
};

// Round-trips every message through encode_message/decode_message.
class WireTransport final : public Transport {
 protected:
  Message carry(Message msg, std::size_t& bytes) override;
};

enum class TransportKind { InProcess, Wire };
std::unique_ptr<Transport> make_transport(TransportKind kind);

// ---------------------------------------------------------------------------
// Client and server state

enum class ClientMode { Basic, Hc };

struct ClientState {
  ClientSubgraph subgraph;
  ClientMode mode = ClientMode::Hc;
  // X^(0) ... X^(n) for local nodes, filled one layer at a time.
  std::vector<Matrix> layer_embeddings;
  std::optional<LocalTrainer> trainer;

  ClientState(ClientSubgraph sub, ClientMode m);

  std::size_t current_layer() const noexcept { return layer_embeddings.size() - 1; }
  const Matrix& final_features() const { return layer_embeddings.back(); }
};

class ServerState {
 public:
  ServerState(BorderIndex border, std::size_t num_clients);

  const BorderIndex& border_index() const noexcept { return border_; }
  std::size_t num_clients() const noexcept { return num_clients_; }

  // Stages an upload; rejects duplicates and uploads for finished layers.
  void submit_hc(HcUploadMsg msg);
  // Fires once every client has reported for `layer`.
  std::map<ClientId, HcBroadcastMsg> aggregate_hc(std::size_t layer);

  void submit_params(ParamUploadMsg msg);
  ParamBroadcastMsg aggregate_params();

  void set_global_params(ClassifierParams params) { global_ = std::move(params); }
  const std::optional<ClassifierParams>& global_params() const noexcept { return global_; }
  std::size_t completed_rounds() const noexcept { return rounds_; }

 private:
  BorderIndex border_;
  std::size_t num_clients_;
  std::map<std::size_t, std::map<ClientId, HcUploadMsg>> staged_hc_;
  std::set<std::size_t> finished_layers_;
  std::map<ClientId, ParamUploadMsg> staged_params_;
  std::optional<ClassifierParams> global_;
  std::size_t rounds_ = 0;
};

// ---------------------------------------------------------------------------
// Hyperedge completion

// Partial δ^(n)(e*, V_i*) for every border edge the client touches.
HcUploadMsg hc_client_round(const ClientState& state, std::size_t layer);

// Sums partial embeddings and member counts per border edge and routes each
// edge back to the clients that hold members of it.
std::map<ClientId, HcBroadcastMsg> hc_server_aggregate(const std::vector<HcUploadMsg>& uploads,
                                                       const BorderIndex& border);

// x^(n+1) = φ(v, E_i, V_i) + φ(v, E_i*, V*); appends X^(n+1).
void hc_client_apply(ClientState& state, const HcBroadcastMsg& msg);

void run_hc_pretraining(std::vector<ClientState>& clients, ServerState& server, std::size_t num_layers,
                        Transport& transport);

// N steps over the client's trimmed standalone graph, no communication.
void basic_local_propagate(ClientState& state, std::size_t num_layers);

// ---------------------------------------------------------------------------
// Parameter averaging and training

// Θ = Σ_i (n_i / n) Θ_i where n_i is the client's training-node count,
// summed in ascending client id.
ParamBroadcastMsg fedavg_aggregate(const std::vector<ParamUploadMsg>& uploads);

struct RoundMetrics {
  std::size_t round = 0;
  double train_loss = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
};

struct FederatedTrainingOptions {
  TrainConfig train;
  std::size_t num_classes = 0;
  std::size_t num_blocks = 2;
  // false: every client trains in isolation from the shared initial model.
  bool share_parameters = true;
};

// Initialises every client from the server's seeded model, then runs
// `rounds` × (local_iters steps, upload, FedAvg, broadcast). Metrics after
// each round are pooled over all clients' masks.
std::vector<RoundMetrics> run_federated_training(std::vector<ClientState>& clients, ServerState& server,
                                                 const FederatedTrainingOptions& options, Transport& transport);

// Evaluation-mode metrics pooled over clients, weighted by mask sizes.
RoundMetrics pooled_metrics(const std::vector<ClientState>& clients, std::size_t round);

}  // namespace fedhgn
