#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fedhgn/hypergraph.hpp"
#include "fedhgn/matrix.hpp"
#include "fedhgn/partition.hpp"

namespace fedhgn {

struct HcUploadEntry {
  EdgeId edge_id = 0;
  std::vector<double> embedding;   // δ(e*, V_i*)
  std::size_t member_count = 0;    // |e* ∩ V_i|

  friend bool operator==(const HcUploadEntry&, const HcUploadEntry&) = default;
};

struct HcUploadMsg {
  ClientId client_id = 0;
  std::size_t layer = 0;
  std::vector<HcUploadEntry> entries;

  friend bool operator==(const HcUploadMsg&, const HcUploadMsg&) = default;
};

struct HcBroadcastEntry {
  EdgeId edge_id = 0;
  std::vector<double> embedding;   // δ(e*, V*)
  std::size_t edge_degree = 0;     // s(e*)
  double weight = 1.0;             // w(e*)

  friend bool operator==(const HcBroadcastEntry&, const HcBroadcastEntry&) = default;
};

struct HcBroadcastMsg {
  std::size_t layer = 0;
  std::vector<HcBroadcastEntry> entries;

  friend bool operator==(const HcBroadcastMsg&, const HcBroadcastMsg&) = default;
};

struct ParamUploadMsg {
  ClientId client_id = 0;
  std::vector<Matrix> param_blocks;
  std::size_t train_node_count = 0;

  friend bool operator==(const ParamUploadMsg&, const ParamUploadMsg&) = default;
};

struct ParamBroadcastMsg {
  std::vector<Matrix> param_blocks;

  friend bool operator==(const ParamBroadcastMsg&, const ParamBroadcastMsg&) = default;
};

using Message = std::variant<HcUploadMsg, HcBroadcastMsg, ParamUploadMsg, ParamBroadcastMsg>;

enum class MessageTag : std::uint8_t {
  HcUpload = 0x01,
  HcBroadcast = 0x02,
  ParamUpload = 0x03,
  ParamBroadcast = 0x04,
};

// Frame layout: u32 LE length of everything after the prefix, one tag byte,
// then the fields in declaration order. Integers are i64 LE, reals are
// IEEE-754 binary64 LE, lists are an i64 count followed by the elements, and
// a matrix is rows, cols, then its row-major values as a list.
std::vector<std::uint8_t> encode_message(const Message& msg);
Message decode_message(std::span<const std::uint8_t> frame);

}  // namespace fedhgn
