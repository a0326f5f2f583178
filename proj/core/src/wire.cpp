#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "fedhgn/error.hpp"
#include "fedhgn/messages.hpp"

namespace fedhgn {

static_assert(std::endian::native == std::endian::little, "wire codec assumes a little-endian host");

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void count(std::size_t v) { i64(static_cast<std::int64_t>(v)); }
  void real(double v) { raw(&v, sizeof v); }
  void reals(const std::vector<double>& v) {
    count(v.size());
    for (double x : v) real(x);
  }
  void matrix(const Matrix& m) {
    count(m.rows());
    count(m.cols());
    count(m.size());
    for (double x : m.values()) real(x);
  }
  void matrices(const std::vector<Matrix>& ms) {
    count(ms.size());
    for (const auto& m : ms) matrix(m);
  }

  std::vector<std::uint8_t> finish() && { return std::move(buf_); }

 private:
  void raw(const void* p, std::size_t n) {
    const auto* bytes = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), bytes, bytes + n);
  }
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::int64_t i64() {
    std::int64_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::size_t count() {
    const std::int64_t v = i64();
    if (v < 0) throw Error(ErrorKind::MalformedFrame, "negative count " + std::to_string(v));
    return static_cast<std::size_t>(v);
  }
  double real() {
    double v;
    raw(&v, sizeof v);
    return v;
  }
  std::vector<double> reals() {
    const std::size_t n = bounded_count(sizeof(double));
    std::vector<double> v(n);
    for (double& x : v) x = real();
    return v;
  }
  Matrix matrix() {
    const std::size_t rows = count();
    const std::size_t cols = count();
    const std::size_t n = bounded_count(sizeof(double));
    if (cols != 0 && rows > n / cols) throw Error(ErrorKind::MalformedFrame, "matrix shape exceeds value count");
    if (rows * cols != n) throw Error(ErrorKind::MalformedFrame, "matrix shape disagrees with value count");
    std::vector<double> values(n);
    for (double& x : values) x = real();
    return Matrix(rows, cols, std::move(values));
  }
  std::vector<Matrix> matrices() {
    const std::size_t n = bounded_count(24);
    std::vector<Matrix> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(matrix());
    return out;
  }
  // List length whose elements occupy at least `min_elem_bytes` each.
  std::size_t bounded_count(std::size_t min_elem_bytes) {
    const std::size_t n = count();
    if (n > remaining() / min_elem_bytes) {
      throw Error(ErrorKind::MalformedFrame, "list of " + std::to_string(n) + " elements overruns frame");
    }
    return n;
  }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorKind::MalformedFrame, "frame truncated");
  }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

void write_payload(Writer& w, const HcUploadMsg& m) {
  w.count(m.client_id);
  w.count(m.layer);
  w.count(m.entries.size());
  for (const auto& e : m.entries) {
    w.count(e.edge_id);
    w.reals(e.embedding);
    w.count(e.member_count);
  }
}

void write_payload(Writer& w, const HcBroadcastMsg& m) {
  w.count(m.layer);
  w.count(m.entries.size());
  for (const auto& e : m.entries) {
    w.count(e.edge_id);
    w.reals(e.embedding);
    w.count(e.edge_degree);
    w.real(e.weight);
  }
}

void write_payload(Writer& w, const ParamUploadMsg& m) {
  w.count(m.client_id);
  w.matrices(m.param_blocks);
  w.count(m.train_node_count);
}

void write_payload(Writer& w, const ParamBroadcastMsg& m) { w.matrices(m.param_blocks); }

MessageTag tag_of(const Message& msg) {
  return std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, HcUploadMsg>) return MessageTag::HcUpload;
        if constexpr (std::is_same_v<T, HcBroadcastMsg>) return MessageTag::HcBroadcast;
        if constexpr (std::is_same_v<T, ParamUploadMsg>) return MessageTag::ParamUpload;
        if constexpr (std::is_same_v<T, ParamBroadcastMsg>) return MessageTag::ParamBroadcast;
      },
      msg);
}

}  // namespace

std::vector<std::uint8_t> encode_message(const Message& msg) {
  Writer w;
  for (int i = 0; i < 4; ++i) w.u8(0);  // length prefix, patched below
  w.u8(static_cast<std::uint8_t>(tag_of(msg)));
  std::visit([&](const auto& m) { write_payload(w, m); }, msg);
  auto frame = std::move(w).finish();
  const std::size_t payload = frame.size() - 4;
  if (payload > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::LengthMismatch, "message too large for a 32-bit length prefix");
  }
  const auto len = static_cast<std::uint32_t>(payload);
  std::memcpy(frame.data(), &len, 4);
  return frame;
}

Message decode_message(std::span<const std::uint8_t> frame) {
  if (frame.size() < 5) throw Error(ErrorKind::MalformedFrame, "frame shorter than header");
  std::uint32_t len = 0;
  std::memcpy(&len, frame.data(), 4);
  const std::size_t available = frame.size() - 4;
  if (len > available) {
    throw Error(ErrorKind::MalformedFrame, "frame truncated: prefix says " + std::to_string(len) + " bytes, " +
                                               std::to_string(available) + " present");
  }
  if (len < available) {
    throw Error(ErrorKind::LengthMismatch, "prefix says " + std::to_string(len) + " bytes, frame carries " +
                                               std::to_string(available));
  }

  Reader r(frame.subspan(4));
  const std::uint8_t tag = r.u8();
  Message out;
  switch (static_cast<MessageTag>(tag)) {
    case MessageTag::HcUpload: {
      HcUploadMsg m;
      m.client_id = r.count();
      m.layer = r.count();
      const std::size_t n = r.bounded_count(24);
      m.entries.resize(n);
      for (auto& e : m.entries) {
        e.edge_id = r.count();
        e.embedding = r.reals();
        e.member_count = r.count();
      }
      out = std::move(m);
      break;
    }
    case MessageTag::HcBroadcast: {
      HcBroadcastMsg m;
      m.layer = r.count();
      const std::size_t n = r.bounded_count(32);
      m.entries.resize(n);
      for (auto& e : m.entries) {
        e.edge_id = r.count();
        e.embedding = r.reals();
        e.edge_degree = r.count();
        e.weight = r.real();
      }
      out = std::move(m);
      break;
    }
    case MessageTag::ParamUpload: {
      ParamUploadMsg m;
      m.client_id = r.count();
      m.param_blocks = r.matrices();
      m.train_node_count = r.count();
      out = std::move(m);
      break;
    }
    case MessageTag::ParamBroadcast: {
      ParamBroadcastMsg m;
      m.param_blocks = r.matrices();
      out = std::move(m);
      break;
    }
    default:
      throw Error(ErrorKind::UnknownTag, "tag byte " + std::to_string(tag));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(r.remaining()) + " trailing bytes after payload");
  }
  return out;
}

}  // namespace fedhgn
