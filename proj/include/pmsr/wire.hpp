// Copyright 2026 The pmsr-pir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Framed binary protocol between the coordinator and storage nodes.
//
// Frame: 4-byte big-endian payload length, then the payload. The first
// payload byte is the message kind. Integers are 4-byte big-endian, field
// symbols little-endian at the cluster's symbol width, matrices a rows/cols
// header followed by row-major symbols.

#ifndef PMSR_WIRE_HPP_
#define PMSR_WIRE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pmsr/error.hpp"

namespace pmsr::wire {

inline constexpr std::size_t kMaxPayload = 16u << 20;

enum class Kind : std::uint8_t {
  kStore = 1,
  kQuery = 2,
  kAnswer = 3,
  kRepairHelp = 4,
  kRepairSymbol = 5,
  kGetShare = 6,
  kShare = 7,
  kHealth = 8,
  kOk = 9,
  kError = 10,
  kDelete = 11,
};

inline bool known_kind(std::uint8_t k) { return k >= 1 && k <= 11; }

inline std::string kind_name(std::uint8_t k) {
  static const char* const kNames[] = {"?",     "STORE",  "QUERY", "ANSWER",
                                       "REPAIR_HELP", "REPAIR_SYMBOL", "GET_SHARE",
                                       "SHARE", "HEALTH", "OK",    "ERROR", "DELETE"};
  return known_kind(k) ? kNames[k] : "kind " + std::to_string(k);
}

struct Message {
  std::uint8_t kind = 0;
  std::vector<std::uint8_t> body;

  Kind type() const { return static_cast<Kind>(kind); }
};

[[noreturn]] inline void bad_frame(const std::string& why) {
  throw Error(ErrorCode::kBadFrame, "bad frame: " + why);
}

inline void check_symbol_width(std::size_t width) {
  if (width < 1 || width > 4) {
    throw Error(ErrorCode::kInvalidArgument, "symbol width must be 1..4 bytes");
  }
}

class Writer {
 public:
  explicit Writer(std::size_t symbol_width = 2) : width_(symbol_width) {
    check_symbol_width(width_);
  }

  Writer& u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
    return *this;
  }

  Writer& symbol(std::uint32_t v) {
    if (width_ < 4 && (v >> (8 * width_)) != 0) {
      throw Error(ErrorCode::kOutOfRange, "symbol does not fit the symbol width");
    }
    for (std::size_t b = 0; b < width_; ++b) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }
    return *this;
  }

  // Length-prefixed symbol vector.
  Writer& symbols(std::span<const std::uint32_t> vs) {
    u32(static_cast<std::uint32_t>(vs.size()));
    for (auto v : vs) symbol(v);
    return *this;
  }

  Writer& matrix(std::size_t rows, std::size_t cols, std::span<const std::uint32_t> vs) {
    if (vs.size() != rows * cols) {
      throw Error(ErrorCode::kDimensionMismatch, "matrix payload size mismatch");
    }
    u32(static_cast<std::uint32_t>(rows)).u32(static_cast<std::uint32_t>(cols));
    for (auto v : vs) symbol(v);
    return *this;
  }

  Writer& ids(std::span<const std::uint32_t> vs) {
    u32(static_cast<std::uint32_t>(vs.size()));
    for (auto v : vs) u32(v);
    return *this;
  }

  Writer& text(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
    return *this;
  }

  Message finish(Kind kind) && { return {static_cast<std::uint8_t>(kind), std::move(out_)}; }

 private:
  std::size_t width_;
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> body, std::size_t symbol_width = 2)
      : in_(body), width_(symbol_width) {
    check_symbol_width(width_);
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }

  std::uint32_t symbol() {
    need(width_);
    std::uint32_t v = 0;
    for (std::size_t b = 0; b < width_; ++b) v |= std::uint32_t{in_[pos_++]} << (8 * b);
    return v;
  }

  std::vector<std::uint32_t> symbols() {
    const std::uint32_t count = u32();
    need(std::size_t{count} * width_);
    std::vector<std::uint32_t> out(count);
    for (auto& v : out) v = symbol();
    return out;
  }

  // Returns the row-major values; rows/cols through the out-parameters.
  std::vector<std::uint32_t> matrix(std::size_t& rows, std::size_t& cols) {
    rows = u32();
    cols = u32();
    if (cols != 0 && rows > kMaxPayload / cols) bad_frame("matrix too large");
    need(rows * cols * width_);
    std::vector<std::uint32_t> out(rows * cols);
    for (auto& v : out) v = symbol();
    return out;
  }

  std::vector<std::uint32_t> ids() {
    const std::uint32_t count = u32();
    need(std::size_t{count} * 4);
    std::vector<std::uint32_t> out(count);
    for (auto& v : out) v = u32();
    return out;
  }

  std::string text() {
    const std::uint32_t len = u32();
    need(len);
    std::string s(in_.begin() + pos_, in_.begin() + pos_ + len);
    pos_ += len;
    return s;
  }

  // Trailing bytes mean the peer and we disagree on the layout.
  void finish() const {
    if (pos_ != in_.size()) bad_frame("trailing bytes");
  }

 private:
  void need(std::size_t bytes) const {
    if (in_.size() - pos_ < bytes) bad_frame("truncated payload");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::size_t width_;
};

// Length prefix + kind + body.
inline std::vector<std::uint8_t> encode_frame(const Message& m) {
  const std::size_t len = m.body.size() + 1;
  if (len > kMaxPayload) {
    throw Error(ErrorCode::kInvalidArgument, "payload exceeds 16 MiB");
  }
  std::vector<std::uint8_t> out;
  out.reserve(len + 4);
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(len >> s));
  out.push_back(m.kind);
  out.insert(out.end(), m.body.begin(), m.body.end());
  return out;
}

inline std::uint32_t decode_length(std::span<const std::uint8_t, 4> header) {
  const std::uint32_t len = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                            (std::uint32_t{header[2]} << 8) | header[3];
  if (len == 0) bad_frame("empty payload");
  if (len > kMaxPayload) bad_frame("payload exceeds 16 MiB");
  return len;
}

inline Message decode_payload(std::span<const std::uint8_t> payload) {
  if (payload.empty()) bad_frame("empty payload");
  return {payload[0], std::vector<std::uint8_t>(payload.begin() + 1, payload.end())};
}

// Parses one complete frame; the buffer must hold exactly one frame.
inline Message decode_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) bad_frame("truncated header");
  const std::uint32_t len = decode_length(frame.first<4>());
  if (frame.size() - 4 != len) bad_frame("length prefix does not match payload");
  return decode_payload(frame.subspan(4));
}

// Parameters every data-bearing request carries so a node can refuse
// traffic meant for a differently configured cluster.
struct ClusterTag {
  std::uint32_t q = 0;
  std::uint32_t n = 0;
  std::uint32_t k = 0;

  friend bool operator==(const ClusterTag&, const ClusterTag&) = default;
};

struct StoreRequest {
  ClusterTag tag;
  std::uint32_t record = 0;
  std::uint32_t stripe = 0;
  std::vector<std::uint32_t> row;
};

struct QueryRequest {
  ClusterTag tag;
  std::uint32_t stripe = 0;
  std::vector<std::uint32_t> records;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> matrix;
};

struct RepairHelpRequest {
  ClusterTag tag;
  std::uint32_t failed = 0;
  std::uint32_t record = 0;
  std::uint32_t stripe = 0;
};

struct ShareRef {
  std::uint32_t record = 0;
  std::uint32_t stripe = 0;
};

// Removes stripes >= from_stripe of a record.
struct DeleteRequest {
  std::uint32_t record = 0;
  std::uint32_t from_stripe = 0;
};

struct ErrorReply {
  ErrorCode code = ErrorCode::kIo;
  std::string message;
};

inline void put_tag(Writer& w, const ClusterTag& t) { w.u32(t.q).u32(t.n).u32(t.k); }
inline ClusterTag get_tag(Reader& r) {
  ClusterTag t;
  t.q = r.u32();
  t.n = r.u32();
  t.k = r.u32();
  return t;
}

inline Message make(const StoreRequest& s, std::size_t width) {
  Writer w(width);
  put_tag(w, s.tag);
  w.u32(s.record).u32(s.stripe).symbols(s.row);
  return std::move(w).finish(Kind::kStore);
}

inline Message make(const QueryRequest& q, std::size_t width) {
  Writer w(width);
  put_tag(w, q.tag);
  w.u32(q.stripe).ids(q.records).matrix(q.rows, q.cols, q.matrix);
  return std::move(w).finish(Kind::kQuery);
}

inline Message make(const RepairHelpRequest& h, std::size_t width) {
  Writer w(width);
  put_tag(w, h.tag);
  w.u32(h.failed).u32(h.record).u32(h.stripe);
  return std::move(w).finish(Kind::kRepairHelp);
}

inline Message make_get_share(const ShareRef& s) {
  Writer w;
  w.u32(s.record).u32(s.stripe);
  return std::move(w).finish(Kind::kGetShare);
}

inline Message make(const DeleteRequest& d) {
  Writer w;
  w.u32(d.record).u32(d.from_stripe);
  return std::move(w).finish(Kind::kDelete);
}

inline Message make_symbols(Kind kind, std::span<const std::uint32_t> vs, std::size_t width) {
  Writer w(width);
  w.symbols(vs);
  return std::move(w).finish(kind);
}

inline Message make_symbol(Kind kind, std::uint32_t v, std::size_t width) {
  Writer w(width);
  w.symbol(v);
  return std::move(w).finish(kind);
}

inline Message make_empty(Kind kind) { return {static_cast<std::uint8_t>(kind), {}}; }

inline Message make_error(ErrorCode code, const std::string& message) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(code)).text(message);
  return std::move(w).finish(Kind::kError);
}

inline StoreRequest parse_store(const Message& m, std::size_t width) {
  Reader r(m.body, width);
  StoreRequest s;
  s.tag = get_tag(r);
  s.record = r.u32();
  s.stripe = r.u32();
  s.row = r.symbols();
  r.finish();
  return s;
}

inline QueryRequest parse_query(const Message& m, std::size_t width) {
  Reader r(m.body, width);
  QueryRequest q;
  q.tag = get_tag(r);
  q.stripe = r.u32();
  q.records = r.ids();
  q.matrix = r.matrix(q.rows, q.cols);
  r.finish();
  return q;
}

inline RepairHelpRequest parse_repair_help(const Message& m) {
  Reader r(m.body);
  RepairHelpRequest h;
  h.tag = get_tag(r);
  h.failed = r.u32();
  h.record = r.u32();
  h.stripe = r.u32();
  r.finish();
  return h;
}

inline ShareRef parse_get_share(const Message& m) {
  Reader r(m.body);
  ShareRef s;
  s.record = r.u32();
  s.stripe = r.u32();
  r.finish();
  return s;
}

inline DeleteRequest parse_delete(const Message& m) {
  Reader r(m.body);
  DeleteRequest d;
  d.record = r.u32();
  d.from_stripe = r.u32();
  r.finish();
  return d;
}

inline std::vector<std::uint32_t> parse_symbols(const Message& m, std::size_t width) {
  Reader r(m.body, width);
  auto out = r.symbols();
  r.finish();
  return out;
}

inline std::uint32_t parse_symbol(const Message& m, std::size_t width) {
  Reader r(m.body, width);
  const auto v = r.symbol();
  r.finish();
  return v;
}

inline ErrorReply parse_error(const Message& m) {
  Reader r(m.body);
  ErrorReply e;
  const auto code = r.u32();
  e.code = code <= static_cast<std::uint32_t>(ErrorCode::kIo) ? static_cast<ErrorCode>(code)
                                                               : ErrorCode::kIo;
  e.message = r.text();
  r.finish();
  return e;
}

// Throws the remote error if `m` is an ERROR reply, or a bad-frame error
// if it is not of the expected kind.
inline const Message& expect(const Message& m, Kind kind) {
  if (m.type() == Kind::kError) {
    const auto e = parse_error(m);
    throw Error(e.code, e.message);
  }
  if (m.type() != kind) {
    bad_frame("expected " + kind_name(static_cast<std::uint8_t>(kind)) + ", got " +
              kind_name(m.kind));
  }
  return m;
}

}  // namespace pmsr::wire

#endif  // PMSR_WIRE_HPP_
