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

// Storage node: request handling and the TCP daemon around it.

#ifndef PMSR_NODE_SERVER_HPP_
#define PMSR_NODE_SERVER_HPP_

#include <atomic>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "pmsr/msr.hpp"
#include "pmsr/net.hpp"
#include "pmsr/pir.hpp"
#include "pmsr/share_store.hpp"
#include "pmsr/wire.hpp"

namespace pmsr {

// Maps one request to one reply. Thread safe; the only state is the store.
class NodeService {
 public:
  explicit NodeService(ShareStore& store)
      : store_(store),
        field_(store.manifest().q),
        enc_(build_encoding_matrix(
            MsrParams::product_matrix(store.manifest().n, store.manifest().k), field_,
            store.manifest().points.empty()
                ? std::nullopt
                : std::optional<std::vector<std::uint32_t>>(store.manifest().points))) {}

  const Manifest& manifest() const noexcept { return store_.manifest(); }

  wire::Message handle(const wire::Message& req) const noexcept {
    try {
      switch (req.type()) {
        case wire::Kind::kHealth:
          return wire::make_empty(wire::Kind::kOk);
        case wire::Kind::kStore:
          return on_store(wire::parse_store(req, width()));
        case wire::Kind::kQuery:
          return on_query(wire::parse_query(req, width()));
        case wire::Kind::kRepairHelp:
          return on_repair_help(wire::parse_repair_help(req));
        case wire::Kind::kGetShare:
          return on_get_share(wire::parse_get_share(req));
        case wire::Kind::kDelete: {
          const auto d = wire::parse_delete(req);
          store_.remove(d.record, d.from_stripe);
          return wire::make_empty(wire::Kind::kOk);
        }
        default:
          return wire::make_error(ErrorCode::kUnknownKind,
                                  "unknown kind " + wire::kind_name(req.kind));
      }
    } catch (const Error& e) {
      return wire::make_error(e.code(), e.what());
    } catch (const std::exception& e) {
      return wire::make_error(ErrorCode::kIo, e.what());
    }
  }

 private:
  std::size_t width() const { return manifest().symbol_width; }

  void check_tag(const wire::ClusterTag& tag) const {
    if (!(tag == manifest().tag())) {
      throw Error(ErrorCode::kConfigMismatch, "config mismatch");
    }
  }

  // A record's row for one stripe. Records shorter than the stripe read as
  // zero there; records never stored are "not found".
  std::vector<std::uint32_t> row_or_zero(std::uint32_t record, std::uint32_t stripe) const {
    if (auto row = store_.get(record, stripe)) return *row;
    if (!store_.has_record(record)) {
      throw Error(ErrorCode::kNotFound, "not found: record " + std::to_string(record));
    }
    return std::vector<std::uint32_t>(manifest().alpha(), 0);
  }

  wire::Message on_store(const wire::StoreRequest& s) const {
    check_tag(s.tag);
    store_.put(s.record, s.stripe, s.row);
    return wire::make_empty(wire::Kind::kOk);
  }

  wire::Message on_query(const wire::QueryRequest& q) const {
    check_tag(q.tag);
    const std::size_t a = manifest().alpha();
    if (q.cols != q.records.size() * a) {
      throw Error(ErrorCode::kDimensionMismatch, "query width does not match the record list");
    }
    std::vector<FieldElement> stored;
    stored.reserve(q.cols);
    for (auto rec : q.records) {
      for (auto v : row_or_zero(rec, q.stripe)) stored.push_back(field_.element(v));
    }
    for (auto v : q.matrix) {
      if (v >= field_.modulus()) wire::bad_frame("query symbol not in the field");
    }
    const Answer ans = node_answer(QueryMatrix{Matrix(field_, q.rows, q.cols, q.matrix)}, stored);
    std::vector<std::uint32_t> out;
    for (const auto& x : ans.a) out.push_back(x.value());
    return wire::make_symbols(wire::Kind::kAnswer, out, width());
  }

  wire::Message on_repair_help(const wire::RepairHelpRequest& h) const {
    check_tag(h.tag);
    std::vector<FieldElement> share;
    for (auto v : row_or_zero(h.record, h.stripe)) share.push_back(field_.element(v));
    const auto sym = repair_helper_symbol(share, manifest().node_id, h.failed, enc_);
    return wire::make_symbol(wire::Kind::kRepairSymbol, sym.value(), width());
  }

  wire::Message on_get_share(const wire::ShareRef& s) const {
    auto row = store_.get(s.record, s.stripe);
    if (!row) {
      throw Error(ErrorCode::kNotFound, "not found: record " + std::to_string(s.record) +
                                            " stripe " + std::to_string(s.stripe));
    }
    return wire::make_symbols(wire::Kind::kShare, *row, width());
  }

  ShareStore& store_;
  Field field_;
  EncodingMatrix enc_;
};

// Thread-per-connection daemon. stop() is safe from any thread.
class NodeServer {
 public:
  NodeServer(ShareStore& store, const net::Endpoint& bind)
      : service_(store), listener_(bind) {}

  ~NodeServer() { stop(); }

  std::uint16_t port() const noexcept { return listener_.port(); }

  void start() {
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  void stop() {
    if (stopping_.exchange(true)) return;
    if (accept_thread_.joinable()) accept_thread_.join();
    std::list<std::thread> workers;
    {
      std::lock_guard lock(mu_);
      workers.swap(workers_);
    }
    for (auto& t : workers) t.join();
  }

 private:
  static constexpr net::Millis kPoll{100};

  void accept_loop() {
    while (!stopping_) {
      net::Socket s = listener_.accept(kPoll);
      if (!s.valid()) continue;
      std::lock_guard lock(mu_);
      workers_.emplace_back([this, sock = std::make_shared<net::Socket>(std::move(s))] {
        serve(*sock);
      });
    }
  }

  void serve(net::Socket& s) {
    try {
      while (!stopping_) {
        if (!net::wait_fd(s.fd(), POLLIN, kPoll)) continue;
        std::optional<wire::Message> req;
        try {
          req = net::recv_message(s.fd());
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kBadFrame) {
            // Framing is lost; report and drop the connection.
            net::send_message(s.fd(), wire::make_error(ErrorCode::kBadFrame, "bad frame"));
          }
          return;
        }
        if (!req) return;
        net::send_message(s.fd(), service_.handle(*req));
      }
    } catch (const std::exception&) {
      // Peer went away; nothing to report to.
    }
  }

  NodeService service_;
  net::Listener listener_;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex mu_;
  std::list<std::thread> workers_;
};

}  // namespace pmsr

#endif  // PMSR_NODE_SERVER_HPP_
