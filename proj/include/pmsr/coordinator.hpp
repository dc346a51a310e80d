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

// Client side of the cluster: storing records, private retrieval and
// single-node repair.
//
// The coordinator acts for the user and is trusted. It keeps a small catalog
// (byte length and stripe count per record) next to the node directories.
// Record ids are 1..m. Payload bytes are packed into field symbols at
// floor(log2 q) bits each and split into stripes of B symbols; stripe s of
// every record forms one independent code instance.

#ifndef PMSR_COORDINATOR_HPP_
#define PMSR_COORDINATOR_HPP_

#include <algorithm>
#include <bit>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "pmsr/cluster_config.hpp"
#include "pmsr/msr.hpp"
#include "pmsr/net.hpp"
#include "pmsr/pir.hpp"
#include "pmsr/wire.hpp"

namespace pmsr {

inline std::size_t bits_per_symbol(std::uint32_t q) {
  return static_cast<std::size_t>(std::bit_width(q) - 1);
}

// Little-endian bit stream, b bits per symbol.
inline std::vector<std::uint32_t> pack_bytes(std::span<const std::uint8_t> bytes,
                                             std::size_t b) {
  std::vector<std::uint32_t> out((bytes.size() * 8 + b - 1) / b, 0);
  for (std::size_t bit = 0; bit < bytes.size() * 8; ++bit) {
    if ((bytes[bit / 8] >> (bit % 8)) & 1) out[bit / b] |= 1u << (bit % b);
  }
  return out;
}

inline std::vector<std::uint8_t> unpack_bytes(std::span<const std::uint32_t> symbols,
                                              std::size_t b, std::size_t byte_len) {
  if (symbols.size() * b < byte_len * 8) {
    throw Error(ErrorCode::kWrongLength, "not enough symbols for the payload");
  }
  std::vector<std::uint8_t> out(byte_len, 0);
  for (std::size_t bit = 0; bit < byte_len * 8; ++bit) {
    const std::uint32_t s = symbols[bit / b];
    if (s >> b) throw Error(ErrorCode::kCorruptResponses, "corrupt responses");
    if ((s >> (bit % b)) & 1) out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
  }
  return out;
}

// record id -> (byte length, stripe count)
class Catalog {
 public:
  struct Entry {
    std::uint64_t bytes = 0;
    std::uint32_t stripes = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  static Catalog load(const fs::path& p) {
    Catalog c;
    if (!fs::exists(p)) return c;
    std::istringstream in(read_file(p));
    std::uint32_t rec = 0;
    Entry e;
    while (in >> rec >> e.bytes >> e.stripes) c.entries_[rec] = e;
    if (!in.eof()) throw Error(ErrorCode::kIo, "corrupt catalog " + p.string());
    return c;
  }

  void save(const fs::path& p) const {
    fs::create_directories(p.parent_path());
    std::ostringstream out;
    for (const auto& [rec, e] : entries_) out << rec << ' ' << e.bytes << ' ' << e.stripes << '\n';
    write_file_atomic(p, out.str());
  }

  const std::map<std::uint32_t, Entry>& entries() const noexcept { return entries_; }
  std::optional<Entry> find(std::uint32_t rec) const {
    auto it = entries_.find(rec);
    return it == entries_.end() ? std::nullopt : std::optional<Entry>(it->second);
  }
  void set(std::uint32_t rec, Entry e) { entries_[rec] = e; }
  void erase(std::uint32_t rec) { entries_.erase(rec); }

 private:
  std::map<std::uint32_t, Entry> entries_;
};

struct PutReport {
  std::size_t stripes = 0;
  std::size_t symbols = 0;  // payload symbols before padding
};

struct GetReport {
  std::vector<std::uint8_t> bytes;
  std::size_t stripes = 0;
  std::size_t downloaded_symbols = 0;  // answer symbols over all nodes and stripes
  std::size_t retrieved_symbols = 0;   // stripes * B
};

struct RepairReport {
  std::size_t failed = 0;
  std::vector<std::size_t> helpers;
  std::size_t instances = 0;  // (record, stripe) pairs regenerated
  std::size_t downloaded_symbols = 0;
  std::size_t restored_symbols = 0;
  bool verified = false;
};

namespace detail {

template <typename T>
struct Outcome {
  bool ok = false;
  T value{};
  std::string error;
};

}  // namespace detail

class Coordinator {
 public:
  using QueryObserver = std::function<void(std::size_t node, const wire::Message&)>;

  explicit Coordinator(ClusterConfig cfg)
      : cfg_(std::move(cfg)), enc_(cfg_.encoding()), pir_(cfg_.pir()) {
    for (const auto& e : cfg_.nodes) {
      clients_.push_back(std::make_unique<net::Client>(e, cfg_.timeout));
    }
  }

  const ClusterConfig& config() const noexcept { return cfg_; }
  const EncodingMatrix& encoding() const noexcept { return enc_; }
  Catalog catalog() const { return Catalog::load(cfg_.catalog_path()); }

  // Sees every QUERY exactly as sent, for transcript checks.
  void set_query_observer(QueryObserver obs) { observer_ = std::move(obs); }

  bool healthy(std::size_t node) {
    try {
      wire::expect(client(node).call(wire::make_empty(wire::Kind::kHealth)), wire::Kind::kOk);
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  std::vector<bool> health() {
    std::vector<std::size_t> all(cfg_.n());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto res = fan_out(all, [&](std::size_t i) { return healthy(i); });
    std::vector<bool> out;
    for (auto& r : res) out.push_back(r.ok && r.value);
    return out;
  }

  PutReport put(std::uint32_t record, std::span<const std::uint8_t> payload) {
    check_record(record);
    const auto up = health();
    for (std::size_t i = 0; i < up.size(); ++i) {
      if (!up[i]) {
        throw Error(ErrorCode::kTransport,
                    "node " + std::to_string(i + 1) + " unreachable; nothing stored");
      }
    }
    const auto& p = enc_.params();
    const Field field = cfg_.field();
    std::vector<std::uint32_t> symbols = pack_bytes(payload, bits_per_symbol(cfg_.q));
    const std::size_t stripes = std::max<std::size_t>(1, (symbols.size() + p.B - 1) / p.B);
    PutReport report{stripes, symbols.size()};
    symbols.resize(stripes * p.B, 0);

    // rows[node][stripe]
    std::vector<std::vector<std::vector<std::uint32_t>>> rows(p.n);
    for (std::size_t s = 0; s < stripes; ++s) {
      std::vector<FieldElement> rec;
      for (std::size_t j = 0; j < p.B; ++j) rec.push_back(field.element(symbols[s * p.B + j]));
      const auto c = encode(message_matrix_from_record(rec, p), enc_);
      for (std::size_t i = 0; i < p.n; ++i) {
        std::vector<std::uint32_t> row;
        for (const auto& x : c.row(i)) row.push_back(x.value());
        rows[i].push_back(std::move(row));
      }
    }

    auto results = fan_out(all_nodes(), [&](std::size_t i) {
      for (std::size_t s = 0; s < stripes; ++s) {
        wire::StoreRequest req{cfg_.tag(), record, static_cast<std::uint32_t>(s), rows[i][s]};
        wire::expect(client(i).call(wire::make(req, cfg_.width())), wire::Kind::kOk);
      }
      // Drop stripes of an older, longer version.
      wire::expect(client(i).call(wire::make(wire::DeleteRequest{record, static_cast<std::uint32_t>(stripes)})),
                   wire::Kind::kOk);
      return true;
    });

    Catalog cat = catalog();
    if (auto failure = first_failure(results)) {
      fan_out(all_nodes(), [&](std::size_t i) {
        return client(i).call(wire::make(wire::DeleteRequest{record, 0})).kind;
      });
      cat.erase(record);
      cat.save(cfg_.catalog_path());
      throw Error(ErrorCode::kTransport, "put aborted and rolled back: " + *failure);
    }
    cat.set(record, {payload.size(), static_cast<std::uint32_t>(stripes)});
    cat.save(cfg_.catalog_path());
    return report;
  }

  // Fetches record `record` without revealing it: every node sees one
  // uniformly masked query per stripe over all m records, and the number
  // of stripes is the maximum over the catalog.
  GetReport private_get(std::uint32_t record, std::uint64_t seed) {
    check_record(record);
    const Catalog cat = catalog();
    std::size_t stripes = 0;
    for (std::uint32_t j = 1; j <= cfg_.m; ++j) {
      auto e = cat.find(j);
      if (!e) {
        throw Error(ErrorCode::kNotFound,
                    "not found: record " + std::to_string(j) + " has never been stored");
      }
      stripes = std::max<std::size_t>(stripes, e->stripes);
    }
    const auto& p = enc_.params();
    std::vector<std::uint32_t> record_ids(cfg_.m);
    for (std::uint32_t j = 0; j < cfg_.m; ++j) record_ids[j] = j + 1;

    SeededRng rng(seed);
    GetReport report;
    report.stripes = stripes;
    std::vector<std::uint32_t> symbols;
    for (std::size_t s = 0; s < stripes; ++s) {
      PrivateRetrieval pr(pir_, enc_, record - 1, rng);
      std::vector<wire::Message> requests;
      for (std::size_t i = 0; i < p.n; ++i) {
        const Matrix& q = pr.queries()[i].q;
        wire::QueryRequest req{cfg_.tag(), static_cast<std::uint32_t>(s), record_ids,
                               q.rows(), q.cols(), q.values()};
        requests.push_back(wire::make(req, cfg_.width()));
        if (observer_) observer_(i, requests.back());
      }
      auto results = fan_out(all_nodes(), [&](std::size_t i) {
        const auto reply = client(i).call(requests[i]);
        auto a = wire::parse_symbols(wire::expect(reply, wire::Kind::kAnswer), cfg_.width());
        if (a.size() != pir_.d) throw Error(ErrorCode::kIncompleteResponses, "incomplete responses");
        return a;
      });
      if (auto failure = first_failure(results)) {
        throw Error(ErrorCode::kRetrievalUnavailable, "retrieval unavailable: " + *failure);
      }
      const Field field = cfg_.field();
      std::vector<Answer> answers;
      for (auto& r : results) {
        Answer a;
        for (auto v : r.value) {
          if (v >= cfg_.q) throw Error(ErrorCode::kCorruptResponses, "corrupt responses");
          a.a.push_back(field.element(v));
        }
        report.downloaded_symbols += a.a.size();
        answers.push_back(std::move(a));
      }
      for (const auto& x : pr.decode(answers)) symbols.push_back(x.value());
      report.retrieved_symbols += p.B;
    }
    report.bytes = unpack_bytes(symbols, bits_per_symbol(cfg_.q), cat.find(record)->bytes);
    return report;
  }

  // Regenerates every share of `failed` from the r lowest-indexed live
  // helpers. The failed node's daemon must be running (empty or not).
  RepairReport repair(std::size_t failed, bool verify = false) {
    const auto& p = enc_.params();
    if (failed >= p.n) {
      throw Error(ErrorCode::kOutOfRange, "unknown node " + std::to_string(failed + 1));
    }
    const auto up = health();
    RepairReport report;
    report.failed = failed;
    for (std::size_t i = 0; i < p.n && report.helpers.size() < p.r; ++i) {
      if (i != failed && up[i]) report.helpers.push_back(i);
    }
    if (report.helpers.size() < p.r) {
      throw Error(ErrorCode::kInsufficientHelpers,
                  "insufficient helpers: " + std::to_string(report.helpers.size()) +
                      " live, need r = " + std::to_string(p.r));
    }
    if (!up[failed]) {
      throw Error(ErrorCode::kTransport,
                  "replacement node " + std::to_string(failed + 1) + " is not running");
    }
    const Field field = cfg_.field();
    const Catalog cat = catalog();
    report.verified = verify;
    for (const auto& [record, entry] : cat.entries()) {
      wire::expect(client(failed).call(wire::make(wire::DeleteRequest{record, 0})), wire::Kind::kOk);
      for (std::uint32_t s = 0; s < entry.stripes; ++s) {
        auto results = fan_out(report.helpers, [&](std::size_t h) {
          wire::RepairHelpRequest req{cfg_.tag(), static_cast<std::uint32_t>(failed), record, s};
          return wire::parse_symbol(
              wire::expect(client(h).call(wire::make(req, cfg_.width())), wire::Kind::kRepairSymbol),
              cfg_.width());
        });
        if (auto failure = first_failure(results)) {
          throw Error(ErrorCode::kTransport, "repair helper failed: " + *failure);
        }
        std::vector<HelperSymbol> syms;
        for (std::size_t j = 0; j < results.size(); ++j) {
          syms.push_back({report.helpers[j], field.element(results[j].value)});
        }
        const auto regenerated = repair_regenerate(failed, syms, enc_);
        std::vector<std::uint32_t> row;
        for (const auto& x : regenerated) row.push_back(x.value());
        if (verify && row != reencoded_row(failed, record, s, report.helpers)) {
          report.verified = false;
        }
        wire::StoreRequest store{cfg_.tag(), record, s, row};
        wire::expect(client(failed).call(wire::make(store, cfg_.width())), wire::Kind::kOk);
        ++report.instances;
        report.downloaded_symbols += p.r * p.beta;
        report.restored_symbols += p.alpha;
      }
    }
    return report;
  }

  // Non-private read of one stored row (admin and tests).
  std::vector<std::uint32_t> fetch_share(std::size_t node, std::uint32_t record,
                                         std::uint32_t stripe) {
    return wire::parse_symbols(
        wire::expect(client(node).call(wire::make_get_share({record, stripe})), wire::Kind::kShare),
        cfg_.width());
  }

 private:
  template <typename T>
  using Outcome = detail::Outcome<T>;

  // Runs fn(node) for each node concurrently and joins on all of them.
  template <typename Fn>
  std::vector<Outcome<std::invoke_result_t<Fn, std::size_t>>> fan_out(
      const std::vector<std::size_t>& nodes, Fn fn) {
    using T = std::invoke_result_t<Fn, std::size_t>;
    std::vector<std::future<T>> futures;
    for (auto i : nodes) futures.push_back(std::async(std::launch::async, fn, i));
    std::vector<Outcome<T>> out(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      try {
        out[j].value = futures[j].get();
        out[j].ok = true;
      } catch (const std::exception& e) {
        out[j].error = "node " + std::to_string(nodes[j] + 1) + ": " + e.what();
      }
    }
    return out;
  }

  template <typename T>
  static std::optional<std::string> first_failure(const std::vector<Outcome<T>>& res) {
    for (const auto& r : res) {
      if (!r.ok) return r.error;
    }
    return std::nullopt;
  }

  std::vector<std::size_t> all_nodes() const {
    std::vector<std::size_t> v(cfg_.n());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    return v;
  }

  net::Client& client(std::size_t node) { return *clients_.at(node); }

  void check_record(std::uint32_t record) const {
    if (record < 1 || record > cfg_.m) {
      throw Error(ErrorCode::kOutOfRange, "record id " + std::to_string(record) +
                                              " out of range 1.." + std::to_string(cfg_.m));
    }
  }

  // Row `failed` of a fresh encode of the message recovered from k helpers.
  std::vector<std::uint32_t> reencoded_row(std::size_t failed, std::uint32_t record,
                                           std::uint32_t stripe,
                                           const std::vector<std::size_t>& helpers) {
    const Field field = cfg_.field();
    std::vector<NodeShare> shares;
    for (std::size_t j = 0; j < enc_.params().k; ++j) {
      NodeShare sh{helpers[j], {}};
      std::vector<std::uint32_t> row;
      try {
        row = fetch_share(helpers[j], record, stripe);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotFound) throw;
        row.assign(enc_.params().alpha, 0);  // short record: zero stripe
      }
      for (auto v : row) sh.row.push_back(field.element(v));
      shares.push_back(std::move(sh));
    }
    std::vector<std::uint32_t> out;
    for (const auto& x : encode(recover(shares, enc_), enc_).row(failed)) out.push_back(x.value());
    return out;
  }

  ClusterConfig cfg_;
  EncodingMatrix enc_;
  PirConfig pir_;
  std::vector<std::unique_ptr<net::Client>> clients_;
  QueryObserver observer_;
};

}  // namespace pmsr

#endif  // PMSR_COORDINATOR_HPP_
