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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pmsr/coordinator.hpp"
#include "pmsr/msr.hpp"
#include "pmsr/pir.hpp"
#include "test_cluster.hpp"

namespace pmsr {
namespace {

using Clock = std::chrono::steady_clock;

// Collects the first failure; later checks are skipped cheaply.
class Check {
 public:
  bool operator()(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
    return ok;
  }
  bool ok() const { return failure_.empty(); }
  const std::string& failure() const { return failure_; }

 private:
  std::string failure_;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double s) {
  std::ostringstream o;
  o.precision(3);
  o << std::fixed << s << " s";
  return o.str();
}

const Field& FieldFor(std::size_t k) {
  static const Field f13(13), f257(257);
  return k == 3 ? f13 : f257;
}

struct Database {
  std::vector<std::vector<FieldElement>> records;
  std::vector<std::vector<FieldElement>> stored;  // per node, all records
};

Database RandomDatabase(const PirConfig& cfg, const EncodingMatrix& enc, SeededRng& rng) {
  Database db{{}, std::vector<std::vector<FieldElement>>(cfg.params.n)};
  for (std::size_t j = 0; j < cfg.m; ++j) {
    db.records.push_back(sample_uniform(enc.field(), rng, cfg.params.B));
    const auto c = encode(message_matrix_from_record(db.records.back(), cfg.params), enc);
    for (std::size_t i = 0; i < cfg.params.n; ++i) {
      for (const auto& x : c.row(i)) db.stored[i].push_back(x);
    }
  }
  return db;
}

std::vector<Answer> AnswerAll(const std::vector<QueryMatrix>& queries, const Database& db) {
  std::vector<Answer> out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out.push_back(node_answer(queries[i], db.stored[i]));
  }
  return out;
}

bool MatrixEquals(const Matrix& m, const std::vector<std::vector<std::uint32_t>>& lit) {
  if (m.rows() != lit.size()) return false;
  for (std::size_t i = 0; i < lit.size(); ++i) {
    if (m.cols() != lit[i].size()) return false;
    for (std::size_t j = 0; j < lit[i].size(); ++j) {
      if (m.raw(i, j) != lit[i][j]) return false;
    }
  }
  return true;
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome Ac1Example1() {
  const auto start = Clock::now();
  Check check;
  const Field& f = FieldFor(3);
  const auto cfg = PirConfig::make(3, 3);
  const auto enc = build_encoding_matrix(cfg.params, f);
  const auto& p = enc.params();
  check(p.n == 6 && p.k == 3 && p.r == 4 && p.alpha == 2 && p.beta == 1 && p.B == 6,
        "parameters");
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      check(enc.psi().raw(i, j) == static_cast<std::uint32_t>(oracle::kExample1Psi[i][j]),
            "Psi row " + std::to_string(i + 1));
    }
  }
  const auto patterns = build_patterns(cfg, f);
  const std::vector<std::vector<std::vector<std::uint32_t>>> v_lit = {
      {{1, 0}, {0, 1}, {0, 0}},
      {{0, 0}, {1, 0}, {0, 1}},
      {{0, 1}, {0, 0}, {1, 0}},
  };
  const std::vector<std::vector<std::vector<std::uint32_t>>> ve1_lit = {
      {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}},
      {{0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}},
      {{0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0}},
  };
  const Matrix e1 = selection_matrix(f, 2, 3, 0);
  for (std::size_t i = 0; i < 6; ++i) {
    const Matrix ve = patterns[i].v * e1;
    if (i < 3) {
      check(MatrixEquals(patterns[i].v, v_lit[i]), "V" + std::to_string(i + 1));
      check(MatrixEquals(ve, ve1_lit[i]), "V" + std::to_string(i + 1) + "E1");
    } else {
      check(patterns[i].v.is_zero() && ve.is_zero(), "V" + std::to_string(i + 1) + " not zero");
    }
  }
  SeededRng rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<std::int64_t, 6> x{};
    std::vector<FieldElement> rec;
    for (auto& v : x) {
      v = rng.uniform_below(13);
      rec.push_back(f.element(static_cast<std::uint64_t>(v)));
    }
    const auto c = encode(message_matrix_from_record(rec, p), enc);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto want = oracle::example1_share(i, x);
      check(c.c.raw(i, 0) == want[0] && c.c.raw(i, 1) == want[1],
            "node " + std::to_string(i + 1) + " content, trial " + std::to_string(trial));
    }
  }
  const double t = Seconds(start);
  check(t < 1.0, "runtime " + Fmt(t));
  return {check.ok(), check.ok() ? "Psi, V1..V6, ViE1 and 20 databases match in " + Fmt(t)
                                 : check.failure()};
}

Outcome Ac2Retrieval() {
  const auto start = Clock::now();
  Check check;
  std::size_t runs = 0;
  for (std::size_t k : {3u, 4u, 5u}) {
    for (std::size_t m : {1u, 2u, 5u}) {
      const auto cfg = PirConfig::make(k, m);
      const auto enc = build_encoding_matrix(cfg.params, FieldFor(k));
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        SeededRng rng(seed * 1000 + k * 10 + m);
        const auto db = RandomDatabase(cfg, enc, rng);
        for (std::size_t f = 0; f < m; ++f) {
          PrivateRetrieval pr(cfg, enc, f, rng);
          const auto answers = AnswerAll(pr.queries(), db);
          check(pr.decode(answers) == db.records[f],
                "k=" + std::to_string(k) + " m=" + std::to_string(m) + " f=" +
                    std::to_string(f + 1) + " seed=" + std::to_string(seed));
          ++runs;
        }
      }
    }
  }
  const double t = Seconds(start);
  check(t < 30.0, "runtime " + Fmt(t));
  return {check.ok(), check.ok() ? std::to_string(runs) + " retrievals exact in " + Fmt(t)
                                 : check.failure()};
}

Outcome Ac3Cpop() {
  Check check;
  std::string summary;
  for (std::size_t k : {3u, 4u, 5u, 6u}) {
    const auto cfg = PirConfig::make(k, 2);
    const auto enc = build_encoding_matrix(cfg.params, FieldFor(k));
    SeededRng rng(k);
    const auto db = RandomDatabase(cfg, enc, rng);
    PrivateRetrieval pr(cfg, enc, 1, rng);
    std::size_t downloaded = 0;
    for (const auto& a : AnswerAll(pr.queries(), db)) downloaded += a.a.size();
    const std::size_t dn = cfg.d * cfg.params.n;
    check(downloaded == dn, "k=" + std::to_string(k) + " downloaded " + std::to_string(downloaded));
    const Rational cpop(static_cast<std::int64_t>(downloaded),
                        static_cast<std::int64_t>(k * cfg.params.alpha));
    check(cpop == Rational(3), "k=" + std::to_string(k) + " cPoP " + cpop.str());
    summary += " k=" + std::to_string(k) + ":" + std::to_string(downloaded) + "/" +
               std::to_string(k * cfg.params.alpha);
  }
  // Same count through real node servers, summed over stripes.
  for (std::uint32_t k : {3u, 4u}) {
    testing::LocalCluster cluster(k == 3 ? 13 : 257, k, 2);
    Coordinator coord(cluster.config());
    const std::vector<std::uint8_t> payload(40, 0xA5);
    coord.put(1, payload);
    coord.put(2, std::vector<std::uint8_t>(3, 1));
    const auto rep = coord.private_get(1, 9);
    const std::size_t n = 3 * k - 3;
    check(rep.bytes == payload, "cluster k=" + std::to_string(k) + " payload");
    check(rep.downloaded_symbols == rep.stripes * k * n,
          "cluster k=" + std::to_string(k) + " downloaded " +
              std::to_string(rep.downloaded_symbols));
  }
  return {check.ok(), check.ok() ? "d*n/(k*alpha) = 3 for" + summary : check.failure()};
}

Outcome Ac4Tradeoff() {
  Check check;
  for (std::size_t k = 3; k <= 8; ++k) {
    const auto rep = metrics_report(PirConfig::make(k, 3));
    const Rational manual =
        rep.cpop * (Rational(1) - Rational(static_cast<std::int64_t>(2 * k - 2)) /
                                      (Rational(static_cast<std::int64_t>(k)) * rep.so));
    check(manual == Rational(1) && rep.tradeoff_product == Rational(1),
          "k=" + std::to_string(k) + " tradeoff " + manual.str());
    check(rep.slack >= Rational(1), "k=" + std::to_string(k) + " slack " + rep.slack.str());
  }
  return {check.ok(), check.ok() ? "tradeoff = 1/1 and slack >= 1 for k = 3..8" : check.failure()};
}

Outcome Ac5Repair() {
  const auto start = Clock::now();
  Check check;
  const Field& f = FieldFor(3);
  const auto p = MsrParams::product_matrix(6, 3);
  const auto enc = build_encoding_matrix(p, f);
  SeededRng rng(55);
  std::size_t cases = 0;
  for (int rec_i = 0; rec_i < 5; ++rec_i) {
    const auto rec = sample_uniform(f, rng, p.B);
    const auto c = encode(message_matrix_from_record(rec, p), enc);
    for (std::size_t failed = 0; failed < p.n; ++failed) {
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < p.n; ++i) {
        if (i != failed) others.push_back(i);
      }
      detail::for_each_subset(others.size(), p.r, [&](std::span<const std::size_t> pick) {
        std::vector<HelperSymbol> helpers;
        for (auto j : pick) {
          const std::size_t h = others[j];
          const auto row = c.row(h);
          helpers.push_back({h, repair_helper_symbol(row, h, failed, enc)});
        }
        check(helpers.size() == 4, "downloaded " + std::to_string(helpers.size()));
        check(repair_regenerate(failed, helpers, enc) == c.row(failed),
              "node " + std::to_string(failed + 1) + " regenerated share");
        ++cases;
        return true;
      });
    }
  }
  check(cases == 5 * 6 * 5, "case count " + std::to_string(cases));
  const Rational ratio(static_cast<std::int64_t>(p.r * p.beta), static_cast<std::int64_t>(p.alpha));
  check(ratio == Rational(2) && metrics_report(PirConfig::make(3, 1)).rr == ratio,
        "repair ratio " + ratio.str());
  const double t = Seconds(start);
  check(t < 5.0, "runtime " + Fmt(t));
  return {check.ok(), check.ok() ? std::to_string(cases) + " repairs exact, 4 symbols each, ratio " +
                                       ratio.str() + " in " + Fmt(t)
                                 : check.failure()};
}

std::vector<NodeShare> Shares(const CodeMatrix& c, std::span<const std::size_t> nodes) {
  std::vector<NodeShare> out;
  for (auto i : nodes) out.push_back({i, c.row(i)});
  return out;
}

Outcome Ac6AnyK() {
  Check check;
  std::size_t total = 0;
  for (std::size_t k : {3u, 4u, 5u}) {
    const auto p = MsrParams::product_matrix(3 * k - 3, k);
    const auto enc = build_encoding_matrix(p, FieldFor(k));
    SeededRng rng(600 + k);
    const auto rec = sample_uniform(enc.field(), rng, p.B);
    const auto mm = message_matrix_from_record(rec, p);
    const auto c = encode(mm, enc);
    auto try_subset = [&](std::span<const std::size_t> nodes) {
      check(recover(Shares(c, nodes), enc).matrix() == mm.matrix(),
            "k=" + std::to_string(k) + " subset recovery");
      ++total;
    };
    if (k == 3) {
      std::size_t count = 0;
      detail::for_each_subset(p.n, k, [&](std::span<const std::size_t> s) {
        try_subset(s);
        ++count;
        return true;
      });
      check(count == 20, "k=3 subset count " + std::to_string(count));
    } else {
      for (int i = 0; i < 50; ++i) try_subset(detail::random_subset(rng, p.n, k));
    }
  }
  return {check.ok(), check.ok() ? std::to_string(total) + " subsets recovered exactly" : check.failure()};
}

Outcome Ac7Oracle() {
  Check check;
  int instances = 0;
  for (std::size_t k : {3u, 4u, 5u}) {
    const auto p = MsrParams::product_matrix(3 * k - 3, k);
    const auto enc = build_encoding_matrix(p, FieldFor(k));
    SeededRng rng(700 + k);
    for (int i = 0; i < 70; ++i) {
      const auto c = encode(message_matrix_from_record(sample_uniform(enc.field(), rng, p.B), p), enc);
      const auto shares = Shares(c, detail::random_subset(rng, p.n, k));
      check(recover(shares, enc).matrix() == recover_oracle(shares, enc).matrix(),
            "k=" + std::to_string(k) + " instance " + std::to_string(i));
      ++instances;
    }
  }
  return {check.ok(), check.ok() ? std::to_string(instances) + " instances agree" : check.failure()};
}

Outcome Ac8Privacy() {
  Check check;
  // (a) coupling identity, recomputed node by node.
  SeededRng rng(8);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t k = 3 + inst % 3;
    const std::size_t m = 2 + inst % 4;
    const auto cfg = PirConfig::make(k, m);
    const Field& f = FieldFor(k);
    const auto patterns = build_patterns(cfg, f);
    const std::size_t f1 = rng.uniform_below(static_cast<std::uint32_t>(m));
    const std::size_t f2 = rng.uniform_below(static_cast<std::uint32_t>(m));
    const std::size_t cols = m * cfg.params.alpha;
    std::vector<std::uint32_t> raw(cfg.d * cols);
    for (auto& x : raw) x = rng.uniform_below(f.modulus());
    const Matrix u(f, cfg.d, cols, std::move(raw));
    const auto q1 = gen_queries(cfg, u, patterns, f1);
    const Matrix e1 = selection_matrix(f, cfg.params.alpha, m, f1);
    const Matrix e2 = selection_matrix(f, cfg.params.alpha, m, f2);
    for (std::size_t i = 0; i < cfg.params.n; ++i) {
      const Matrix shifted = u + patterns[i].v * e1 - patterns[i].v * e2;
      check(gen_queries(cfg, shifted, patterns, f2)[i].q == q1[i].q,
            "coupling instance " + std::to_string(inst) + " node " + std::to_string(i + 1));
    }
    check(privacy_coupling_check(cfg, f1, f2, u), "library coupling check");
  }
  // (b) value frequencies of every entry of node 1's query, f = 1 vs f = 2.
  constexpr int kTrials = 10000;
  const auto cfg = PirConfig::make(3, 2);
  const auto enc = build_encoding_matrix(cfg.params, FieldFor(3));
  const std::size_t entries = cfg.d * cfg.m * cfg.params.alpha;
  std::vector<std::vector<int>> c1(entries, std::vector<int>(13)), c2 = c1;
  for (int s = 0; s < kTrials; ++s) {
    SeededRng r1(1'000'000 + s), r2(2'000'000 + s);
    const auto a = PrivateRetrieval(cfg, enc, 0, r1).queries()[0].q.values();
    const auto b = PrivateRetrieval(cfg, enc, 1, r2).queries()[0].q.values();
    for (std::size_t e = 0; e < entries; ++e) {
      ++c1[e][a[e]];
      ++c2[e][b[e]];
    }
  }
  const double p = 1.0 / 13.0;
  const double sigma = std::sqrt(2.0 * kTrials * p * (1 - p));
  double worst = 0;
  for (std::size_t e = 0; e < entries; ++e) {
    for (int v = 0; v < 13; ++v) {
      const double z = std::abs(c1[e][v] - c2[e][v]) / sigma;
      worst = std::max(worst, z);
      check(z <= 5.0, "entry " + std::to_string(e) + " value " + std::to_string(v) +
                          " differs by " + std::to_string(z) + " sigma");
    }
  }
  std::ostringstream detail;
  detail.precision(2);
  detail << std::fixed << "coupling holds on 100 instances; " << entries
         << " entries x 13 values within " << worst << " sigma";
  return {check.ok(), check.ok() ? detail.str() : check.failure()};
}

std::vector<std::uint16_t> FreePorts(std::size_t count) {
  std::vector<std::unique_ptr<net::Listener>> held;
  std::vector<std::uint16_t> ports;
  for (std::size_t i = 0; i < count; ++i) {
    held.push_back(std::make_unique<net::Listener>(net::Endpoint{"127.0.0.1", 0}));
    ports.push_back(held.back()->port());
  }
  return ports;
}

std::string Quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome Ac9Cluster() {
  const auto start = Clock::now();
  Check check;
  testing::TempDir dir;
  const fs::path conf = dir.path() / "cluster.conf";
  {
    std::ofstream out(conf);
    out << "q = 257\nk = 3\nm = 3\ndata_dir = " << (dir.path() / "data").string() << "\n";
    for (auto port : FreePorts(6)) out << "node = 127.0.0.1:" << port << "\n";
  }
  const fs::path log = dir.path() / "cli.log";
  const std::string base = Quote(PMSR_CLI_PATH) + " --config " + Quote(conf) + " ";
  auto sh = [&](const std::string& args) {
    const std::string cmd = base + args + " >>" + Quote(log) + " 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  std::string payload;
  SeededRng rng(9);
  for (int i = 0; i < 1500; ++i) payload.push_back(static_cast<char>(rng.uniform_below(256)));
  write_file_atomic(dir.path() / "in.bin", payload);

  if (check(sh("cluster up"), "cluster up")) {
    std::size_t daemons = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      daemons += fs::exists(dir.path() / "data" / ("node" + std::to_string(i + 1)) / "pid");
    }
    check(daemons == 6, std::to_string(daemons) + " daemons running");
    check(sh("put 2 " + Quote(dir.path() / "in.bin")), "put 2");
    check(sh("fail 1 --mode wipe"), "fail 1 --mode wipe");
    check(sh("repair 1"), "repair 1");
    check(sh("get --private 2 --seed 4 --out " + Quote(dir.path() / "out.bin")), "get --private 2");
    check(fs::exists(dir.path() / "out.bin") && read_file(dir.path() / "out.bin") == payload,
          "retrieved payload differs");
  }
  check(sh("cluster down"), "cluster down");
  const double t = Seconds(start);
  check(t < 60.0, "runtime " + Fmt(t));
  std::string why = check.failure();
  if (!check.ok() && fs::exists(log)) why += "; log: " + read_file(log);
  return {check.ok(), check.ok() ? "6 daemons, 1500-byte payload round trip after wipe and repair in " + Fmt(t)
                                 : why};
}

}  // namespace
}  // namespace pmsr

int main() {
  using Criterion = std::pair<const char*, std::function<pmsr::Outcome()>>;
  const std::vector<Criterion> criteria = {
      {"AC1 example fidelity", pmsr::Ac1Example1},
      {"AC2 private retrieval correctness", pmsr::Ac2Retrieval},
      {"AC3 cPoP identity", pmsr::Ac3Cpop},
      {"AC4 trade-off optimality", pmsr::Ac4Tradeoff},
      {"AC5 repair exactness and bandwidth", pmsr::Ac5Repair},
      {"AC6 any-k recovery", pmsr::Ac6AnyK},
      {"AC7 decoder oracle equivalence", pmsr::Ac7Oracle},
      {"AC8 privacy properties", pmsr::Ac8Privacy},
      {"AC9 cluster end-to-end", pmsr::Ac9Cluster},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    pmsr::Outcome out{false, ""};
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail << std::endl;
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}
