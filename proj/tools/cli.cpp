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

#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <random>

#include "CLI11.hpp"
#include "pmsr/coordinator.hpp"
#include "pmsr/pir.hpp"

namespace pmsr::cli {

namespace {

constexpr net::Millis kStartupTimeout{10000};

struct Options {
  std::string config;
  std::string action;  // cluster up|down, demo name
  std::uint32_t record = 0;
  std::string file;
  std::uint32_t private_record = 0;
  std::optional<std::uint64_t> seed;
  std::string out_file;
  std::size_t node = 0;
  std::string mode;
  bool verify = false;
  std::optional<std::uint32_t> k;
  std::uint32_t m = 1;
  std::string root;
  std::string addr;
  std::string pid_file;
};

ClusterConfig load_config(const Options& o) {
  std::string path = o.config;
  if (path.empty()) {
    if (const char* env = std::getenv("PMSR_CONFIG")) path = env;
  }
  if (path.empty()) {
    throw CLI::ValidationError("--config", "no cluster config: pass --config FILE or set PMSR_CONFIG");
  }
  return ClusterConfig::load(path);
}

std::size_t node_index(const ClusterConfig& cfg, std::size_t node) {
  if (node < 1 || node > cfg.n()) {
    throw Error(ErrorCode::kOutOfRange,
                "unknown node " + std::to_string(node) + " (nodes are 1.." + std::to_string(cfg.n()) + ")");
  }
  return node - 1;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  const std::string s = read_file(path);
  return {s.begin(), s.end()};
}

int cmd_cluster(const Options& o, std::ostream& out, std::ostream& err) {
  const ClusterConfig cfg = load_config(o);
  if (o.action == "down") {
    std::size_t stopped = 0;
    for (std::size_t i = 0; i < cfg.n(); ++i) stopped += local::stop(cfg, i);
    if (stopped == 0) err << "warning: cluster already down\n";
    out << "cluster down: stopped " << stopped << " node(s)\n";
    return kExitOk;
  }
  std::size_t started = 0;
  for (std::size_t i = 0; i < cfg.n(); ++i) {
    ShareStore::create(cfg.node_root(i), cfg.manifest_for(i));
    if (local::running(cfg, i)) continue;
    local::spawn(cfg, i);
    ++started;
  }
  for (std::size_t i = 0; i < cfg.n(); ++i) local::wait_healthy(cfg, i, kStartupTimeout);
  // Retrieval always queries all m records, so each needs at least an empty version.
  Coordinator coord(cfg);
  const Catalog cat = coord.catalog();
  std::size_t initialized = 0;
  for (std::uint32_t j = 1; j <= cfg.m; ++j) {
    if (!cat.find(j)) {
      coord.put(j, {});
      ++initialized;
    }
  }
  if (started == 0) err << "warning: cluster already up; nothing to do\n";
  out << "cluster up: " << cfg.n() << " nodes (" << started << " started), " << cfg.m
      << " records (" << initialized << " initialized empty)\n";
  return kExitOk;
}

int cmd_put(const Options& o, std::ostream& out) {
  Coordinator coord(load_config(o));
  const auto payload = read_bytes(o.file);
  const auto rep = coord.put(o.record, payload);
  out << "stored record " << o.record << ": " << payload.size() << " bytes, " << rep.symbols
      << " symbols in " << rep.stripes << " stripe(s)\n";
  return kExitOk;
}

int cmd_get(const Options& o, std::ostream& out) {
  Coordinator coord(load_config(o));
  const std::uint64_t seed = o.seed ? *o.seed : (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();
  const auto rep = coord.private_get(o.private_record, seed);
  std::ofstream f(o.out_file, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(rep.bytes.data()), static_cast<std::streamsize>(rep.bytes.size()));
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + o.out_file);
  out << "retrieved record " << o.private_record << ": " << rep.bytes.size() << " bytes, "
      << rep.stripes << " stripe(s), downloaded " << rep.downloaded_symbols << " symbols, cPoP = "
      << Rational(static_cast<std::int64_t>(rep.downloaded_symbols),
                  static_cast<std::int64_t>(rep.retrieved_symbols))
      << "\n";
  return kExitOk;
}

int cmd_fail(const Options& o, std::ostream& out, std::ostream& err) {
  const ClusterConfig cfg = load_config(o);
  const std::size_t i = node_index(cfg, o.node);
  if (o.mode == "kill") {
    if (!local::stop(cfg, i)) err << "warning: node " << o.node << " was not running\n";
    out << "node " << o.node << " killed\n";
  } else {
    ShareStore::open(cfg.node_root(i)).wipe();
    out << "node " << o.node << " wiped (daemon still running)\n";
  }
  return kExitOk;
}

int cmd_repair(const Options& o, std::ostream& out) {
  const ClusterConfig cfg = load_config(o);
  const std::size_t i = node_index(cfg, o.node);
  Coordinator coord(cfg);
  if (!coord.healthy(i)) {
    // A dead node's disk is presumed lost: start a blank replacement.
    local::stop(cfg, i);
    ShareStore::create(cfg.node_root(i), cfg.manifest_for(i)).wipe();
    local::spawn(cfg, i);
    local::wait_healthy(cfg, i, kStartupTimeout);
    out << "node " << o.node << " restarted empty\n";
  }
  const auto rep = coord.repair(i, o.verify);
  out << "repaired node " << o.node << " from helpers";
  for (auto h : rep.helpers) out << ' ' << h + 1;
  out << ": " << rep.instances << " record stripe(s), downloaded " << rep.downloaded_symbols
      << " symbols, restored " << rep.restored_symbols << " symbols, repair ratio "
      << (rep.restored_symbols
              ? Rational(static_cast<std::int64_t>(rep.downloaded_symbols),
                         static_cast<std::int64_t>(rep.restored_symbols)).str()
              : std::string("n/a"))
      << "\n";
  if (o.verify) {
    out << (rep.verified ? "verified against a fresh re-encode\n" : "VERIFY FAILED\n");
    return rep.verified ? kExitOk : kExitError;
  }
  return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  const PirConfig cfg = o.k ? PirConfig::make(*o.k, o.m) : load_config(o).pir();
  const auto rep = metrics_report(cfg);
  out << "SO=" << rep.so << "\n"
      << "cPoP=" << rep.cpop << "\n"
      << "RR=" << rep.rr << "\n"
      << "tradeoff=" << rep.tradeoff_product << "\n"
      << "slack=" << rep.slack << "\n";
  return rep.satisfies_bounds() ? kExitOk : kExitError;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const ClusterConfig cfg = load_config(o);
  const auto pir = cfg.pir();
  const auto enc = cfg.encoding();
  const auto rep = verify_scheme(pir, enc, build_patterns(pir, enc.field()));
  const auto& p = pir.params;
  out << "interference: " << (rep.interference_ok ? "ok" : "FAIL") << "\n"
      << "tiling: " << (rep.tiling_ok ? "ok" : "FAIL") << "\n"
      << "counting: " << (rep.counting_ok ? "ok" : "FAIL") << " (k*alpha = " << p.k * p.alpha
      << ", (n-r)*d = " << (p.n - p.r) * pir.d << ")\n";
  for (const auto& f : rep.failures) out << "  " << f << "\n";
  return rep.passed() ? kExitOk : kExitError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Private retrieval over a product-matrix MSR coded store", "pmsr"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "cluster config file (default: $PMSR_CONFIG)");

  auto* cluster = app.add_subcommand("cluster", "start or stop the local node daemons");
  cluster->add_option("action", o.action, "up | down")->required()->check(CLI::IsMember({"up", "down"}));

  auto* put = app.add_subcommand("put", "store a record");
  put->add_option("record", o.record, "record id, 1..m")->required();
  put->add_option("file", o.file, "payload file")->required()->check(CLI::ExistingFile);

  auto* get = app.add_subcommand("get", "retrieve a record privately");
  get->add_option("--private", o.private_record, "record id to fetch, 1..m")->required();
  get->add_option("--seed", o.seed, "seed for the query masks (default: random)");
  get->add_option("--out", o.out_file, "output file")->required();

  auto* fail = app.add_subcommand("fail", "inject a node failure");
  fail->add_option("node", o.node, "node, 1..n")->required();
  fail->add_option("--mode", o.mode, "kill | wipe")->required()->check(CLI::IsMember({"kill", "wipe"}));

  auto* repair = app.add_subcommand("repair", "regenerate a node's shares from r helpers");
  repair->add_option("node", o.node, "node, 1..n")->required();
  repair->add_flag("--verify", o.verify, "compare against a fresh re-encode");

  auto* metrics = app.add_subcommand("metrics", "print SO, cPoP, RR and the trade-off values");
  metrics->add_option("--k", o.k, "use k instead of the config file");
  metrics->add_option("--m", o.m, "record count with --k")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "check the decodability conditions of the scheme");

  auto* demo = app.add_subcommand("demo", "run a worked example");
  demo->add_option("name", o.action, "example1")->required()->check(CLI::IsMember({"example1"}));
  demo->add_option("--seed", o.seed, "seed for the sample database and masks");

  auto* node = app.add_subcommand("node", "run one storage node daemon");
  node->add_option("--root", o.root, "store root (default: $PMSR_ROOT)");
  node->add_option("--addr", o.addr, "listen address host:port (default: $PMSR_ADDR)");
  node->add_option("--pid-file", o.pid_file, "write the daemon pid here once listening");

  std::vector<std::string> argv_store{"pmsr"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cluster) return cmd_cluster(o, out, err);
    if (*put) return cmd_put(o, out);
    if (*get) return cmd_get(o, out);
    if (*fail) return cmd_fail(o, out, err);
    if (*repair) return cmd_repair(o, out);
    if (*metrics) return cmd_metrics(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*demo) return demo_example1(o.seed.value_or(1), out);
    if (*node) {
      if (o.root.empty()) {
        if (const char* env = std::getenv("PMSR_ROOT")) o.root = env;
      }
      if (o.addr.empty()) {
        if (const char* env = std::getenv("PMSR_ADDR")) o.addr = env;
      }
      if (o.root.empty() || o.addr.empty()) {
        err << "error: node needs --root and --addr (or PMSR_ROOT and PMSR_ADDR)\n";
        return kExitUsage;
      }
      return serve_node(o.root, o.addr, o.pid_file, err);
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace pmsr::cli
