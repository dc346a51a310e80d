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

// Node daemons run detached (double fork), write their own pid file once
// listening, and exit cleanly on SIGTERM.

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <climits>
#include <fstream>
#include <mutex>
#include <thread>

#include "cli.hpp"
#include "pmsr/node_server.hpp"

namespace pmsr::cli {

namespace {

std::mutex exe_mu;
fs::path node_exe;

fs::path self_exe() {
  char buf[PATH_MAX];
  const ssize_t len = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (len <= 0) throw Error(ErrorCode::kIo, "cannot locate own executable");
  return fs::path(std::string(buf, static_cast<std::size_t>(len)));
}

std::optional<pid_t> read_pid(const fs::path& p) {
  std::ifstream in(p);
  long pid = 0;
  if (!(in >> pid) || pid <= 0) return std::nullopt;
  return static_cast<pid_t>(pid);
}

// An exited daemon stays a zombie until init reaps it, which some container
// inits do late; count that as dead.
bool alive(pid_t pid) {
  if (::kill(pid, 0) != 0) return false;
  std::ifstream stat("/proc/" + std::to_string(pid) + "/stat");
  std::string line;
  if (!std::getline(stat, line)) return true;
  const auto close = line.rfind(')');
  return close == std::string::npos || close + 2 >= line.size() || line[close + 2] != 'Z';
}

}  // namespace

int serve_node(const fs::path& root, const std::string& addr, const fs::path& pid_file,
               std::ostream& err) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGTERM);
  sigaddset(&set, SIGINT);
  // Block before any thread starts so only sigwait sees them.
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  try {
    ShareStore store = ShareStore::open(root);
    NodeServer server(store, net::Endpoint::parse(addr));
    server.start();
    if (!pid_file.empty()) write_file_atomic(pid_file, std::to_string(::getpid()) + "\n");
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
    if (!pid_file.empty()) fs::remove(pid_file);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

namespace local {

void set_node_executable(const fs::path& exe) {
  std::lock_guard lock(exe_mu);
  node_exe = exe;
}

fs::path pid_file(const ClusterConfig& cfg, std::size_t node) {
  return cfg.node_root(node) / "pid";
}

bool running(const ClusterConfig& cfg, std::size_t node) {
  const auto pid = read_pid(pid_file(cfg, node));
  return pid && alive(*pid);
}

void spawn(const ClusterConfig& cfg, std::size_t node) {
  fs::path exe;
  {
    std::lock_guard lock(exe_mu);
    exe = node_exe.empty() ? self_exe() : node_exe;
  }
  const fs::path root = cfg.node_root(node);
  const std::string root_s = root.string();
  const std::string addr = cfg.nodes[node].str();
  const std::string pid_s = pid_file(cfg, node).string();
  const std::string log_s = (root / "node.log").string();
  const std::string exe_s = exe.string();
  fs::remove(pid_file(cfg, node));

  const pid_t child = ::fork();
  if (child < 0) throw Error(ErrorCode::kIo, "fork failed");
  if (child == 0) {
    ::setsid();
    if (::fork() != 0) ::_exit(0);
    const int devnull = ::open("/dev/null", O_RDONLY);
    const int log = ::open(log_s.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (devnull >= 0) ::dup2(devnull, 0);
    if (log >= 0) {
      ::dup2(log, 1);
      ::dup2(log, 2);
    }
    const char* argv[] = {exe_s.c_str(), "node", "--root", root_s.c_str(), "--addr", addr.c_str(),
                          "--pid-file", pid_s.c_str(), nullptr};
    ::execv(exe_s.c_str(), const_cast<char* const*>(argv));
    ::_exit(127);
  }
  int status = 0;
  ::waitpid(child, &status, 0);
}

bool stop(const ClusterConfig& cfg, std::size_t node) {
  const fs::path pf = pid_file(cfg, node);
  const auto pid = read_pid(pf);
  if (!pid || !alive(*pid)) {
    fs::remove(pf);
    return false;
  }
  ::kill(*pid, SIGTERM);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (alive(*pid) && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  if (alive(*pid)) ::kill(*pid, SIGKILL);
  fs::remove(pf);
  return true;
}

void wait_healthy(const ClusterConfig& cfg, std::size_t node, net::Millis timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    try {
      net::Client client(cfg.nodes[node], net::Millis(500), 0);
      wire::expect(client.call(wire::make_empty(wire::Kind::kHealth)), wire::Kind::kOk);
      if (fs::exists(pid_file(cfg, node))) return;
    } catch (const Error&) {
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      throw Error(ErrorCode::kTransport, "node " + std::to_string(node + 1) + " did not come up on " +
                                             cfg.nodes[node].str() + " (see " +
                                             (cfg.node_root(node) / "node.log").string() + ")");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

}  // namespace local
}  // namespace pmsr::cli
