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

#ifndef PMSR_TOOLS_CLI_HPP_
#define PMSR_TOOLS_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pmsr/cluster_config.hpp"

namespace pmsr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// The worked q = 13, k = 3, m = 3 example, checked step by step.
int demo_example1(std::uint64_t seed, std::ostream& out);

// Daemon entry point; returns when SIGTERM or SIGINT arrives.
int serve_node(const std::filesystem::path& root, const std::string& addr,
               const std::filesystem::path& pid_file, std::ostream& err);

// Local process management for `cluster up|down`, `fail` and `repair`.
namespace local {

// Binary started for each node daemon. Defaults to this executable.
void set_node_executable(const std::filesystem::path& exe);

std::filesystem::path pid_file(const ClusterConfig& cfg, std::size_t node);
bool running(const ClusterConfig& cfg, std::size_t node);
void spawn(const ClusterConfig& cfg, std::size_t node);
// Returns false if the node was not running.
bool stop(const ClusterConfig& cfg, std::size_t node);
void wait_healthy(const ClusterConfig& cfg, std::size_t node, net::Millis timeout);

}  // namespace local

}  // namespace pmsr::cli

#endif  // PMSR_TOOLS_CLI_HPP_
