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

// In-process cluster on loopback for tests: n share stores under a temp
// directory, each served by a NodeServer on an ephemeral port.

#ifndef PMSR_TESTS_TEST_CLUSTER_HPP_
#define PMSR_TESTS_TEST_CLUSTER_HPP_

#include <stdlib.h>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "pmsr/cluster_config.hpp"
#include "pmsr/node_server.hpp"
#include "pmsr/share_store.hpp"

namespace pmsr::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "pmsr-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw Error(ErrorCode::kIo, "mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

class LocalCluster {
 public:
  LocalCluster(std::uint32_t q, std::uint32_t k, std::uint32_t m) {
    cfg_.q = q;
    cfg_.k = k;
    cfg_.m = m;
    cfg_.data_dir = dir_.path();
    cfg_.timeout = net::Millis(2000);
    const std::size_t n = cfg_.n();
    stores_.resize(n);
    servers_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      stores_[i] = std::make_unique<ShareStore>(ShareStore::create(cfg_.node_root(i), cfg_.manifest_for(i)));
      servers_[i] = std::make_unique<NodeServer>(*stores_[i], net::Endpoint{"127.0.0.1", 0});
      servers_[i]->start();
      cfg_.nodes.push_back({"127.0.0.1", servers_[i]->port()});
    }
    cfg_.validate();
  }

  const ClusterConfig& config() const noexcept { return cfg_; }
  ShareStore& store(std::size_t i) { return *stores_[i]; }

  void kill(std::size_t i) { servers_[i].reset(); }

  void restart(std::size_t i) {
    servers_[i].reset();
    servers_[i] = std::make_unique<NodeServer>(*stores_[i], cfg_.nodes[i]);
    servers_[i]->start();
  }

 private:
  TempDir dir_;
  ClusterConfig cfg_;
  std::vector<std::unique_ptr<ShareStore>> stores_;
  std::vector<std::unique_ptr<NodeServer>> servers_;
};

}  // namespace pmsr::testing

#endif  // PMSR_TESTS_TEST_CLUSTER_HPP_
