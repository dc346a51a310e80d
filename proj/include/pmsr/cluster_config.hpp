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

// Cluster description shared by the coordinator and the CLI, read from a
// "key = value" text file:
//
//   q = 257
//   k = 3
//   m = 3
//   symbol_width = 2          # optional
//   points = 1,2,3,4,5,6      # optional
//   data_dir = /var/pmsr      # optional, default <config dir>/pmsr-data
//   timeout_ms = 5000         # optional
//   node = 127.0.0.1:7001     # n lines, node 1 first

#ifndef PMSR_CLUSTER_CONFIG_HPP_
#define PMSR_CLUSTER_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmsr/msr.hpp"
#include "pmsr/net.hpp"
#include "pmsr/pir.hpp"
#include "pmsr/share_store.hpp"

namespace pmsr {

struct ClusterConfig {
  std::uint32_t q = 257;
  std::uint32_t k = 3;
  std::uint32_t m = 1;
  std::uint32_t symbol_width = 0;  // 0: derived from q
  std::vector<std::uint32_t> points;
  std::vector<net::Endpoint> nodes;
  fs::path data_dir;
  net::Millis timeout = net::kDefaultTimeout;

  std::size_t n() const { return 3 * std::size_t{k} - 3; }
  std::size_t width() const { return symbol_width ? symbol_width : (q <= 65536 ? 2 : 4); }
  MsrParams params() const { return MsrParams::product_matrix(n(), k); }
  PirConfig pir() const { return PirConfig::make(k, m); }
  Field field() const { return Field(q); }
  wire::ClusterTag tag() const {
    return {q, static_cast<std::uint32_t>(n()), k};
  }

  EncodingMatrix encoding() const {
    return build_encoding_matrix(
        params(), field(),
        points.empty() ? std::nullopt : std::optional<std::vector<std::uint32_t>>(points));
  }

  fs::path node_root(std::size_t node) const {
    return data_dir / ("node" + std::to_string(node + 1));
  }
  fs::path catalog_path() const { return data_dir / "catalog"; }

  Manifest manifest_for(std::size_t node) const {
    Manifest mf;
    mf.q = q;
    mf.n = static_cast<std::uint32_t>(n());
    mf.k = k;
    mf.node_id = static_cast<std::uint32_t>(node);
    mf.symbol_width = static_cast<std::uint32_t>(width());
    mf.points = points;
    return mf;
  }

  // Full check, including the encoding-matrix conditions.
  void validate() const {
    (void)Field(q);
    (void)pir();
    (void)encoding();
    if (nodes.size() != n()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config: expected n = " + std::to_string(n()) + " node addresses, got " +
                      std::to_string(nodes.size()));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (nodes[i] == nodes[j]) {
          throw Error(ErrorCode::kInvalidArgument, "config: duplicate node address " + nodes[i].str());
        }
      }
    }
    manifest_for(0).validate();
  }

  static ClusterConfig parse(const std::string& text, const fs::path& base_dir = ".") {
    ClusterConfig c;
    for (const auto& [key, value] : parse_key_values(text)) {
      if (key == "q") c.q = parse_u32(key, value);
      else if (key == "k") c.k = parse_u32(key, value);
      else if (key == "m") c.m = parse_u32(key, value);
      else if (key == "symbol_width") c.symbol_width = parse_u32(key, value);
      else if (key == "points") c.points = parse_u32_list(key, value);
      else if (key == "data_dir") c.data_dir = value;
      else if (key == "timeout_ms") c.timeout = net::Millis(parse_u32(key, value));
      else if (key == "node") c.nodes.push_back(net::Endpoint::parse(value));
      else throw Error(ErrorCode::kInvalidArgument, "config: unknown key '" + key + "'");
    }
    if (c.data_dir.empty()) c.data_dir = base_dir / "pmsr-data";
    else if (c.data_dir.is_relative()) c.data_dir = base_dir / c.data_dir;
    c.validate();
    return c;
  }

  static ClusterConfig load(const fs::path& path) {
    return parse(read_file(path), fs::absolute(path).parent_path());
  }
};

}  // namespace pmsr

#endif  // PMSR_CLUSTER_CONFIG_HPP_
