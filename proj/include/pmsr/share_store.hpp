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

// On-disk share storage of one node.
//
//   <root>/manifest                      key = value lines
//   <root>/shares/r<record>_s<stripe>.pmsr
//
// A share file is "PMSR", a version byte, then q, n, k, node, record and
// stripe as 4-byte big-endian integers, then alpha little-endian symbols of
// the manifest's symbol width. Files are replaced atomically by renaming a
// temporary file, so readers never see a partial share.

#ifndef PMSR_SHARE_STORE_HPP_
#define PMSR_SHARE_STORE_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pmsr/error.hpp"
#include "pmsr/wire.hpp"

namespace pmsr {

namespace fs = std::filesystem;

inline constexpr char kShareMagic[4] = {'P', 'M', 'S', 'R'};
inline constexpr std::uint8_t kShareVersion = 1;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Parses "key = value" lines; '#' starts a comment. Repeated keys keep
// every value in order.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(lineno) + ": expected key = value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

inline std::uint32_t parse_u32(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size() || v > 0xffffffffull) throw std::out_of_range(value);
    return static_cast<std::uint32_t>(v);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "bad value for " + key + ": '" + value + "'");
  }
}

inline std::vector<std::uint32_t> parse_u32_list(const std::string& key, const std::string& value) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_u32(key, trim(item)));
  return out;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes via a temporary sibling and rename, so the target is either the
// old or the new content.
inline void write_file_atomic(const fs::path& p, const std::string& data) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

struct Manifest {
  std::uint32_t q = 0;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t node_id = 0;  // 0-based
  std::uint32_t symbol_width = 2;
  std::vector<std::uint32_t> points;

  std::uint32_t alpha() const { return k - 1; }
  wire::ClusterTag tag() const { return {q, n, k}; }

  void validate() const {
    if (k < 2 || n <= 2 * k - 2) throw Error(ErrorCode::kInvalidArgument, "manifest: bad n, k");
    if (node_id >= n) throw Error(ErrorCode::kInvalidArgument, "manifest: node_id out of range");
    wire::check_symbol_width(symbol_width);
    if (symbol_width < 4 && (q - 1) >> (8 * symbol_width) != 0) {
      throw Error(ErrorCode::kInvalidArgument, "manifest: symbol width too small for q");
    }
    if (!points.empty() && points.size() != n) {
      throw Error(ErrorCode::kInvalidArgument, "manifest: need n points");
    }
  }

  std::string str() const {
    std::ostringstream out;
    out << "q = " << q << "\nn = " << n << "\nk = " << k << "\nnode_id = " << node_id
        << "\nsymbol_width = " << symbol_width << "\n";
    if (!points.empty()) {
      out << "points = ";
      for (std::size_t i = 0; i < points.size(); ++i) out << (i ? "," : "") << points[i];
      out << "\n";
    }
    return out.str();
  }

  static Manifest parse(const std::string& text) {
    Manifest m;
    bool seen_q = false, seen_n = false, seen_k = false, seen_id = false;
    for (const auto& [key, value] : parse_key_values(text)) {
      if (key == "q") { m.q = parse_u32(key, value); seen_q = true; }
      else if (key == "n") { m.n = parse_u32(key, value); seen_n = true; }
      else if (key == "k") { m.k = parse_u32(key, value); seen_k = true; }
      else if (key == "node_id") { m.node_id = parse_u32(key, value); seen_id = true; }
      else if (key == "symbol_width") m.symbol_width = parse_u32(key, value);
      else if (key == "points") m.points = parse_u32_list(key, value);
      else throw Error(ErrorCode::kInvalidArgument, "manifest: unknown key " + key);
    }
    if (!(seen_q && seen_n && seen_k && seen_id)) {
      throw Error(ErrorCode::kInvalidArgument, "manifest: q, n, k and node_id are required");
    }
    m.validate();
    return m;
  }

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

class ShareStore {
 public:
  // Creates the layout, or checks an existing manifest matches.
  static ShareStore create(const fs::path& root, const Manifest& manifest) {
    manifest.validate();
    fs::create_directories(root / "shares");
    const fs::path mpath = root / "manifest";
    if (fs::exists(mpath)) {
      const Manifest existing = Manifest::parse(read_file(mpath));
      if (!(existing == manifest)) {
        throw Error(ErrorCode::kConfigMismatch,
                    "config mismatch: " + mpath.string() + " describes another cluster");
      }
    } else {
      write_file_atomic(mpath, manifest.str());
    }
    return ShareStore(root, manifest);
  }

  static ShareStore open(const fs::path& root) {
    const Manifest m = Manifest::parse(read_file(root / "manifest"));
    fs::create_directories(root / "shares");
    return ShareStore(root, m);
  }

  ShareStore(ShareStore&& o) noexcept : root_(std::move(o.root_)), manifest_(o.manifest_) {}

  const Manifest& manifest() const noexcept { return manifest_; }
  const fs::path& root() const noexcept { return root_; }

  fs::path share_path(std::uint32_t record, std::uint32_t stripe) const {
    return root_ / "shares" /
           ("r" + std::to_string(record) + "_s" + std::to_string(stripe) + ".pmsr");
  }

  void put(std::uint32_t record, std::uint32_t stripe, std::span<const std::uint32_t> row) {
    if (row.size() != manifest_.alpha()) {
      throw Error(ErrorCode::kWrongLength, "share row must hold alpha symbols");
    }
    for (auto v : row) {
      if (v >= manifest_.q) throw Error(ErrorCode::kOutOfRange, "symbol not in the field");
    }
    std::string data(kShareMagic, 4);
    data.push_back(static_cast<char>(kShareVersion));
    wire::Writer w(manifest_.symbol_width);
    w.u32(manifest_.q).u32(manifest_.n).u32(manifest_.k).u32(manifest_.node_id).u32(record).u32(stripe);
    for (auto v : row) w.symbol(v);
    const auto body = std::move(w).finish(wire::Kind::kShare).body;
    data.append(body.begin(), body.end());
    std::lock_guard lock(mu_);
    write_file_atomic(share_path(record, stripe), data);
  }

  std::optional<std::vector<std::uint32_t>> get(std::uint32_t record, std::uint32_t stripe) const {
    const fs::path p = share_path(record, stripe);
    std::string data;
    {
      std::lock_guard lock(mu_);
      if (!fs::exists(p)) return std::nullopt;
      data = read_file(p);
    }
    auto corrupt = [&](const std::string& why) -> Error {
      return Error(ErrorCode::kIo, "corrupt share file " + p.string() + ": " + why);
    };
    const std::size_t expect = 5 + 6 * 4 + manifest_.alpha() * manifest_.symbol_width;
    if (data.size() != expect) throw corrupt("wrong length");
    if (data.compare(0, 4, std::string(kShareMagic, 4)) != 0) throw corrupt("bad magic");
    if (static_cast<std::uint8_t>(data[4]) != kShareVersion) throw corrupt("unknown version");
    const std::vector<std::uint8_t> rest(data.begin() + 5, data.end());
    wire::Reader r(rest, manifest_.symbol_width);
    const std::uint32_t hdr[6] = {r.u32(), r.u32(), r.u32(), r.u32(), r.u32(), r.u32()};
    if (hdr[0] != manifest_.q || hdr[1] != manifest_.n || hdr[2] != manifest_.k ||
        hdr[3] != manifest_.node_id || hdr[4] != record || hdr[5] != stripe) {
      throw corrupt("header does not match manifest");
    }
    std::vector<std::uint32_t> row(manifest_.alpha());
    for (auto& v : row) {
      v = r.symbol();
      if (v >= manifest_.q) throw corrupt("symbol not in the field");
    }
    return row;
  }

  // Stripe 0 always exists for a stored record (even an empty one).
  bool has_record(std::uint32_t record) const {
    std::lock_guard lock(mu_);
    return fs::exists(share_path(record, 0));
  }

  // (record, stripe) pairs present, sorted.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> list() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    std::lock_guard lock(mu_);
    for (const auto& e : fs::directory_iterator(root_ / "shares")) {
      unsigned rec = 0, str = 0;
      char tail[8] = {};
      const std::string name = e.path().filename().string();
      if (std::sscanf(name.c_str(), "r%u_s%u.%7s", &rec, &str, tail) == 3 &&
          std::string(tail) == "pmsr") {
        out.emplace_back(rec, str);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void remove(std::uint32_t record, std::uint32_t from_stripe = 0) {
    for (const auto& [rec, stripe] : list()) {
      if (rec == record && stripe >= from_stripe) {
        std::lock_guard lock(mu_);
        fs::remove(share_path(rec, stripe));
      }
    }
  }

  void wipe() {
    std::lock_guard lock(mu_);
    for (const auto& e : fs::directory_iterator(root_ / "shares")) fs::remove(e.path());
  }

 private:
  ShareStore(fs::path root, Manifest m) : root_(std::move(root)), manifest_(std::move(m)) {}

  fs::path root_;
  Manifest manifest_;
  mutable std::mutex mu_;
};

}  // namespace pmsr

#endif  // PMSR_SHARE_STORE_HPP_
