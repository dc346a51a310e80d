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

// Private retrieval over an n = 3k-3 node product-matrix MSR store.
//
// Node i stores the concatenation of its shares of all m records (m*alpha
// symbols). To fetch record f the client draws a uniform d x m*alpha matrix
// U (d = k) and sends node i the query Q^i = U + V^i E^f, where E^f selects
// record f's block and V^i is a binary d x alpha pattern. Node i answers
// Q^i * C_i^T.
//
// In subquery t exactly r = 2k-2 nodes have a zero pattern row, so their
// answers are pure interference Psi_i * I^t. Solving for I^t and subtracting
// it from the other k-1 answers exposes one symbol of record f on each of
// them. Over the k subqueries every symbol of record f held by nodes
// 0..k-1 is exposed once, which is enough for any-k recovery.
//
// Indices (nodes, records, subqueries, positions) are 0-based here.

#ifndef PMSR_PIR_HPP_
#define PMSR_PIR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmsr/error.hpp"
#include "pmsr/field.hpp"
#include "pmsr/matrix.hpp"
#include "pmsr/msr.hpp"
#include "pmsr/rational.hpp"

namespace pmsr {

struct PirConfig {
  MsrParams params;
  std::size_t m = 1;  // record count
  std::size_t d = 0;  // subqueries per node

  static PirConfig make(std::size_t k, std::size_t m) {
    PirConfig cfg;
    cfg.params = MsrParams::product_matrix(3 * k - 3, k);
    cfg.m = m;
    cfg.d = k;
    cfg.validate();
    return cfg;
  }

  void validate() const {
    params.validate();
    if (params.n != 3 * params.k - 3) {
      throw Error(ErrorCode::kInvalidArgument, "retrieval requires n = 3k-3");
    }
    if (d != params.k) {
      throw Error(ErrorCode::kInvalidArgument, "retrieval requires d = k");
    }
    if (m == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one record");
  }
};

// d x alpha binary matrix of one node.
struct PatternMatrix {
  Matrix v;
};

// d x (m * alpha) query for one node.
struct QueryMatrix {
  Matrix q;
};

struct Answer {
  std::vector<FieldElement> a;  // length d
};

struct RetrievedSymbol {
  std::size_t node = 0;
  std::size_t position = 0;
  FieldElement value;
};

// Row t of V^i (i < k) is the unit vector e_s with s = (t - i) mod k, or zero
// when s = k-1. This is V^0 = [I; 0] shifted down cyclically i times. Nodes
// i >= k get all-zero patterns.
inline std::vector<PatternMatrix> build_patterns(const PirConfig& cfg,
                                                 const Field& field) {
  cfg.validate();
  const std::size_t k = cfg.params.k;
  const std::size_t a = cfg.params.alpha;
  std::vector<PatternMatrix> out;
  out.reserve(cfg.params.n);
  for (std::size_t i = 0; i < cfg.params.n; ++i) {
    out.push_back({Matrix(field, cfg.d, a, [&](std::size_t t, std::size_t s) {
      if (i >= k) return 0u;
      return ((t + k - i) % k) == s ? 1u : 0u;
    })});
  }
  return out;
}

// alpha x (m * alpha) selector [0 | I | 0] for record f.
inline Matrix selection_matrix(const Field& field, std::size_t alpha,
                               std::size_t m, std::size_t f) {
  if (f >= m) {
    throw Error(ErrorCode::kOutOfRange, "record index " + std::to_string(f) +
                                            " out of range for m = " +
                                            std::to_string(m));
  }
  return Matrix(field, alpha, m * alpha, [&](std::size_t i, std::size_t j) {
    return j == f * alpha + i ? 1u : 0u;
  });
}

inline std::vector<QueryMatrix> gen_queries(
    const PirConfig& cfg, const Matrix& u,
    std::span<const PatternMatrix> patterns, std::size_t f) {
  const std::size_t a = cfg.params.alpha;
  if (f >= cfg.m) {
    throw Error(ErrorCode::kOutOfRange,
                "record index " + std::to_string(f) + " out of range");
  }
  if (u.rows() != cfg.d || u.cols() != cfg.m * a) {
    throw Error(ErrorCode::kDimensionMismatch,
                "U must be d x m*alpha = " + std::to_string(cfg.d) + "x" +
                    std::to_string(cfg.m * a));
  }
  if (patterns.size() != cfg.params.n) {
    throw Error(ErrorCode::kDimensionMismatch, "need one pattern per node");
  }
  const Matrix e_f = selection_matrix(u.field(), a, cfg.m, f);
  std::vector<QueryMatrix> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) {
    if (p.v.rows() != cfg.d || p.v.cols() != a) {
      throw Error(ErrorCode::kDimensionMismatch, "pattern must be d x alpha");
    }
    out.push_back({u + p.v * e_f});
  }
  return out;
}

inline Answer node_answer(const QueryMatrix& query,
                          std::span<const FieldElement> stored_row) {
  const Matrix& q = query.q;
  if (stored_row.size() != q.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "stored row has " + std::to_string(stored_row.size()) +
                    " symbols, query expects " + std::to_string(q.cols()));
  }
  const Field& field = q.field();
  const std::uint64_t mod = field.modulus();
  Answer ans;
  ans.a.reserve(q.rows());
  for (std::size_t t = 0; t < q.rows(); ++t) {
    std::uint64_t acc = 0;
    const auto row = q.row_span(t);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (stored_row[j].modulus() != field.modulus()) {
        throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
      }
      acc = (acc + std::uint64_t{row[j]} * stored_row[j].value()) % mod;
    }
    ans.a.push_back(field.element(acc));
  }
  return ans;
}

// Nodes whose pattern row t is all zero.
inline std::vector<std::size_t> interference_nodes(
    std::span<const PatternMatrix> patterns, std::size_t t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    bool zero = true;
    for (auto v : patterns[i].v.row_span(t)) zero = zero && v == 0;
    if (zero) out.push_back(i);
  }
  return out;
}

// Cancels the interference of subquery t and returns the exposed symbols of
// the desired record, one per node with a nonzero pattern row.
inline std::vector<RetrievedSymbol> decode_subquery(
    std::size_t t, std::span<const FieldElement> answers_column,
    const EncodingMatrix& enc, const PirConfig& cfg,
    std::span<const PatternMatrix> patterns) {
  const auto& p = cfg.params;
  if (answers_column.size() != p.n || patterns.size() != p.n) {
    throw Error(ErrorCode::kIncompleteResponses, "incomplete responses");
  }
  if (t >= cfg.d) throw Error(ErrorCode::kOutOfRange, "subquery out of range");
  const Field& field = enc.field();
  const std::vector<std::size_t> zero_rows = interference_nodes(patterns, t);
  if (zero_rows.size() != p.r) {
    throw Error(ErrorCode::kInvalidArgument,
                "subquery " + std::to_string(t) + " has " +
                    std::to_string(zero_rows.size()) +
                    " interference-only answers, need r = " + std::to_string(p.r));
  }
  std::vector<std::uint32_t> rhs;
  for (auto i : zero_rows) rhs.push_back(answers_column[i].value());
  const Matrix interference = detail::solve_or_invalid(
      submatrix_rows(enc.psi(), zero_rows), Matrix(field, p.r, 1, rhs));

  std::vector<RetrievedSymbol> out;
  for (std::size_t i = 0; i < p.n; ++i) {
    std::optional<std::size_t> position;
    const auto row = patterns[i].v.row_span(t);
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s] == 0) continue;
      if (row[s] != 1 || position) {
        throw Error(ErrorCode::kInvalidArgument,
                    "pattern rows must select at most one symbol");
      }
      position = s;
    }
    if (!position) continue;
    std::uint32_t mixed = 0;
    for (std::size_t h = 0; h < p.r; ++h) {
      mixed = field.add(mixed, field.mul(enc.psi().raw(i, h), interference.raw(h, 0)));
    }
    out.push_back({i, *position,
                   field.element(field.sub(answers_column[i].value(), mixed))});
  }
  return out;
}

inline std::vector<FieldElement> decode_record(
    std::span<const Answer> answers, const EncodingMatrix& enc,
    const PirConfig& cfg, std::span<const PatternMatrix> patterns) {
  const auto& p = cfg.params;
  if (answers.size() != p.n) {
    throw Error(ErrorCode::kIncompleteResponses, "incomplete responses");
  }
  for (const auto& a : answers) {
    if (a.a.size() != cfg.d) {
      throw Error(ErrorCode::kIncompleteResponses, "incomplete responses");
    }
  }
  const Field& field = enc.field();
  std::vector<std::vector<std::optional<std::uint32_t>>> got(
      p.n, std::vector<std::optional<std::uint32_t>>(p.alpha));
  for (std::size_t t = 0; t < cfg.d; ++t) {
    std::vector<FieldElement> column;
    column.reserve(p.n);
    for (const auto& a : answers) column.push_back(a.a[t]);
    for (const auto& sym : decode_subquery(t, column, enc, cfg, patterns)) {
      got[sym.node][sym.position] = sym.value.value();
    }
  }
  std::vector<NodeShare> shares;
  for (std::size_t i = 0; i < p.n && shares.size() < p.k; ++i) {
    NodeShare share{i, {}};
    for (const auto& v : got[i]) {
      if (!v) break;
      share.row.push_back(field.element(*v));
    }
    if (share.row.size() == p.alpha) shares.push_back(std::move(share));
  }
  if (shares.size() < p.k) {
    throw Error(ErrorCode::kInvalidArgument,
                "patterns expose fewer than k complete shares");
  }
  try {
    return record_from_message_matrix(recover(shares, enc));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptShares ||
        e.code() == ErrorCode::kCorruptMessageMatrix) {
      throw Error(ErrorCode::kCorruptResponses, "corrupt responses");
    }
    throw;
  }
}

// One retrieval with a freshly drawn U. The random matrix never leaves the
// object, so it cannot be reused for another retrieval.
class PrivateRetrieval {
 public:
  PrivateRetrieval(const PirConfig& cfg, const EncodingMatrix& enc,
                   std::size_t f, SeededRng& rng)
      : cfg_(cfg), enc_(enc), patterns_(build_patterns(cfg, enc.field())) {
    if (!(cfg.params == enc.params())) {
      throw Error(ErrorCode::kConfigMismatch,
                  "retrieval and encoding parameters differ");
    }
    const Field& field = enc.field();
    const std::size_t cols = cfg.m * cfg.params.alpha;
    std::vector<std::uint32_t> u(cfg.d * cols);
    for (auto& x : u) x = rng.uniform_below(field.modulus());
    queries_ = gen_queries(cfg, Matrix(field, cfg.d, cols, std::move(u)),
                           patterns_, f);
  }

  const std::vector<QueryMatrix>& queries() const noexcept { return queries_; }

  std::vector<FieldElement> decode(std::span<const Answer> answers) const {
    return decode_record(answers, enc_, cfg_, patterns_);
  }

  // Symbols downloaded by one retrieval: d from each of the n nodes.
  std::size_t download_symbols() const noexcept { return cfg_.d * cfg_.params.n; }

 private:
  PirConfig cfg_;
  EncodingMatrix enc_;
  std::vector<PatternMatrix> patterns_;
  std::vector<QueryMatrix> queries_;
};

// Checks Q^i(U, f1) = Q^i(U + V^i E^f1 - V^i E^f2, f2) for every node. The
// shift is a bijection of U, so a uniform U gives every node the same query
// distribution for f1 and f2.
inline bool privacy_coupling_check(const PirConfig& cfg, std::size_t f1,
                                   std::size_t f2, const Matrix& u) {
  const Field& field = u.field();
  const auto patterns = build_patterns(cfg, field);
  const auto q1 = gen_queries(cfg, u, patterns, f1);
  const Matrix e1 = selection_matrix(field, cfg.params.alpha, cfg.m, f1);
  const Matrix e2 = selection_matrix(field, cfg.params.alpha, cfg.m, f2);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const Matrix shifted = u + patterns[i].v * e1 - patterns[i].v * e2;
    const auto q2 = gen_queries(cfg, shifted, patterns, f2);
    if (!(q1[i].q == q2[i].q)) return false;
  }
  return true;
}

struct MetricsReport {
  Rational so;                // storage overhead n/k
  Rational cpop;              // d*n / (k*alpha)
  Rational rr;                // repair ratio r / (r-k+1)
  Rational tradeoff_product;  // cpop * (1 - r / (k * so)), >= 1
  Rational slack;             // cpop - rr * d / k, >= 1

  bool satisfies_bounds() const {
    return tradeoff_product >= Rational(1) && slack >= Rational(1);
  }
  bool on_optimal_curve() const { return tradeoff_product == Rational(1); }
};

inline MetricsReport metrics_report(const PirConfig& cfg) {
  cfg.validate();
  const auto& p = cfg.params;
  const auto n = static_cast<std::int64_t>(p.n);
  const auto k = static_cast<std::int64_t>(p.k);
  const auto r = static_cast<std::int64_t>(p.r);
  const auto a = static_cast<std::int64_t>(p.alpha);
  const auto d = static_cast<std::int64_t>(cfg.d);
  MetricsReport m;
  m.so = Rational(n, k);
  m.cpop = Rational(d * n, k * a);
  m.rr = Rational(r, r - k + 1);
  m.tradeoff_product = m.cpop * (Rational(1) - Rational(r) / (Rational(k) * m.so));
  m.slack = m.cpop - m.rr * Rational(d, k);
  return m;
}

struct SchemeReport {
  bool interference_ok = true;  // r interference-only answers, invertible
  bool tiling_ok = true;        // retrieved cells cover k full shares once
  bool counting_ok = true;      // k*alpha <= (n-r)*d
  std::vector<std::string> failures;

  bool passed() const { return interference_ok && tiling_ok && counting_ok; }
};

// Never throws on a bad scheme; every failed check is listed.
inline SchemeReport verify_scheme(const PirConfig& cfg, const EncodingMatrix& enc,
                                  std::span<const PatternMatrix> patterns) {
  SchemeReport rep;
  const auto& p = cfg.params;
  auto fail_a = [&](const std::string& why) {
    rep.interference_ok = false;
    rep.failures.push_back("interference: " + why);
  };
  auto fail_b = [&](const std::string& why) {
    rep.tiling_ok = false;
    rep.failures.push_back("tiling: " + why);
  };

  bool shapes_ok = patterns.size() == p.n && enc.psi().rows() == p.n &&
                   enc.psi().cols() == p.r;
  for (const auto& pat : patterns) {
    shapes_ok = shapes_ok && pat.v.rows() == cfg.d && pat.v.cols() == p.alpha;
  }
  if (!shapes_ok) {
    fail_a("pattern or encoding shapes do not match the configuration");
    fail_b("pattern or encoding shapes do not match the configuration");
  } else {
    for (std::size_t t = 0; t < cfg.d; ++t) {
      const auto rows = interference_nodes(patterns, t);
      if (rows.size() != p.r) {
        fail_a("subquery " + std::to_string(t) + " has " +
               std::to_string(rows.size()) + " interference-only rows, need " +
               std::to_string(p.r));
      } else if (rank(submatrix_rows(enc.psi(), rows)) != p.r) {
        fail_a("subquery " + std::to_string(t) + " interference system is singular");
      }
    }

    std::vector<std::vector<std::size_t>> hits(p.n, std::vector<std::size_t>(p.alpha, 0));
    for (std::size_t i = 0; i < p.n; ++i) {
      for (std::size_t t = 0; t < cfg.d; ++t) {
        std::size_t ones = 0;
        for (std::size_t s = 0; s < p.alpha; ++s) {
          const auto v = patterns[i].v.raw(t, s);
          if (v > 1) fail_b("pattern entries must be binary");
          if (v == 1) {
            ++hits[i][s];
            ++ones;
          }
        }
        if (ones > 1) {
          fail_b("node " + std::to_string(i) + " row " + std::to_string(t) +
                 " selects more than one symbol");
        }
      }
    }
    std::size_t full = 0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < p.n; ++i) {
      bool node_full = true;
      bool node_touched = false;
      for (std::size_t s = 0; s < p.alpha; ++s) {
        if (hits[i][s] > 1) {
          fail_b("cell (" + std::to_string(i) + "," + std::to_string(s) +
                 ") retrieved more than once");
        }
        node_full = node_full && hits[i][s] == 1;
        node_touched = node_touched || hits[i][s] > 0;
        cells += hits[i][s];
      }
      if (node_touched && !node_full) {
        fail_b("node " + std::to_string(i) + " share only partially retrieved");
      }
      if (node_full) ++full;
    }
    if (full < p.k || cells != p.k * p.alpha) {
      fail_b("retrieved cells cover " + std::to_string(full) +
             " full shares, need exactly k = " + std::to_string(p.k));
    }
  }

  if (p.k * p.alpha > (p.n - p.r) * cfg.d) {
    rep.counting_ok = false;
    rep.failures.push_back("counting: k*alpha = " + std::to_string(p.k * p.alpha) +
                           " exceeds (n-r)*d = " + std::to_string((p.n - p.r) * cfg.d));
  }
  return rep;
}

}  // namespace pmsr

#endif  // PMSR_PIR_HPP_
