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

// Product-matrix minimum-storage regenerating code with repair degree
// r = 2k - 2.
//
// A record of B = k(k-1) symbols is packed into an r x alpha message matrix
// M = [S1; S2] of two symmetric alpha x alpha blocks, and node i stores row
// i of C = Psi * M where Psi = [Phi | Lambda * Phi]. Any k rows of C
// determine M, and a lost row can be regenerated exactly from one symbol
// from each of r helpers.

#ifndef PMSR_MSR_HPP_
#define PMSR_MSR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmsr/error.hpp"
#include "pmsr/field.hpp"
#include "pmsr/matrix.hpp"

namespace pmsr {

struct MsrParams {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t r = 0;
  std::size_t alpha = 0;
  std::size_t beta = 0;
  std::size_t B = 0;

  // (n, k, 2k-2, k-1, 1, k(k-1)).
  static MsrParams product_matrix(std::size_t n, std::size_t k) {
    MsrParams p;
    p.n = n;
    p.k = k;
    p.r = k >= 1 ? 2 * k - 2 : 0;
    p.alpha = k >= 1 ? k - 1 : 0;
    p.beta = 1;
    p.B = k * (k >= 1 ? k - 1 : 0);
    p.validate();
    return p;
  }

  void validate() const {
    auto fail = [](const std::string& what) {
      throw Error(ErrorCode::kInvalidArgument, "invalid MSR parameters: " + what);
    };
    if (k < 2) fail("k must be at least 2");
    if (r != 2 * k - 2) fail("r must equal 2k-2");
    if (alpha != k - 1) fail("alpha must equal k-1");
    if (beta != 1) fail("beta must equal 1");
    if (B != k * (k - 1)) fail("B must equal k(k-1)");
    if (n <= r) fail("n must exceed r");
    // Minimum-storage point: alpha = B/k, beta = B/(k(r-k+1)).
    if (alpha * k != B || beta * k * (r - k + 1) != B) fail("not at the MSR point");
  }

  friend bool operator==(const MsrParams&, const MsrParams&) = default;
};

namespace detail {

// Calls fn(indices) for every size-`choose` subset of [0, n) in lexicographic
// order. Stops early when fn returns false.
inline void for_each_subset(
    std::size_t n, std::size_t choose,
    const std::function<bool(std::span<const std::size_t>)>& fn) {
  if (choose > n) return;
  std::vector<std::size_t> idx(choose);
  for (std::size_t i = 0; i < choose; ++i) idx[i] = i;
  while (true) {
    if (!fn(idx)) return;
    std::size_t i = choose;
    while (i > 0 && idx[i - 1] == n - choose + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < choose; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::vector<std::size_t> random_subset(SeededRng& rng, std::size_t n,
                                              std::size_t choose) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < choose; ++i) {
    std::size_t j = i + rng.uniform_below(static_cast<std::uint32_t>(n - i));
    std::swap(all[i], all[j]);
  }
  all.resize(choose);
  return all;
}

// Above this node count the any-subset conditions are spot-checked.
inline constexpr std::size_t kExhaustiveCheckLimit = 12;
inline constexpr std::size_t kSpotChecks = 256;

// True when every checked `size`-row subset of `m` has full rank.
inline bool all_row_subsets_invertible(const Matrix& m, std::size_t size) {
  bool ok = true;
  auto check = [&](std::span<const std::size_t> rows) {
    ok = rank(submatrix_rows(m, rows)) == size;
    return ok;
  };
  if (m.rows() <= kExhaustiveCheckLimit) {
    for_each_subset(m.rows(), size, check);
  } else {
    SeededRng rng(0x9e3779b97f4a7c15ull ^ m.rows());
    for (std::size_t t = 0; t < kSpotChecks && ok; ++t) {
      check(random_subset(rng, m.rows(), size));
    }
  }
  return ok;
}

}  // namespace detail

class EncodingMatrix {
 public:
  const MsrParams& params() const noexcept { return params_; }
  const Field& field() const noexcept { return psi_.field(); }
  // n x r.
  const Matrix& psi() const noexcept { return psi_; }
  // n x alpha.
  const Matrix& phi() const noexcept { return phi_; }
  // Diagonal of Lambda.
  const std::vector<FieldElement>& lambda() const noexcept { return lambda_; }
  const std::vector<FieldElement>& points() const noexcept { return points_; }

 private:
  friend EncodingMatrix build_encoding_matrix(
      const MsrParams&, const Field&, std::optional<std::vector<std::uint32_t>>);

  EncodingMatrix(MsrParams params, Matrix psi, Matrix phi,
                 std::vector<FieldElement> lambda,
                 std::vector<FieldElement> points)
      : params_(params),
        psi_(std::move(psi)),
        phi_(std::move(phi)),
        lambda_(std::move(lambda)),
        points_(std::move(points)) {}

  MsrParams params_;
  Matrix psi_;
  Matrix phi_;
  std::vector<FieldElement> lambda_;
  std::vector<FieldElement> points_;
};

// Phi is the alpha-column Vandermonde matrix on the evaluation points and
// lambda_i = x_i^alpha, so Psi is itself an r-column Vandermonde matrix.
// Default points are 1..n.
inline EncodingMatrix build_encoding_matrix(
    const MsrParams& params, const Field& field,
    std::optional<std::vector<std::uint32_t>> points = std::nullopt) {
  params.validate();
  if (field.modulus() <= params.n) {
    throw Error(ErrorCode::kFieldTooSmall,
                "field too small: q = " + std::to_string(field.modulus()) +
                    " must exceed n = " + std::to_string(params.n));
  }
  // Nonzero alpha-th powers form a subgroup of order (q-1)/gcd(alpha, q-1);
  // with fewer than n of them no choice of points keeps lambda distinct.
  const std::size_t powers = (field.modulus() - 1) / std::gcd<std::size_t>(params.alpha, field.modulus() - 1);
  if (powers < params.n) {
    throw Error(ErrorCode::kFieldTooSmall,
                "field too small: GF(" + std::to_string(field.modulus()) + ") has only " +
                    std::to_string(powers) + " distinct nonzero " +
                    std::to_string(params.alpha) + "-th powers, need n = " +
                    std::to_string(params.n));
  }
  std::vector<FieldElement> pts;
  if (points) {
    if (points->size() != params.n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "expected " + std::to_string(params.n) + " points, got " +
                      std::to_string(points->size()));
    }
    for (auto p : *points) {
      if (p >= field.modulus()) {
        throw Error(ErrorCode::kDegeneratePoints,
                    "degenerate points (not a field element)");
      }
      pts.push_back(field.element(p));
    }
  } else {
    for (std::size_t i = 1; i <= params.n; ++i) pts.push_back(field.element(i));
  }

  Matrix phi = vandermonde(pts, params.alpha);

  std::vector<FieldElement> lambda;
  lambda.reserve(params.n);
  for (const auto& x : pts) lambda.push_back(x.pow(params.alpha));
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (lambda[i] == lambda[j]) {
        throw Error(ErrorCode::kLambdaCollision,
                    "lambda collision: points " +
                        std::to_string(pts[j].value()) + " and " +
                        std::to_string(pts[i].value()) +
                        " have equal alpha-th powers");
      }
    }
  }

  Matrix lambda_phi(field, params.n, params.alpha,
                    [&](std::size_t i, std::size_t j) {
                      return field.mul(lambda[i].value(), phi.raw(i, j));
                    });
  Matrix psi = phi.hconcat(lambda_phi);

  if (!detail::all_row_subsets_invertible(phi, params.alpha)) {
    throw Error(ErrorCode::kRankDeficiency,
                "rank deficiency: some alpha rows of Phi are dependent");
  }
  if (!detail::all_row_subsets_invertible(psi, params.r)) {
    throw Error(ErrorCode::kRankDeficiency,
                "rank deficiency: some r rows of Psi are dependent");
  }
  return EncodingMatrix(params, std::move(psi), std::move(phi),
                        std::move(lambda), std::move(pts));
}

// r x alpha matrix [S1; S2].
class MessageMatrix {
 public:
  explicit MessageMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != 2 * m_.cols() || m_.cols() == 0) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "message matrix must be 2*alpha x alpha");
    }
  }

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t alpha() const noexcept { return m_.cols(); }
  Matrix s1() const { return m_.row_range(0, alpha()); }
  Matrix s2() const { return m_.row_range(alpha(), alpha()); }

  bool blocks_symmetric() const {
    const std::size_t a = alpha();
    for (std::size_t blk = 0; blk < 2; ++blk) {
      for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = i + 1; j < a; ++j) {
          if (m_.raw(blk * a + i, j) != m_.raw(blk * a + j, i)) return false;
        }
      }
    }
    return true;
  }

  friend bool operator==(const MessageMatrix&, const MessageMatrix&) = default;

 private:
  Matrix m_;
};

// Record position of entry (row, col) of the message matrix. Each block's
// upper triangle is filled row-major, S1 first.
inline std::size_t message_symbol_index(std::size_t row, std::size_t col,
                                        std::size_t alpha) {
  const std::size_t block = row / alpha;
  std::size_t a = row % alpha;
  std::size_t b = col;
  if (a > b) std::swap(a, b);
  const std::size_t per_block = alpha * (alpha + 1) / 2;
  return block * per_block + a * alpha - a * (a - 1) / 2 + (b - a);
}

inline MessageMatrix message_matrix_from_record(
    std::span<const FieldElement> record, const MsrParams& params) {
  if (record.size() != params.B) {
    throw Error(ErrorCode::kWrongLength,
                "record must hold " + std::to_string(params.B) +
                    " symbols, got " + std::to_string(record.size()));
  }
  const Field field = record.front().field();
  for (const auto& x : record) {
    if (x.modulus() != field.modulus()) {
      throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
    }
  }
  return MessageMatrix(Matrix(
      field, params.r, params.alpha, [&](std::size_t i, std::size_t j) {
        return record[message_symbol_index(i, j, params.alpha)].value();
      }));
}

inline std::vector<FieldElement> record_from_message_matrix(
    const MessageMatrix& mm) {
  if (!mm.blocks_symmetric()) {
    throw Error(ErrorCode::kCorruptMessageMatrix, "corrupt message matrix");
  }
  const std::size_t a = mm.alpha();
  const Field& field = mm.matrix().field();
  std::vector<FieldElement> out;
  out.reserve(a * (a + 1));
  for (std::size_t blk = 0; blk < 2; ++blk) {
    for (std::size_t i = 0; i < a; ++i) {
      for (std::size_t j = i; j < a; ++j) {
        out.push_back(field.element(mm.matrix().raw(blk * a + i, j)));
      }
    }
  }
  return out;
}

// n x alpha; row i is node i's share of one record.
struct CodeMatrix {
  Matrix c;

  std::vector<FieldElement> row(std::size_t node) const { return c.row(node); }
  friend bool operator==(const CodeMatrix&, const CodeMatrix&) = default;
};

inline CodeMatrix encode(const MessageMatrix& mm, const EncodingMatrix& enc) {
  if (mm.matrix().rows() != enc.psi().cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "message matrix does not match the encoding matrix");
  }
  return CodeMatrix{enc.psi() * mm.matrix()};
}

struct NodeShare {
  std::size_t node = 0;
  std::vector<FieldElement> row;
};

struct HelperSymbol {
  std::size_t node = 0;
  FieldElement symbol;
};

namespace detail {

inline void check_node_indices(std::span<const std::size_t> nodes,
                               std::size_t n) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= n) {
      throw Error(ErrorCode::kOutOfRange,
                  "node index " + std::to_string(nodes[i]) + " out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (nodes[i] == nodes[j]) {
        throw Error(ErrorCode::kRepeatedIndex,
                    "repeated node index " + std::to_string(nodes[i]));
      }
    }
  }
}

// k x alpha matrix of share rows, in the order given.
inline Matrix share_matrix(std::span<const NodeShare> shares,
                           const EncodingMatrix& enc) {
  const auto& p = enc.params();
  std::vector<std::size_t> nodes;
  for (const auto& s : shares) nodes.push_back(s.node);
  check_node_indices(nodes, p.n);
  const Field& field = enc.field();
  std::vector<std::uint32_t> values;
  values.reserve(shares.size() * p.alpha);
  for (const auto& s : shares) {
    if (s.row.size() != p.alpha) {
      throw Error(ErrorCode::kWrongLength,
                  "share rows must hold alpha = " + std::to_string(p.alpha) +
                      " symbols");
    }
    for (const auto& x : s.row) {
      if (x.modulus() != field.modulus()) {
        throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
      }
      values.push_back(x.value());
    }
  }
  return Matrix(field, shares.size(), p.alpha, std::move(values));
}

inline Matrix solve_or_invalid(const Matrix& a, const Matrix& y) {
  try {
    return mat_solve(a, y);
  } catch (const SingularMatrixError&) {
    throw Error(ErrorCode::kInvalidEncodingMatrix, "invalid encoding matrix");
  }
}

}  // namespace detail

// Decodes the message matrix from exactly k shares.
//
// With G = C_K * Phi_K^T = P + Lambda_K * Q, where P = Phi_K S1 Phi_K^T and
// Q = Phi_K S2 Phi_K^T are symmetric, each off-diagonal pair (G_ij, G_ji)
// yields P_ij and Q_ij because lambda_i != lambda_j. Row i of P without its
// diagonal then determines S1 * Phi_i^T through an alpha x alpha solve, and
// alpha such columns give S1 (same for S2 from Q).
inline MessageMatrix recover(std::span<const NodeShare> shares,
                             const EncodingMatrix& enc) {
  const auto& p = enc.params();
  if (shares.size() < p.k) {
    throw Error(ErrorCode::kUnderdetermined,
                "underdetermined: need " + std::to_string(p.k) + " shares, got " +
                    std::to_string(shares.size()));
  }
  if (shares.size() > p.k) {
    throw Error(ErrorCode::kInvalidArgument,
                "recover takes exactly k = " + std::to_string(p.k) + " shares");
  }
  const Matrix c_k = detail::share_matrix(shares, enc);
  const Field& field = enc.field();
  const std::size_t k = p.k;
  const std::size_t a = p.alpha;

  std::vector<std::size_t> nodes;
  for (const auto& s : shares) nodes.push_back(s.node);
  const Matrix phi_k = submatrix_rows(enc.phi(), nodes);
  const Matrix g = c_k * phi_k.transpose();

  std::vector<std::uint32_t> pm(k * k, 0);
  std::vector<std::uint32_t> qm(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::uint32_t li = enc.lambda()[nodes[i]].value();
      const std::uint32_t lj = enc.lambda()[nodes[j]].value();
      const std::uint32_t q_ij = field.mul(field.sub(g.raw(i, j), g.raw(j, i)),
                                           field.inv(field.sub(li, lj)));
      const std::uint32_t p_ij = field.sub(g.raw(i, j), field.mul(li, q_ij));
      pm[i * k + j] = pm[j * k + i] = p_ij;
      qm[i * k + j] = qm[j * k + i] = q_ij;
    }
  }

  // Columns of S * Phi_K^T, one per share, from the off-diagonal of P or Q.
  auto columns = [&](const std::vector<std::uint32_t>& sym) {
    std::vector<std::uint32_t> out(a * k);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::size_t> others;
      std::vector<std::uint32_t> rhs;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i) continue;
        others.push_back(j);
        rhs.push_back(sym[i * k + j]);
      }
      const Matrix col = detail::solve_or_invalid(submatrix_rows(phi_k, others),
                                                  Matrix(field, a, 1, rhs));
      for (std::size_t r = 0; r < a; ++r) out[r * k + i] = col.raw(r, 0);
    }
    return Matrix(field, a, k, std::move(out));
  };
  const Matrix s1_phi = columns(pm);
  const Matrix s2_phi = columns(qm);

  // S * Phi_A^T = X  =>  S = X * (Phi_A^T)^-1 with A the first alpha shares.
  const Matrix phi_a_t = phi_k.row_range(0, a).transpose();
  const Matrix phi_a_t_inv =
      detail::solve_or_invalid(phi_a_t, Matrix::identity(field, a));
  const Matrix s1 = s1_phi.col_range(0, a) * phi_a_t_inv;
  const Matrix s2 = s2_phi.col_range(0, a) * phi_a_t_inv;
  MessageMatrix mm(s1.vconcat(s2));

  if (!mm.blocks_symmetric() ||
      !(submatrix_rows(enc.psi(), nodes) * mm.matrix() == c_k)) {
    throw Error(ErrorCode::kCorruptShares, "corrupt shares");
  }
  return mm;
}

// Independent decoder: a plain linear solve in the B record symbols, using
// every share given. Needs at least k shares to be determined.
inline MessageMatrix recover_oracle(std::span<const NodeShare> shares,
                                    const EncodingMatrix& enc) {
  const auto& p = enc.params();
  const Matrix c = detail::share_matrix(shares, enc);
  const Field& field = enc.field();
  const std::size_t eqs = shares.size() * p.alpha;
  const std::size_t width = p.B + 1;
  std::vector<std::uint32_t> aug(eqs * width, 0);
  for (std::size_t s = 0; s < shares.size(); ++s) {
    for (std::size_t col = 0; col < p.alpha; ++col) {
      const std::size_t e = s * p.alpha + col;
      for (std::size_t h = 0; h < p.r; ++h) {
        const std::size_t x = message_symbol_index(h, col, p.alpha);
        aug[e * width + x] = field.add(aug[e * width + x],
                                       enc.psi().raw(shares[s].node, h));
      }
      aug[e * width + p.B] = c.raw(s, col);
    }
  }
  const std::size_t rk = detail::gauss_jordan(field, aug, eqs, width, p.B);
  if (rk < p.B) {
    throw Error(ErrorCode::kUnderdetermined,
                "underdetermined: rank " + std::to_string(rk) + " < B = " +
                    std::to_string(p.B));
  }
  for (std::size_t e = rk; e < eqs; ++e) {
    if (aug[e * width + p.B] != 0) {
      throw Error(ErrorCode::kCorruptShares, "corrupt shares");
    }
  }
  std::vector<FieldElement> record;
  record.reserve(p.B);
  for (std::size_t x = 0; x < p.B; ++x) {
    record.push_back(field.element(aug[x * width + p.B]));
  }
  return message_matrix_from_record(record, p);
}

// The single symbol C_helper * Phi_failed^T a helper sends for repair.
inline FieldElement repair_helper_symbol(std::span<const FieldElement> helper_share,
                                         std::size_t helper, std::size_t failed,
                                         const EncodingMatrix& enc) {
  const auto& p = enc.params();
  if (helper >= p.n || failed >= p.n) {
    throw Error(ErrorCode::kOutOfRange, "node index out of range");
  }
  if (helper == failed) {
    throw Error(ErrorCode::kInvalidArgument, "helper must differ from the failed node");
  }
  if (helper_share.size() != p.alpha) {
    throw Error(ErrorCode::kWrongLength, "helper share must hold alpha symbols");
  }
  const Field& field = enc.field();
  std::uint32_t acc = 0;
  for (std::size_t c = 0; c < p.alpha; ++c) {
    if (helper_share[c].modulus() != field.modulus()) {
      throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
    }
    acc = field.add(acc, field.mul(helper_share[c].value(), enc.phi().raw(failed, c)));
  }
  return field.element(acc);
}

// Regenerates the failed node's share from r helper symbols. Solving
// Psi_helpers * x = symbols gives x = [S1 Phi_f^T; S2 Phi_f^T], and by
// symmetry the share is Phi_f S1 + lambda_f Phi_f S2.
inline std::vector<FieldElement> repair_regenerate(
    std::size_t failed, std::span<const HelperSymbol> helpers,
    const EncodingMatrix& enc) {
  const auto& p = enc.params();
  if (failed >= p.n) throw Error(ErrorCode::kOutOfRange, "node index out of range");
  if (helpers.size() != p.r) {
    throw Error(ErrorCode::kInvalidArgument,
                "repair needs exactly r = " + std::to_string(p.r) +
                    " helpers, got " + std::to_string(helpers.size()));
  }
  const Field& field = enc.field();
  std::vector<std::size_t> nodes;
  std::vector<std::uint32_t> rhs;
  for (const auto& h : helpers) {
    if (h.node == failed) {
      throw Error(ErrorCode::kInvalidArgument, "the failed node cannot help");
    }
    if (h.symbol.modulus() != field.modulus()) {
      throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
    }
    nodes.push_back(h.node);
    rhs.push_back(h.symbol.value());
  }
  detail::check_node_indices(nodes, p.n);
  const Matrix x = detail::solve_or_invalid(submatrix_rows(enc.psi(), nodes),
                                            Matrix(field, p.r, 1, rhs));
  const std::uint32_t lf = enc.lambda()[failed].value();
  std::vector<FieldElement> out;
  out.reserve(p.alpha);
  for (std::size_t c = 0; c < p.alpha; ++c) {
    out.push_back(field.element(field.add(x.raw(c, 0), field.mul(lf, x.raw(p.alpha + c, 0)))));
  }
  return out;
}

}  // namespace pmsr

#endif  // PMSR_MSR_HPP_
