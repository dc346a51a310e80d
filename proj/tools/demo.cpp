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

// Worked example: GF(13), (n, k, r, alpha, beta, B) = (6, 3, 4, 2, 1, 6),
// three records. Every printed quantity is also checked; the first mismatch
// ends the run with exit code 1.

#include <sstream>

#include "cli.hpp"
#include "pmsr/pir.hpp"

namespace pmsr::cli {

namespace {

struct Mismatch {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Mismatch{what};
}

std::string fmt_row(std::span<const std::uint32_t> row) {
  std::ostringstream s;
  s << '[';
  for (std::size_t j = 0; j < row.size(); ++j) s << (j ? ", " : "") << row[j];
  s << ']';
  return s.str();
}

std::string fmt_matrix(const Matrix& m) {
  std::ostringstream s;
  s << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) s << (i ? ", " : "") << fmt_row(m.row_span(i));
  s << ']';
  return s.str();
}

std::string fmt_vec(const std::vector<FieldElement>& v) {
  std::vector<std::uint32_t> raw;
  for (const auto& x : v) raw.push_back(x.value());
  return fmt_row(raw);
}

// Coefficient c times a named unknown, omitting "1*".
std::string term(std::uint32_t c, const std::string& name) {
  return c == 1 ? name : std::to_string(c) + name;
}

}  // namespace

int demo_example1(std::uint64_t seed, std::ostream& out) {
  const Field f(13);
  const PirConfig cfg = PirConfig::make(3, 3);
  const auto& p = cfg.params;
  try {
    const EncodingMatrix enc = build_encoding_matrix(p, f);
    out << "GF(13), (n, k, r, alpha, beta, B) = (" << p.n << ", " << p.k << ", " << p.r << ", "
        << p.alpha << ", " << p.beta << ", " << p.B << "), m = " << cfg.m << ", seed = " << seed
        << "\n\n";

    const Matrix expected_psi = Matrix::from_rows(
        f, {{1, 1, 1, 1}, {1, 2, 4, 8}, {1, 3, 9, 1}, {1, 4, 3, 12}, {1, 5, 12, 8}, {1, 6, 10, 8}});
    out << "Psi =\n";
    for (std::size_t i = 0; i < p.n; ++i) out << "  " << fmt_row(enc.psi().row_span(i)) << "\n";
    require(enc.psi() == expected_psi, "Psi");

    SeededRng rng(seed);
    std::vector<std::vector<FieldElement>> records;
    out << "\nsample database:\n";
    for (std::size_t j = 0; j < cfg.m; ++j) {
      records.push_back(sample_uniform(f, rng, p.B));
      out << "  X" << j + 1 << " = " << fmt_vec(records.back()) << "\n";
    }

    std::vector<CodeMatrix> codes;
    for (const auto& rec : records) codes.push_back(encode(message_matrix_from_record(rec, p), enc));

    out << "\nnode contents (record j = x_j1..x_j6):\n";
    for (std::size_t i = 0; i < p.n; ++i) {
      const std::uint32_t a = enc.psi().raw(i, 1), b = enc.psi().raw(i, 2), c = enc.psi().raw(i, 3);
      out << "  node " << i + 1 << ": x_j1 + " << term(a, "x_j2") << " + " << term(b, "x_j4") << " + "
          << term(c, "x_j5") << ",  x_j2 + " << term(a, "x_j3") << " + " << term(b, "x_j5") << " + "
          << term(c, "x_j6") << "  ->";
      for (std::size_t j = 0; j < cfg.m; ++j) {
        const auto& x = records[j];
        const FieldElement s1 = x[0] + f.element(a) * x[1] + f.element(b) * x[3] + f.element(c) * x[4];
        const FieldElement s2 = x[1] + f.element(a) * x[2] + f.element(b) * x[4] + f.element(c) * x[5];
        out << " " << fmt_vec({s1, s2});
        require(codes[j].row(i) == std::vector<FieldElement>{s1, s2},
                "node " + std::to_string(i + 1) + " content of record " + std::to_string(j + 1));
      }
      out << "\n";
    }

    const auto patterns = build_patterns(cfg, f);
    const Matrix expected_v[3] = {Matrix::from_rows(f, {{1, 0}, {0, 1}, {0, 0}}),
                                  Matrix::from_rows(f, {{0, 0}, {1, 0}, {0, 1}}),
                                  Matrix::from_rows(f, {{0, 1}, {0, 0}, {1, 0}})};
    const Matrix e1 = selection_matrix(f, p.alpha, cfg.m, 0);
    out << "\npattern matrices:\n";
    for (std::size_t i = 0; i < p.n; ++i) {
      out << "  V" << i + 1 << " = " << fmt_matrix(patterns[i].v) << "\n";
      require(patterns[i].v == (i < 3 ? expected_v[i] : Matrix(f, 3, 2)), "V" + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < p.n; ++i) {
      out << "  V" << i + 1 << "E1 = " << fmt_matrix(patterns[i].v * e1) << "\n";
    }
    require(patterns[2].v * e1 == Matrix::from_rows(f, {{0, 1, 0, 0, 0, 0},
                                                        {0, 0, 0, 0, 0, 0},
                                                        {1, 0, 0, 0, 0, 0}}),
            "V3E1");

    // Retrieval of X1 with an explicit mask, so the interference can be shown.
    const Matrix u(f, cfg.d, cfg.m * p.alpha,
                   [&](std::size_t, std::size_t) { return rng.uniform_below(f.modulus()); });
    const auto queries = gen_queries(cfg, u, patterns, 0);
    std::vector<Answer> answers;
    std::size_t downloaded = 0;
    for (std::size_t i = 0; i < p.n; ++i) {
      std::vector<FieldElement> stored;
      for (const auto& c : codes) {
        for (const auto& x : c.row(i)) stored.push_back(x);
      }
      answers.push_back(node_answer(queries[i], stored));
      downloaded += answers.back().a.size();
    }

    out << "\nsubquery 1 (A_i1 = Q^i row 1 times node i's content):\n";
    const auto zero_rows = interference_nodes(patterns, 0);
    for (std::size_t i = 0; i < p.n; ++i) {
      out << "  (" << i + 1 << ") A_" << i + 1 << "1 = " << answers[i].a[0].value() << " = ";
      const auto row = patterns[i].v.row_span(0);
      for (std::size_t s = 0; s < row.size(); ++s) {
        if (row[s]) out << "C1_" << i + 1 << s + 1 << " + ";
      }
      for (std::size_t h = 0; h < p.r; ++h) {
        out << (h ? " + " : "") << term(enc.psi().raw(i, h), "I" + std::to_string(h + 1));
      }
      out << "\n";
    }
    std::vector<std::uint32_t> rhs;
    for (auto i : zero_rows) rhs.push_back(answers[i].a[0].value());
    const Matrix interference = mat_solve(submatrix_rows(enc.psi(), zero_rows), Matrix(f, p.r, 1, rhs));
    out << "  interference-only equations:";
    for (auto i : zero_rows) out << " (" << i + 1 << ")";
    out << "  ->  (I1, I2, I3, I4) = " << fmt_matrix(interference.transpose()) << "\n";

    std::vector<Matrix> blocks;
    for (const auto& rec : records) blocks.push_back(message_matrix_from_record(rec, p).matrix());
    const Matrix m_all = blocks[0].hconcat(blocks[1]).hconcat(blocks[2]);
    require(interference == m_all * u.row_range(0, 1).transpose(), "interference terms");

    std::vector<FieldElement> column;
    for (const auto& a : answers) column.push_back(a.a[0]);
    for (const auto& sym : decode_subquery(0, column, enc, cfg, patterns)) {
      out << "  C1_" << sym.node + 1 << sym.position + 1 << " = " << sym.value.value() << "\n";
      require(sym.value == codes[0].row(sym.node)[sym.position], "retrieved symbol");
    }

    const auto decoded = decode_record(answers, enc, cfg, patterns);
    out << "\ndecoded X1 = " << fmt_vec(decoded) << "\n";
    require(decoded == records[0], "decoded X1");
    out << "downloaded " << downloaded << " symbols for a " << p.B << "-symbol record\n";
    require(downloaded == 18, "download count");
    const Rational cpop(static_cast<std::int64_t>(downloaded), static_cast<std::int64_t>(p.B));
    require(cpop == metrics_report(cfg).cpop && cpop == Rational(3), "cPoP");
    out << "cPoP = " << cpop.num() << "\n";
    return kExitOk;
  } catch (const Mismatch& m) {
    out << "MISMATCH: " << m.what << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    out << "MISMATCH: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace pmsr::cli
