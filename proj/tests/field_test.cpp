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

#include "pmsr/field.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"

namespace pmsr {
namespace {

const Field kF13(13);

TEST(FieldTest, RejectsNonPrimeModulus) {
  EXPECT_THROW(Field(12), Error);
  EXPECT_THROW(Field(2), Error);
  EXPECT_THROW(Field(1), Error);
  EXPECT_NO_THROW(Field(257));
  EXPECT_NO_THROW(Field(4294967291u));
}

TEST(FieldTest, ArithExamples) {
  EXPECT_EQ(arith(ArithOp::kAdd, kF13.element(8), kF13.element(9)).value(), 4u);
  EXPECT_EQ(arith(ArithOp::kMul, kF13.element(5), kF13.element(0)).value(), 0u);
  EXPECT_EQ(arith(ArithOp::kMul, kF13.element(5), kF13.element(5)).value(), 12u);
  EXPECT_EQ(arith(ArithOp::kSub, kF13.element(3), kF13.element(5)).value(), 11u);
}

TEST(FieldTest, ElementsAreCanonical) {
  EXPECT_EQ(kF13.element(13).value(), 0u);
  EXPECT_EQ(kF13.element(27).value(), 1u);
  const Field big(4294967291u);
  const auto a = big.element(4294967290u);
  EXPECT_EQ((a * a).value(), 1u);
  EXPECT_EQ((a + a).value(), 4294967289u);
}

TEST(FieldTest, MixingFieldsIsRejected) {
  const Field f7(7);
  try {
    (void)(kF13.element(1) + f7.element(1));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleFields);
    EXPECT_STREQ(e.what(), "incompatible fields");
  }
}

TEST(FieldTest, Inverse) {
  EXPECT_EQ(inv(kF13.element(1)).value(), 1u);
  const auto expected = oracle::brute_force_inverse(2, 13);
  ASSERT_TRUE(expected.has_value());
  EXPECT_EQ(*expected, 7);
  EXPECT_EQ(inv(kF13.element(2)).value(), 7u);
  try {
    (void)inv(kF13.zero());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroInverse);
    EXPECT_STREQ(e.what(), "zero has no inverse");
  }
}

TEST(FieldTest, Pow) {
  EXPECT_EQ(pow(kF13.element(5), 3).value(), 8u);
  EXPECT_EQ(pow(kF13.element(6), 2).value(), 10u);
  EXPECT_EQ(pow(kF13.element(0), 0).value(), 1u);
  EXPECT_EQ(pow(kF13.element(9), 0).value(), 1u);
}

TEST(FieldTest, AxiomsExhaustiveGf13) {
  for (std::uint32_t a = 0; a < 13; ++a) {
    for (std::uint32_t b = 0; b < 13; ++b) {
      const auto x = kF13.element(a);
      const auto y = kF13.element(b);
      ASSERT_EQ(x + y, y + x);
      ASSERT_EQ(x * y, y * x);
      ASSERT_EQ((x + y).value(), oracle::mod(a + b, 13));
      ASSERT_EQ((x * y).value(), oracle::mod(a * b, 13));
      ASSERT_EQ((x - y).value(), oracle::mod(std::int64_t{a} - b, 13));
      for (std::uint32_t c = 0; c < 13; ++c) {
        const auto z = kF13.element(c);
        ASSERT_EQ((x + y) + z, x + (y + z));
        ASSERT_EQ((x * y) * z, x * (y * z));
        ASSERT_EQ(x * (y + z), x * y + x * z);
      }
    }
  }
}

TEST(FieldTest, InverseExhaustiveSmallPrimes) {
  for (std::uint32_t q = 3; q <= 257; ++q) {
    if (!is_prime(q)) continue;
    const Field f(q);
    for (std::uint32_t a = 1; a < q; ++a) {
      ASSERT_EQ((f.element(a) * inv(f.element(a))).value(), 1u) << "q=" << q << " a=" << a;
    }
  }
}

TEST(FieldTest, FermatExhaustiveGf13) {
  for (std::uint32_t a = 1; a < 13; ++a) {
    EXPECT_EQ(pow(kF13.element(a), 12).value(), 1u);
  }
}

TEST(SampleUniformTest, EmptyAndDeterministic) {
  SeededRng rng(7);
  EXPECT_TRUE(sample_uniform(kF13, rng, 0).empty());

  SeededRng a(0xC0FFEE);
  SeededRng b(0xC0FFEE);
  const auto xs = sample_uniform(kF13, a, 6);
  const auto ys = sample_uniform(kF13, b, 6);
  ASSERT_EQ(xs.size(), 6u);
  EXPECT_EQ(xs, ys);
  for (const auto& x : xs) EXPECT_LT(x.value(), 13u);

  SeededRng c(0xC0FFEE + 1);
  EXPECT_NE(sample_uniform(kF13, c, 6), xs);
}

TEST(SampleUniformTest, FrequenciesWithinFiveSigma) {
  SeededRng rng(20261016);
  constexpr int kDraws = 10000;
  std::vector<int> counts(13, 0);
  for (const auto& x : sample_uniform(kF13, rng, kDraws)) ++counts[x.value()];
  const double p = 1.0 / 13.0;
  const double mean = kDraws * p;
  const double sigma = std::sqrt(kDraws * p * (1 - p));
  for (int v = 0; v < 13; ++v) {
    EXPECT_LE(std::abs(counts[v] - mean), 5 * sigma) << "value " << v;
  }
}

TEST(SampleUniformTest, UniformBelowStaysInRange) {
  SeededRng rng(1);
  for (std::uint32_t bound : {1u, 2u, 3u, 13u, 257u, 65521u, 4294967291u}) {
    for (int i = 0; i < 1000; ++i) ASSERT_LT(rng.uniform_below(bound), bound);
  }
}

}  // namespace
}  // namespace pmsr
