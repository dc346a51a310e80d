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

// Prime field GF(q) with q < 2^32.
//
// Elements are stored as their canonical representative in [0, q) together
// with the modulus they belong to, so that mixing elements of two different
// fields is detected at run time. Bulk code (matrices, protocol kernels)
// works on raw uint32_t values through the Field helpers instead.

#ifndef PMSR_FIELD_HPP_
#define PMSR_FIELD_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pmsr/error.hpp"

namespace pmsr {

class FieldElement;

inline bool is_prime(std::uint64_t value) {
  if (value < 2) return false;
  if (value < 4) return true;
  if (value % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= value; d += 2) {
    if (value % d == 0) return false;
  }
  return true;
}

class Field {
 public:
  explicit Field(std::uint32_t modulus) : modulus_(modulus) {
    if (modulus < 3 || !is_prime(modulus)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "field modulus must be a prime >= 3, got " +
                      std::to_string(modulus));
    }
  }

  std::uint32_t modulus() const noexcept { return modulus_; }

  std::uint32_t reduce(std::uint64_t v) const noexcept {
    return static_cast<std::uint32_t>(v % modulus_);
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
    std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<std::uint32_t>(s >= modulus_ ? s - modulus_ : s);
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept {
    return a >= b ? a - b
                  : static_cast<std::uint32_t>(std::uint64_t{a} + modulus_ - b);
  }
  std::uint32_t neg(std::uint32_t a) const noexcept {
    return a == 0 ? 0 : modulus_ - a;
  }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
    return static_cast<std::uint32_t>(std::uint64_t{a} * b % modulus_);
  }
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept {
    std::uint32_t result = 1 % modulus_;
    std::uint32_t base = a;
    while (e != 0) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }
  std::uint32_t inv(std::uint32_t a) const {
    if (a % modulus_ == 0) {
      throw Error(ErrorCode::kZeroInverse, "zero has no inverse");
    }
    return pow(a, modulus_ - 2);
  }

  FieldElement element(std::uint64_t value) const;
  FieldElement zero() const;
  FieldElement one() const;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  friend class FieldElement;
  struct Trusted {};
  Field(Trusted, std::uint32_t modulus) : modulus_(modulus) {}

  std::uint32_t modulus_;
};

class FieldElement {
 public:
  FieldElement(const Field& field, std::uint64_t value)
      : value_(field.reduce(value)), modulus_(field.modulus()) {}

  std::uint32_t value() const noexcept { return value_; }
  std::uint32_t modulus() const noexcept { return modulus_; }
  Field field() const { return field_unchecked(); }

  FieldElement operator+(const FieldElement& o) const {
    check(o);
    return raw(field_unchecked().add(value_, o.value_));
  }
  FieldElement operator-(const FieldElement& o) const {
    check(o);
    return raw(field_unchecked().sub(value_, o.value_));
  }
  FieldElement operator*(const FieldElement& o) const {
    check(o);
    return raw(field_unchecked().mul(value_, o.value_));
  }
  FieldElement operator-() const { return raw(field_unchecked().neg(value_)); }

  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  FieldElement inverse() const { return raw(field_unchecked().inv(value_)); }
  FieldElement pow(std::uint64_t e) const {
    return raw(field_unchecked().pow(value_, e));
  }

  bool is_zero() const noexcept { return value_ == 0; }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& e) {
    return os << e.value_;
  }

 private:
  struct RawTag {};
  FieldElement(RawTag, std::uint32_t value, std::uint32_t modulus)
      : value_(value), modulus_(modulus) {}

  FieldElement raw(std::uint32_t v) const { return {RawTag{}, v, modulus_}; }

  Field field_unchecked() const { return Field(Field::Trusted{}, modulus_); }

  void check(const FieldElement& o) const {
    if (modulus_ != o.modulus_) {
      throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
    }
  }

  std::uint32_t value_;
  std::uint32_t modulus_;
};

inline FieldElement Field::element(std::uint64_t value) const {
  return FieldElement(*this, value);
}
inline FieldElement Field::zero() const { return FieldElement(*this, 0); }
inline FieldElement Field::one() const { return FieldElement(*this, 1); }

enum class ArithOp { kAdd, kSub, kMul };

inline FieldElement arith(ArithOp op, const FieldElement& a,
                          const FieldElement& b) {
  switch (op) {
    case ArithOp::kAdd:
      return a + b;
    case ArithOp::kSub:
      return a - b;
    case ArithOp::kMul:
      return a * b;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown arithmetic op");
}

inline FieldElement inv(const FieldElement& a) { return a.inverse(); }

inline FieldElement pow(const FieldElement& a, std::uint64_t e) {
  return a.pow(e);
}

// Deterministic random source. The whole stream is a function of the seed.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_word() { return engine_(); }

  // Uniform on [0, bound) by rejection of the biased tail of 64-bit words.
  std::uint32_t uniform_below(std::uint32_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
    std::uint64_t w;
    do {
      w = engine_();
    } while (w > limit);
    return static_cast<std::uint32_t>(w % bound);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

inline std::vector<FieldElement> sample_uniform(const Field& field,
                                                SeededRng& rng,
                                                std::size_t count) {
  std::vector<FieldElement> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(field.element(rng.uniform_below(field.modulus())));
  }
  return out;
}

}  // namespace pmsr

#endif  // PMSR_FIELD_HPP_
