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

#ifndef PMSR_ERROR_HPP_
#define PMSR_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmsr {

enum class ErrorCode {
  kInvalidArgument,
  kIncompatibleFields,
  kZeroInverse,
  kDimensionMismatch,
  kSingular,
  kDegeneratePoints,
  kOutOfRange,
  kFieldTooSmall,
  kLambdaCollision,
  kRankDeficiency,
  kWrongLength,
  kCorruptMessageMatrix,
  kRepeatedIndex,
  kUnderdetermined,
  kCorruptShares,
  kInvalidEncodingMatrix,
  kIncompleteResponses,
  kCorruptResponses,
  kBadFrame,
  kUnknownKind,
  kNotFound,
  kConfigMismatch,
  kTransport,
  kRetrievalUnavailable,
  kInsufficientHelpers,
  kIo,
};

// All library failures are reported by throwing pmsr::Error. The code is
// stable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by inversion and solves; carries the rank reached by elimination.
class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(std::size_t rank)
      : Error(ErrorCode::kSingular,
              "singular (rank " + std::to_string(rank) + ")"),
        rank_(rank) {}

  std::size_t rank() const noexcept { return rank_; }

 private:
  std::size_t rank_;
};

}  // namespace pmsr

#endif  // PMSR_ERROR_HPP_
