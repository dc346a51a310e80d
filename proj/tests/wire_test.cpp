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

#include "pmsr/wire.hpp"

#include "gtest/gtest.h"
#include "pmsr/field.hpp"

namespace pmsr::wire {
namespace {

TEST(WireTest, FrameLayout) {
  const Message health = make_empty(Kind::kHealth);
  EXPECT_EQ(encode_frame(health), (std::vector<std::uint8_t>{0, 0, 0, 1, 8}));

  Writer w(2);
  w.u32(0x01020304).symbol(0x0102);
  const Message m = std::move(w).finish(Kind::kOk);
  EXPECT_EQ(encode_frame(m), (std::vector<std::uint8_t>{0, 0, 0, 7, 9, 1, 2, 3, 4, 0x02, 0x01}));
}

TEST(WireTest, FrameRoundTrip) {
  StoreRequest s{{257, 6, 3}, 2, 5, {256, 0, 17}};
  const Message m = make(s, 2);
  const Message back = decode_frame(encode_frame(m));
  EXPECT_EQ(back.kind, m.kind);
  const auto parsed = parse_store(back, 2);
  EXPECT_EQ(parsed.tag, s.tag);
  EXPECT_EQ(parsed.record, 2u);
  EXPECT_EQ(parsed.stripe, 5u);
  EXPECT_EQ(parsed.row, s.row);
}

TEST(WireTest, AllMessagesRoundTrip) {
  QueryRequest q{{13, 6, 3}, 1, {1, 2, 3}, 3, 6, {}};
  for (std::uint32_t i = 0; i < 18; ++i) q.matrix.push_back(i % 13);
  const auto pq = parse_query(decode_frame(encode_frame(make(q, 1))), 1);
  EXPECT_EQ(pq.records, q.records);
  EXPECT_EQ(pq.rows, 3u);
  EXPECT_EQ(pq.cols, 6u);
  EXPECT_EQ(pq.matrix, q.matrix);

  const auto ph = parse_repair_help(make(RepairHelpRequest{{13, 6, 3}, 4, 2, 1}, 2));
  EXPECT_EQ(ph.failed, 4u);
  EXPECT_EQ(ph.record, 2u);
  EXPECT_EQ(ph.stripe, 1u);

  EXPECT_EQ(parse_get_share(make_get_share({7, 3})).record, 7u);
  EXPECT_EQ(parse_delete(make(DeleteRequest{7, 3})).from_stripe, 3u);
  EXPECT_EQ(parse_symbol(make_symbol(Kind::kRepairSymbol, 300, 2), 2), 300u);
  const std::vector<std::uint32_t> ans{1, 2, 65535};
  EXPECT_EQ(parse_symbols(make_symbols(Kind::kAnswer, ans, 2), 2), ans);

  const auto e = parse_error(make_error(ErrorCode::kNotFound, "not found"));
  EXPECT_EQ(e.code, ErrorCode::kNotFound);
  EXPECT_EQ(e.message, "not found");
}

TEST(WireTest, Rejections) {
  EXPECT_THROW(decode_frame(std::vector<std::uint8_t>{0, 0}), Error);
  EXPECT_THROW(decode_frame(std::vector<std::uint8_t>{0, 0, 0, 0}), Error);
  EXPECT_THROW(decode_frame(std::vector<std::uint8_t>{0, 0, 0, 3, 8}), Error);
  // Length prefix above 16 MiB.
  std::array<std::uint8_t, 4> huge{0x01, 0x00, 0x00, 0x01};
  try {
    (void)decode_length(huge);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadFrame);
  }
  // Truncated and over-long bodies.
  Message m = make(StoreRequest{{13, 6, 3}, 1, 0, {1, 2}}, 1);
  m.body.pop_back();
  EXPECT_THROW(parse_store(m, 1), Error);
  m.body.push_back(0);
  m.body.push_back(0);
  EXPECT_THROW(parse_store(m, 1), Error);

  Writer w(1);
  EXPECT_THROW(w.symbol(256), Error);
  EXPECT_THROW(Writer(5), Error);
}

TEST(WireTest, ExpectSurfacesRemoteErrors) {
  try {
    (void)expect(make_error(ErrorCode::kConfigMismatch, "config mismatch"), Kind::kOk);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigMismatch);
  }
  EXPECT_THROW(expect(make_empty(Kind::kOk), Kind::kAnswer), Error);
  EXPECT_NO_THROW(expect(make_empty(Kind::kOk), Kind::kOk));
}

TEST(WireTest, RandomSymbolVectorsRoundTrip) {
  SeededRng rng(31);
  for (std::size_t width : {1u, 2u, 3u, 4u}) {
    const std::uint64_t bound = width == 4 ? 0xffffffffull : (1ull << (8 * width));
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::uint32_t> vs(rng.uniform_below(40));
      for (auto& v : vs) v = static_cast<std::uint32_t>(rng.next_word() % bound);
      ASSERT_EQ(parse_symbols(decode_frame(encode_frame(make_symbols(Kind::kShare, vs, width))), width), vs);
    }
  }
}

}  // namespace
}  // namespace pmsr::wire
