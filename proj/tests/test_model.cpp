// Copyright 2026 The scpir Authors
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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <vector>

#include "scpir/model.hpp"
#include "scpir/placement.hpp"
#include "scpir/rational.hpp"

namespace scpir {
namespace {

TEST(RationalTest, ArithmeticStaysInLowestTerms) {
  const Rational a(2, 4);
  EXPECT_EQ(a.numerator(), 1);
  EXPECT_EQ(a.denominator(), 2);
  EXPECT_EQ(a + Rational(1, 3), Rational(5, 6));
  EXPECT_EQ(Rational(3, -6), Rational(-1, 2));
  EXPECT_EQ(Rational(7, 3) * 3, Rational(7));
  EXPECT_TRUE(Rational(1, 2) < 1);
  EXPECT_TRUE(Rational(1) == 1);
  EXPECT_NE(Rational(1, 2), 1);
}

TEST(RationalTest, FloorCeilAndParsing) {
  EXPECT_EQ(floor(Rational(5, 2)), 2);
  EXPECT_EQ(ceil(Rational(5, 2)), 3);
  EXPECT_EQ(floor(Rational(-1, 2)), -1);
  EXPECT_EQ(ceil(Rational(3)), 3);
  EXPECT_EQ(parse_rational("3/5"), Rational(3, 5));
  EXPECT_EQ(parse_rational("4"), Rational(4));
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_THROW(parse_rational("0.5"), Error);
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational(""), Error);
}

TEST(RationalTest, OverflowIsReportedNotWrapped) {
  const Rational big(INT64_MAX / 2 + 1);
  EXPECT_THROW(big * 4, Error);
  EXPECT_THROW(Rational(1, INT64_MAX) * Rational(1, 3), Error);
}

TEST(IntegerHelpersTest, BinomialAndPowers) {
  EXPECT_EQ(binomial(4, 2), 6);
  EXPECT_EQ(binomial(5, 3), 10);
  EXPECT_EQ(binomial(12, 0), 1);
  EXPECT_EQ(ipow(3, 4), 81);
  EXPECT_EQ(checked_lcm(4, 6), 12);
  EXPECT_THROW(ipow(10, 30), Error);
}

TEST(BuildLibraryTest, ShapesMatchRequest) {
  const auto lib = build_library(3, 16, 7);
  EXPECT_EQ(lib.message_count(), 3u);
  EXPECT_EQ(lib.message_length(), 16u);
  for (const auto& m : lib.messages()) EXPECT_EQ(m.size(), 16u);

  const auto tiny = build_library(1, 1, 0);
  EXPECT_EQ(tiny.message_count(), 1u);
  EXPECT_EQ(tiny.message_length(), 1u);
}

TEST(BuildLibraryTest, DeterministicInSeed) {
  EXPECT_EQ(build_library(3, 100, 42), build_library(3, 100, 42));
  EXPECT_NE(build_library(3, 100, 42), build_library(3, 100, 43));
}

TEST(BuildLibraryTest, RejectsZeroSizes) {
  try {
    build_library(0, 8, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
  }
  EXPECT_THROW(build_library(2, 0, 1), Error);
}

TEST(BuildLibraryTest, BitsAreRoughlyBalanced) {
  const auto lib = build_library(1, 1 << 14, 9);
  const auto ones = lib.message(0).popcount();
  EXPECT_GT(ones, (1u << 13) - 400);
  EXPECT_LT(ones, (1u << 13) + 400);
}

TEST(LibraryFileTest, RoundTripsAndUsesDocumentedLayout) {
  for (const std::size_t length : {1u, 7u, 8u, 9u, 63u, 200u}) {
    const auto lib = build_library(3, length, length);
    std::stringstream buf;
    write_library(buf, lib);
    const auto bytes = buf.str();
    ASSERT_EQ(bytes.size(), 24 + 3 * ((length + 7) / 8));
    EXPECT_EQ(bytes.substr(0, 8), "SCPIRLB1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
    EXPECT_EQ(static_cast<unsigned char>(bytes[16]), length & 0xff);
    // bit 0 of message 1 = LSB of its first byte.
    EXPECT_EQ((static_cast<unsigned char>(bytes[24]) & 1U) != 0, lib.message(0).get(0));
    EXPECT_EQ(read_library(buf), lib);
  }
}

TEST(LibraryFileTest, RejectsGarbage) {
  std::stringstream bad("not a library at all, definitely");
  EXPECT_THROW(read_library(bad), Error);
  std::stringstream truncated;
  write_library(truncated, build_library(2, 64, 1));
  auto text = truncated.str();
  text.resize(text.size() - 3);
  std::stringstream cut(text);
  EXPECT_THROW(read_library(cut), Error);
}

TEST(SplitMessageTest, TwoHalves) {
  const auto lib = build_library(1, 16, 3);
  const std::vector<Rational> alpha{Rational(1, 2), Rational(1, 2)};
  const auto parts = split_message(lib.message(0), alpha);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].size(), 8u);
  EXPECT_EQ(parts[1].size(), 8u);
  EXPECT_EQ(parts[0], lib.message(0).slice(0, 8));
}

TEST(SplitMessageTest, FiveThreeBitSlices) {
  const auto lib = build_library(1, 15, 3);
  const std::vector<Rational> alpha(5, Rational(1, 5));
  const auto parts = split_message(lib.message(0), alpha);
  ASSERT_EQ(parts.size(), 5u);
  for (const auto& p : parts) EXPECT_EQ(p.size(), 3u);
}

TEST(SplitMessageTest, IdentitySplit) {
  const auto lib = build_library(1, 8, 3);
  const std::vector<Rational> alpha{Rational(1)};
  const auto parts = split_message(lib.message(0), alpha);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0], lib.message(0));
}

TEST(SplitMessageTest, NonIntegralSliceIsRejected) {
  const auto lib = build_library(1, 16, 3);
  const std::vector<Rational> alpha{Rational(1, 3), Rational(2, 3)};
  try {
    split_message(lib.message(0), alpha);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMessageLengthIncompatible);
  }
  const std::vector<Rational> short_sum{Rational(1, 2), Rational(1, 4)};
  EXPECT_THROW(split_message(lib.message(0), short_sum), Error);
}

// Random weight vectors built from a common denominator; concatenating the
// slices must give back the message.
TEST(SplitMessageTest, ReassemblyProperty) {
  SplitMix64 rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    const auto parts = 1 + rng.below(6);
    std::vector<std::int64_t> shares(parts, 1);
    const auto extra = rng.below(10);
    for (std::uint64_t i = 0; i < extra; ++i) ++shares[rng.below(parts)];
    std::int64_t total = 0;
    for (const auto s : shares) total += s;
    std::vector<Rational> alpha;
    for (const auto s : shares) alpha.emplace_back(s, total);
    const auto length = static_cast<std::size_t>(total * static_cast<std::int64_t>(1 + rng.below(5)));
    const auto lib = build_library(1, length, static_cast<std::uint64_t>(iter));
    BitVector joined;
    for (const auto& p : split_message(lib.message(0), alpha)) joined.append(p);
    ASSERT_EQ(joined, lib.message(0));
  }
}

TEST(BitAddressTest, AddressesCoverEveryPositionOnce) {
  const std::vector<Rational> alpha{Rational(1, 4), Rational(1, 2), Rational(1, 4)};
  const auto sizes = submessage_lengths(alpha, 24);
  std::set<std::size_t> seen;
  for (std::size_t f = 0; f < sizes.size(); ++f) {
    for (std::size_t j = 0; j < sizes[f]; ++j) {
      EXPECT_TRUE(seen.insert(bit_position({0, f, j}, sizes)).second);
    }
  }
  EXPECT_EQ(seen.size(), 24u);
  EXPECT_EQ(*seen.rbegin(), 23u);
  EXPECT_THROW(bit_position({0, 1, 12}, sizes), Error);
}

TEST(DatabaseStoreTest, HoldsExactlyItsGroups) {
  const auto lib = build_library(3, 16, 5);
  const auto placement = partition_placement(4, 2);
  const DatabaseStore db1(lib, placement, 0);
  const DatabaseStore db3(lib, placement, 2);
  EXPECT_EQ(db1.stored_groups(), std::vector<std::size_t>{0});
  EXPECT_EQ(db3.stored_groups(), std::vector<std::size_t>{1});
  EXPECT_EQ(db1.stored_bits(), 24u);
  EXPECT_TRUE(db1.contains({2, 0, 7}));
  EXPECT_FALSE(db1.contains({2, 1, 0}));
  EXPECT_EQ(db3.bit({1, 1, 3}), lib.message(1).get(8 + 3));
  try {
    db1.bit({0, 1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrivacyBreakingQuery);
  }
}

// Stored addresses are exactly {(k,f,j) : n in N_f}, and the bit count never
// exceeds mu K L, for every constructor and a spread of parameters.
TEST(DatabaseStoreTest, StorageBoundHoldsExactly) {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (std::size_t t = 1; t <= n; ++t) {
      std::vector<PlacementSpec> specs{cyclic_placement(n, t)};
      if (n % t == 0) specs.push_back(partition_placement(n, t));
      for (const auto& spec : specs) {
        const std::size_t k = 2;
        const std::size_t length = n * 6;
        const auto lib = build_library(k, length, n * 31 + t);
        const Rational mu(static_cast<std::int64_t>(t), static_cast<std::int64_t>(n));
        for (std::size_t db = 0; db < n; ++db) {
          const DatabaseStore store(lib, spec, db);
          const Rational stored(static_cast<std::int64_t>(store.stored_bits()));
          EXPECT_LE(stored, mu * static_cast<std::int64_t>(k * length));
          const auto sizes = submessage_lengths(spec.alpha, length);
          std::size_t expected = 0;
          for (const auto f : spec.groups_of(db)) expected += k * sizes[f];
          EXPECT_EQ(store.stored_addresses().size(), expected);
          for (const auto& a : store.stored_addresses()) {
            const auto& g = spec.groups[a.submessage];
            EXPECT_NE(std::find(g.begin(), g.end(), db), g.end());
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace scpir
