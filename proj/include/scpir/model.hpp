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

#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scpir/bit_vector.hpp"
#include "scpir/error.hpp"
#include "scpir/random.hpp"
#include "scpir/rational.hpp"

namespace scpir {

// K equal-length messages. Immutable after construction.
class Library {
 public:
  explicit Library(std::vector<BitVector> messages)
      : messages_(std::move(messages)) {
    require(!messages_.empty(), ErrorCode::kInvalidParameter,
            "library needs at least one message");
    require(messages_.front().size() >= 1, ErrorCode::kInvalidParameter,
            "messages need at least one bit");
    for (const auto& m : messages_) {
      require(m.size() == messages_.front().size(),
              ErrorCode::kInvalidParameter, "messages differ in length");
    }
  }

  std::size_t message_count() const noexcept { return messages_.size(); }
  std::size_t message_length() const noexcept { return messages_.front().size(); }
  const BitVector& message(std::size_t k) const { return messages_.at(k); }
  const std::vector<BitVector>& messages() const noexcept { return messages_; }

  friend bool operator==(const Library&, const Library&) = default;

 private:
  std::vector<BitVector> messages_;
};

// Pseudo-random library; message k is drawn from stream (seed, k), so its
// content does not depend on K.
inline Library build_library(std::size_t message_count, std::size_t length,
                             std::uint64_t seed) {
  require(message_count >= 1, ErrorCode::kInvalidParameter, "K must be >= 1");
  require(length >= 1, ErrorCode::kInvalidParameter, "L must be >= 1");
  std::vector<BitVector> messages;
  messages.reserve(message_count);
  for (std::size_t k = 0; k < message_count; ++k) {
    SplitMix64 rng(derive_seed(seed, {0x4c1b, k}));
    BitVector bits(length);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < length; ++i) {
      if (i % 64 == 0) word = rng.next();
      bits.set(i, (word >> (i % 64)) & 1U);
    }
    messages.push_back(std::move(bits));
  }
  return Library(std::move(messages));
}

// Binary library file: three little-endian u64 (magic, K, L) then K blocks of
// ceil(L/8) bytes, bit 0 = LSB of the first byte of each block.
inline constexpr std::uint64_t kLibraryMagic = 0x31424c5249504353ULL;  // "SCPIRLB1"

namespace detail {
inline void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> buf{};
  for (std::size_t i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

inline std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  require(in.gcount() == 8, ErrorCode::kIo, "truncated library header");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
  return v;
}
}  // namespace detail

inline void write_library(std::ostream& out, const Library& library) {
  detail::put_u64(out, kLibraryMagic);
  detail::put_u64(out, library.message_count());
  detail::put_u64(out, library.message_length());
  for (const auto& m : library.messages()) {
    const auto bytes = m.bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  require(static_cast<bool>(out), ErrorCode::kIo, "failed writing library");
}

inline Library read_library(std::istream& in) {
  require(detail::get_u64(in) == kLibraryMagic, ErrorCode::kIo,
          "not a library file (bad magic)");
  const auto k = detail::get_u64(in);
  const auto l = detail::get_u64(in);
  require(k >= 1 && l >= 1, ErrorCode::kIo, "library header has zero K or L");
  std::vector<BitVector> messages;
  std::vector<std::uint8_t> buf((l + 7) / 8);
  for (std::uint64_t i = 0; i < k; ++i) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    require(in.gcount() == static_cast<std::streamsize>(buf.size()), ErrorCode::kIo,
            "truncated library body");
    messages.push_back(BitVector::from_bytes(buf, l));
  }
  return Library(std::move(messages));
}

// Location of one bit: message k, sub-message group f, bit j inside W_{k,f}.
// All indices are zero-based in code; the wire forms print them one-based.
struct BitAddress {
  std::size_t message = 0;
  std::size_t submessage = 0;
  std::size_t bit = 0;

  friend auto operator<=>(const BitAddress&, const BitAddress&) = default;
};

// Sizes alpha_f * L of the sub-messages. Throws when any is not a positive
// integer or when the weights do not sum to one.
inline std::vector<std::size_t> submessage_lengths(std::span<const Rational> alpha,
                                                   std::size_t length) {
  require(!alpha.empty(), ErrorCode::kInvalidParameter, "empty split");
  Rational total(0);
  std::vector<std::size_t> sizes;
  sizes.reserve(alpha.size());
  for (const auto& a : alpha) {
    require(a > 0, ErrorCode::kInvalidParameter, "split weights must be positive");
    total += a;
    const Rational bits = a * static_cast<std::int64_t>(length);
    require(is_integer(bits) && bits.numerator() >= 1,
            ErrorCode::kMessageLengthIncompatible,
            "alpha=" + to_string(a) + " times L=" + std::to_string(length) +
                " is not a positive integer");
    sizes.push_back(static_cast<std::size_t>(bits.numerator()));
  }
  require(total == 1, ErrorCode::kInvalidParameter,
          "split weights sum to " + to_string(total) + ", not 1");
  return sizes;
}

inline std::vector<BitVector> split_message(const BitVector& message,
                                            std::span<const Rational> alpha) {
  const auto sizes = submessage_lengths(alpha, message.size());
  std::vector<BitVector> parts;
  parts.reserve(sizes.size());
  std::size_t offset = 0;
  for (const auto s : sizes) {
    parts.push_back(message.slice(offset, s));
    offset += s;
  }
  return parts;
}

// Position of an address inside message k's bit-vector, given the
// sub-message sizes. Sub-messages are contiguous slices in declared order.
inline std::size_t bit_position(const BitAddress& address,
                                std::span<const std::size_t> sizes) {
  require(address.submessage < sizes.size() && address.bit < sizes[address.submessage],
          ErrorCode::kInvalidParameter, "address outside its sub-message");
  std::size_t offset = 0;
  for (std::size_t f = 0; f < address.submessage; ++f) offset += sizes[f];
  return offset + address.bit;
}

enum class PlacementKind { kPartition, kCyclic, kMixed, kCustom };

constexpr std::string_view to_string(PlacementKind kind) {
  switch (kind) {
    case PlacementKind::kPartition: return "partition";
    case PlacementKind::kCyclic: return "cyclic";
    case PlacementKind::kMixed: return "mixed";
    case PlacementKind::kCustom: return "custom";
  }
  return "custom";
}

inline PlacementKind parse_placement_kind(std::string_view text) {
  if (text == "partition") return PlacementKind::kPartition;
  if (text == "cyclic") return PlacementKind::kCyclic;
  if (text == "mixed") return PlacementKind::kMixed;
  if (text == "custom") return PlacementKind::kCustom;
  fail(ErrorCode::kInvalidParameter, "unknown placement kind '" + std::string(text) + "'");
}

// Who stores what: group f holds sub-messages W_{1,f}..W_{K,f} (weight
// alpha[f]) at every database listed in groups[f]. Database indices are
// zero-based; each group lists its databases in cyclic window order.
struct PlacementSpec {
  std::size_t databases = 0;
  Rational t{1};
  std::vector<Rational> alpha;
  std::vector<std::vector<std::size_t>> groups;
  PlacementKind kind = PlacementKind::kCustom;

  std::size_t group_count() const noexcept { return alpha.size(); }

  // Sum of alpha_f over the groups database n belongs to.
  Rational load(std::size_t database) const {
    Rational total(0);
    for (std::size_t f = 0; f < groups.size(); ++f) {
      if (std::find(groups[f].begin(), groups[f].end(), database) != groups[f].end()) {
        total += alpha.at(f);
      }
    }
    return total;
  }

  std::vector<std::size_t> groups_of(std::size_t database) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < groups.size(); ++f) {
      if (std::find(groups[f].begin(), groups[f].end(), database) != groups[f].end()) {
        out.push_back(f);
      }
    }
    return out;
  }

  friend bool operator==(const PlacementSpec&, const PlacementSpec&) = default;
};

// Contents Z_n of one database: every sub-message of every group it belongs
// to, for all K messages.
class DatabaseStore {
 public:
  DatabaseStore(const Library& library, const PlacementSpec& placement,
                std::size_t database)
      : database_(database) {
    require(database < placement.databases, ErrorCode::kInvalidParameter,
            "database index out of range");
    const auto sizes = submessage_lengths(placement.alpha, library.message_length());
    std::vector<std::size_t> offsets(sizes.size(), 0);
    std::partial_sum(sizes.begin(), sizes.end() - 1, offsets.begin() + 1);
    for (const auto f : placement.groups_of(database)) {
      auto& slot = contents_[f];
      for (const auto& message : library.messages()) {
        slot.push_back(message.slice(offsets[f], sizes[f]));
      }
    }
  }

  std::size_t database() const noexcept { return database_; }

  bool contains(const BitAddress& a) const {
    const auto it = contents_.find(a.submessage);
    return it != contents_.end() && a.message < it->second.size() &&
           a.bit < it->second[a.message].size();
  }

  bool bit(const BitAddress& a) const {
    require(contains(a), ErrorCode::kPrivacyBreakingQuery,
            "database " + std::to_string(database_ + 1) + " does not store bit " +
                std::to_string(a.message + 1) + ":" + std::to_string(a.submessage + 1) +
                ":" + std::to_string(a.bit + 1));
    return contents_.at(a.submessage)[a.message].get(a.bit);
  }

  std::vector<std::size_t> stored_groups() const {
    std::vector<std::size_t> out;
    for (const auto& [f, _] : contents_) out.push_back(f);
    return out;
  }

  std::size_t stored_bits() const {
    std::size_t total = 0;
    for (const auto& [_, parts] : contents_) {
      for (const auto& p : parts) total += p.size();
    }
    return total;
  }

  // Every stored address, in (message, submessage, bit) order.
  std::vector<BitAddress> stored_addresses() const {
    std::vector<BitAddress> out;
    for (const auto& [f, parts] : contents_) {
      for (std::size_t k = 0; k < parts.size(); ++k) {
        for (std::size_t j = 0; j < parts[k].size(); ++j) out.push_back({k, f, j});
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t database_;
  std::map<std::size_t, std::vector<BitVector>> contents_;
};

}  // namespace scpir
