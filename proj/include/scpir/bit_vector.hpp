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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scpir/error.hpp"

namespace scpir {

// Packed bit string. Bit i lives in byte i / 8 at bit position i % 8, i.e.
// bit 0 is the least significant bit of the first byte, which is also the
// on-disk library layout.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), bytes_((size + 7) / 8) {}

  static BitVector from_bytes(std::span<const std::uint8_t> bytes,
                              std::size_t size) {
    require(bytes.size() == (size + 7) / 8, ErrorCode::kInvalidParameter,
            "byte count does not match bit length");
    BitVector out(size);
    out.bytes_.assign(bytes.begin(), bytes.end());
    out.clear_padding();
    return out;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool get(std::size_t i) const {
    require(i < size_, ErrorCode::kInvalidParameter, "bit index out of range");
    return (bytes_[i >> 3] >> (i & 7)) & 1U;
  }

  void set(std::size_t i, bool value) {
    require(i < size_, ErrorCode::kInvalidParameter, "bit index out of range");
    const auto mask = static_cast<std::uint8_t>(1U << (i & 7));
    if (value) {
      bytes_[i >> 3] |= mask;
    } else {
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }
  }

  BitVector slice(std::size_t offset, std::size_t length) const {
    require(offset + length <= size_, ErrorCode::kInvalidParameter,
            "slice out of range");
    BitVector out(length);
    for (std::size_t i = 0; i < length; ++i) out.set(i, get(offset + i));
    return out;
  }

  void append(const BitVector& other) {
    const auto base = size_;
    size_ += other.size_;
    bytes_.resize((size_ + 7) / 8);
    for (std::size_t i = 0; i < other.size_; ++i) set(base + i, other.get(i));
  }

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  std::size_t popcount() const noexcept {
    std::size_t n = 0;
    for (const auto b : bytes_) n += static_cast<std::size_t>(__builtin_popcount(b));
    return n;
  }

  std::string to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if (get(i)) out[i] = '1';
    }
    return out;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void clear_padding() {
    if (size_ % 8 != 0 && !bytes_.empty()) {
      bytes_.back() &= static_cast<std::uint8_t>((1U << (size_ % 8)) - 1);
    }
  }

  std::size_t size_ = 0;
  std::vector<std::uint8_t> bytes_;
};

}  // namespace scpir
