// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ifds {

// Fixed-width bit vector with the word-level operations the reachability
// tables need (bulk OR, masked OR). Bits at positions >= size() stay zero.
class BitVec {
public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }

  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t(1) << (i & 63); }
  void clear(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }
  void reset() { std::fill(w_.begin(), w_.end(), 0); }

  // this |= other. Both operands must have equal size.
  void or_with(const BitVec &other) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= other.w_[k];
  }

  // this |= (other & mask). All three must have equal size.
  void or_masked(const BitVec &other, const BitVec &mask) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= other.w_[k] & mask.w_[k];
  }

  bool any() const {
    for (std::uint64_t w : w_)
      if (w) return true;
    return false;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : w_) c += std::popcount(w);
    return c;
  }

  // Invokes fn(i) for every set bit, in increasing order of i.
  template <class Fn> void for_each_set(Fn &&fn) const {
    for (std::size_t k = 0; k < w_.size(); ++k) {
      std::uint64_t m = w_[k];
      while (m) {
        fn((k << 6) + std::countr_zero(m));
        m &= m - 1;
      }
    }
  }

  bool operator==(const BitVec &) const = default;

  const std::vector<std::uint64_t> &words() const { return w_; }
  std::vector<std::uint64_t> &words() { return w_; }

private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> w_;
};

} // namespace ifds
