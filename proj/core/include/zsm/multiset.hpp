#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include "zsm/errors.hpp"

namespace zsm {

inline long long checked_add(long long a, long long b) {
  long long r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("multiset count overflow in addition");
  return r;
}

inline long long checked_mul(long long a, long long b) {
  long long r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("multiset count overflow in scaling");
  return r;
}

/// Finite multiset over an ordered key type. Kept in normal form: entries are
/// sorted by key and never carry a zero count. Counts are signed 64-bit and
/// arithmetic is overflow-checked; values are immutable in normal use (all
/// operations return fresh multisets), so shared concurrent reads are safe.
template <typename Key>
class Multiset {
 public:
  using count_type = long long;
  using entry_type = std::pair<Key, count_type>;
  using const_iterator = typename std::vector<entry_type>::const_iterator;

  Multiset() = default;

  Multiset(std::initializer_list<entry_type> entries) {
    for (const auto& [k, c] : entries) add(k, c);
  }

  static Multiset zero() { return Multiset(); }

  /// Adds `c` occurrences of `k` (building block for parsers and compilers).
  void add(const Key& k, count_type c) {
    if (c < 0) throw Error("negative multiset count");
    if (c == 0) return;
    auto it = lower_bound(k);
    if (it != entries_.end() && it->first == k) {
      it->second = checked_add(it->second, c);
    } else {
      entries_.insert(it, {k, c});
    }
  }

  count_type count(const Key& k) const {
    auto it = lower_bound(k);
    return (it != entries_.end() && it->first == k) ? it->second : 0;
  }

  bool contains(const Key& k) const { return count(k) > 0; }

  bool empty() const { return entries_.empty(); }

  /// Number of distinct keys.
  std::size_t distinct() const { return entries_.size(); }

  /// Total number of occurrences, |m|.
  count_type cardinality() const {
    count_type total = 0;
    for (const auto& e : entries_) total = checked_add(total, e.second);
    return total;
  }

  /// Componentwise sum.
  Multiset plus(const Multiset& other) const {
    Multiset out;
    out.entries_.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin(), b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
      if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
        out.entries_.push_back(*a++);
      } else if (a == entries_.end() || b->first < a->first) {
        out.entries_.push_back(*b++);
      } else {
        out.entries_.push_back({a->first, checked_add(a->second, b->second)});
        ++a;
        ++b;
      }
    }
    return out;
  }

  /// Truncated difference: counts that would go negative clamp to zero.
  Multiset minus(const Multiset& other) const {
    Multiset out;
    out.entries_.reserve(entries_.size());
    for (const auto& [k, c] : entries_) {
      count_type d = c - other.count(k);
      if (d > 0) out.entries_.push_back({k, d});
    }
    return out;
  }

  Multiset scaled(count_type j) const {
    if (j < 0) throw Error("negative scalar for multiset");
    Multiset out;
    if (j == 0) return out;
    out.entries_.reserve(entries_.size());
    for (const auto& [k, c] : entries_) out.entries_.push_back({k, checked_mul(j, c)});
    return out;
  }

  /// Pointwise <=, the sub-multiset order.
  bool leq(const Multiset& other) const {
    for (const auto& [k, c] : entries_)
      if (c > other.count(k)) return false;
    return true;
  }

  std::vector<Key> support() const {
    std::vector<Key> keys;
    keys.reserve(entries_.size());
    for (const auto& e : entries_) keys.push_back(e.first);
    return keys;
  }

  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }

  bool operator==(const Multiset& other) const { return entries_ == other.entries_; }
  bool operator!=(const Multiset& other) const { return entries_ != other.entries_; }
  bool operator<(const Multiset& other) const { return entries_ < other.entries_; }

 private:
  typename std::vector<entry_type>::iterator lower_bound(const Key& k) {
    return std::lower_bound(entries_.begin(), entries_.end(), k,
                            [](const entry_type& e, const Key& key) { return e.first < key; });
  }
  typename std::vector<entry_type>::const_iterator lower_bound(const Key& k) const {
    return std::lower_bound(entries_.begin(), entries_.end(), k,
                            [](const entry_type& e, const Key& key) { return e.first < key; });
  }

  std::vector<entry_type> entries_;
};

}  // namespace zsm
