#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "hoeffding/error.hpp"
#include "hoeffding/rational.hpp"

namespace hoeffding {

/// A finite multiset over symbols 0..k-1, stored as a multiplicity vector.
class Multiset {
 public:
  Multiset() = default;
  explicit Multiset(std::size_t alphabet_size) : counts_(alphabet_size, 0) {}
  explicit Multiset(std::vector<int> counts) : counts_(std::move(counts)) {
    for (int m : counts_) {
      if (m < 0) fail(ErrorKind::InvalidArgument, "negative multiplicity");
    }
  }

  static Multiset from_tuple(std::span<const int> tuple, std::size_t alphabet_size) {
    Multiset out(alphabet_size);
    for (int s : tuple) {
      if (s < 0 || static_cast<std::size_t>(s) >= alphabet_size) fail(ErrorKind::UnknownSymbol, "symbol index out of range");
      ++out.counts_[s];
    }
    return out;
  }

  std::size_t alphabet_size() const { return counts_.size(); }
  int size() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }
  bool empty() const { return size() == 0; }
  int operator[](std::size_t symbol) const { return counts_[symbol]; }
  const std::vector<int>& counts() const { return counts_; }

  void add(int symbol, int times = 1) { counts_[symbol] += times; }

  /// Non-decreasing tuple listing each symbol with its multiplicity.
  std::vector<int> to_tuple() const {
    std::vector<int> out;
    out.reserve(size());
    for (std::size_t a = 0; a < counts_.size(); ++a) out.insert(out.end(), counts_[a], static_cast<int>(a));
    return out;
  }

  bool contains(const Multiset& other) const {
    for (std::size_t a = 0; a < counts_.size(); ++a) {
      if (other.counts_[a] > counts_[a]) return false;
    }
    return true;
  }

  friend Multiset operator+(Multiset lhs, const Multiset& rhs) {
    for (std::size_t a = 0; a < lhs.counts_.size(); ++a) lhs.counts_[a] += rhs.counts_[a];
    return lhs;
  }
  friend Multiset operator-(Multiset lhs, const Multiset& rhs) {
    for (std::size_t a = 0; a < lhs.counts_.size(); ++a) {
      lhs.counts_[a] -= rhs.counts_[a];
      if (lhs.counts_[a] < 0) fail(ErrorKind::InvalidArgument, "multiset difference underflow");
    }
    return lhs;
  }

  friend bool operator==(const Multiset&, const Multiset&) = default;
  /// Orders by the non-decreasing tuple, lexicographically ({a,a} < {a,b} < {b,b}).
  friend bool operator<(const Multiset& lhs, const Multiset& rhs) {
    if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
    return lhs.to_tuple() < rhs.to_tuple();
  }

 private:
  std::vector<int> counts_;
};

/// Number of distinct orderings of the multiset.
inline Integer multinomial(const Multiset& ms) {
  Integer out = factorial(ms.size());
  for (int m : ms.counts()) out /= factorial(m);
  return out;
}

/// Number of ways to pick the positions of `sub` inside an ordered realisation of `whole`:
/// the count of index subsets j with whole_j equal to sub as a multiset.
inline Integer embedding_count(const Multiset& whole, const Multiset& sub) {
  Integer out = 1;
  for (std::size_t a = 0; a < whole.alphabet_size(); ++a) out *= binomial(whole[a], sub[a]);
  return out;
}

/// Calls `visit` for every multiset of size n over k symbols, in tuple-lexicographic order.
inline void for_each_multiset(std::size_t k, int n, const std::function<void(const Multiset&)>& visit) {
  if (k == 0) {
    if (n == 0) visit(Multiset(std::size_t{0}));
    return;
  }
  std::vector<int> counts(k, 0);
  // Tuple-lex order puts larger multiplicities of earlier symbols first.
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int remaining) {
    if (pos + 1 == k) {
      counts[pos] = remaining;
      visit(Multiset(counts));
      counts[pos] = 0;
      return;
    }
    for (int m = remaining; m >= 0; --m) {
      counts[pos] = m;
      rec(pos + 1, remaining - m);
    }
    counts[pos] = 0;
  };
  rec(0, n);
}

/// Calls `visit(sub)` for each sub-multiset of `whole` of the given size.
inline void for_each_submultiset(const Multiset& whole, int size, const std::function<void(const Multiset&)>& visit) {
  const std::size_t k = whole.alphabet_size();
  std::vector<int> counts(k, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int remaining) {
    if (pos == k) {
      if (remaining == 0) visit(Multiset(counts));
      return;
    }
    int hi = std::min(remaining, whole[pos]);
    for (int m = hi; m >= 0; --m) {
      counts[pos] = m;
      rec(pos + 1, remaining - m);
    }
    counts[pos] = 0;
  };
  if (size >= 0 && size <= whole.size()) rec(0, size);
}

/// All multisets of a fixed size, with a dense index for table storage.
class MultisetSpace {
 public:
  MultisetSpace() = default;
  MultisetSpace(std::size_t alphabet_size, int size) : alphabet_size_(alphabet_size), size_(size) {
    for_each_multiset(alphabet_size, size, [&](const Multiset& ms) {
      index_.emplace(ms.counts(), elements_.size());
      elements_.push_back(ms);
    });
  }

  std::size_t alphabet_size() const { return alphabet_size_; }
  int multiset_size() const { return size_; }
  std::size_t dimension() const { return elements_.size(); }
  const std::vector<Multiset>& elements() const { return elements_; }
  const Multiset& operator[](std::size_t i) const { return elements_[i]; }

  std::size_t index_of(const Multiset& ms) const {
    auto it = index_.find(ms.counts());
    if (it == index_.end()) fail(ErrorKind::InvalidArgument, "multiset outside the space");
    return it->second;
  }

 private:
  std::size_t alphabet_size_ = 0;
  int size_ = 0;
  std::vector<Multiset> elements_;
  std::map<std::vector<int>, std::size_t> index_;
};

/// Iterates every subset of {0..n-1} of size k as an increasing index vector.
inline void for_each_index_subset(int n, int k, const std::function<void(const std::vector<int>&)>& visit) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace hoeffding
