#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hoeffding/error.hpp"
#include "hoeffding/models.hpp"
#include "hoeffding/multiset.hpp"
#include "hoeffding/rational.hpp"

namespace hoeffding {

/// Shared, immutable multiset spaces; kernels of equal shape point at the same instance.
inline std::shared_ptr<const MultisetSpace> multiset_space(std::size_t alphabet_size, int size) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const MultisetSpace>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{alphabet_size, size}];
  if (!slot) slot = std::make_shared<const MultisetSpace>(alphabet_size, size);
  return slot;
}

/// A symmetric function of `arity` symbols, stored densely on multisets.
class SymmetricKernel {
 public:
  SymmetricKernel() = default;
  SymmetricKernel(std::size_t alphabet_size, int arity)
      : space_(multiset_space(alphabet_size, arity)), values_(space_->dimension(), Rational(0)) {}

  static SymmetricKernel zero(std::size_t alphabet_size, int arity) { return {alphabet_size, arity}; }
  static SymmetricKernel constant(std::size_t alphabet_size, int arity, const Rational& value) {
    SymmetricKernel out(alphabet_size, arity);
    std::fill(out.values_.begin(), out.values_.end(), value);
    return out;
  }

  /// Builds a kernel from a value function on multisets.
  static SymmetricKernel tabulate(std::size_t alphabet_size, int arity, const std::function<Rational(const Multiset&)>& f) {
    SymmetricKernel out(alphabet_size, arity);
    for (std::size_t i = 0; i < out.space_->dimension(); ++i) out.values_[i] = f((*out.space_)[i]);
    return out;
  }

  int arity() const { return space_->multiset_size(); }
  std::size_t alphabet_size() const { return space_->alphabet_size(); }
  const MultisetSpace& space() const { return *space_; }
  std::size_t dimension() const { return values_.size(); }
  const std::vector<Rational>& values() const { return values_; }

  const Rational& operator()(const Multiset& ms) const { return values_[space_->index_of(ms)]; }
  Rational& operator[](const Multiset& ms) { return values_[space_->index_of(ms)]; }
  const Rational& value_at(std::size_t i) const { return values_[i]; }
  Rational& value_at(std::size_t i) { return values_[i]; }

  /// Value on an ordered tuple; depends only on the tuple's multiset.
  const Rational& evaluate(std::span<const int> tuple) const {
    if (static_cast<int>(tuple.size()) != arity()) {
      fail(ErrorKind::ArityMismatch, "tuple of length " + std::to_string(tuple.size()) + " for arity " + std::to_string(arity()));
    }
    return (*this)(Multiset::from_tuple(tuple, alphabet_size()));
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](const Rational& v) { return v == 0; });
  }

  SymmetricKernel& operator+=(const SymmetricKernel& rhs) {
    check_shape(rhs);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
    return *this;
  }
  SymmetricKernel& operator-=(const SymmetricKernel& rhs) {
    check_shape(rhs);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
    return *this;
  }
  SymmetricKernel& operator*=(const Rational& s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend SymmetricKernel operator+(SymmetricKernel a, const SymmetricKernel& b) { return a += b; }
  friend SymmetricKernel operator-(SymmetricKernel a, const SymmetricKernel& b) { return a -= b; }
  friend SymmetricKernel operator*(SymmetricKernel a, const Rational& s) { return a *= s; }
  friend SymmetricKernel operator*(const Rational& s, SymmetricKernel a) { return a *= s; }

  friend bool operator==(const SymmetricKernel& a, const SymmetricKernel& b) {
    return a.arity() == b.arity() && a.alphabet_size() == b.alphabet_size() && a.values_ == b.values_;
  }

 private:
  void check_shape(const SymmetricKernel& rhs) const {
    if (rhs.arity() != arity() || rhs.alphabet_size() != alphabet_size()) fail(ErrorKind::ArityMismatch, "kernel shapes differ");
  }

  std::shared_ptr<const MultisetSpace> space_ = multiset_space(0, 0);
  std::vector<Rational> values_ = std::vector<Rational>(1);
};

/// Kernel from an explicit table; every multiset of size `arity` must appear exactly once.
inline SymmetricKernel from_table(std::size_t alphabet_size, int arity, const std::vector<std::pair<Multiset, Rational>>& entries) {
  SymmetricKernel out(alphabet_size, arity);
  std::vector<bool> seen(out.dimension(), false);
  for (const auto& [ms, value] : entries) {
    if (ms.alphabet_size() != alphabet_size || ms.size() != arity) {
      fail(ErrorKind::ArityMismatch, "table entry has the wrong size");
    }
    std::size_t i = out.space().index_of(ms);
    if (seen[i]) fail(ErrorKind::DuplicateMultiset, "multiset listed twice");
    seen[i] = true;
    out.value_at(i) = value;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) fail(ErrorKind::MissingMultiset, "table misses a multiset of size " + std::to_string(arity));
  }
  return out;
}

/// Average of f over all m! orderings of each multiset.
inline SymmetricKernel symmetrize(std::size_t alphabet_size, int m, const std::function<Rational(std::span<const int>)>& f) {
  const Integer orderings = factorial(m);
  return SymmetricKernel::tabulate(alphabet_size, m, [&](const Multiset& ms) {
    std::vector<int> base = ms.to_tuple();
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> tuple(m);
    Rational total = 0;
    do {
      for (int i = 0; i < m; ++i) tuple[i] = base[perm[i]];
      total += f(tuple);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total / Rational(orderings);
  });
}

/// Block form of the symmetrization for f that is symmetric within its first r and last m - r
/// arguments: the average over the C(m, r) ways of choosing which arguments form the first block.
inline SymmetricKernel block_symmetrize(std::size_t alphabet_size, int m, int r,
                                        const std::function<Rational(std::span<const int>)>& f) {
  const Integer blocks = binomial(m, r);
  return SymmetricKernel::tabulate(alphabet_size, m, [&](const Multiset& ms) {
    std::vector<int> base = ms.to_tuple();
    std::vector<int> tuple;
    Rational total = 0;
    for_each_index_subset(m, r, [&](const std::vector<int>& chosen) {
      tuple.clear();
      std::vector<bool> in(m, false);
      for (int i : chosen) {
        in[i] = true;
        tuple.push_back(base[i]);
      }
      for (int i = 0; i < m; ++i) {
        if (!in[i]) tuple.push_back(base[i]);
      }
      total += f(tuple);
    });
    return total / Rational(blocks);
  });
}

/// E[T(X_1, ..., X_n)] computed over multisets of size n.
template <ExchangeableLaw Law>
Rational expectation(const Law& law, const SymmetricKernel& kernel) {
  if (kernel.arity() > law.horizon()) fail(ErrorKind::LengthExceeded, "kernel arity exceeds the horizon");
  Rational total = 0;
  for (std::size_t i = 0; i < kernel.dimension(); ++i) {
    const Rational& v = kernel.value_at(i);
    if (v != 0) total += law.multiset_weight(kernel.space()[i]) * v;
  }
  return total;
}

/// E[f(X_1..X_n)] for an arbitrary value function on multisets of size n.
template <ExchangeableLaw Law>
Rational expectation_of(const Law& law, int n, const std::function<Rational(const Multiset&)>& f) {
  if (n > law.horizon()) fail(ErrorKind::LengthExceeded, "size exceeds the horizon");
  Rational total = 0;
  for_each_multiset(law.alphabet().size(), n, [&](const Multiset& ms) {
    Rational w = law.multiset_weight(ms);
    if (w != 0) total += w * f(ms);
  });
  return total;
}

enum class Builtin { Max, Min, Mean };

inline SymmetricKernel indicator_kernel(std::size_t alphabet_size, const Multiset& target) {
  SymmetricKernel out(alphabet_size, target.size());
  out[target] = 1;
  return out;
}

inline SymmetricKernel builtin_kernel(Builtin which, const Alphabet& alphabet, int arity) {
  if (!alphabet.is_numeric()) fail(ErrorKind::NonNumericAlphabet, "max/min/mean need numeric symbol values");
  return SymmetricKernel::tabulate(alphabet.size(), arity, [&](const Multiset& ms) {
    Rational best = 0, sum = 0;
    bool first = true;
    for (int a : ms.to_tuple()) {
      const Rational& v = *alphabet[a].value;
      sum += v;
      if (first || (which == Builtin::Max ? v > best : v < best)) best = v;
      first = false;
    }
    if (which == Builtin::Mean) return arity == 0 ? Rational(0) : sum / arity;
    return best;
  });
}

// ---------------------------------------------------------------------------
// Closed forms for the maximum of a finite GUS.

/// Elementary symmetric polynomials e_0..e_kmax of `values` via Newton's identities.
inline std::vector<Rational> elementary_symmetric(const std::vector<Rational>& values, int kmax) {
  std::vector<Rational> power(kmax + 1, 0);
  for (int i = 1; i <= kmax; ++i) {
    for (const auto& v : values) power[i] += pow(v, i);
  }
  std::vector<Rational> e(kmax + 1, 0);
  e[0] = 1;
  for (int k = 1; k <= kmax; ++k) {
    Rational acc = 0;
    for (int i = 1; i <= k; ++i) {
      if (i % 2) acc += e[k - i] * power[i];
      else acc -= e[k - i] * power[i];
    }
    e[k] = acc / k;
  }
  return e;
}

/// Integral of max(x_1..x_j, fixed...) against the raw product measure alpha^{(x) j}.
inline Rational alpha_max_integral(const UrnModel& model, int j, std::span<const Rational> fixed) {
  const auto& alphabet = model.alphabet();
  Rational total = 0;
  for_each_multiset(alphabet.size(), j, [&](const Multiset& ms) {
    Rational weight = Rational(multinomial(ms));
    std::optional<Rational> best;
    for (const auto& z : fixed) {
      if (!best || z > *best) best = z;
    }
    for (std::size_t a = 0; a < alphabet.size(); ++a) {
      if (ms[a] == 0) continue;
      weight *= pow(model.alpha()[a], ms[a]);
      if (!best || *alphabet[a].value > *best) best = *alphabet[a].value;
    }
    if (weight != 0) total += weight * *best;
  });
  return total;
}

namespace detail {
inline std::vector<Rational> one_to(int n) {
  std::vector<Rational> out;
  for (int i = 1; i <= n; ++i) out.emplace_back(i);
  return out;
}
}  // namespace detail

/// E[max(X_1..X_M)] as a sum over tie patterns of alpha-integrals.
inline Rational max_mean_closed_form(const UrnModel& model, int M) {
  if (!model.alphabet().is_numeric()) fail(ErrorKind::NonNumericAlphabet, "max needs numeric symbol values");
  if (M < 1 || M > model.length()) fail(ErrorKind::LengthExceeded, "M outside 1..length");
  const Rational& total = model.alpha_total();
  const Rational& c = model.c();
  Rational denom = 1;
  for (int t = 1; t <= M; ++t) denom *= total + c * (t - 1);
  auto e = elementary_symmetric(detail::one_to(M - 1), M - 1);
  Rational out = 0;
  for (int k = 0; k <= M - 1; ++k) {
    Rational coef = pow(c, k) * e[k] / denom;
    if (coef != 0) out += coef * alpha_max_integral(model, M - k, {});
  }
  return out;
}

/// Which elementary-symmetric range feeds the conditional tie counts.
enum class MaxFormVariant {
  /// Ties among the M - level free draws only.
  Corrected,
  /// Ties counted over {1..M-1} for every level, as the formula is usually printed.
  AsPrinted,
};

/// [max]^{(level)}_{M,level}(args) for level 1 or 2, via the zeta / zeta' sums over Q-integrals.
inline Rational max_cond_closed_form(const UrnModel& model, int M, std::span<const Rational> args,
                                     MaxFormVariant variant = MaxFormVariant::Corrected) {
  if (!model.alphabet().is_numeric()) fail(ErrorKind::NonNumericAlphabet, "max needs numeric symbol values");
  const int level = static_cast<int>(args.size());
  if (level != 1 && level != 2) fail(ErrorKind::InvalidArgument, "level must be 1 or 2");
  if (M < level || M > model.length()) fail(ErrorKind::LengthExceeded, "M outside level..length");
  if (M == level) return *std::max_element(args.begin(), args.end());

  const Rational& total = model.alpha_total();
  const Rational& c = model.c();
  const int free_draws = M - level;
  // Denominator of the posterior GUS after `level` observations.
  Rational denom = 1;
  for (int t = 1; t <= free_draws; ++t) denom *= total + c * (level + t - 1);
  const int tie_range = variant == MaxFormVariant::Corrected ? free_draws - 1 : M - 1;
  auto e = elementary_symmetric(detail::one_to(tie_range), std::max(tie_range, free_draws - 1));

  // zeta(j): coefficient of Q_{level, j}.
  std::vector<Rational> zeta(free_draws + 1, 0);
  for (int k = 0; k <= free_draws - 1; ++k) {
    Rational nk = pow(c, k) * e[k] / denom;
    if (nk == 0) continue;
    const int slots = free_draws - k;
    if (level == 1) {
      for (int i = 0; i <= slots; ++i) zeta[i] += nk * Rational(binomial(slots, i)) * pow(c, slots - i);
    } else {
      for (int i = 0; i <= slots; ++i) {
        for (int j = 0; j <= i; ++j) {
          zeta[j] += nk * Rational(binomial(slots, i) * binomial(i, j)) * pow(c, slots - j);
        }
      }
    }
  }
  Rational out = 0;
  for (int j = 0; j <= free_draws; ++j) {
    if (zeta[j] != 0) out += zeta[j] * alpha_max_integral(model, j, args);
  }
  return out;
}

}  // namespace hoeffding
