#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "hoeffding/coefficients.hpp"
#include "hoeffding/error.hpp"
#include "hoeffding/kernels.hpp"
#include "hoeffding/models.hpp"
#include "hoeffding/multiset.hpp"

namespace hoeffding {

/// [T]^{(r)}_{n,m}(common, extra): E[T(common, Y)] where Y holds the n - r unobserved coordinates and
/// the conditioning also sees `extra`. The extra values only enter through the posterior.
template <ExchangeableLaw Law>
Rational cond_expect_oracle(const Law& law, const SymmetricKernel& T, const Multiset& common, const Multiset& extra) {
  const int n = T.arity();
  const int r = common.size();
  if (r > n) fail(ErrorKind::InvalidArgument, "more common coordinates than the arity");
  if (n + extra.size() > law.horizon()) fail(ErrorKind::LengthExceeded, "conditioning exceeds the horizon");
  const Multiset observed = common + extra;
  Rational total = 0;
  for_each_multiset(T.alphabet_size(), n - r, [&](const Multiset& y) {
    const Rational& v = T(common + y);
    if (v == 0) return;
    Rational w = law.posterior_weight(observed, y);
    if (w != 0) total += w * v;
  });
  return total;
}

template <ExchangeableLaw Law>
Rational cond_expect_oracle(const Law& law, const SymmetricKernel& T, std::span<const int> common, std::span<const int> extra) {
  const std::size_t k = T.alphabet_size();
  return cond_expect_oracle(law, T, Multiset::from_tuple(common, k), Multiset::from_tuple(extra, k));
}

/// The diagonal conditionals [T]^{(q)}_{n,q}, q = 0..n, each stored as a kernel of arity q.
class DiagonalFamily {
 public:
  DiagonalFamily(SymmetricKernel statistic, std::vector<SymmetricKernel> diagonal)
      : statistic_(std::move(statistic)), diagonal_(std::move(diagonal)) {}

  const SymmetricKernel& statistic() const { return statistic_; }
  int arity() const { return statistic_.arity(); }
  const SymmetricKernel& operator[](int q) const { return diagonal_.at(q); }
  const Rational& mean() const { return diagonal_.front().value_at(0); }

 private:
  SymmetricKernel statistic_;
  std::vector<SymmetricKernel> diagonal_;
};

namespace detail {

inline std::string fingerprint(const UrnModel& model, const SymmetricKernel& T) {
  std::string key;
  for (const auto& s : model.alphabet().symbols()) key += s.label + (s.value ? "=" + format_rational(*s.value) : "") + ";";
  key += "|";
  for (const auto& a : model.alpha()) key += format_rational(a) + ",";
  key += "|" + format_rational(model.c()) + "|" + std::to_string(model.length()) + "|" + std::to_string(T.arity()) + "|";
  for (const auto& v : T.values()) key += format_rational(v) + ",";
  return key;
}

template <ExchangeableLaw Law>
std::shared_ptr<const DiagonalFamily> build_diagonal(const Law& law, const SymmetricKernel& T) {
  const int n = T.arity();
  if (n > law.horizon()) fail(ErrorKind::LengthExceeded, "statistic arity exceeds the horizon");
  std::vector<SymmetricKernel> diagonal;
  diagonal.reserve(n + 1);
  const Multiset none(T.alphabet_size());
  for (int q = 0; q < n; ++q) {
    diagonal.push_back(SymmetricKernel::tabulate(T.alphabet_size(), q,
                                                 [&](const Multiset& x) { return cond_expect_oracle(law, T, x, none); }));
  }
  diagonal.push_back(T);
  return std::make_shared<const DiagonalFamily>(T, std::move(diagonal));
}

}  // namespace detail

/// Diagonal family of T. Urn models share one family per (model, statistic).
template <ExchangeableLaw Law>
std::shared_ptr<const DiagonalFamily> diagonal_family(const Law& law, const SymmetricKernel& T) {
  if constexpr (std::is_same_v<Law, UrnModel>) {
    static std::mutex mutex;
    static std::map<std::string, std::shared_ptr<const DiagonalFamily>> cache;
    const std::string key = detail::fingerprint(law, T);
    {
      std::lock_guard lock(mutex);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto family = detail::build_diagonal(law, T);
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(family)).first->second;
  } else {
    return detail::build_diagonal(law, T);
  }
}

/// [T]^{(r)}_{n,m}(common, extra) rebuilt from the diagonal family alone.
inline Rational prop8_expand(const UrnModel& model, const DiagonalFamily& family, const Multiset& common,
                             const Multiset& extra) {
  const int n = family.arity();
  const int r = common.size();
  const int m = r + extra.size();
  if (r > n) fail(ErrorKind::InvalidArgument, "more common coordinates than the arity");
  if (n + m - r > model.length()) fail(ErrorKind::LengthExceeded, "conditioning exceeds the horizon");
  const Rational& A = model.alpha_total();
  const Rational& c = model.c();

  Rational denom = 1;
  for (int l = 1; l <= m - r; ++l) denom *= A + c * (n + l - 1);

  Rational total = 0;
  for (int q = r; q <= std::min(m, n); ++q) {
    Rational coef = pow(c, q - r);
    if (coef == 0) continue;
    for (int l = 1; l <= q - r; ++l) coef *= n - r - l + 1;
    for (int t = q; t <= m - 1; ++t) coef *= A + c * t;
    if (coef == 0) continue;
    Rational inner = 0;
    for_each_submultiset(extra, q - r, [&](const Multiset& sub) {
      inner += Rational(embedding_count(extra, sub)) * family[q](common + sub);
    });
    total += coef * inner;
  }
  return total / denom;
}

inline Rational prop8_expand(const UrnModel& model, const DiagonalFamily& family, std::span<const int> common,
                             std::span<const int> extra) {
  const std::size_t k = family.statistic().alphabet_size();
  return prop8_expand(model, family, Multiset::from_tuple(common, k), Multiset::from_tuple(extra, k));
}

/// A function of the n conditioning values X_{j(n)}.
using ConditioningFunction = std::function<Rational(std::span<const int>)>;

namespace detail {

inline void check_prop12_shape(int M, int m, int n, int r, int length) {
  if (m < 1 || m > n || n > M || M > length) fail(ErrorKind::IndexOutOfRange, "need 1 <= m <= n <= M <= length");
  if (r < 0 || r > m) fail(ErrorKind::IndexOutOfRange, "overlap outside 0..m");
  if (m - r > M - n) fail(ErrorKind::IndexOutOfRange, "source indices do not fit inside 1..M");
}

}  // namespace detail

/// E[[T]^{(m)}_{M,m}(X_{i(m)}) | X_{j(n)}] for canonical indices j(n) = (1..n) and
/// i(m) = (1..r, n+1..n+m-r). Values are passed in j(n) order.
inline ConditioningFunction prop12_expect(const UrnModel& model, std::shared_ptr<const DiagonalFamily> family, int m, int n,
                                          int r) {
  const int M = family->arity();
  detail::check_prop12_shape(M, m, n, r, model.length());
  std::vector<Rational> phi(m - r + 1);
  for (int p = 0; p <= m - r; ++p) phi[p] = phi_coeff(n, m, r, p, model.alpha_total(), model.c());
  const std::size_t k = family->statistic().alphabet_size();
  return [family = std::move(family), phi = std::move(phi), n, r, k](std::span<const int> values) {
    if (static_cast<int>(values.size()) != n) fail(ErrorKind::ArityMismatch, "expected one value per conditioning index");
    const Multiset common = Multiset::from_tuple(values.subspan(0, r), k);
    const Multiset rest = Multiset::from_tuple(values.subspan(r), k);
    Rational total = 0;
    for (int p = 0; p < static_cast<int>(phi.size()); ++p) {
      if (phi[p] == 0) continue;
      Rational inner = 0;
      for_each_submultiset(rest, p, [&](const Multiset& sub) {
        inner += Rational(embedding_count(rest, sub)) * (*family)[r + p](common + sub);
      });
      total += phi[p] * inner;
    }
    return total;
  };
}

/// Raw-index form: `source` is i(m), `target` is j(n), both 1-based inside 1..M.
/// Values are passed in `target` order.
inline ConditioningFunction prop12_expect(const UrnModel& model, std::shared_ptr<const DiagonalFamily> family,
                                          std::span<const int> source, std::span<const int> target) {
  const int M = family->arity();
  auto check = [M](std::span<const int> idx) {
    std::vector<bool> seen(M + 1, false);
    for (int i : idx) {
      if (i < 1 || i > M || seen[i]) fail(ErrorKind::IndexOutOfRange, "indices must be distinct and inside 1..M");
      seen[i] = true;
    }
  };
  check(source);
  check(target);
  std::vector<int> shared_pos, other_pos;
  for (std::size_t t = 0; t < target.size(); ++t) {
    bool shared = std::find(source.begin(), source.end(), target[t]) != source.end();
    (shared ? shared_pos : other_pos).push_back(static_cast<int>(t));
  }
  const int n = static_cast<int>(target.size());
  const int m = static_cast<int>(source.size());
  const int r = static_cast<int>(shared_pos.size());
  auto canonical = prop12_expect(model, std::move(family), m, n, r);
  std::vector<int> order = shared_pos;
  order.insert(order.end(), other_pos.begin(), other_pos.end());
  return [canonical = std::move(canonical), order = std::move(order)](std::span<const int> values) {
    if (values.size() != order.size()) fail(ErrorKind::ArityMismatch, "expected one value per conditioning index");
    std::vector<int> permuted(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) permuted[i] = values[order[i]];
    return canonical(permuted);
  };
}

/// Sum over all j(m) in V_M(m) of E[[T]^{(m)}_{M,m}(X_{j(m)}) | X_{j(n)}], via Psi_M(q, n, m).
inline ConditioningFunction cor13_sum(const UrnModel& model, std::shared_ptr<const DiagonalFamily> family, int m, int n) {
  const int M = family->arity();
  if (m < 1 || m > n || n > M || M > model.length()) fail(ErrorKind::IndexOutOfRange, "need 1 <= m <= n <= M <= length");
  std::vector<Rational> psi(m + 1);
  for (int q = 0; q <= m; ++q) psi[q] = psi_coeff(M, q, n, m, model.alpha_total(), model.c());
  const std::size_t k = family->statistic().alphabet_size();
  return [family = std::move(family), psi = std::move(psi), n, k](std::span<const int> values) {
    if (static_cast<int>(values.size()) != n) fail(ErrorKind::ArityMismatch, "expected one value per conditioning index");
    const Multiset x = Multiset::from_tuple(values, k);
    Rational total = 0;
    for (int q = 0; q < static_cast<int>(psi.size()); ++q) {
      if (psi[q] == 0) continue;
      Rational inner = 0;
      for_each_submultiset(x, q, [&](const Multiset& sub) { inner += Rational(embedding_count(x, sub)) * (*family)[q](sub); });
      total += psi[q] * inner;
    }
    return total;
  };
}

/// The symmetrization of [T]^{(r)}_{n,n-1} over its C(n-1, r) block assignments, as a kernel of arity n - 1.
template <ExchangeableLaw Law>
SymmetricKernel symmetrized_offdiag(const Law& law, const SymmetricKernel& T, int r) {
  const int n = T.arity();
  if (n < 1 || r < 0 || r > n - 1) fail(ErrorKind::InvalidArgument, "overlap must lie in 0..n-1");
  if (2 * n - r - 1 > law.horizon()) {
    fail(ErrorKind::HorizonTooShort, "2n - r - 1 = " + std::to_string(2 * n - r - 1) + " exceeds the horizon " +
                                         std::to_string(law.horizon()));
  }
  const Rational blocks(binomial(n - 1, r));
  return SymmetricKernel::tabulate(T.alphabet_size(), n - 1, [&](const Multiset& x) {
    Rational total = 0;
    for_each_submultiset(x, r, [&](const Multiset& b) {
      total += Rational(embedding_count(x, b)) * cond_expect_oracle(law, T, b, x - b);
    });
    return total / blocks;
  });
}

}  // namespace hoeffding
