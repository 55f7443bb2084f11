#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hoeffding/coefficients.hpp"
#include "hoeffding/conditional.hpp"
#include "hoeffding/error.hpp"
#include "hoeffding/kernels.hpp"
#include "hoeffding/models.hpp"

namespace hoeffding {

/// The U-statistic x -> sum over j(s) in V_M(s) of phi(x_{j(s)}), as a kernel of arity M.
inline SymmetricKernel u_statistic(const SymmetricKernel& phi, int M) {
  if (phi.arity() > M) fail(ErrorKind::ArityMismatch, "kernel arity exceeds M");
  return SymmetricKernel::tabulate(phi.alphabet_size(), M, [&](const Multiset& x) {
    Rational total = 0;
    for_each_submultiset(x, phi.arity(), [&](const Multiset& b) {
      const Rational& v = phi(b);
      if (v != 0) total += Rational(embedding_count(x, b)) * v;
    });
    return total;
  });
}

/// First support point x of size n - 1 with [phi]^{(n-1)}_{n,n-1}(x) != 0, if any.
template <ExchangeableLaw Law>
std::optional<std::pair<Multiset, Rational>> degeneracy_witness(const Law& law, const SymmetricKernel& phi) {
  if (phi.arity() == 0) return std::nullopt;
  std::optional<std::pair<Multiset, Rational>> witness;
  const Multiset none(phi.alphabet_size());
  for_each_multiset(phi.alphabet_size(), phi.arity() - 1, [&](const Multiset& x) {
    if (witness || law.multiset_weight(x) == 0) return;
    Rational v = cond_expect_oracle(law, phi, x, none);
    if (v != 0) witness.emplace(x, v);
  });
  return witness;
}

namespace detail {

inline void check_statistic(const UrnModel& model, const SymmetricKernel& T, int M) {
  if (M < 1 || M > model.length()) fail(ErrorKind::LengthExceeded, "M must lie in 1..length");
  if (T.arity() != M) fail(ErrorKind::ArityMismatch, "the statistic must have arity M");
  if (T.alphabet_size() != model.alphabet_size()) fail(ErrorKind::ArityMismatch, "statistic and model alphabets differ");
}

inline SymmetricKernel centered(const UrnModel& model, const SymmetricKernel& T) {
  return T - SymmetricKernel::constant(T.alphabet_size(), T.arity(), expectation(model, T));
}

// u_statistic of each diagonal entry [T]^{(a)}_{M,a}, a = 1..upto, taken at arity `size`.
inline std::vector<SymmetricKernel> diagonal_sums(const DiagonalFamily& family, int upto, int size) {
  std::vector<SymmetricKernel> out;
  out.reserve(upto + 1);
  out.push_back(SymmetricKernel::zero(family.statistic().alphabet_size(), size));
  for (int a = 1; a <= upto; ++a) out.push_back(u_statistic(family[a], size));
  return out;
}

}  // namespace detail

/// The projection of T - E(T) onto the s-th Hoeffding space, as a function on A^M.
inline SymmetricKernel project_level(const UrnModel& model, const SymmetricKernel& T, int M, int s) {
  detail::check_statistic(model, T, M);
  if (s < 1 || s > M) fail(ErrorKind::InvalidArgument, "level must lie in 1..M");
  auto table = theta_table(M, model.alpha_total(), model.c());
  auto family = diagonal_family(model, detail::centered(model, T));
  auto sums = detail::diagonal_sums(*family, s, M);
  SymmetricKernel out = SymmetricKernel::zero(T.alphabet_size(), M);
  for (int a = 1; a <= s; ++a) out += table->theta(s, a) * sums[a];
  return out;
}

/// The degenerate kernel phi^{(s)} of T - E(T).
inline SymmetricKernel extract_kernel(const UrnModel& model, const SymmetricKernel& T, int M, int s) {
  detail::check_statistic(model, T, M);
  if (s < 1 || s > M) fail(ErrorKind::InvalidArgument, "level must lie in 1..M");
  auto table = theta_table(M, model.alpha_total(), model.c());
  auto family = diagonal_family(model, detail::centered(model, T));
  auto sums = detail::diagonal_sums(*family, s, s);
  SymmetricKernel out = SymmetricKernel::zero(T.alphabet_size(), s);
  for (int a = 1; a <= s; ++a) out += table->theta_star(s, a) * sums[a];
  return out;
}

struct HoeffdingDecomposition {
  Rational mean;
  std::vector<SymmetricKernel> kernels;  // kernels[s - 1] has arity s
  std::shared_ptr<const CoefficientTable> table;

  int M() const { return static_cast<int>(kernels.size()); }
  const SymmetricKernel& kernel(int s) const { return kernels.at(s - 1); }
  SymmetricKernel level(int s) const { return u_statistic(kernel(s), M()); }

  /// mean + sum over s of the level-s U-statistics.
  SymmetricKernel reconstruct() const {
    const std::size_t k = kernels.front().alphabet_size();
    SymmetricKernel out = SymmetricKernel::constant(k, M(), mean);
    for (int s = 1; s <= M(); ++s) out += level(s);
    return out;
  }
};

inline HoeffdingDecomposition decompose(const UrnModel& model, const SymmetricKernel& T, int M) {
  detail::check_statistic(model, T, M);
  HoeffdingDecomposition out;
  out.table = theta_table(M, model.alpha_total(), model.c());
  out.mean = expectation(model, T);
  auto family = diagonal_family(model, T - SymmetricKernel::constant(T.alphabet_size(), M, out.mean));
  for (int s = 1; s <= M; ++s) {
    auto sums = detail::diagonal_sums(*family, s, s);
    SymmetricKernel phi = SymmetricKernel::zero(T.alphabet_size(), s);
    for (int a = 1; a <= s; ++a) phi += out.table->theta_star(s, a) * sums[a];
    out.kernels.push_back(std::move(phi));
  }
  return out;
}

/// gamma_M^{(n)} times the sum of [T]^{(n)}_{M,n} over V_M(n), for a statistic T on A^M whose
/// conditional expectations given any n - 1 coordinates vanish.
inline SymmetricKernel cor14_project(const UrnModel& model, const SymmetricKernel& T, int M, int n) {
  detail::check_statistic(model, T, M);
  if (n < 1 || n > M) fail(ErrorKind::InvalidArgument, "n must lie in 1..M");
  auto family = diagonal_family(model, T);
  for (std::size_t i = 0; i < (*family)[n - 1].dimension(); ++i) {
    const Multiset& x = (*family)[n - 1].space()[i];
    if ((*family)[n - 1].value_at(i) != 0 && model.multiset_weight(x) != 0) {
      fail(ErrorKind::DegeneracyViolated, "E[T | X_{n-1}] is not identically zero");
    }
  }
  auto table = theta_table(M, model.alpha_total(), model.c());
  return table->gamma(n) * u_statistic((*family)[n], M);
}

/// The factor of E[T V] in E[T(X_{i(n)}) V(X_{j(n)})] for degenerate T, V and overlap r.
inline Rational overlap_factor(int n, int r, const Rational& alpha_total, const Rational& c) {
  Rational out = pow(c, n - r);
  if (out == 0) return out;
  for (int l = 1; l <= n - r; ++l) out *= Rational(n - r - l + 1) / (alpha_total + c * (n + l - 1));
  return out;
}

/// E[T(X_{i(n)}) V(X_{j(n)})] for degenerate kernels with |i(n) ^ j(n)| = r.
inline Rational degenerate_cov(const UrnModel& model, const SymmetricKernel& T, const SymmetricKernel& V, int r) {
  const int n = T.arity();
  if (V.arity() != n) fail(ErrorKind::ArityMismatch, "both kernels need the same arity");
  if (r < 0 || r > n) fail(ErrorKind::InvalidArgument, "overlap must lie in 0..n");
  if (2 * n - r > model.length()) fail(ErrorKind::LengthExceeded, "2n - r exceeds the horizon");
  if (degeneracy_witness(model, T) || degeneracy_witness(model, V)) {
    fail(ErrorKind::DegeneracyViolated, "kernels must be degenerate");
  }
  Rational product = 0;
  for (std::size_t i = 0; i < T.dimension(); ++i) {
    if (T.value_at(i) == 0) continue;
    product += model.multiset_weight(T.space()[i]) * T.value_at(i) * V.value_at(i);
  }
  return overlap_factor(n, r, model.alpha_total(), model.c()) * product;
}

/// Weight of E[phi_T^{(s)} phi_Z^{(s)}] in E[T Z] for statistics on A^M.
inline Rational covariance_weight(int M, int s, const Rational& alpha_total, const Rational& c) {
  Rational total = 0;
  for (int p = 0; p <= s; ++p) {
    Integer count = binomial(s, p) * binomial_star(M - s, s - p);
    if (count == 0) continue;
    total += Rational(count) * overlap_factor(s, p, alpha_total, c);
  }
  return Rational(binomial(M, s)) * total;
}

struct CovarianceReport {
  std::vector<Rational> weights;  // J_M(s), index s - 1
  std::vector<Rational> levels;   // J_M(s) E[phi_T^{(s)} phi_Z^{(s)}]
  Rational total;
};

inline CovarianceReport covariance_decompose(const UrnModel& model, const SymmetricKernel& T, const SymmetricKernel& Z,
                                             int M) {
  auto dt = decompose(model, T, M);
  auto dz = decompose(model, Z, M);
  CovarianceReport out;
  out.total = 0;
  for (int s = 1; s <= M; ++s) {
    const auto& a = dt.kernel(s);
    const auto& b = dz.kernel(s);
    Rational inner = 0;
    for (std::size_t i = 0; i < a.dimension(); ++i) {
      if (a.value_at(i) == 0 || b.value_at(i) == 0) continue;
      inner += model.multiset_weight(a.space()[i]) * a.value_at(i) * b.value_at(i);
    }
    out.weights.push_back(covariance_weight(M, s, model.alpha_total(), model.c()));
    out.levels.push_back(out.weights.back() * inner);
    out.total += out.levels.back();
  }
  return out;
}

/// k(N, n, i): a law-free lower bound for E[(sum over V_n(i) of phi)^2] / E[phi^2].
inline Rational lemma3_constant(int N, int n, int i) {
  if (i < 1 || i > n || n > N - 1) fail(ErrorKind::InvalidArgument, "need 1 <= i <= n <= N - 1");
  Rational best(pow(Rational(binomial(n, i)), 2));
  for (int s = 1; s <= i; ++s) {
    Rational v = pow(Rational(binomial(n - s, i - s)), 2) * Rational(binomial(2 * N - 2 - n, s) * binomial(n, s)) /
                 (Rational(binomial(2 * N - 2 - s, s)) * pow(Rational(binomial(i, s)), 2));
    if (v < best) best = v;
  }
  return best;
}

enum class ZhaoChenForm {
  /// C(m,i) C(M-m,M-i) / C(M-i,i), the arrangement usually printed.
  AsPrinted,
  /// C(m,i) C(M-m,i) / C(M-i,i), the arrangement implied by the overlap factors.
  Corrected,
};

/// E[pi[T, SH_i](Y_m)^2] in units of E[g^2] for m draws without replacement from M items.
inline Rational zhao_chen_variance(int M, int m, int i, const Rational& g_norm, ZhaoChenForm form = ZhaoChenForm::AsPrinted) {
  if (i < 1 || i > m || m >= M) fail(ErrorKind::InvalidArgument, "need 1 <= i <= m < M");
  if (M - m < i) return 0;
  const Integer middle = form == ZhaoChenForm::AsPrinted ? binomial(M - m, M - i) : binomial(M - m, i);
  return Rational(binomial(m, i) * middle) / Rational(binomial(M - i, i)) * g_norm;
}

/// E[(sum over V_m(i) of g(Y_{j(i)}))^2] by enumeration of the first m draws of `model`.
inline Rational zhao_chen_bruteforce(const UrnModel& model, int m, const SymmetricKernel& g) {
  if (m > model.length()) fail(ErrorKind::LengthExceeded, "m exceeds the horizon");
  SymmetricKernel u = u_statistic(g, m);
  Rational total = 0;
  for (std::size_t i = 0; i < u.dimension(); ++i) {
    if (u.value_at(i) == 0) continue;
    total += model.multiset_weight(u.space()[i]) * u.value_at(i) * u.value_at(i);
  }
  return total;
}

}  // namespace hoeffding
