#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "hoeffding/decomposition.hpp"
#include "hoeffding/error.hpp"
#include "hoeffding/kernels.hpp"
#include "hoeffding/models.hpp"

namespace hoeffding {

/// E[prod_a D(a)^{m_a}] for the Dirichlet(alpha / c) directing measure of a Polya urn.
inline Rational dirichlet_moment(const UrnModel& base, const Multiset& exponents) {
  if (base.c() <= 0) fail(ErrorKind::RequiresPositiveC, "Dirichlet moments need c > 0");
  Rational num = 1;
  for (std::size_t a = 0; a < base.alphabet_size(); ++a) {
    num *= rising(base.alpha()[a] / base.c(), exponents[a]);
    if (num == 0) return 0;
  }
  return num / rising(base.alpha_total() / base.c(), exponents.size());
}

/// Base Polya law re-weighted by 1 + scale * sum over tuples of tilt(tuple) prod D(tuple).
struct TiltedModel {
  UrnModel base;
  int k = 0;
  SymmetricKernel tilt;  // arity k + 1
  Rational scale;
  Rational eta;

  /// Sum of absolute monomial coefficients of the tilt polynomial.
  Rational coefficient_mass() const {
    Rational total = 0;
    for (std::size_t i = 0; i < tilt.dimension(); ++i) total += abs(Rational(multinomial(tilt.space()[i])) * tilt.value_at(i));
    return total;
  }
  /// Certified bound on sup |dQ/dP - 1| over the simplex.
  Rational certificate() const { return scale * coefficient_mass(); }
};

inline TiltedModel build_weak_copy(const UrnModel& base, int k, const SymmetricKernel& V, const Rational& eta) {
  if (base.c() <= 0) fail(ErrorKind::RequiresPositiveC, "weak copies need a Polya base (c > 0)");
  if (k < 0) fail(ErrorKind::InvalidArgument, "k must be nonnegative");
  if (eta <= 0 || eta >= 1) fail(ErrorKind::InvalidArgument, "eta must lie in (0, 1)");
  SymmetricKernel tilt = extract_kernel(base, V, k + 1, k + 1);
  if (tilt.is_zero()) fail(ErrorKind::ZeroProjection, "the top Hoeffding component of V vanishes");
  TiltedModel out{base, k, std::move(tilt), 0, eta};
  out.scale = eta / (2 * out.coefficient_mass());
  return out;
}

/// Q(X_1..X_L = seq), exactly.
inline Rational marginal_pmf(const TiltedModel& tilted, std::span<const int> seq) {
  const auto& base = tilted.base;
  const Rational p = base.joint_pmf(seq);
  if (tilted.scale == 0) return p;
  const Multiset counts = Multiset::from_tuple(seq, base.alphabet_size());
  Rational correction = 0;
  for (std::size_t i = 0; i < tilted.tilt.dimension(); ++i) {
    const Rational& v = tilted.tilt.value_at(i);
    if (v == 0) continue;
    const Multiset& b = tilted.tilt.space()[i];
    correction += Rational(multinomial(b)) * v * dirichlet_moment(base, b + counts);
  }
  return p + tilted.scale * correction;
}

struct WeakCopyReport {
  bool lower_marginals_match = true;    // every L-marginal with L <= k equals the base
  std::optional<Sequence> discrepancy;  // a length k + 1 sequence with Q != P
  bool exchangeable = true;             // marginals up to length min(k + 2, length) are permutation invariant
  bool normalized = true;
  bool nonnegative = true;
  bool certified = false;               // certificate < eta
  int checked_length = 0;

  bool degenerate_copy() const { return !discrepancy.has_value(); }
  bool passed() const {
    return lower_marginals_match && discrepancy && exchangeable && normalized && nonnegative && certified;
  }
};

namespace detail {

inline void for_each_sequence(std::size_t k, int length, const std::function<void(const Sequence&)>& visit) {
  Sequence seq(length, 0);
  while (true) {
    visit(seq);
    int i = length - 1;
    while (i >= 0 && seq[i] == static_cast<int>(k) - 1) seq[i--] = 0;
    if (i < 0) return;
    ++seq[i];
  }
}

}  // namespace detail

inline WeakCopyReport verify_weak_copy(const TiltedModel& tilted) {
  WeakCopyReport report;
  const auto& base = tilted.base;
  const std::size_t symbols = base.alphabet_size();
  report.checked_length = std::min(tilted.k + 2, base.length());
  for (int L = 0; L <= report.checked_length; ++L) {
    Rational total = 0;
    detail::for_each_sequence(symbols, L, [&](const Sequence& seq) {
      const Rational q = marginal_pmf(tilted, seq);
      total += q;
      if (q < 0) report.nonnegative = false;
      Sequence sorted = seq;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != seq && marginal_pmf(tilted, sorted) != q) report.exchangeable = false;
      if (L <= tilted.k && q != base.joint_pmf(seq)) report.lower_marginals_match = false;
      if (L == tilted.k + 1 && !report.discrepancy && q != base.joint_pmf(seq)) report.discrepancy = seq;
    });
    if (total != 1) report.normalized = false;
  }
  report.certified = tilted.certificate() < tilted.eta;
  return report;
}

}  // namespace hoeffding
