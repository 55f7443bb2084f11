#pragma once

#include <string>
#include <vector>

#include "hoeffding/conditional.hpp"
#include "hoeffding/error.hpp"
#include "hoeffding/kernels.hpp"
#include "hoeffding/linalg.hpp"
#include "hoeffding/models.hpp"

namespace hoeffding {

/// Null space of phi -> [phi]^{(n-1)}_{n,n-1} restricted to support points, without a horizon check.
template <ExchangeableLaw Law>
std::vector<SymmetricKernel> degeneracy_nullspace(const Law& law, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "level must be positive");
  if (n > law.horizon()) fail(ErrorKind::HorizonTooShort, "level exceeds the horizon");
  const std::size_t k = law.alphabet().size();
  auto space = multiset_space(k, n);
  Matrix constraints;
  for_each_multiset(k, n - 1, [&](const Multiset& x) {
    if (law.multiset_weight(x) == 0) return;
    std::vector<Rational> row(space->dimension(), Rational(0));
    for (std::size_t a = 0; a < k; ++a) {
      Multiset one(k);
      one.add(static_cast<int>(a));
      row[space->index_of(x + one)] += law.posterior_weight(x, one);
    }
    constraints.push_back(std::move(row));
  });
  std::vector<SymmetricKernel> basis;
  for (auto& v : nullspace(constraints, space->dimension())) {
    SymmetricKernel phi(k, n);
    for (std::size_t i = 0; i < v.size(); ++i) phi.value_at(i) = std::move(v[i]);
    basis.push_back(std::move(phi));
  }
  return basis;
}

/// Basis of the degenerate kernels of arity n, in reduced row-echelon order.
template <ExchangeableLaw Law>
std::vector<SymmetricKernel> degenerate_basis(const Law& law, int n) {
  if (n >= 1 && 2 * n - 1 > law.horizon()) {
    fail(ErrorKind::HorizonTooShort, "2n - 1 = " + std::to_string(2 * n - 1) + " exceeds the horizon");
  }
  return degeneracy_nullspace(law, n);
}

struct Violation {
  int basis_index;
  int r;
  Multiset witness;
  Rational value;
};

struct DegeneracyReport {
  int level = 0;
  std::vector<SymmetricKernel> basis;
  std::vector<Violation> violations;
  std::vector<int> checked_r;
  std::vector<int> not_checkable_r;  // overlaps with 2n - r - 1 beyond the horizon

  bool weakly_independent() const { return violations.empty(); }
};

/// Evaluates every symmetrized off-diagonal conditional of every degenerate basis kernel at level n.
template <ExchangeableLaw Law>
DegeneracyReport check_weak_independence(const Law& law, int n) {
  DegeneracyReport report;
  report.level = n;
  report.basis = degenerate_basis(law, n);
  for (int r = 0; r <= n - 1; ++r) {
    if (2 * n - r - 1 > law.horizon()) {
      report.not_checkable_r.push_back(r);
      continue;
    }
    report.checked_r.push_back(r);
    for (std::size_t b = 0; b < report.basis.size(); ++b) {
      SymmetricKernel off = symmetrized_offdiag(law, report.basis[b], r);
      for (std::size_t i = 0; i < off.dimension(); ++i) {
        const Multiset& x = off.space()[i];
        if (off.value_at(i) != 0 && law.multiset_weight(x) != 0) {
          report.violations.push_back({static_cast<int>(b), r, x, off.value_at(i)});
        }
      }
    }
  }
  return report;
}

/// The arity-2 kernel on {0, 1} that is degenerate for the mixture family but fails the r = 0 condition.
inline SymmetricKernel counterexample_kernel(const Rational& epsilon) {
  if (epsilon <= 0 || epsilon >= 1) fail(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
  SymmetricKernel phi(2, 2);
  phi[Multiset({2, 0})] = (epsilon * epsilon - Rational(3, 2) * epsilon) / (3 - 3 * epsilon + epsilon * epsilon);
  phi[Multiset({1, 1})] = 1;
  phi[Multiset({0, 2})] = 1 - Rational(3) / (2 * epsilon);
  return phi;
}

struct CounterexampleReport {
  Rational given_second_zero;  // E(phi(X1, X2) | X2 = 0)
  Rational given_second_one;   // E(phi(X1, X2) | X2 = 1)
  Rational given_third_zero;   // E(phi(X1, X2) | X3 = 0)
  Rational closed_form;        // eps^3 (eps - 1) / (8 (3 - 3 eps + eps^2)(eps - eps^2 / 2))
};

inline CounterexampleReport run_counterexample(const Rational& epsilon) {
  const MixtureModel mix(epsilon, 3);
  const SymmetricKernel phi = counterexample_kernel(epsilon);
  const Multiset zero({1, 0}), one({0, 1}), none(2);
  CounterexampleReport out;
  out.given_second_zero = cond_expect_oracle(mix, phi, zero, none);
  out.given_second_one = cond_expect_oracle(mix, phi, one, none);
  out.given_third_zero = cond_expect_oracle(mix, phi, none, zero);
  const Rational& e = epsilon;
  out.closed_form = pow(e, 3) * (e - 1) / (8 * (3 - 3 * e + e * e) * (e - e * e / 2));
  return out;
}

}  // namespace hoeffding
