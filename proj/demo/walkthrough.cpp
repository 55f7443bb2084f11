// A short tour: a Polya urn, the Hoeffding decomposition of its running maximum, and the
// two-point mixture that is exchangeable but not weakly independent.

#include <iostream>

#include "hoeffding/hoeffding.hpp"

using namespace hoeffding;

int main() {
  const UrnModel urn = new_urn_model(Alphabet::numeric({1, 2, 4}), {1, Rational(1, 2), Rational(3, 2)}, 1, 5);
  const int M = 3;
  const SymmetricKernel max3 = builtin_kernel(Builtin::Max, urn.alphabet(), M);

  std::cout << "E[max of " << M << " draws] = " << format_rational(max_mean_closed_form(urn, M)) << "\n";

  const auto d = decompose(urn, max3, M);
  std::cout << "theta(1,1) = " << format_rational(d.table->theta(1, 1)) << ", theta(2,1) = " << format_rational(d.table->theta(2, 1))
            << "\n";
  for (int s = 1; s <= M; ++s) {
    std::cout << "level " << s << " kernel:";
    const auto& phi = d.kernel(s);
    for (std::size_t i = 0; i < phi.dimension(); ++i) std::cout << ' ' << format_rational(phi.value_at(i));
    std::cout << "\n";
  }
  std::cout << "reconstruction exact: " << (d.reconstruct() == max3 ? "yes" : "no") << "\n";

  const auto cov = covariance_decompose(urn, max3, max3, M);
  std::cout << "Var(max) = " << format_rational(cov.total) << " =";
  for (const auto& part : cov.levels) std::cout << ' ' << format_rational(part);
  std::cout << " (by level)\n";

  const auto report = check_weak_independence(MixtureModel(Rational(1, 2), 3), 2);
  std::cout << "mixture weakly independent at level 2: " << (report.weakly_independent() ? "yes" : "no") << "\n";
  const auto ce = run_counterexample(Rational(1, 2));
  std::cout << "E(phi | X3 = 0) = " << format_rational(ce.given_third_zero) << "\n";
  return 0;
}
