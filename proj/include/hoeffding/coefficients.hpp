#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "hoeffding/error.hpp"
#include "hoeffding/rational.hpp"

namespace hoeffding {

/// Phi(n, m, r, p): weight of [T]^{(r+p)} when projecting [T]^{(m)}_{M,m} at overlap r onto n coordinates.
inline Rational phi_coeff(int n, int m, int r, int p, const Rational& alpha_total, const Rational& c) {
  if (m < 1 || m > n || r < 0 || r > m || p < 0 || p > m - r) {
    fail(ErrorKind::InvalidArgument, "phi_coeff(" + std::to_string(n) + "," + std::to_string(m) + "," +
                                         std::to_string(r) + "," + std::to_string(p) + ") outside its domain");
  }
  Rational den = 1;
  for (int s = 1; s <= m - r; ++s) den *= alpha_total + c * (n + s - 1);
  if (den == 0) fail(ErrorKind::ZeroDenominator, "alpha(A) + c(n + s - 1) vanishes");
  Rational num = 1;
  for (int s = 1; s <= m - (r + p); ++s) num *= alpha_total + c * (r + p + s - 1);
  return pow(c, p) * Rational(falling_ratio(m - r, m - r - p)) * num / den;
}

/// Psi_M(q, n, m) = sum_r C(q, r) C(M - n, m - r)_* Phi(n, m, r, q - r). Defined for 0 <= q <= m <= n <= M.
inline Rational psi_coeff(int M, int q, int n, int m, const Rational& alpha_total, const Rational& c) {
  if (q < 0 || q > m || m < 1 || m > n || n > M) fail(ErrorKind::InvalidArgument, "psi_coeff outside 0 <= q <= m <= n <= M");
  Rational out = 0;
  for (int r = 0; r <= q; ++r) {
    Integer weight = binomial(q, r) * binomial_star(M - n, m - r);
    if (weight == 0) continue;
    out += Rational(weight) * phi_coeff(n, m, r, q - r, alpha_total, c);
  }
  return out;
}

inline Rational gamma_coeff(int M, int k, const Rational& alpha_total, const Rational& c) {
  Rational psi = psi_coeff(M, k, k, k, alpha_total, c);
  if (psi == 0) fail(ErrorKind::DegenerateAssumption, "Psi_M(k,k,k) = 0 for k = " + std::to_string(k));
  return 1 / psi;
}

struct AssumptionHit {
  int q;
  int n;
  bool undefined;  // a denominator vanished, so Psi_M(q, n, q) does not exist

  friend bool operator==(const AssumptionHit&, const AssumptionHit&) = default;
};

/// Every (q, n) with Psi_M(q, n, q) = 0 or undefined. An empty report means the expansion applies.
inline std::vector<AssumptionHit> assumption_check(int M, const Rational& alpha_total, const Rational& c) {
  std::vector<AssumptionHit> hits;
  for (int n = 1; n <= M; ++n) {
    for (int q = 1; q <= n; ++q) {
      try {
        if (psi_coeff(M, q, n, q, alpha_total, c) == 0) hits.push_back({q, n, false});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroDenominator) throw;
        hits.push_back({q, n, true});
      }
    }
  }
  return hits;
}

/// Phi / Psi / gamma / theta / theta* for one horizon M and one (alpha(A), c).
class CoefficientTable {
 public:
  CoefficientTable(int M, Rational alpha_total, Rational c)
      : M_(M), alpha_total_(std::move(alpha_total)), c_(std::move(c)) {
    if (M_ < 1) fail(ErrorKind::InvalidArgument, "M must be positive");
    auto hits = assumption_check(M_, alpha_total_, c_);
    if (!hits.empty()) {
      fail(ErrorKind::DegenerateAssumption, "Psi_M(" + std::to_string(hits.front().q) + "," + std::to_string(hits.front().n) + "," +
                                                std::to_string(hits.front().q) + ") is " +
                                                (hits.front().undefined ? "undefined" : "zero") + " at M = " + std::to_string(M_));
    }
    tabulate();
    solve();
  }

  int M() const { return M_; }
  const Rational& alpha_total() const { return alpha_total_; }
  const Rational& c() const { return c_; }

  const Rational& phi(int n, int m, int r, int p) const { return phi_.at({n, m, r, p}); }
  const Rational& psi(int q, int n, int m) const { return psi_.at({q, n, m}); }
  const Rational& gamma(int k) const { return gamma_.at(k); }
  /// theta(k, a) for 1 <= a <= k <= M.
  const Rational& theta(int k, int a) const { return theta_[k][a]; }
  const Rational& theta_star(int k, int a) const { return theta_star_[k][a]; }

  const std::map<std::array<int, 4>, Rational>& phi_entries() const { return phi_; }
  const std::map<std::array<int, 3>, Rational>& psi_entries() const { return psi_; }

 private:
  void tabulate() {
    for (int n = 1; n <= M_; ++n) {
      for (int m = 1; m <= n; ++m) {
        for (int r = 0; r <= m; ++r) {
          for (int p = 0; p <= m - r; ++p) {
            try {
              phi_[{n, m, r, p}] = phi_coeff(n, m, r, p, alpha_total_, c_);
            } catch (const Error& e) {
              // Entries with vanishing denominators are never reached by the expansion.
              if (e.kind() != ErrorKind::ZeroDenominator) throw;
            }
          }
        }
        for (int q = 0; q <= m; ++q) {
          try {
            psi_[{q, n, m}] = psi_coeff(M_, q, n, m, alpha_total_, c_);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroDenominator) throw;
          }
        }
      }
    }
    for (int k = 1; k <= M_; ++k) gamma_[k] = 1 / psi_.at({k, k, k});
  }

  const Rational& psi_checked(int q, int n, int m) const {
    auto it = psi_.find({q, n, m});
    if (it == psi_.end()) fail(ErrorKind::ZeroDenominator, "Psi_M undefined for the requested indices");
    return it->second;
  }

  // Back-substitution through S_M(k): equation q is linear in theta(k, q) with pivot Psi_M(q, k, q).
  void solve() {
    theta_.assign(M_ + 1, std::vector<Rational>(M_ + 1, 0));
    theta_star_.assign(M_ + 1, std::vector<Rational>(M_ + 1, 0));
    for (int k = 1; k <= M_ - 1; ++k) {
      theta_[k][k] = gamma_.at(k);
      for (int q = k - 1; q >= 1; --q) {
        Rational rhs = 0;
        for (int i = q; i <= k - 1; ++i) {
          for (int j = q; j <= i; ++j) rhs += theta_[i][j] * psi_checked(q, k, j);
        }
        for (int j = q + 1; j <= k; ++j) rhs += theta_[k][j] * psi_checked(q, k, j);
        const Rational& pivot = psi_checked(q, k, q);
        theta_[k][q] = -rhs / pivot;
      }
    }
    for (int a = 1; a <= M_ - 1; ++a) {
      Rational acc = 0;
      for (int s = a; s <= M_ - 1; ++s) acc += theta_[s][a];
      theta_[M_][a] = -acc;
    }
    theta_[M_][M_] = 1;
    for (int k = 1; k <= M_; ++k) {
      for (int a = 1; a <= k; ++a) theta_star_[k][a] = theta_[k][a] / Rational(binomial(M_ - a, k - a));
    }
  }

  int M_;
  Rational alpha_total_;
  Rational c_;
  std::map<std::array<int, 4>, Rational> phi_;
  std::map<std::array<int, 3>, Rational> psi_;
  std::map<int, Rational> gamma_;
  std::vector<std::vector<Rational>> theta_;
  std::vector<std::vector<Rational>> theta_star_;
};

/// Coefficient tables are shared across statistics. Since every coefficient is homogeneous of
/// degree zero in (alpha(A), c), tables are keyed by M and the rate c / alpha(A).
inline std::shared_ptr<const CoefficientTable> theta_table(int M, const Rational& alpha_total, const Rational& c) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::string>, std::shared_ptr<const CoefficientTable>> cache;
  if (alpha_total <= 0) fail(ErrorKind::EmptyMeasure, "alpha(A) must be positive");
  const Rational rate = c / alpha_total;
  const auto key = std::make_pair(M, format_rational(rate));
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const CoefficientTable>(M, Rational(1), rate);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace hoeffding
