#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "hoeffding/hoeffding.hpp"
#include "oracles.hpp"

using namespace hoeffding;
using oracle::Tuple;

namespace {

const oracle::Regime kRegimes[] = {oracle::Regime::Polya, oracle::Regime::Iid, oracle::Regime::Finite};

// [T]^{(r)}_{n,m}(common, extra) from the tuple oracle: E[T(X_1..X_r, X_{m+1}..X_{m+n-r}) | X_1..X_m].
Rational tuple_bracket(const UrnModel& model, const SymmetricKernel& T, const Tuple& common, const Tuple& extra) {
  const int n = T.arity(), r = static_cast<int>(common.size()), m = r + static_cast<int>(extra.size());
  return oracle::tuple_cond(oracle::pmf_of(model), static_cast<int>(model.alphabet_size()), m + n - r,
                            oracle::concat(common, extra), [&](const Tuple& full) {
                              return oracle::at(T, oracle::concat(oracle::slice(full, 0, r), oracle::slice(full, m, m + n - r)));
                            });
}

}  // namespace

TEST(CondExpectOracle, FullConditioningReturnsT) {
  std::mt19937_64 rng(1);
  UrnModel m = oracle::random_model(rng, 3, 6, oracle::Regime::Polya);
  auto T = oracle::random_kernel(rng, 3, 3);
  for_each_multiset(3, 3, [&](const Multiset& x) { EXPECT_EQ(cond_expect_oracle(m, T, x, Multiset(3)), T(x)); });
}

TEST(CondExpectOracle, NoConditioningIsMean) {
  std::mt19937_64 rng(2);
  UrnModel m = oracle::random_model(rng, 3, 6, oracle::Regime::Finite);
  auto T = oracle::random_kernel(rng, 3, 3);
  EXPECT_EQ(cond_expect_oracle(m, T, Multiset(3), Multiset(3)), expectation(m, T));
}

TEST(CondExpectOracle, IidIgnoresExtra) {
  std::mt19937_64 rng(3);
  UrnModel m = oracle::random_model(rng, 3, 6, oracle::Regime::Iid);
  auto T = oracle::random_kernel(rng, 3, 3);
  Multiset common({1, 0, 0});
  Rational base = cond_expect_oracle(m, T, common, Multiset(3));
  for_each_multiset(3, 2, [&](const Multiset& extra) { EXPECT_EQ(cond_expect_oracle(m, T, common, extra), base); });
}

TEST(CondExpectOracle, MatchesTupleEnumeration) {
  std::mt19937_64 rng(4);
  for (auto regime : kRegimes) {
    UrnModel m = oracle::random_model(rng, 3, 6, regime);
    for (int n = 1; n <= 3; ++n) {
      auto T = oracle::random_kernel(rng, 3, n);
      for (int r = 0; r <= n; ++r) {
        for (int e = 0; e + r <= n; ++e) {
          oracle::for_each_tuple(3, r, [&](const Tuple& common) {
            oracle::for_each_tuple(3, e, [&](const Tuple& extra) {
              if (m.joint_pmf(oracle::concat(common, extra)) == 0) return;
              EXPECT_EQ(cond_expect_oracle(m, T, std::span<const int>(common), std::span<const int>(extra)),
                        tuple_bracket(m, T, common, extra));
            });
          });
        }
      }
    }
  }
}

TEST(CondExpectOracle, BlockSymmetry) {
  std::mt19937_64 rng(5);
  UrnModel m = oracle::random_model(rng, 3, 6, oracle::Regime::Polya);
  auto T = oracle::random_kernel(rng, 3, 3);
  Tuple common{0, 2}, extra{1, 2};
  Tuple common2{2, 0}, extra2{2, 1};
  EXPECT_EQ(cond_expect_oracle(m, T, std::span<const int>(common), std::span<const int>(extra)),
            cond_expect_oracle(m, T, std::span<const int>(common2), std::span<const int>(extra2)));
}

TEST(CondExpectOracle, LengthExceeded) {
  UrnModel m = new_urn_model(Alphabet::labelled({"a", "b"}), {1, 1}, 1, 3);
  try {
    cond_expect_oracle(m, SymmetricKernel::zero(2, 2), Multiset({1, 0}), Multiset({0, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthExceeded);
  }
}

TEST(DiagonalFamily, ConstantKernel) {
  std::mt19937_64 rng(6);
  UrnModel m = oracle::random_model(rng, 2, 4, oracle::Regime::Polya);
  auto fam = diagonal_family(m, SymmetricKernel::constant(2, 3, 5));
  for (int q = 0; q <= 3; ++q) {
    for (const auto& v : (*fam)[q].values()) EXPECT_EQ(v, 5);
  }
}

TEST(DiagonalFamily, WithoutReplacementIndicator) {
  UrnModel m = without_replacement(Alphabet::labelled({"a", "b", "c"}), {1, 1, 1}, 2);
  auto fam = diagonal_family(m, indicator_kernel(3, Multiset({1, 1, 0})));
  // Six equally likely ordered pairs; {a, b} appears twice.
  EXPECT_EQ((*fam)[0].value_at(0), Rational(1, 3));
  EXPECT_EQ((*fam)[1](Multiset({1, 0, 0})), Rational(1, 2));
  EXPECT_EQ((*fam)[1](Multiset({0, 1, 0})), Rational(1, 2));
  EXPECT_EQ((*fam)[1](Multiset({0, 0, 1})), 0);
  EXPECT_EQ((*fam)[2], indicator_kernel(3, Multiset({1, 1, 0})));
}

TEST(DiagonalFamily, EndpointsAndCache) {
  std::mt19937_64 rng(7);
  UrnModel m = oracle::random_model(rng, 3, 5, oracle::Regime::Finite);
  auto T = oracle::random_kernel(rng, 3, 3);
  auto fam = diagonal_family(m, T);
  EXPECT_EQ((*fam)[0].value_at(0), expectation(m, T));
  EXPECT_EQ((*fam)[3], T);
  EXPECT_EQ(diagonal_family(m, T).get(), fam.get());
}

TEST(DiagonalFamily, TowerProperty) {
  std::mt19937_64 rng(8);
  for (auto regime : kRegimes) {
    UrnModel m = oracle::random_model(rng, 3, 5, regime);
    auto fam = diagonal_family(m, oracle::random_kernel(rng, 3, 4));
    for (int q = 1; q <= 4; ++q) {
      for (int p = 0; p < q; ++p) {
        for_each_multiset(3, p, [&](const Multiset& x) {
          EXPECT_EQ(cond_expect_oracle(m, (*fam)[q], x, Multiset(3)), (*fam)[p](x));
        });
      }
    }
  }
}

TEST(Prop8, MatchesOracleEverywhere) {
  std::mt19937_64 rng(9);
  for (auto regime : kRegimes) {
    for (std::size_t k = 2; k <= 3; ++k) {
      UrnModel model = oracle::random_model(rng, k, 8, regime);
      for (int n = 1; n <= 4; ++n) {
        auto T = oracle::random_kernel(rng, k, n);
        auto fam = diagonal_family(model, T);
        for (int m = 0; m <= n; ++m) {
          for (int r = 0; r <= m; ++r) {
            for_each_multiset(k, r, [&](const Multiset& common) {
              for_each_multiset(k, m - r, [&](const Multiset& extra) {
                EXPECT_EQ(prop8_expand(model, *fam, common, extra), cond_expect_oracle(model, T, common, extra))
                    << "n=" << n << " m=" << m << " r=" << r;
              });
            });
          }
        }
      }
    }
  }
}

TEST(Prop8, NoExtraIsDiagonal) {
  std::mt19937_64 rng(10);
  UrnModel model = oracle::random_model(rng, 3, 6, oracle::Regime::Polya);
  auto fam = diagonal_family(model, oracle::random_kernel(rng, 3, 3));
  for_each_multiset(3, 2, [&](const Multiset& x) { EXPECT_EQ(prop8_expand(model, *fam, x, Multiset(3)), (*fam)[2](x)); });
}

TEST(Prop8, IidKeepsOnlyLowestTerm) {
  std::mt19937_64 rng(11);
  UrnModel model = oracle::random_model(rng, 3, 6, oracle::Regime::Iid);
  auto fam = diagonal_family(model, oracle::random_kernel(rng, 3, 3));
  Multiset common({0, 1, 0});
  for_each_multiset(3, 2, [&](const Multiset& extra) {
    EXPECT_EQ(prop8_expand(model, *fam, common, extra), (*fam)[1](common));
  });
}

TEST(Prop12, FullOverlapIsIdentity) {
  std::mt19937_64 rng(12);
  UrnModel model = oracle::random_model(rng, 3, 4, oracle::Regime::Polya);
  auto fam = diagonal_family(model, oracle::random_kernel(rng, 3, 4));
  auto f = prop12_expect(model, fam, 2, 3, 2);
  oracle::for_each_tuple(3, 3, [&](const Tuple& x) { EXPECT_EQ(f(x), oracle::at((*fam)[2], oracle::slice(x, 0, 2))); });
}

TEST(Prop12, MatchesNestedEnumeration) {
  std::mt19937_64 rng(13);
  for (auto regime : kRegimes) {
    for (std::size_t k = 2; k <= 3; ++k) {
      for (int M = 1; M <= 4; ++M) {
        UrnModel model = oracle::random_model(rng, k, M, regime);
        auto T = oracle::random_kernel(rng, k, M);
        auto fam = diagonal_family(model, T);
        auto pmf = oracle::pmf_of(model);
        for (int m = 1; m <= M; ++m) {
          // Inner stage: [T]^{(m)}_{M,m}(y) by enumeration of the last M - m draws.
          auto inner = [&](const Tuple& y) {
            return oracle::tuple_cond(pmf, static_cast<int>(k), M, y, [&](const Tuple& full) { return oracle::at(T, full); });
          };
          for (int n = m; n <= M; ++n) {
            for (int r = std::max(0, m - (M - n)); r <= m; ++r) {
              auto f = prop12_expect(model, fam, m, n, r);
              oracle::for_each_tuple(static_cast<int>(k), n, [&](const Tuple& x) {
                if (model.joint_pmf(x) == 0) return;
                // Outer stage: E[g(X_1..X_r, X_{n+1}..X_{n+m-r}) | X_1..X_n = x].
                Rational expected = oracle::tuple_cond(pmf, static_cast<int>(k), n + m - r, x, [&](const Tuple& full) {
                  Tuple y = oracle::concat(oracle::slice(full, 0, r), oracle::slice(full, n, n + m - r));
                  if (model.joint_pmf(y) == 0) return Rational(0);
                  return inner(y);
                });
                EXPECT_EQ(f(x), expected) << "M=" << M << " m=" << m << " n=" << n << " r=" << r;
              });
            }
          }
        }
      }
    }
  }
}

TEST(Prop12, IidKeepsOnlyOverlap) {
  std::mt19937_64 rng(14);
  UrnModel model = oracle::random_model(rng, 2, 4, oracle::Regime::Iid);
  auto fam = diagonal_family(model, oracle::random_kernel(rng, 2, 4));
  auto f = prop12_expect(model, fam, 2, 2, 1);
  oracle::for_each_tuple(2, 2, [&](const Tuple& x) { EXPECT_EQ(f(x), oracle::at((*fam)[1], oracle::slice(x, 0, 1))); });
}

TEST(Prop12, RawIndicesCanonicalize) {
  std::mt19937_64 rng(15);
  UrnModel model = oracle::random_model(rng, 3, 4, oracle::Regime::Polya);
  auto fam = diagonal_family(model, oracle::random_kernel(rng, 3, 4));
  std::vector<int> source{2, 4}, target{4, 1};
  auto raw = prop12_expect(model, fam, source, target);
  auto canonical = prop12_expect(model, fam, 2, 2, 1);
  oracle::for_each_tuple(3, 2, [&](const Tuple& x) {
    Tuple reordered{x[0], x[1]};  // target position 4 is shared, so it leads
    EXPECT_EQ(raw(x), canonical(reordered));
  });
}

TEST(Prop12, IndexErrors) {
  std::mt19937_64 rng(16);
  UrnModel model = oracle::random_model(rng, 2, 3, oracle::Regime::Polya);
  auto fam = diagonal_family(model, oracle::random_kernel(rng, 2, 3));
  auto expect_kind = [](auto f) {
    try {
      f();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
    }
  };
  expect_kind([&] { prop12_expect(model, fam, 3, 2, 0); });
  expect_kind([&] { prop12_expect(model, fam, 2, 3, 0); });  // i(m) would need index 5
  std::vector<int> bad{1, 7}, ok{1, 2};
  expect_kind([&] { prop12_expect(model, fam, bad, ok); });
}

TEST(DiagonalConditionalSum, MatchesSumOverSourceIndices) {
  std::mt19937_64 rng(17);
  for (auto regime : kRegimes) {
    for (int M = 1; M <= 4; ++M) {
      UrnModel model = oracle::random_model(rng, 2, M, regime);
      auto T = oracle::random_kernel(rng, 2, M);
      auto fam = diagonal_family(model, T);
      auto pmf = oracle::pmf_of(model);
      for (int m = 1; m <= M; ++m) {
        for (int n = m; n <= M; ++n) {
          auto f = cor13_sum(model, fam, m, n);
          oracle::for_each_tuple(2, n, [&](const Tuple& x) {
            if (model.joint_pmf(x) == 0) return;
            Rational expected = 0;
            for_each_index_subset(M, m, [&](const std::vector<int>& j) {
              expected += oracle::tuple_cond(pmf, 2, M, x, [&](const Tuple& full) {
                Tuple y;
                for (int i : j) y.push_back(full[i]);
                return oracle::at((*fam)[m], y);
              });
            });
            EXPECT_EQ(f(x), expected) << "M=" << M << " m=" << m << " n=" << n;
          });
        }
      }
    }
  }
}

TEST(DiagonalConditionalSum, TopLevelIsIdentity) {
  std::mt19937_64 rng(18);
  UrnModel model = oracle::random_model(rng, 3, 3, oracle::Regime::Finite);
  auto T = oracle::random_kernel(rng, 3, 3);
  auto f = cor13_sum(model, diagonal_family(model, T), 3, 3);
  EXPECT_EQ(psi_coeff(3, 3, 3, 3, model.alpha_total(), model.c()), 1);
  oracle::for_each_tuple(3, 3, [&](const Tuple& x) { EXPECT_EQ(f(x), oracle::at(T, x)); });
}

TEST(DiagonalConditionalSum, ZeroKernel) {
  UrnModel model = new_urn_model(Alphabet::labelled({"a", "b"}), {1, 2}, 1, 4);
  auto f = cor13_sum(model, diagonal_family(model, SymmetricKernel::zero(2, 4)), 2, 3);
  oracle::for_each_tuple(2, 3, [&](const Tuple& x) { EXPECT_EQ(f(x), 0); });
}

TEST(SymmetrizedOffdiag, FullOverlapUnchanged) {
  std::mt19937_64 rng(19);
  UrnModel model = oracle::random_model(rng, 3, 6, oracle::Regime::Polya);
  auto T = oracle::random_kernel(rng, 3, 3);
  EXPECT_EQ(symmetrized_offdiag(model, T, 2), (*diagonal_family(model, T))[2]);
}

TEST(SymmetrizedOffdiag, Constant) {
  UrnModel model = new_urn_model(Alphabet::labelled({"a", "b"}), {1, 2}, 1, 6);
  auto out = symmetrized_offdiag(model, SymmetricKernel::constant(2, 3, 4), 0);
  for (const auto& v : out.values()) EXPECT_EQ(v, 4);
}

TEST(SymmetrizedOffdiag, MatchesPermutationAverage) {
  std::mt19937_64 rng(20);
  for (auto regime : kRegimes) {
    UrnModel model = oracle::random_model(rng, 2, 7, regime);
    for (int n = 1; n <= 4; ++n) {
      auto T = oracle::random_kernel(rng, 2, n);
      for (int r = 0; r <= n - 1; ++r) {
        auto sym = symmetrized_offdiag(model, T, r);
        oracle::for_each_tuple(2, n - 1, [&](const Tuple& x) {
          if (model.joint_pmf(x) == 0) return;
          std::vector<int> perm(n - 1);
          std::iota(perm.begin(), perm.end(), 0);
          Rational total = 0;
          long count = 0;
          do {
            Tuple p;
            for (int i : perm) p.push_back(x[i]);
            total += tuple_bracket(model, T, oracle::slice(p, 0, r), oracle::slice(p, r, n - 1));
            ++count;
          } while (std::next_permutation(perm.begin(), perm.end()));
          EXPECT_EQ(oracle::at(sym, x), total / count) << "n=" << n << " r=" << r;
        });
      }
    }
  }
}

TEST(SymmetrizedOffdiag, HorizonTooShort) {
  UrnModel model = new_urn_model(Alphabet::labelled({"a", "b"}), {1, 2}, 1, 4);
  try {
    symmetrized_offdiag(model, SymmetricKernel::zero(2, 3), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HorizonTooShort);
  }
}
