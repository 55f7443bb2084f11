#include <gtest/gtest.h>

#include <random>

#include "hoeffding/hoeffding.hpp"
#include "oracles.hpp"

using namespace hoeffding;

namespace {

Multiset ms(std::vector<int> counts) { return Multiset(std::move(counts)); }

UrnModel numeric_model(std::vector<Rational> values, std::vector<Rational> alpha, Rational c, int length) {
  return new_urn_model(Alphabet::numeric(values), std::move(alpha), std::move(c), length);
}

}  // namespace

TEST(FromTable, IndicatorOfA) {
  auto k = from_table(2, 1, {{ms({1, 0}), 1}, {ms({0, 1}), 0}});
  EXPECT_EQ(k(ms({1, 0})), 1);
  EXPECT_EQ(k(ms({0, 1})), 0);
}

TEST(FromTable, AllZero) {
  auto k = from_table(2, 2, {{ms({2, 0}), 0}, {ms({1, 1}), 0}, {ms({0, 2}), 0}});
  EXPECT_TRUE(k.is_zero());
}

TEST(FromTable, MissingAndDuplicate) {
  try {
    from_table(2, 2, {{ms({2, 0}), 0}, {ms({0, 2}), 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingMultiset);
  }
  try {
    from_table(2, 1, {{ms({1, 0}), 0}, {ms({1, 0}), 1}, {ms({0, 1}), 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateMultiset);
  }
}

TEST(Symmetrize, IdempotentOnSymmetricInput) {
  std::mt19937_64 rng(3);
  auto K = oracle::random_kernel(rng, 3, 3);
  auto S = symmetrize(3, 3, [&](std::span<const int> t) { return K.evaluate(t); });
  EXPECT_EQ(S, K);
}

TEST(Symmetrize, FirstCoordinateIndicator) {
  auto S = symmetrize(2, 2, [](std::span<const int> t) { return Rational(t[0] == 0 ? 1 : 0); });
  EXPECT_EQ(S(ms({1, 1})), Rational(1, 2));
  EXPECT_EQ(S(ms({2, 0})), 1);
}

TEST(Symmetrize, BlockFormAgreesWithFullAverage) {
  std::mt19937_64 rng(5);
  for (int m = 1; m <= 4; ++m) {
    for (int r = 0; r <= m; ++r) {
      // f symmetric within the first r and the last m - r arguments.
      auto A = oracle::random_kernel(rng, 2, r);
      auto B = oracle::random_kernel(rng, 2, m - r);
      auto C = oracle::random_kernel(rng, 2, r);
      auto f = [&](std::span<const int> t) {
        return A.evaluate(t.subspan(0, r)) * B.evaluate(t.subspan(r)) + C.evaluate(t.subspan(0, r));
      };
      EXPECT_EQ(block_symmetrize(2, m, r, f), symmetrize(2, m, f)) << "m=" << m << " r=" << r;
    }
  }
}

TEST(Symmetrize, IsAProjection) {
  auto f = [](std::span<const int> t) { return Rational(t[0] * 3 + t[1] - t[2] * t[0]); };
  auto once = symmetrize(3, 3, f);
  auto twice = symmetrize(3, 3, [&](std::span<const int> t) { return once.evaluate(t); });
  EXPECT_EQ(once, twice);
}

TEST(Evaluate, SymmetricLookup) {
  std::mt19937_64 rng(9);
  auto K = oracle::random_kernel(rng, 2, 2);
  std::vector<int> ab{0, 1}, ba{1, 0};
  EXPECT_EQ(K.evaluate(ab), K.evaluate(ba));
  EXPECT_EQ(SymmetricKernel::zero(2, 2).evaluate(ab), 0);
  EXPECT_EQ(indicator_kernel(2, ms({1, 1})).evaluate(ba), 1);
}

TEST(Evaluate, Errors) {
  auto K = SymmetricKernel::zero(2, 2);
  std::vector<int> short_tuple{0}, bad{0, 5};
  try {
    K.evaluate(short_tuple);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ArityMismatch);
  }
  try {
    K.evaluate(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownSymbol);
  }
}

TEST(Expectation, Constant) {
  UrnModel m = new_urn_model(Alphabet::labelled({"a", "b"}), {1, 1}, 1, 4);
  EXPECT_EQ(expectation(m, SymmetricKernel::constant(2, 3, Rational(7, 2))), Rational(7, 2));
}

TEST(Expectation, ArityOneIsFirstDrawMarginal) {
  std::mt19937_64 rng(21);
  for (auto regime : {oracle::Regime::Polya, oracle::Regime::Iid, oracle::Regime::Finite}) {
    UrnModel m = oracle::random_model(rng, 3, 3, regime);
    auto h = oracle::random_kernel(rng, 3, 1);
    Rational direct = 0;
    for (int a = 0; a < 3; ++a) {
      Multiset one(3);
      one.add(a);
      direct += h(one) * m.alpha()[a] / m.alpha_total();
    }
    EXPECT_EQ(expectation(m, h), direct);
  }
}

TEST(Expectation, PolyaPairIndicator) {
  UrnModel m = new_urn_model(Alphabet::labelled({"a", "b"}), {1, 1}, 1, 4);
  EXPECT_EQ(expectation(m, indicator_kernel(2, ms({2, 0}))), Rational(1, 3));
}

TEST(Expectation, Linear) {
  std::mt19937_64 rng(22);
  UrnModel m = oracle::random_model(rng, 3, 4, oracle::Regime::Polya);
  auto A = oracle::random_kernel(rng, 3, 3), B = oracle::random_kernel(rng, 3, 3);
  Rational s(2, 7);
  EXPECT_EQ(expectation(m, A + s * B), expectation(m, A) + s * expectation(m, B));
}

TEST(Expectation, LengthExceeded) {
  UrnModel m = new_urn_model(Alphabet::labelled({"a", "b"}), {1, 1}, 1, 2);
  try {
    expectation(m, SymmetricKernel::zero(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthExceeded);
  }
}

TEST(BuiltinKernel, MaxMeanIndicator) {
  Alphabet values = Alphabet::numeric({1, 2, 3});
  EXPECT_EQ(builtin_kernel(Builtin::Max, values, 2)(ms({1, 0, 1})), 3);
  EXPECT_EQ(builtin_kernel(Builtin::Min, values, 2)(ms({1, 0, 1})), 1);
  EXPECT_EQ(builtin_kernel(Builtin::Mean, values, 2)(ms({1, 0, 1})), 2);
  EXPECT_EQ(indicator_kernel(2, ms({2, 0}))(ms({1, 1})), 0);
}

TEST(BuiltinKernel, NeedsNumericAlphabet) {
  try {
    builtin_kernel(Builtin::Max, Alphabet::labelled({"a", "b"}), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonNumericAlphabet);
  }
}

TEST(ElementarySymmetric, SmallCases) {
  auto e = elementary_symmetric({1, 2, 3}, 3);
  EXPECT_EQ(e[0], 1);
  EXPECT_EQ(e[1], 6);
  EXPECT_EQ(e[2], 11);
  EXPECT_EQ(e[3], 6);
}

TEST(MaxClosedForm, MeanMatchesExpectation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    for (std::size_t k = 2; k <= 3; ++k) {
      auto regime = static_cast<oracle::Regime>(trial % 3);
      UrnModel m = oracle::random_model(rng, k, 5, regime);
      for (int M = 1; M <= 5; ++M) {
        EXPECT_EQ(max_mean_closed_form(m, M), expectation(m, builtin_kernel(Builtin::Max, m.alphabet(), M)));
      }
    }
  }
}

TEST(MaxClosedForm, IidSingleTerm) {
  UrnModel m = numeric_model({0, 1, 4}, {Rational(1, 2), Rational(1, 3), Rational(1, 6)}, 0, 4);
  for (int M = 1; M <= 4; ++M) EXPECT_EQ(max_mean_closed_form(m, M), alpha_max_integral(m, M, {}));
}

TEST(MaxClosedForm, MeanAtOneDraw) {
  UrnModel m = numeric_model({2, 5}, {1, 3}, 1, 3);
  EXPECT_EQ(max_mean_closed_form(m, 1), Rational(2 * 1 + 5 * 3, 4));
}

TEST(MaxClosedForm, ConditionalMatchesOracle) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 9; ++trial) {
    for (std::size_t k = 2; k <= 3; ++k) {
      UrnModel m = oracle::random_model(rng, k, 4, static_cast<oracle::Regime>(trial % 3));
      for (int M = 1; M <= 4; ++M) {
        auto T = builtin_kernel(Builtin::Max, m.alphabet(), M);
        for (int level = 1; level <= std::min(2, M); ++level) {
          for_each_multiset(k, level, [&](const Multiset& x) {
            std::vector<Rational> args;
            for (int a : x.to_tuple()) args.push_back(*m.alphabet()[a].value);
            EXPECT_EQ(max_cond_closed_form(m, M, args), cond_expect_oracle(m, T, x, Multiset(k)))
                << "M=" << M << " level=" << level;
          });
        }
      }
    }
  }
}

TEST(MaxClosedForm, IidConditionalsAreQFunctions) {
  UrnModel m = numeric_model({0, 1, 4}, {Rational(1, 2), Rational(1, 4), Rational(1, 4)}, 0, 5);
  for (int M = 2; M <= 5; ++M) {
    for (Rational z : {Rational(0), Rational(1), Rational(4)}) {
      std::vector<Rational> one{z};
      EXPECT_EQ(max_cond_closed_form(m, M, one), alpha_max_integral(m, M - 1, one));
      std::vector<Rational> two{z, Rational(1)};
      if (M >= 2) { EXPECT_EQ(max_cond_closed_form(m, M, two), alpha_max_integral(m, M - 2, two)); }
    }
  }
}

TEST(MaxClosedForm, TopValueDominates) {
  std::mt19937_64 rng(41);
  UrnModel m = oracle::random_model(rng, 3, 5, oracle::Regime::Polya);
  std::vector<Rational> top{Rational(3)};  // largest symbol value of oracle::letters(3)
  for (int M = 1; M <= 5; ++M) EXPECT_EQ(max_cond_closed_form(m, M, top), 3);
}

TEST(MaxClosedForm, PrintedTieRangeDisagreesWhenCNonzero) {
  UrnModel m = numeric_model({1, 2, 3}, {1, 1, 1}, 1, 4);
  auto T = builtin_kernel(Builtin::Max, m.alphabet(), 3);
  std::vector<Rational> z{Rational(1)};
  Rational oracle_value = cond_expect_oracle(m, T, Multiset({1, 0, 0}), Multiset(3));
  EXPECT_EQ(max_cond_closed_form(m, 3, z, MaxFormVariant::Corrected), oracle_value);
  EXPECT_NE(max_cond_closed_form(m, 3, z, MaxFormVariant::AsPrinted), oracle_value);
}
