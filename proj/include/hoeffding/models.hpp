#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hoeffding/error.hpp"
#include "hoeffding/multiset.hpp"
#include "hoeffding/rational.hpp"
#include "hoeffding/sampling.hpp"

namespace hoeffding {

struct Symbol {
  std::string label;
  std::optional<Rational> value;  // needed only by order-statistic kernels

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Ordered list of symbols with pairwise distinct labels.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!index_.emplace(symbols_[i].label, static_cast<int>(i)).second) {
        fail(ErrorKind::InvalidArgument, "duplicate symbol label '" + symbols_[i].label + "'");
      }
    }
  }

  /// Symbols labelled by their position, without numeric values.
  static Alphabet labelled(std::initializer_list<std::string> labels) {
    std::vector<Symbol> out;
    for (const auto& l : labels) out.push_back({l, std::nullopt});
    return Alphabet(std::move(out));
  }
  /// Numeric symbols whose label is the formatted value.
  static Alphabet numeric(const std::vector<Rational>& values) {
    std::vector<Symbol> out;
    for (const auto& v : values) out.push_back({format_rational(v), v});
    return Alphabet(std::move(out));
  }

  std::size_t size() const { return symbols_.size(); }
  const Symbol& operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  int index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) fail(ErrorKind::UnknownSymbol, "unknown symbol '" + label + "'");
    return it->second;
  }

  bool is_numeric() const {
    for (const auto& s : symbols_) {
      if (!s.value) return false;
    }
    return !symbols_.empty();
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, int> index_;
};

using Sequence = std::vector<int>;

/// Any finite exchangeable law on an alphabet. Probabilities only depend on multisets.
template <class L>
concept ExchangeableLaw = requires(const L& law, const Multiset& ms) {
  { law.alphabet() } -> std::convertible_to<const Alphabet&>;
  { law.horizon() } -> std::convertible_to<int>;
  { law.ordered_pmf(ms) } -> std::same_as<Rational>;
  { law.multiset_weight(ms) } -> std::same_as<Rational>;
  // P(next |future| draws form `future` | first draws form `observed`)
  { law.posterior_weight(ms, ms) } -> std::same_as<Rational>;
};

enum class Extendibility { Report, Require };

/// Finite-alphabet generalized urn sequence with weights alpha and replacement constant c.
class UrnModel {
 public:
  UrnModel(Alphabet alphabet, std::vector<Rational> alpha, Rational c, int length,
           Extendibility policy = Extendibility::Report)
      : alphabet_(std::move(alphabet)), alpha_(std::move(alpha)), c_(std::move(c)), length_(length) {
    validate(policy);
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  const std::vector<Rational>& alpha() const { return alpha_; }
  const Rational& c() const { return c_; }
  int length() const { return length_; }
  int horizon() const { return length_; }
  const Rational& alpha_total() const { return alpha_total_; }

  /// alpha(A) + 2 c length >= 0, the condition for 2*length-extendibility.
  bool is_extendible() const { return alpha_total_ + 2 * c_ * length_ >= 0; }

  /// Probability of an ordered sequence.
  Rational joint_pmf(std::span<const int> seq) const {
    check_length(static_cast<int>(seq.size()));
    std::vector<int> seen(alphabet_size(), 0);
    Rational out = 1;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      int a = seq[i];
      if (a < 0 || static_cast<std::size_t>(a) >= alphabet_size()) fail(ErrorKind::UnknownSymbol, "symbol index out of range");
      out *= (alpha_[a] + c_ * seen[a]) / (alpha_total_ + c_ * static_cast<int>(i));
      ++seen[a];
    }
    return out;
  }

  /// Probability of any fixed ordering of the multiset.
  Rational ordered_pmf(const Multiset& ms) const {
    check_length(ms.size());
    return formal_ordered_pmf(Multiset(alphabet_size()), ms);
  }

  Rational multiset_weight(const Multiset& ms) const { return ordered_pmf(ms) * multinomial(ms); }

  /// Law of the next draw after `prefix`.
  std::vector<Rational> predictive_law(std::span<const int> prefix) const {
    if (static_cast<int>(prefix.size()) >= length_) fail(ErrorKind::LengthExceeded, "prefix leaves no draw within the horizon");
    Multiset seen = Multiset::from_tuple(prefix, alphabet_size());
    Rational denom = alpha_total_ + c_ * static_cast<int>(prefix.size());
    std::vector<Rational> out(alphabet_size());
    for (std::size_t a = 0; a < alphabet_size(); ++a) out[a] = (alpha_[a] + c_ * seen[a]) / denom;
    return out;
  }

  /// The GUS that governs the remaining draws after observing `observed`.
  UrnModel posterior(const Multiset& observed) const {
    const int j = observed.size();
    if (j >= length_) fail(ErrorKind::LengthExceeded, "observation exhausts the horizon");
    std::vector<Rational> updated = alpha_;
    for (std::size_t a = 0; a < alphabet_size(); ++a) updated[a] += c_ * observed[a];
    return UrnModel(alphabet_, std::move(updated), c_, length_ - j);
  }

  /// P(next draws form `future` as a multiset | first draws form `observed`). Evaluated by the
  /// posterior update formula even where `observed` has probability zero.
  Rational posterior_weight(const Multiset& observed, const Multiset& future) const {
    check_length(observed.size() + future.size());
    return formal_ordered_pmf(observed, future) * multinomial(future);
  }

  Sequence sample(int n, std::uint64_t seed) const {
    check_length(n);
    Rng rng(seed);
    return sample(n, rng);
  }

  Sequence sample(int n, Rng& rng) const {
    check_length(n);
    Sequence out;
    out.reserve(n);
    std::vector<Rational> weights(alphabet_size());
    std::vector<int> seen(alphabet_size(), 0);
    for (int i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < alphabet_size(); ++a) weights[a] = alpha_[a] + c_ * seen[a];
      int a = draw_categorical(rng, weights);
      out.push_back(a);
      ++seen[a];
    }
    return out;
  }

  friend bool operator==(const UrnModel& a, const UrnModel& b) {
    return a.alphabet_ == b.alphabet_ && a.alpha_ == b.alpha_ && a.c_ == b.c_ && a.length_ == b.length_;
  }

 private:
  void check_length(int n) const {
    if (n > length_) fail(ErrorKind::LengthExceeded, "requested " + std::to_string(n) + " draws, horizon is " + std::to_string(length_));
  }

  Rational formal_ordered_pmf(const Multiset& observed, const Multiset& future) const {
    Rational num = 1;
    for (std::size_t a = 0; a < alphabet_size(); ++a) {
      num *= generalized_rising(alpha_[a] + c_ * observed[a], c_, future[a]);
      if (num == 0) return 0;
    }
    Rational den = generalized_rising(alpha_total_ + c_ * observed.size(), c_, future.size());
    return num / den;
  }

  void validate(Extendibility policy) {
    if (alpha_.size() != alphabet_.size()) fail(ErrorKind::InvalidArgument, "alpha must have one entry per symbol");
    if (length_ < 1) fail(ErrorKind::InvalidArgument, "length must be positive");
    alpha_total_ = 0;
    for (const auto& w : alpha_) {
      if (w < 0) fail(ErrorKind::InvalidArgument, "alpha must be nonnegative");
      alpha_total_ += w;
    }
    if (alpha_total_ == 0) fail(ErrorKind::EmptyMeasure, "alpha(A) = 0");
    if (c_ < 0) {
      const Rational step = -c_;
      for (std::size_t a = 0; a < alpha_.size(); ++a) {
        if (!is_integer(alpha_[a] / step)) {
          fail(ErrorKind::ExhaustedUrn, "alpha(" + alphabet_[a].label + ") = " + format_rational(alpha_[a]) +
                                            " is not a multiple of |c| = " + format_rational(step));
        }
      }
    }
    for (int i = 1; i <= length_; ++i) {
      if (alpha_total_ + c_ * (i - 1) <= 0) {
        fail(ErrorKind::ExhaustedUrn, "urn exhausted before draw " + std::to_string(i));
      }
    }
    if (policy == Extendibility::Require && !is_extendible()) {
      fail(ErrorKind::ExtendibilityViolated, "alpha(A) + 2 c length < 0");
    }
  }

  Alphabet alphabet_;
  std::vector<Rational> alpha_;
  Rational c_;
  int length_ = 0;
  Rational alpha_total_;
};

inline UrnModel new_urn_model(Alphabet symbols, std::vector<Rational> alpha, Rational c, int length,
                              Extendibility policy = Extendibility::Report) {
  return UrnModel(std::move(symbols), std::move(alpha), std::move(c), length, policy);
}

inline UrnModel posterior_model(const UrnModel& model, const Multiset& observed) { return model.posterior(observed); }

/// Uniform sampling without replacement from a population (alpha = multiplicities, c = -1).
inline UrnModel without_replacement(Alphabet symbols, const std::vector<int>& multiplicities, int length) {
  std::vector<Rational> alpha(multiplicities.begin(), multiplicities.end());
  return UrnModel(std::move(symbols), std::move(alpha), Rational(-1), length);
}

/// Binary exchangeable law directed by a uniform random parameter on (0, epsilon).
class MixtureModel {
 public:
  MixtureModel(Rational epsilon, int length) : epsilon_(std::move(epsilon)), length_(length) {
    if (epsilon_ <= 0 || epsilon_ > 1) fail(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1]");
    if (length_ < 1) fail(ErrorKind::InvalidArgument, "length must be positive");
    alphabet_ = Alphabet({{"0", Rational(0)}, {"1", Rational(1)}});
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t alphabet_size() const { return 2; }
  const Rational& epsilon() const { return epsilon_; }
  int horizon() const { return length_; }

  /// epsilon^{-1} * integral over (0, epsilon) of x^ones (1-x)^zeros, expanded binomially.
  Rational moment(int ones, int zeros) const {
    Rational out = 0;
    for (int j = 0; j <= zeros; ++j) {
      Rational term = Rational(binomial(zeros, j)) * pow(epsilon_, ones + j) / (ones + j + 1);
      if (j % 2) out -= term;
      else out += term;
    }
    return out;
  }

  Rational joint_pmf(std::span<const int> seq) const {
    int ones = 0;
    for (int e : seq) {
      if (e != 0 && e != 1) fail(ErrorKind::UnknownSymbol, "mixture sequences are binary");
      ones += e;
    }
    return moment(ones, static_cast<int>(seq.size()) - ones);
  }

  Rational ordered_pmf(const Multiset& ms) const { return moment(ms[1], ms[0]); }
  Rational multiset_weight(const Multiset& ms) const { return ordered_pmf(ms) * multinomial(ms); }

  Rational posterior_weight(const Multiset& observed, const Multiset& future) const {
    if (observed.size() + future.size() > length_) fail(ErrorKind::LengthExceeded, "beyond the mixture horizon");
    Rational base = ordered_pmf(observed);
    if (base == 0) fail(ErrorKind::InvalidArgument, "conditioning on a null event");
    return ordered_pmf(observed + future) * multinomial(future) / base;
  }

 private:
  Rational epsilon_;
  int length_;
  Alphabet alphabet_;
};

inline Rational mixture_pmf(const MixtureModel& mix, std::span<const int> seq) { return mix.joint_pmf(seq); }

static_assert(ExchangeableLaw<UrnModel>);
static_assert(ExchangeableLaw<MixtureModel>);

}  // namespace hoeffding
