#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hoeffding/hoeffding.hpp"
#include "hoeffding/io.hpp"

using namespace hoeffding;
namespace hio = hoeffding::io;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kParse = 3,
  kValidation = 4,
  kHorizon = 5,
  kDegenerateAssumption = 6,
  kIo = 7,
};

struct Category {
  int code;
  const char* name;
};

Category categorize(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return {kParse, "parse"};
    case ErrorKind::IoError: return {kIo, "io"};
    case ErrorKind::HorizonTooShort:
    case ErrorKind::LengthExceeded: return {kHorizon, "horizon"};
    case ErrorKind::DegenerateAssumption: return {kDegenerateAssumption, "degenerate-assumption"};
    default: return {kValidation, "validation"};
  }
}

struct Config {
  std::string model_path;
  std::string kernel_path;
  std::string kernel2_path;
  std::optional<int> M;
  std::optional<int> level;
  std::optional<int> overlap;
  std::optional<int> length;
  std::string epsilon = "1/2";
  std::string eta = "1/2";
  std::optional<std::uint64_t> seed;
  int count = 10;
  int m = 1;
  int population = 0;
  std::string g_norm = "1";
  std::string out = "-";
  std::string format = "csv";
  std::string emit_kernels;
};

std::string rational_cell(const Rational& q) { return format_rational(q); }
std::string decimal_cell(const Rational& q) { return format_decimal(q); }

// Everything a run depends on except where its output goes.
std::string command_line(const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    out += (out.empty() ? "" : " ") + args[i];
  }
  return out;
}

class Runner {
 public:
  Runner(Config cfg, std::string command) : cfg_(std::move(cfg)), command_(std::move(command)) {}

  void emit(const hio::CsvTable& table) const {
    std::string fingerprint = command_;
    for (const auto* path : {&cfg_.model_path, &cfg_.kernel_path, &cfg_.kernel2_path}) {
      if (!path->empty()) fingerprint += "\n" + hio::read_file(*path);
    }
    hio::RunMetadata meta{command_, cfg_.seed ? std::to_string(*cfg_.seed) : "none", hio::fnv1a_hex(fingerprint)};
    if (cfg_.out == "-") {
      hio::render_csv(table, meta, std::cout);
    } else {
      hio::render_csv(table, meta, cfg_.out);
    }
  }

  hio::AnyModel any_model() const {
    if (cfg_.model_path.empty()) fail(ErrorKind::InvalidArgument, "--model is required");
    return hio::parse_model_file(cfg_.model_path);
  }

  UrnModel urn_model() const {
    auto any = any_model();
    if (!std::holds_alternative<UrnModel>(any)) fail(ErrorKind::InvalidArgument, "this command needs an urn model, not a mixture");
    return std::get<UrnModel>(std::move(any));
  }

  SymmetricKernel kernel(const std::string& path, const Alphabet& alphabet, const char* flag) const {
    if (path.empty()) fail(ErrorKind::InvalidArgument, std::string(flag) + " is required");
    return hio::parse_kernel_file(path, alphabet, cfg_.M);
  }

  int require_M() const {
    if (!cfg_.M) fail(ErrorKind::InvalidArgument, "--M is required");
    return *cfg_.M;
  }

  int require_level() const {
    if (!cfg_.level) fail(ErrorKind::InvalidArgument, "--level is required");
    return *cfg_.level;
  }

  // -------------------------------------------------------------------------

  void validate() const {
    auto any = any_model();
    hio::CsvTable t{{"field", "value"}, {}};
    if (const auto* urn = std::get_if<UrnModel>(&any)) {
      t.add({"kind", "urn"});
      t.add({"alphabet_size", std::to_string(urn->alphabet_size())});
      t.add({"alpha_total", rational_cell(urn->alpha_total())});
      t.add({"c", rational_cell(urn->c())});
      t.add({"length", std::to_string(urn->length())});
      t.add({"extendible", urn->is_extendible() ? "yes" : "no"});
      for (int M = 1; M <= urn->length(); ++M) {
        std::string hits;
        for (const auto& h : assumption_check(M, urn->alpha_total(), urn->c())) {
          hits += (hits.empty() ? "" : " ") + std::string("(") + std::to_string(h.q) + "," + std::to_string(h.n) + ")";
        }
        t.add({"assumption_M" + std::to_string(M), hits.empty() ? "ok" : hits});
      }
    } else {
      const auto& mix = std::get<MixtureModel>(any);
      t.add({"kind", "mixture"});
      t.add({"epsilon", rational_cell(mix.epsilon())});
      t.add({"length", std::to_string(mix.horizon())});
    }
    emit(t);
  }

  void pmf() const {
    auto any = any_model();
    hio::CsvTable t{{"multiset", "ordered_pmf", "multiset_weight", "multiset_weight_decimal"}, {}};
    std::visit(
        [&](const auto& law) {
          const int L = cfg_.length.value_or(law.horizon());
          if (L < 0 || L > law.horizon()) fail(ErrorKind::LengthExceeded, "--length exceeds the horizon");
          for_each_multiset(law.alphabet().size(), L, [&](const Multiset& ms) {
            const Rational w = law.multiset_weight(ms);
            t.add({hio::multiset_label(ms, law.alphabet()), rational_cell(law.ordered_pmf(ms)), rational_cell(w), decimal_cell(w)});
          });
        },
        any);
    emit(t);
  }

  void sample() const {
    const UrnModel model = urn_model();
    if (!cfg_.seed) fail(ErrorKind::InvalidArgument, "--seed is required for sampling");
    const int L = cfg_.length.value_or(model.length());
    if (cfg_.count < 0) fail(ErrorKind::InvalidArgument, "--count must be nonnegative");
    Rng rng(*cfg_.seed);
    hio::CsvTable t{{"draw", "sequence"}, {}};
    for (int i = 0; i < cfg_.count; ++i) t.add({std::to_string(i + 1), hio::sequence_label(model.sample(L, rng), model.alphabet())});
    emit(t);
  }

  void coeffs() const {
    const UrnModel model = urn_model();
    const int M = require_M();
    CoefficientTable table(M, model.alpha_total(), model.c());
    hio::CsvTable t{{"coefficient", "indices", "value", "decimal"}, {}};
    auto idx = [](std::initializer_list<int> v) {
      std::string s;
      for (int i : v) s += (s.empty() ? "" : " ") + std::to_string(i);
      return s;
    };
    for (const auto& [key, v] : table.phi_entries()) t.add({"phi", idx({key[0], key[1], key[2], key[3]}), rational_cell(v), decimal_cell(v)});
    for (const auto& [key, v] : table.psi_entries()) t.add({"psi", idx({key[0], key[1], key[2]}), rational_cell(v), decimal_cell(v)});
    for (int k = 1; k <= M; ++k) t.add({"gamma", idx({k}), rational_cell(table.gamma(k)), decimal_cell(table.gamma(k))});
    for (int k = 1; k <= M; ++k) {
      for (int a = 1; a <= k; ++a) t.add({"theta", idx({k, a}), rational_cell(table.theta(k, a)), decimal_cell(table.theta(k, a))});
    }
    for (int k = 1; k <= M; ++k) {
      for (int a = 1; a <= k; ++a) {
        t.add({"theta_star", idx({k, a}), rational_cell(table.theta_star(k, a)), decimal_cell(table.theta_star(k, a))});
      }
    }
    emit(t);
  }

  void decompose_cmd() const {
    const UrnModel model = urn_model();
    const SymmetricKernel T = kernel(cfg_.kernel_path, model.alphabet(), "--kernel");
    const int M = cfg_.M.value_or(T.arity());
    const auto d = decompose(model, T, M);
    hio::CsvTable t{{"section", "level", "key", "value", "decimal"}, {}};
    t.add({"mean", "0", "", rational_cell(d.mean), decimal_cell(d.mean)});
    for (int s = 1; s <= M; ++s) {
      for (int a = 1; a <= s; ++a) {
        t.add({"theta", std::to_string(s), std::to_string(a), rational_cell(d.table->theta(s, a)), decimal_cell(d.table->theta(s, a))});
        t.add({"theta_star", std::to_string(s), std::to_string(a), rational_cell(d.table->theta_star(s, a)),
               decimal_cell(d.table->theta_star(s, a))});
      }
    }
    for (int s = 1; s <= M; ++s) {
      const auto& phi = d.kernel(s);
      for (std::size_t i = 0; i < phi.dimension(); ++i) {
        t.add({"kernel", std::to_string(s), hio::multiset_label(phi.space()[i], model.alphabet()), rational_cell(phi.value_at(i)),
               decimal_cell(phi.value_at(i))});
      }
    }
    if (!cfg_.emit_kernels.empty()) {
      hio::write_text(cfg_.emit_kernels + "_0.json",
                      hio::kernel_json(SymmetricKernel::constant(model.alphabet_size(), 0, d.mean), model.alphabet()).dump(2) + "\n");
      for (int s = 1; s <= M; ++s) {
        hio::write_text(cfg_.emit_kernels + "_" + std::to_string(s) + ".json", hio::kernel_json(d.kernel(s), model.alphabet()).dump(2) + "\n");
      }
    }
    emit(t);
  }

  void kernel_rows(const SymmetricKernel& K, const Alphabet& alphabet) const {
    hio::CsvTable t{{"multiset", "value", "decimal"}, {}};
    for (std::size_t i = 0; i < K.dimension(); ++i) {
      t.add({hio::multiset_label(K.space()[i], alphabet), rational_cell(K.value_at(i)), decimal_cell(K.value_at(i))});
    }
    emit(t);
  }

  void tabulate() const {
    const UrnModel model = urn_model();
    kernel_rows(kernel(cfg_.kernel_path, model.alphabet(), "--kernel"), model.alphabet());
  }

  /// Mean plus the U-statistics of PREFIX_s.json, s = 1..M, as written by decompose --emit-kernels.
  void reconstruct() const {
    const UrnModel model = urn_model();
    const int M = require_M();
    const auto load = [&](int s) { return hio::parse_kernel_file(cfg_.emit_kernels + "_" + std::to_string(s) + ".json", model.alphabet()); };
    const SymmetricKernel mean = load(0);
    SymmetricKernel total = SymmetricKernel::constant(model.alphabet_size(), M, mean.value_at(0));
    for (int s = 1; s <= M; ++s) total += u_statistic(load(s), M);
    kernel_rows(total, model.alphabet());
  }

  void covariance() const {
    const UrnModel model = urn_model();
    const SymmetricKernel T = kernel(cfg_.kernel_path, model.alphabet(), "--kernel");
    const SymmetricKernel Z = cfg_.kernel2_path.empty() ? T : kernel(cfg_.kernel2_path, model.alphabet(), "--kernel2");
    const int M = cfg_.M.value_or(T.arity());
    const auto report = covariance_decompose(model, T, Z, M);
    hio::CsvTable t{{"level", "weight", "component", "decimal"}, {}};
    for (int s = 1; s <= M; ++s) {
      t.add({std::to_string(s), rational_cell(report.weights[s - 1]), rational_cell(report.levels[s - 1]), decimal_cell(report.levels[s - 1])});
    }
    t.add({"total", "", rational_cell(report.total), decimal_cell(report.total)});
    emit(t);
  }

  void degenerate_cov_cmd() const {
    const UrnModel model = urn_model();
    const SymmetricKernel T = kernel(cfg_.kernel_path, model.alphabet(), "--kernel");
    const SymmetricKernel V = cfg_.kernel2_path.empty() ? T : kernel(cfg_.kernel2_path, model.alphabet(), "--kernel2");
    const int n = T.arity();
    hio::CsvTable t{{"overlap", "value", "decimal"}, {}};
    std::vector<int> overlaps;
    if (cfg_.overlap) {
      overlaps.push_back(*cfg_.overlap);
    } else {
      for (int r = 0; r <= n; ++r) {
        if (2 * n - r <= model.length()) overlaps.push_back(r);
      }
    }
    for (int r : overlaps) {
      const Rational v = degenerate_cov(model, T, V, r);
      t.add({std::to_string(r), rational_cell(v), decimal_cell(v)});
    }
    emit(t);
  }

  void check_wi() const {
    auto any = any_model();
    const int n_max = require_level();
    hio::CsvTable t{{"level", "status", "basis_dim", "basis_index", "overlap", "witness", "value", "decimal"}, {}};
    bool all = true;
    std::visit(
        [&](const auto& law) {
          for (int n = 1; n <= n_max; ++n) {
            const auto report = check_weak_independence(law, n);
            all = all && report.weakly_independent();
            const std::string dim = std::to_string(report.basis.size());
            t.add({std::to_string(n), report.weakly_independent() ? "pass" : "fail", dim, "", "", "", "", ""});
            for (int r : report.not_checkable_r) t.add({std::to_string(n), "not-checkable", dim, "", std::to_string(r), "", "", ""});
            for (const auto& v : report.violations) {
              t.add({std::to_string(n), "violation", dim, std::to_string(v.basis_index), std::to_string(v.r),
                     hio::multiset_label(v.witness, law.alphabet()), rational_cell(v.value), decimal_cell(v.value)});
            }
          }
        },
        any);
    t.add({"summary", all ? "weakly independent up to level " + std::to_string(n_max) : "not weakly independent", "", "", "", "", "", ""});
    emit(t);
  }

  void counterexample() const {
    const Rational e = parse_rational(cfg_.epsilon);
    const auto report = run_counterexample(e);
    hio::CsvTable t{{"quantity", "value", "decimal"}, {}};
    auto row = [&](const char* name, const Rational& v) { t.add({name, rational_cell(v), decimal_cell(v)}); };
    row("E(phi|X2=0)", report.given_second_zero);
    row("E(phi|X2=1)", report.given_second_one);
    row("E(phi|X3=0)", report.given_third_zero);
    row("closed_form", report.closed_form);
    emit(t);
  }

  int weak_copy() const {
    const UrnModel model = urn_model();
    const int k = require_level();
    const SymmetricKernel V = hio::parse_kernel_file(cfg_.kernel_path.empty() ? fail_missing("--kernel") : cfg_.kernel_path,
                                                     model.alphabet(), k + 1);
    const auto tilted = build_weak_copy(model, k, V, parse_rational(cfg_.eta));
    const auto report = verify_weak_copy(tilted);
    hio::CsvTable t{{"length", "sequence", "base_pmf", "tilted_pmf", "difference", "difference_decimal"}, {}};
    for (int L = 1; L <= report.checked_length; ++L) {
      detail::for_each_sequence(model.alphabet_size(), L, [&](const Sequence& seq) {
        const Rational p = model.joint_pmf(seq), q = marginal_pmf(tilted, seq);
        t.add({std::to_string(L), hio::sequence_label(seq, model.alphabet()), rational_cell(p), rational_cell(q), rational_cell(q - p),
               decimal_cell(q - p)});
      });
    }
    emit(t);
    std::cerr << "scale=" << format_rational(tilted.scale) << " certificate=" << format_rational(tilted.certificate())
              << " lower_marginals_match=" << report.lower_marginals_match << " discrepancy=" << report.discrepancy.has_value()
              << " exchangeable=" << report.exchangeable << " normalized=" << report.normalized
              << " nonnegative=" << report.nonnegative << " certified=" << report.certified << "\n";
    return report.passed() ? kOk : kValidation;
  }

  void zhao_chen() const {
    const int M = cfg_.population;
    const int m = cfg_.m;
    if (M < 2) fail(ErrorKind::InvalidArgument, "--population must be at least 2");
    const Rational norm = parse_rational(cfg_.g_norm);
    std::vector<Symbol> symbols;
    for (int a = 0; a < M; ++a) symbols.push_back({"u" + std::to_string(a + 1), std::nullopt});
    const UrnModel model = without_replacement(Alphabet(symbols), std::vector<int>(M, 1), M);
    std::mt19937_64 rng(cfg_.seed.value_or(0));
    std::uniform_int_distribution<int> coef(-4, 4);
    hio::CsvTable t{{"i", "as_printed", "corrected", "bruteforce_ratio", "corrected_decimal"}, {}};
    for (int i = 1; i <= m; ++i) {
      SymmetricKernel g = SymmetricKernel::zero(M, i);
      for (const auto& b : degeneracy_nullspace(model, i)) g += Rational(coef(rng)) * b;
      Rational g2 = 0;
      for (std::size_t x = 0; x < g.dimension(); ++x) g2 += model.multiset_weight(g.space()[x]) * g.value_at(x) * g.value_at(x);
      const std::string ratio = g2 == 0 ? "" : rational_cell(zhao_chen_bruteforce(model, m, g) / g2 * norm);
      const Rational corrected = zhao_chen_variance(M, m, i, norm, ZhaoChenForm::Corrected);
      t.add({std::to_string(i), rational_cell(zhao_chen_variance(M, m, i, norm, ZhaoChenForm::AsPrinted)), rational_cell(corrected), ratio,
             decimal_cell(corrected)});
    }
    emit(t);
  }

  void lemma3() const {
    const int N = cfg_.population;
    if (N < 2) fail(ErrorKind::InvalidArgument, "--population must be at least 2");
    hio::CsvTable t{{"n", "i", "k", "decimal"}, {}};
    for (int n = 1; n <= N - 1; ++n) {
      for (int i = 1; i <= n; ++i) {
        const Rational k = lemma3_constant(N, n, i);
        t.add({std::to_string(n), std::to_string(i), rational_cell(k), decimal_cell(k)});
      }
    }
    emit(t);
  }

 private:
  [[noreturn]] static std::string fail_missing(const char* flag) { fail(ErrorKind::InvalidArgument, std::string(flag) + " is required"); }

  Config cfg_;
  std::string command_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Hoeffding-ANOVA decompositions of generalized urn sequences"};
  app.set_version_flag("--version", std::string("hoeffding ") + hio::kToolVersion);
  app.require_subcommand(1);
  Config cfg;

  auto add = [&](const std::string& name, const std::string& about) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv"}));
    sub->add_option("--out", cfg.out, "output path, '-' for stdout");
    return sub;
  };
  auto model = [&](CLI::App* sub) { sub->add_option("--model", cfg.model_path, "model JSON file")->required(); };

  auto* validate = add("validate", "parse a model and report its parameters and coefficient hypotheses");
  model(validate);
  auto* pmf = add("pmf", "multiset law of the first --length draws");
  model(pmf);
  pmf->add_option("--length", cfg.length, "number of draws (default: model length)");
  auto* sample = add("sample", "seeded Monte Carlo draws");
  model(sample);
  sample->add_option("--seed", cfg.seed, "RNG seed")->required();
  sample->add_option("--count", cfg.count, "number of sequences");
  sample->add_option("--length", cfg.length, "sequence length (default: model length)");
  auto* coeffs = add("coeffs", "Phi, Psi, gamma, theta and theta* tables");
  model(coeffs);
  coeffs->add_option("--M", cfg.M, "horizon")->required();
  auto* decompose = add("decompose", "Hoeffding decomposition of a symmetric statistic");
  model(decompose);
  decompose->add_option("--kernel", cfg.kernel_path, "statistic JSON file")->required();
  decompose->add_option("--M", cfg.M, "arity (default: kernel arity)");
  decompose->add_option("--emit-kernels", cfg.emit_kernels, "write PREFIX_s.json for each level s");
  auto* tabulate = add("tabulate", "print a statistic as a multiset table");
  model(tabulate);
  tabulate->add_option("--kernel", cfg.kernel_path, "statistic JSON file")->required();
  tabulate->add_option("--M", cfg.M, "arity for builtin kernels");
  auto* reconstruct = add("reconstruct", "re-sum kernels written by decompose --emit-kernels");
  model(reconstruct);
  reconstruct->add_option("--kernels", cfg.emit_kernels, "prefix passed to --emit-kernels")->required();
  reconstruct->add_option("--M", cfg.M, "arity of the original statistic")->required();
  auto* covariance = add("covariance", "level-wise covariance of two statistics");
  model(covariance);
  covariance->add_option("--kernel", cfg.kernel_path, "first statistic")->required();
  covariance->add_option("--kernel2", cfg.kernel2_path, "second statistic (default: the first)");
  covariance->add_option("--M", cfg.M, "arity (default: kernel arity)");
  auto* dcov = add("degenerate-cov", "overlap covariances of degenerate kernels");
  model(dcov);
  dcov->add_option("--kernel", cfg.kernel_path, "first degenerate kernel")->required();
  dcov->add_option("--kernel2", cfg.kernel2_path, "second degenerate kernel (default: the first)");
  dcov->add_option("--overlap", cfg.overlap, "single overlap r (default: every admissible r)");
  auto* wi = add("check-wi", "weak independence up to a level");
  model(wi);
  wi->add_option("--level", cfg.level, "largest level n to check")->required();
  auto* cex = add("counterexample", "the two-point mixture counterexample");
  cex->add_option("--epsilon", cfg.epsilon, "mixture weight in (0,1), as p/q");
  auto* wc = add("weak-copy", "k-weak copy of a Polya urn by density tilting");
  model(wc);
  wc->add_option("--kernel", cfg.kernel_path, "seed statistic of arity k + 1")->required();
  wc->add_option("--level", cfg.level, "k")->required();
  wc->add_option("--eta", cfg.eta, "density bound in (0,1), as p/q");
  auto* zc = add("zhao-chen", "finite-population variance of degenerate U-statistics");
  zc->add_option("--population", cfg.population, "population size")->required();
  zc->add_option("--m", cfg.m, "sample size")->required();
  zc->add_option("--g-norm", cfg.g_norm, "E[g^2], as p/q");
  zc->add_option("--seed", cfg.seed, "seed for the brute-force kernel");
  auto* l3 = add("lemma3", "law-free constants k(N, n, i)");
  l3->add_option("--population", cfg.population, "N")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  Runner run(cfg, command_line(args));
  try {
    if (validate->parsed()) run.validate();
    else if (pmf->parsed()) run.pmf();
    else if (sample->parsed()) run.sample();
    else if (coeffs->parsed()) run.coeffs();
    else if (decompose->parsed()) run.decompose_cmd();
    else if (tabulate->parsed()) run.tabulate();
    else if (reconstruct->parsed()) run.reconstruct();
    else if (covariance->parsed()) run.covariance();
    else if (dcov->parsed()) run.degenerate_cov_cmd();
    else if (wi->parsed()) run.check_wi();
    else if (cex->parsed()) run.counterexample();
    else if (wc->parsed()) return run.weak_copy();
    else if (zc->parsed()) run.zhao_chen();
    else if (l3->parsed()) run.lemma3();
  } catch (const Error& e) {
    const auto cat = categorize(e.kind());
    std::cerr << "error category=" << cat.name << " kind=" << to_string(e.kind()) << ": " << e.what() << "\n";
    return cat.code;
  } catch (const std::exception& e) {
    std::cerr << "error category=internal: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
