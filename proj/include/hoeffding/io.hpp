#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hoeffding/error.hpp"
#include "hoeffding/kernels.hpp"
#include "hoeffding/models.hpp"
#include "hoeffding/rational.hpp"

namespace hoeffding::io {

using json = nlohmann::json;
using AnyModel = std::variant<UrnModel, MixtureModel>;

inline constexpr const char* kToolVersion = "0.1.0";

inline Rational rational_field(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorKind::ParseError, where + ": " + e.what());
    }
  }
  fail(ErrorKind::ParseError, where + ": expected a rational string \"p/q\" or an integer");
}

inline const json& required(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::ParseError, where + ": missing field '" + key + "'");
  return j.at(key);
}

inline int int_field(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(ErrorKind::ParseError, where + ": expected an integer");
  return j.get<int>();
}

inline Alphabet parse_symbols(const json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::ParseError, "symbols: expected a non-empty array");
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "symbols[" + std::to_string(i) + "]";
    const json& label = required(j[i], "label", where);
    if (!label.is_string()) fail(ErrorKind::ParseError, where + ".label: expected a string");
    Symbol s{label.get<std::string>(), std::nullopt};
    if (j[i].contains("value")) s.value = rational_field(j[i]["value"], where + ".value");
    out.push_back(std::move(s));
  }
  return Alphabet(std::move(out));
}

/// Model document: {"symbols": [...], "alpha": {...}, "c": "p/q", "length": n}
/// or {"mixture": {"epsilon": "p/q"}, "length": n}.
inline AnyModel parse_model_json(const json& doc, Extendibility policy = Extendibility::Report) {
  if (!doc.is_object()) fail(ErrorKind::ParseError, "model: expected a JSON object");
  const int length = int_field(required(doc, "length", "model"), "length");
  if (doc.contains("mixture")) {
    const Rational eps = rational_field(required(doc["mixture"], "epsilon", "mixture"), "mixture.epsilon");
    return MixtureModel(eps, length);
  }
  Alphabet symbols = parse_symbols(required(doc, "symbols", "model"));
  const json& alpha_doc = required(doc, "alpha", "model");
  if (!alpha_doc.is_object()) fail(ErrorKind::ParseError, "alpha: expected an object keyed by label");
  std::vector<Rational> alpha(symbols.size(), Rational(0));
  std::vector<bool> seen(symbols.size(), false);
  for (const auto& [label, value] : alpha_doc.items()) {
    int a;
    try {
      a = symbols.index_of(label);
    } catch (const Error&) {
      fail(ErrorKind::ParseError, "alpha." + label + ": unknown symbol");
    }
    alpha[a] = rational_field(value, "alpha." + label);
    seen[a] = true;
  }
  for (std::size_t a = 0; a < symbols.size(); ++a) {
    if (!seen[a]) fail(ErrorKind::ParseError, "alpha: missing weight for '" + symbols[a].label + "'");
  }
  const Rational c = rational_field(required(doc, "c", "model"), "c");
  if (doc.contains("extendibility") && doc["extendibility"] == "require") policy = Extendibility::Require;
  return new_urn_model(std::move(symbols), std::move(alpha), c, length, policy);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    fail(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + e.what());
  }
}

inline AnyModel parse_model_file(const std::string& path, Extendibility policy = Extendibility::Report) {
  return parse_model_json(parse_json_text(read_file(path), path), policy);
}

inline Multiset parse_multiset(const json& j, const Alphabet& alphabet, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::ParseError, where + ": expected an object of label counts");
  Multiset ms(alphabet.size());
  for (const auto& [label, count] : j.items()) {
    int a;
    try {
      a = alphabet.index_of(label);
    } catch (const Error&) {
      fail(ErrorKind::UnknownSymbol, where + "." + label + ": unknown symbol");
    }
    const int times = int_field(count, where + "." + label);
    if (times < 0) fail(ErrorKind::ParseError, where + "." + label + ": negative multiplicity");
    ms.add(a, times);
  }
  return ms;
}

inline json multiset_json(const Multiset& ms, const Alphabet& alphabet) {
  json out = json::object();
  for (std::size_t a = 0; a < ms.alphabet_size(); ++a) {
    if (ms[a] > 0) out[alphabet[a].label] = ms[a];
  }
  return out;
}

/// Kernel document: {"arity": n, "entries": [{"multiset": {...}, "value": "p/q"}, ...]},
/// {"builtin": "max" | "min" | "mean", "arity"?: n} or {"builtin": "indicator", "multiset": {...}}.
inline SymmetricKernel parse_kernel_json(const json& doc, const Alphabet& alphabet, std::optional<int> default_arity = {}) {
  if (!doc.is_object()) fail(ErrorKind::ParseError, "kernel: expected a JSON object");
  if (doc.contains("builtin")) {
    const std::string name = doc["builtin"].is_string() ? doc["builtin"].get<std::string>() : "";
    if (name == "indicator") return indicator_kernel(alphabet.size(), parse_multiset(required(doc, "multiset", "kernel"), alphabet, "multiset"));
    std::optional<int> arity = default_arity;
    if (doc.contains("arity")) arity = int_field(doc["arity"], "arity");
    if (!arity) fail(ErrorKind::ParseError, "kernel: builtin needs an arity (field 'arity' or --M)");
    if (name == "max") return builtin_kernel(Builtin::Max, alphabet, *arity);
    if (name == "min") return builtin_kernel(Builtin::Min, alphabet, *arity);
    if (name == "mean") return builtin_kernel(Builtin::Mean, alphabet, *arity);
    fail(ErrorKind::ParseError, "kernel: unknown builtin '" + name + "'");
  }
  const int arity = int_field(required(doc, "arity", "kernel"), "arity");
  if (arity < 0) fail(ErrorKind::ParseError, "arity: must be nonnegative");
  const json& entries = required(doc, "entries", "kernel");
  if (!entries.is_array()) fail(ErrorKind::ParseError, "entries: expected an array");
  std::vector<std::pair<Multiset, Rational>> table;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    table.emplace_back(parse_multiset(required(entries[i], "multiset", where), alphabet, where + ".multiset"),
                       rational_field(required(entries[i], "value", where), where + ".value"));
  }
  return from_table(alphabet.size(), arity, table);
}

inline SymmetricKernel parse_kernel_file(const std::string& path, const Alphabet& alphabet, std::optional<int> default_arity = {}) {
  return parse_kernel_json(parse_json_text(read_file(path), path), alphabet, default_arity);
}

inline json kernel_json(const SymmetricKernel& kernel, const Alphabet& alphabet) {
  json entries = json::array();
  for (std::size_t i = 0; i < kernel.dimension(); ++i) {
    entries.push_back({{"multiset", multiset_json(kernel.space()[i], alphabet)}, {"value", format_rational(kernel.value_at(i))}});
  }
  return {{"arity", kernel.arity()}, {"entries", entries}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::IoError, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// CSV reports

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct RunMetadata {
  std::string command;
  std::string seed = "none";
  std::string parameter_hash;
};

inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline void render_csv(const CsvTable& table, const RunMetadata& meta, std::ostream& out) {
  out << "# tool=hoeffding " << kToolVersion << "\n";
  out << "# command=" << meta.command << "\n";
  out << "# seed=" << meta.seed << "\n";
  out << "# rng=" << kRngAlgorithm << "\n";
  out << "# params=" << meta.parameter_hash << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_escape(table.columns[i]);
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
    out << "\n";
  }
}

inline void render_csv(const CsvTable& table, const RunMetadata& meta, const std::string& path) {
  std::ostringstream buf;
  render_csv(table, meta, buf);
  write_text(path, buf.str());
}

/// A space-separated label list for a multiset, e.g. "a a b".
inline std::string multiset_label(const Multiset& ms, const Alphabet& alphabet) {
  std::string out;
  for (int a : ms.to_tuple()) out += (out.empty() ? "" : " ") + alphabet[a].label;
  return out;
}

inline std::string sequence_label(std::span<const int> seq, const Alphabet& alphabet) {
  std::string out;
  for (int a : seq) out += (out.empty() ? "" : " ") + alphabet[a].label;
  return out;
}

}  // namespace hoeffding::io
