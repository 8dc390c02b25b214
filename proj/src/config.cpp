#include "central_approx/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "central_approx/error.hpp"

namespace central_approx {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ValidationError("config: unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: " + where + "." + key + " has the wrong type");
  }
}

template <class T>
void maybe(const json& obj, const char* key, T& out, const std::string& where) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

void parse_dense(const json& m, DenseSpec& d) {
  check_keys(m, {"type", "n", "alphabet", "local", "global"}, "model");
  maybe(m, "n", d.n, "model");
  maybe(m, "alphabet", d.alphabet, "model");
  if (m.contains("local")) {
    const json& loc = m.at("local");
    check_keys(loc, {"kind", "h"}, "model.local");
    maybe(loc, "kind", d.local, "model.local");
    maybe(loc, "h", d.field, "model.local");
    if (d.local != "zero" && d.local != "field")
      throw ValidationError("config: model.local.kind must be zero or field");
  }
  if (m.contains("global")) {
    const json& g = m.at("global");
    check_keys(g, {"kind", "beta", "p", "lambda", "terms"}, "model.global");
    maybe(g, "kind", d.global, "model.global");
    maybe(g, "beta", d.beta, "model.global");
    maybe(g, "p", d.p, "model.global");
    maybe(g, "lambda", d.lambda, "model.global");
    if (g.contains("terms")) {
      const json& terms = g.at("terms");
      if (!terms.is_array()) throw ValidationError("config: model.global.terms must be an array");
      for (const json& t : terms) {
        check_keys(t, {"coefficient", "powers"}, "model.global.terms[]");
        Monomial mono;
        mono.coefficient = get<double>(t, "coefficient", "model.global.terms[]");
        if (t.contains("powers"))
          for (const auto& pw : get<std::vector<std::vector<long long>>>(t, "powers", "model.global.terms[]")) {
            if (pw.size() != 2 || pw[0] < 0)
              throw ValidationError("config: each power must be [pair_index, exponent]");
            mono.powers.emplace_back(static_cast<std::size_t>(pw[0]), static_cast<int>(pw[1]));
          }
        d.terms.push_back(std::move(mono));
      }
    }
    static const std::set<std::string> kinds{"zero", "sk", "p-spin", "self-quadratic", "polynomial"};
    if (!kinds.count(d.global))
      throw ValidationError("config: model.global.kind must be one of zero, sk, p-spin, "
                            "self-quadratic, polynomial");
  }
}

void parse_factor_graph(const json& m, FactorGraphSpec& f) {
  check_keys(m, {"type", "l", "r", "alphabet", "factor"}, "model");
  maybe(m, "l", f.l, "model");
  maybe(m, "r", f.r, "model");
  maybe(m, "alphabet", f.alphabet, "model");
  maybe(m, "factor", f.factor, "model");
}

void parse_rs(const json& m, RsSpec& s) {
  check_keys(m, {"type", "n", "q", "r", "P", "Q", "R", "beta"}, "model");
  maybe(m, "n", s.n, "model");
  maybe(m, "q", s.params.q, "model");
  maybe(m, "r", s.params.r, "model");
  maybe(m, "P", s.params.P, "model");
  maybe(m, "Q", s.params.Q, "model");
  maybe(m, "R", s.params.R, "model");
  maybe(m, "beta", s.beta, "model");
  s.params.validate();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(root, {"schema_version", "command", "model", "N", "format", "seed", "guards", "omega", "m"},
             "config");
  if (!root.contains("schema_version"))
    throw ValidationError("config: schema_version is required");
  if (get<int>(root, "schema_version", "config") != kSchemaVersion)
    throw ValidationError("config: unsupported schema_version (expected 1)");

  RunConfig c;
  maybe(root, "command", c.command, "config");
  maybe(root, "format", c.format, "config");
  maybe(root, "seed", c.seed, "config");
  if (root.contains("N")) c.N = get<std::vector<std::int64_t>>(root, "N", "config");
  if (root.contains("omega")) c.omega = get<double>(root, "omega", "config");
  if (root.contains("m")) c.m = get<int>(root, "m", "config");
  if (root.contains("guards")) {
    const json& g = root.at("guards");
    check_keys(g, {"max_types"}, "guards");
    maybe(g, "max_types", c.max_types, "guards");
  }
  if (root.contains("model")) {
    const json& m = root.at("model");
    check_keys(m, {"type", "n", "alphabet", "local", "global", "l", "r", "factor", "q", "P", "Q", "R", "beta"},
               "model");
    c.model = get<std::string>(m, "type", "model");
    if (c.model == "dense")
      parse_dense(m, c.dense);
    else if (c.model == "factor-graph")
      parse_factor_graph(m, c.factor_graph);
    else if (c.model == "rs")
      parse_rs(m, c.rs);
    else
      throw ValidationError("config: model.type must be dense, factor-graph or rs");
  }
  if (c.format != "table" && c.format != "csv" && c.format != "json")
    throw ValidationError("config: format must be table, csv or json");
  for (auto N : c.N)
    if (N < 1) throw ValidationError("config: every N must be >= 1");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

DenseModel build_dense_model(const DenseSpec& d) {
  Alphabet alphabet(d.alphabet);
  LocalTerm local = d.local == "field" ? field_local(d.field) : zero_local();
  const auto pairs = static_cast<std::size_t>(d.n) * static_cast<std::size_t>(d.n + 1) / 2;
  GlobalTerm global;
  if (d.global == "zero")
    global = zero_global();
  else if (d.global == "sk")
    global = sk_global(d.beta, d.n);
  else if (d.global == "p-spin")
    global = p_spin_global(d.beta, d.p, d.n);
  else if (d.global == "self-quadratic")
    global = self_quadratic_global(d.lambda, d.n);
  else if (d.global == "polynomial")
    global = polynomial_global(d.terms, pairs);
  else
    throw ValidationError("unknown global term '" + d.global + "'");
  return DenseModel(d.n, std::move(alphabet), std::move(local), std::move(global));
}

Ensemble build_ensemble(const FactorGraphSpec& f) {
  return make_ensemble(f.l, f.r, Alphabet(f.alphabet), f.factor);
}

std::vector<std::int64_t> parse_n_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError("invalid N list '" + text + "' (expected positive integers separated by commas)");
    }
  }
  if (out.empty()) throw ValidationError("empty N list");
  return out;
}

}  // namespace central_approx
