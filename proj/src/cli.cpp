#include "central_approx/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "central_approx/acceptance.hpp"
#include "central_approx/clt.hpp"
#include "central_approx/config.hpp"
#include "central_approx/error.hpp"
#include "central_approx/lattice.hpp"
#include "central_approx/ldpc.hpp"
#include "central_approx/replica_rs.hpp"
#include "central_approx/report.hpp"

namespace central_approx {

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> N;
  std::optional<std::string> format;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> max_types;
  std::optional<int> l, r, n, m;
  std::optional<std::string> factor, alphabet;
  std::optional<double> beta, q, moment_r, P, Q, R, omega;
};

std::string join(std::span<const double> xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_real(xs[i]);
  return s;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("invalid number list '" + text + "'");
    }
  }
  return out;
}

RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!c.command.empty() && c.command != command)
    throw ValidationError("config is for command '" + c.command + "', not '" + command + "'");
  c.command = command;
  if (f.N) c.N = parse_n_list(*f.N);
  if (f.format) c.format = *f.format;
  if (f.seed) c.seed = *f.seed;
  if (f.max_types) c.max_types = *f.max_types;
  if (f.omega) c.omega = *f.omega;
  if (f.m) c.m = *f.m;

  const bool fg_flags = f.l || f.r || f.factor;
  if (fg_flags || (f.alphabet && c.model != "dense")) {
    if (c.model != "factor-graph" && c.model != "none")
      throw ValidationError("--l/--r/--factor apply to factor-graph models only");
    c.model = "factor-graph";
    if (f.l) c.factor_graph.l = *f.l;
    if (f.r) c.factor_graph.r = *f.r;
    if (f.factor) c.factor_graph.factor = *f.factor;
    if (f.alphabet) c.factor_graph.alphabet = parse_reals(*f.alphabet);
  } else if (f.alphabet) {
    c.dense.alphabet = parse_reals(*f.alphabet);
  }
  if (f.n) (c.model == "dense" ? c.dense.n : c.rs.n) = *f.n;
  if (f.beta) c.rs.beta = c.dense.beta = *f.beta;
  if (f.q) c.rs.params.q = *f.q;
  if (f.moment_r) c.rs.params.r = *f.moment_r;
  if (f.P) c.rs.params.P = *f.P;
  if (f.Q) c.rs.params.Q = *f.Q;
  if (f.R) c.rs.params.R = *f.R;
  if (c.format != "table" && c.format != "csv" && c.format != "json")
    throw ValidationError("--format must be table, csv or json");
  return c;
}

const std::vector<std::int64_t>& require_N(const RunConfig& c) {
  if (c.N.empty()) throw ValidationError(c.command + ": an N list is required (--N or config N)");
  return c.N;
}

DenseModel require_dense(const RunConfig& c) {
  if (c.model != "dense")
    throw ValidationError(c.command + ": a dense model config is required (--config with model.type dense)");
  return build_dense_model(c.dense);
}

Ensemble require_ensemble(const RunConfig& c) {
  if (c.model != "factor-graph" && c.model != "none")
    throw ValidationError(c.command + ": a factor-graph model is required");
  return build_ensemble(c.factor_graph);
}

SolverOptions solver(const RunConfig& c) {
  SolverOptions o;
  o.seed = c.seed;
  return o;
}

BetheOptions bethe(const RunConfig& c) {
  BetheOptions o;
  o.seed = c.seed;
  return o;
}

void describe_ensemble(Report& rep, const Ensemble& e, const RunConfig& c) {
  rep.note("l", std::to_string(e.l()));
  rep.note("r", std::to_string(e.r()));
  rep.note("alphabet", join(e.alphabet().values()));
  rep.note("factor", c.factor_graph.factor);
}

void add_covariance(Report& rep, const std::string& block, const CovarianceResult& cov) {
  for (std::size_t i = 0; i < cov.labels.size(); ++i)
    for (std::size_t j = 0; j < cov.labels.size(); ++j)
      rep.add_row({block, cov.labels[i], cov.labels[j], cov.matrix(i, j)});
  rep.note(block + ".min_eigenvalue", format_real(cov.min_eigenvalue));
  rep.note(block + ".rank", std::to_string(cov.rank));
  rep.note(block + ".symmetry_defect", format_real(cov.symmetry_defect));
}

int run_command(const RunConfig& c, Report& rep) {
  const std::string& cmd = c.command;
  rep.title = cmd;
  const EnumerationLimits limits{c.max_types};

  if (cmd == "dense-exact") {
    const DenseModel model = require_dense(c);
    rep.columns = {"N", "log_exact"};
    for (auto N : require_N(c)) rep.add_row({N, exact_log_type_sum(model, N, limits)});
  } else if (cmd == "dense-asymptotic" || cmd == "dense-compare") {
    const DenseModel model = require_dense(c);
    const auto sol = solve_variational(model, solver(c));
    const auto ca = central_approx_constant(model, sol);
    rep.note("F", format_real(sol.F));
    rep.note("nu_star", join(sol.nu_star.weights()));
    rep.note("maximizers", std::to_string(sol.maximizers.size()));
    rep.note("residual", format_real(sol.residual));
    rep.note("det", format_real(ca.det_value));
    rep.note("log_constant", format_real(ca.log_constant));
    if (cmd == "dense-asymptotic") {
      rep.columns = {"N", "F", "log_constant", "log_asymptotic"};
      for (auto N : require_N(c)) rep.add_row({N, ca.F, ca.log_constant, asymptotic_log_estimate(ca, N)});
    } else {
      rep.columns = {"N", "log_exact", "log_asymptotic", "ratio"};
      for (auto N : require_N(c)) {
        const double exact = exact_log_type_sum(model, N, limits);
        const double approx = asymptotic_log_estimate(ca, N);
        rep.add_row({N, exact, approx, std::exp(exact - approx)});
      }
    }
  } else if (cmd == "rs-det") {
    c.rs.params.validate();
    const int n = c.rs.n;
    const double closed = rs_determinant(n, c.rs.params);
    const Matrix a = build_pqr_matrix(n, c.rs.params.P, c.rs.params.Q, c.rs.params.R);
    const double direct = det(Matrix::identity(a.rows()) - a * rs_moment_matrix(n, c.rs.params.q, c.rs.params.r));
    const double scale = std::max(std::abs(closed), std::abs(direct));
    rep.columns = {"n", "closed_form", "direct", "rel_diff"};
    rep.add_row({static_cast<std::int64_t>(n), closed, direct, scale > 0 ? std::abs(closed - direct) / scale : 0.0});
    const auto ev = pqr_eigenvalues(n, c.rs.params.P, c.rs.params.Q, c.rs.params.R);
    rep.note("D2g eigenvalues (mult 1, n-1, n(n-3)/2)", join(ev));
  } else if (cmd == "rs-correction") {
    c.rs.params.validate();
    rep.columns = {"N", "correction"};
    for (auto N : require_N(c)) rep.add_row({N, rs_correction_n0(N, c.rs.params)});
  } else if (cmd == "sk") {
    rep.columns = {"N", "beta", "correction"};
    for (auto N : require_N(c)) rep.add_row({N, c.rs.beta, sk_paramagnetic_correction(c.rs.beta, N)});
  } else if (cmd == "fg-exact") {
    const Ensemble e = require_ensemble(c);
    describe_ensemble(rep, e, c);
    rep.columns = {"N", "M", "log_exact"};
    for (auto N : require_N(c)) rep.add_row({N, e.factor_nodes(N), exact_log_expected_Z(e, N)});
  } else if (cmd == "fg-asymptotic" || cmd == "fg-compare") {
    const Ensemble e = require_ensemble(c);
    describe_ensemble(rep, e, c);
    const auto a = fg_asymptotics(e, bethe(c));
    rep.note("F", format_real(a.solution.F));
    rep.note("nu_star", join(a.solution.nu_star.weights()));
    rep.note("s", std::to_string(a.step));
    rep.note("det", format_real(a.det_value));
    rep.note("log_constant", format_real(a.log_constant));
    if (cmd == "fg-asymptotic") {
      rep.columns = {"N", "F", "log_constant", "log_asymptotic"};
      for (auto N : require_N(c))
        rep.add_row({N, a.solution.F, a.log_constant, fg_asymptotic_log_estimate(e, a, N)});
    } else {
      rep.columns = {"N", "log_exact", "log_asymptotic", "ratio"};
      for (auto N : require_N(c)) {
        const double approx = fg_asymptotic_log_estimate(e, a, N);
        const double exact = exact_log_expected_Z(e, N);
        rep.add_row({N, exact, approx, std::exp(exact - approx)});
      }
    }
  } else if (cmd == "fg-s") {
    const Ensemble e = require_ensemble(c);
    describe_ensemble(rep, e, c);
    const LatticeStep s = lattice_step(e);
    std::string divisors;
    for (auto d : s.elementary_divisors) divisors += (divisors.empty() ? "" : ",") + std::to_string(d);
    rep.columns = {"method", "s", "detail"};
    rep.add_row({std::string("snf"), s.s, "elementary divisors [" + divisors + "]"});
    if (s.prime_rank)
      rep.add_row({std::string("prime-rank"), *s.prime_rank, std::string("l^rank over Z_l")});
    else
      rep.add_row({std::string("prime-rank"), std::string("n/a"), std::string("l is not prime")});
    if (s.binary_gcd)
      rep.add_row({std::string("binary-gcd"), *s.binary_gcd, std::string("l/gcd(l, differences)")});
    else
      rep.add_row({std::string("binary-gcd"), std::string("n/a"), std::string("alphabet is not binary")});
    rep.add_row({std::string("empirical"), s.empirical,
                 "density " + format_real(s.empirical_density) + " at L=" + std::to_string(kLatticeDensityRange)});
    rep.note("s", std::to_string(s.s));
    rep.note("agree", s.agree ? "yes" : "no");
  } else if (cmd == "ldpc-codewords") {
    const int l = c.factor_graph.l, r = c.factor_graph.r;
    rep.note("l", std::to_string(l));
    rep.note("r", std::to_string(r));
    rep.columns = {"N", "omega", "log_count", "growth_rate", "log_constant"};
    for (auto N : require_N(c)) {
      const LdpcResult res = ldpc_expected_codewords(l, r, N, c.omega);
      rep.add_row({N, c.omega ? Cell(*c.omega) : Cell(std::string("all")), res.log_count, res.growth_rate,
                   res.log_constant});
      if (res.tilt) rep.note("tilt h (N=" + std::to_string(N) + ")", format_real(*res.tilt));
    }
  } else if (cmd == "clt-cov") {
    rep.columns = {"block", "row", "col", "value"};
    if (c.model == "dense") {
      const DenseModel model = build_dense_model(c.dense);
      const auto sol = solve_variational(model, solver(c));
      rep.note("nu_star", join(sol.nu_star.weights()));
      if (c.m)
        add_covariance(rep, "overlap", overlap_covariance(model, sol.nu_star, *c.m));
      else
        add_covariance(rep, "type", dense_type_covariance(model, sol.nu_star));
    } else {
      const Ensemble e = require_ensemble(c);
      describe_ensemble(rep, e, c);
      const auto sol = solve_bethe(e, bethe(c));
      const auto cov = fg_type_covariances(e, sol);
      add_covariance(rep, "variable", cov.variable);
      add_covariance(rep, "factor", cov.factor);
    }
  } else if (cmd == "selftest") {
    rep.columns = {"criterion", "title", "result", "seconds", "detail"};
    bool all = true;
    for (const auto& r : run_acceptance()) {
      all = all && r.passed;
      rep.add_row({static_cast<std::int64_t>(r.id), r.title, std::string(r.passed ? "PASS" : "FAIL"), r.seconds,
                   r.detail});
    }
    rep.note("result", all ? "all criteria passed" : "some criteria failed");
    return all ? kExitOk : kExitFailure;
  } else {
    throw ValidationError("unknown command '" + cmd + "'");
  }
  return kExitOk;
}

const char* const kCommands[][2] = {
    {"dense-exact", "log E[Z^n] of a dense model by exact type summation"},
    {"dense-asymptotic", "N F + log constant of the central approximation"},
    {"dense-compare", "exact vs asymptotic, with the ratio column"},
    {"rs-det", "replica-symmetric determinant: closed form vs direct"},
    {"rs-correction", "n -> 0 finite-size correction of the RS free energy"},
    {"sk", "SK paramagnetic correction (1/4N) log(1 - beta^2)"},
    {"fg-exact", "exact log E[Z] of a regular factor-graph ensemble"},
    {"fg-asymptotic", "Bethe exponent and constant factor"},
    {"fg-compare", "exact vs asymptotic for a factor-graph ensemble"},
    {"fg-s", "lattice step s with its method breakdown"},
    {"ldpc-codewords", "expected LDPC codewords, optionally at weight fraction omega"},
    {"clt-cov", "covariance matrices of the central limit theorems"},
    {"selftest", "run the acceptance battery"},
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Central approximation of type sums, replica corrections and factor-graph ensembles",
               "central-approx");
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON run config");
  app.add_option("--N", f.N, "comma-separated list of N");
  app.add_option("--format", f.format, "table, csv or json");
  app.add_option("--out", f.out, "write the report to this file");
  app.add_option("--seed", f.seed, "solver restart seed");
  app.add_option("--max-types", f.max_types, "type enumeration guard");
  app.add_option("--l", f.l, "variable degree");
  app.add_option("--r", f.r, "factor degree");
  app.add_option("--factor", f.factor, "parity, all-equal, uniform or table:<path>");
  app.add_option("--alphabet", f.alphabet, "comma-separated symbol values");
  app.add_option("--beta", f.beta, "inverse temperature");
  app.add_option("--n", f.n, "replica count");
  app.add_option("--q", f.q, "RS overlap q");
  app.add_option("--moment-r", f.moment_r, "RS four-replica moment r");
  app.add_option("--P", f.P, "D^2g entry, two shared indices");
  app.add_option("--Q", f.Q, "D^2g entry, one shared index");
  app.add_option("--R", f.R, "D^2g entry, disjoint pairs");
  app.add_option("--omega", f.omega, "codeword weight fraction");
  app.add_option("--m", f.m, "replicas kept in the overlap covariance");
  for (const auto& [name, help] : kCommands) app.add_subcommand(name, help);

  std::string command;
  std::string format = "table";
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    command = app.get_subcommands().front()->get_name();
    const RunConfig config = resolve(command, f);
    format = config.format;
    Report rep;
    const int code = run_command(config, rep);
    if (f.out.empty()) {
      render(rep, format, out);
    } else {
      std::ofstream file(f.out);
      if (!file) throw ValidationError("cannot write '" + f.out + "'");
      render(rep, format, file);
    }
    return code;
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    const bool validation = dynamic_cast<const ValidationError*>(&e) != nullptr;
    Report rep;
    rep.title = (command.empty() ? std::string("central-approx") : command) + " failed";
    rep.note("status", validation ? "validation error" : "numerical failure");
    rep.note("error", e.what());
    std::ostringstream text;
    render(rep, format, text);
    if (f.out.empty()) {
      out << text.str();
    } else {
      std::ofstream file(f.out);
      file << text.str();
    }
    err << "error: " << e.what() << "\n";
    return validation ? kExitValidation : kExitNumerical;
  }
}

}  // namespace central_approx
