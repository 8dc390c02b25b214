#include "central_approx/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <random>

#include "central_approx/clt.hpp"
#include "central_approx/dense_families.hpp"
#include "central_approx/dense_model.hpp"
#include "central_approx/factor_graph.hpp"
#include "central_approx/lattice.hpp"
#include "central_approx/replica_rs.hpp"

namespace central_approx {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double inf_norm(const Matrix& m) {
  double out = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (double x : m.row(i)) s += std::abs(x);
    out = std::max(out, s);
  }
  return out;
}

Outcome sk_correction() {
  double worst_formula = 0.0, worst_rs = 0.0;
  for (double beta : {0.2, 0.5, 0.9})
    for (std::int64_t N : {1, 10, 1000, 1000000}) {
      const double sk = sk_paramagnetic_correction(beta, N);
      const double formula = std::log(1.0 - beta * beta) / (4.0 * static_cast<double>(N));
      const double rs = rs_correction_n0(N, RSParams{0.0, 0.0, beta * beta, 0.0, 0.0});
      worst_formula = std::max(worst_formula, rel(sk, formula));
      worst_rs = std::max(worst_rs, rel(sk, rs));
    }
  const double machine = 8.0 * std::numeric_limits<double>::epsilon();
  return {worst_formula <= 1e-12 && worst_rs <= machine,
          fmt("max rel. dev. from (1/4N)log(1-b^2) = %.3g (<= 1e-12); from rs_correction_n0 = %.3g "
              "(<= %.3g)",
              worst_formula, worst_rs, machine)};
}

Outcome rs_determinant_closed_form() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  double worst = 0.0;
  int draws = 0;
  for (int n = 4; n <= 7; ++n)
    for (int k = 0; k < 100; ++k, ++draws) {
      const RSParams p{u(rng), u(rng), u(rng), u(rng), u(rng)};
      const Matrix a = build_pqr_matrix(n, p.P, p.Q, p.R);
      const Matrix b = rs_moment_matrix(n, p.q, p.r);
      const double direct = det(Matrix::identity(a.rows()) - a * b);
      worst = std::max(worst, rel(rs_determinant(n, p), direct));
    }
  return {worst <= 1e-9, fmt("%d draws over n = 4..7, max rel. dev. %.3g (<= 1e-9)", draws, worst)};
}

Outcome dense_constant_convergence() {
  const DenseModel model(1, Alphabet::binary(), zero_local(), self_quadratic_global(1.0, 1));
  const auto sol = solve_variational(model);
  const auto c = central_approx_constant(model, sol);
  auto dev = [&](std::int64_t N) {
    return std::abs(std::exp(exact_log_type_sum(model, N) - asymptotic_log_estimate(c, N)) - 1.0);
  };
  const double d100 = dev(100), d400 = dev(400), d1600 = dev(1600);
  return {d400 < d100 && d1600 < 0.02,
          fmt("|ratio-1| at N=100,400,1600: %.3g, %.3g, %.3g (need decrease and < 0.02)", d100, d400,
              d1600)};
}

Outcome matrix_identities() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::exponential_distribution<double> gamma1(1.0);
  const std::pair<int, std::size_t> shapes[] = {{1, 2}, {1, 5}, {1, 16}, {2, 2}, {2, 3},
                                                {2, 4}, {3, 2}, {4, 2}, {1, 9}, {1, 12}};
  double worst_s = 0.0, worst_u = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto [n, q] = shapes[static_cast<std::size_t>(k) % std::size(shapes)];
    std::vector<double> symbols;
    while (symbols.size() < q) {
      const double x = value(rng);
      if (std::none_of(symbols.begin(), symbols.end(), [&](double y) { return std::abs(x - y) < 1e-3; }))
        symbols.push_back(x);
    }
    const DenseModel model(n, Alphabet(symbols), zero_local(), zero_global());
    std::vector<double> w(model.config_count());
    for (double& x : w) x = gamma1(rng) + 0.05;
    const auto m = assemble_matrices(model, ProbMeasure::normalized(w));
    const Matrix ht = m.h.transpose();
    const Matrix lhs = m.h * inverse(ht * m.b * m.h) * ht;
    worst_s = std::max(worst_s, inf_norm(lhs - (m.s_prime - m.s)));
    const Matrix jt = m.j.transpose();
    worst_u = std::max(worst_u, inf_norm(jt * (m.s_prime - m.s) * m.j - (m.u_prime - m.u)));
  }
  return {worst_s <= 1e-10 && worst_u <= 1e-10,
          fmt("50 measures: max ||H(H'BH)^-1H' - (S'-S)|| = %.3g, max ||J'(S'-S)J - (U'-U)|| = %.3g "
              "(<= 1e-10)",
              worst_s, worst_u)};
}

Outcome sylvester() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto m = static_cast<std::size_t>(dim(rng));
    const auto n = static_cast<std::size_t>(dim(rng));
    const double scale = 0.5 / std::sqrt(static_cast<double>(std::max(m, n)));
    Matrix a(m, n), b(n, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = scale * u(rng);
        b(j, i) = scale * u(rng);
      }
    const double d1 = det(Matrix::identity(m) - a * b);
    const double d2 = det(Matrix::identity(n) - b * a);
    worst = std::max(worst, rel(d1, d2));
  }
  return {worst <= 1e-9, fmt("1000 pairs, max rel. defect of det(I-AB) vs det(I-BA) = %.3g (<= 1e-9)", worst)};
}

Outcome local_approximation_decay() {
  const ProbMeasure half({0.5, 0.5});
  const double zero[2] = {0.0, 0.0};
  double err[4];
  const std::int64_t Ns[4] = {50, 100, 200, 400};
  for (int i = 0; i < 4; ++i) {
    const std::int64_t N = Ns[i];
    const double exact = log_multinomial_exact(TypeVector({N / 2, N / 2}));
    err[i] = std::abs(std::expm1(local_approx_log_multinomial(half, zero, N) - exact));
  }
  const bool decreasing = err[1] < err[0] && err[2] < err[1] && err[3] < err[2];
  const double r1 = err[2] / err[0], r2 = err[3] / err[1];
  return {decreasing && r1 <= 0.3 && r2 <= 0.3,
          fmt("rel. errors %.3g, %.3g, %.3g, %.3g; err(4N)/err(N) = %.3g, %.3g (<= 0.3)", err[0], err[1],
              err[2], err[3], r1, r2)};
}

Outcome configuration_model_exactness() {
  int instances = 0, mismatches = 0;
  std::string first;
  for (int l = 2; l <= 8; ++l)
    for (int r = 2; r <= 8; ++r)
      for (std::int64_t N = 1; N * l <= 8; ++N) {
        if ((N * l) % r != 0) continue;
        for (const char* f : {"parity", "uniform", "all-equal"}) {
          const Ensemble e = make_ensemble(l, r, Alphabet::binary(), f);
          const auto brute = brute_force_permutation_oracle(e, N);
          const BigRational exact = exact_expected_Z_rational(e, N);
          bool ok = exact == brute.expected_Z;
          for (const auto& [vu, count] : brute.type_counts)
            ok = ok && expected_type_count_exact(e, TypeVector(vu.first), TypeVector(vu.second)) == count;
          ok = ok && rel(exact_log_expected_Z(e, N), log_of(exact)) <= 1e-12;
          ++instances;
          if (!ok && mismatches++ == 0) first = fmt("(l=%d, r=%d, N=%lld, %s)", l, r, static_cast<long long>(N), f);
        }
      }
  return {mismatches == 0 && instances > 0,
          fmt("%d instances with N l <= 8, %d mismatches%s%s", instances, mismatches,
              mismatches ? ", first " : "", first.c_str())};
}

Outcome factor_graph_constant_convergence() {
  const Ensemble e = make_ensemble(3, 6, Alphabet::binary(), "parity");
  const auto a = fg_asymptotics(e);
  double dev[3];
  const std::int64_t Ns[3] = {20, 40, 60};
  for (int i = 0; i < 3; ++i)
    dev[i] = std::abs(std::expm1(exact_log_expected_Z(e, Ns[i]) - fg_asymptotic_log_estimate(e, a, Ns[i])));
  return {dev[1] < dev[0] && dev[2] < dev[1] && dev[2] < 0.1,
          fmt("s = %lld, |ratio-1| at N=20,40,60: %.3g, %.3g, %.3g (strictly decreasing, last < 0.1)",
              static_cast<long long>(a.step), dev[0], dev[1], dev[2])};
}

Outcome step_size_agreement() {
  struct Case {
    int l, r;
    std::vector<double> alphabet;
    std::string factor;
    std::vector<double> table;
    std::int64_t expected;
  };
  const std::vector<double> bin{0.0, 1.0}, tri{0.0, 1.0, 2.0};
  // Support {00, 12, 21} on a ternary alphabet with r = 2.
  std::vector<double> sparse(9, 0.0);
  sparse[0] = sparse[5] = sparse[7] = 1.0;
  const std::vector<Case> cases = {
      {2, 4, bin, "parity", {}, 1},    {3, 6, bin, "parity", {}, 3},    {2, 2, bin, "uniform", {}, 2},
      {3, 2, bin, "uniform", {}, 3},   {2, 2, tri, "uniform", {}, 4},   {3, 3, tri, "uniform", {}, 9},
      {2, 2, bin, "parity", {}, 1},    {2, 3, bin, "parity", {}, 1},    {4, 4, bin, "parity", {}, 2},
      {6, 6, bin, "parity", {}, 3},    {3, 3, bin, "all-equal", {}, 1}, {5, 2, bin, "uniform", {}, 5},
      {3, 2, tri, "", sparse, 3},      {2, 3, tri, "all-equal", {}, 4},
  };
  int failures = 0;
  std::string first;
  for (const auto& c : cases) {
    const Ensemble e = c.factor.empty() ? Ensemble(c.l, c.r, Alphabet(c.alphabet), c.table)
                                        : make_ensemble(c.l, c.r, Alphabet(c.alphabet), c.factor);
    const LatticeStep s = lattice_step(e);
    const bool special = s.prime_rank || s.binary_gcd;
    if (!(s.agree && special && s.s == c.expected) && failures++ == 0)
      first = fmt("(l=%d, r=%d, |X|=%zu, %s): snf %lld, density %.4g", c.l, c.r, c.alphabet.size(),
                  c.factor.empty() ? "table" : c.factor.c_str(), static_cast<long long>(s.s),
                  s.empirical_density);
  }
  return {failures == 0, fmt("%zu configurations, %d disagreements%s%s", cases.size(), failures,
                             failures ? ", first " : "", first.c_str())};
}

Outcome overlap_covariance_check() {
  const double beta = 0.5;
  const DenseModel sk(3, Alphabet::spins(), zero_local(), sk_global(beta, 3));
  const auto sol = solve_variational(sk);
  const auto cov = overlap_covariance(sk, sol.nu_star, 3);
  double worst = 0.0;
  for (std::size_t i = 0; i < cov.labels.size(); ++i) {
    const auto [a, b] = sk.pair(i);
    for (std::size_t j = 0; j < cov.labels.size(); ++j) {
      const auto [c, d] = sk.pair(j);
      const bool distinct = a != b && c != d;
      const double want = distinct && i == j ? 1.0 / (1.0 - beta * beta) : 0.0;
      if (distinct || i == j) worst = std::max(worst, std::abs(cov.matrix(i, j) - want));
    }
  }

  double worst_rel = 0.0;
  std::string binary;
  for (double lambda : {1.0, 0.5}) {
    const DenseModel model(1, Alphabet::binary(), zero_local(), self_quadratic_global(lambda, 1));
    const auto s = solve_variational(model);
    const double formula = dense_type_covariance(model, s.nu_star).matrix(1, 1);
    const double exact = empirical_type_covariance_oracle(model, 2000).matrix(1, 1);
    const double d = std::abs(exact - formula) / formula;
    worst_rel = std::max(worst_rel, d);
    binary += fmt("; lambda=%g: exact %.6g vs formula %.6g", lambda, exact, formula);
  }
  return {worst <= 1e-10 && worst_rel <= 0.01,
          fmt("SK beta=0.5 m=3: max |cov - (4/3)I| = %.3g (<= 1e-10)%s (<= 1%%)", worst, binary.c_str())};
}

struct CriterionDef {
  const char* title;
  double limit;
  Outcome (*run)();
};

const CriterionDef kCriteria[kLibraryCriteria] = {
    {"SK paramagnetic correction", 1.0, sk_correction},
    {"RS determinant closed form", 10.0, rs_determinant_closed_form},
    {"dense central constant convergence", 30.0, dense_constant_convergence},
    {"type-space matrix identities", 5.0, matrix_identities},
    {"Sylvester determinant identity", 5.0, sylvester},
    {"local approximation decay", 1.0, local_approximation_decay},
    {"configuration-model exactness", 60.0, configuration_model_exactness},
    {"factor-graph constant convergence", 120.0, factor_graph_constant_convergence},
    {"lattice step size agreement", 30.0, step_size_agreement},
    {"overlap and type covariance", 60.0, overlap_covariance_check},
};

}  // namespace

CriterionResult run_criterion(int id) {
  if (id < 1 || id > kLibraryCriteria) throw std::out_of_range("criterion id must lie in 1..10");
  const CriterionDef& def = kCriteria[id - 1];
  CriterionResult out;
  out.id = id;
  out.title = def.title;
  out.limit_seconds = def.limit;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Outcome o = def.run();
    out.passed = o.passed;
    out.detail = o.detail;
  } catch (const std::exception& e) {
    out.passed = false;
    out.detail = std::string("error: ") + e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.seconds >= out.limit_seconds) {
    out.passed = false;
    out.detail += fmt(" [runtime %.2fs exceeds %.0fs]", out.seconds, out.limit_seconds);
  }
  return out;
}

std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kLibraryCriteria; ++id) out.push_back(run_criterion(id));
  return out;
}

}  // namespace central_approx
