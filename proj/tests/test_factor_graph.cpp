#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>

#include "central_approx/error.hpp"
#include "central_approx/factor_graph.hpp"

using namespace central_approx;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/central_approx_" + name;
  std::ofstream(path) << text;
  return path;
}

Ensemble random_ternary(int l, int r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::vector<double> table(static_cast<std::size_t>(std::pow(3, r)));
  for (double& x : table) x = u(rng);
  return Ensemble(l, r, Alphabet({0.0, 1.0, 2.0}), table);
}

}  // namespace

TEST_CASE("ensemble construction and admissibility") {
  const Ensemble e = make_ensemble(3, 6, Alphabet::binary(), "parity");
  CHECK(e.word_count() == 64);
  CHECK(e.support().size() == 32);
  CHECK(e.admissible(2));
  CHECK_FALSE(e.admissible(3));
  CHECK(e.factor_nodes(4) == 2);
  CHECK_THROWS_AS(e.factor_nodes(3), ValidationError);
  CHECK_THROWS_AS(make_ensemble(3, 6, Alphabet({0.0, 1.0, 2.0}), "parity"), ValidationError);
  CHECK_THROWS_AS(make_ensemble(1, 2, Alphabet::binary(), "uniform"), ValidationError);
  CHECK_THROWS_AS(make_ensemble(2, 2, Alphabet::binary(), "nope"), ValidationError);
  CHECK_THROWS_AS(Ensemble(2, 2, Alphabet::binary(), {0, 0, 0, 0}), ValidationError);
  CHECK_THROWS_AS(Ensemble(2, 2, Alphabet::binary(), {1, -1, 0, 0}), ValidationError);
}

TEST_CASE("factor tables from files") {
  const auto ok = write_temp("ok.txt", "# f on {0,1}^2\n0 0 1.5\n0 1 0\n\n1 0 2\n1 1 0.25\n");
  const auto table = read_factor_table(ok, Alphabet::binary(), 2);
  CHECK(table == std::vector<double>{1.5, 0.0, 2.0, 0.25});
  const auto e = make_ensemble(2, 2, Alphabet::binary(), "table:" + ok);
  CHECK(e.support() == std::vector<std::size_t>{0, 2, 3});

  const auto order = write_temp("order.txt", "0 1 1\n0 0 1\n1 0 1\n1 1 1\n");
  CHECK_THROWS_AS(read_factor_table(order, Alphabet::binary(), 2), ValidationError);
  const auto shortf = write_temp("short.txt", "0 0 1\n0 1 1\n");
  CHECK_THROWS_AS(read_factor_table(shortf, Alphabet::binary(), 2), ValidationError);
  const auto extra = write_temp("extra.txt", "0 0 1 3\n0 1 1\n1 0 1\n1 1 1\n");
  CHECK_THROWS_AS(read_factor_table(extra, Alphabet::binary(), 2), ValidationError);
  const auto symbol = write_temp("symbol.txt", "0 0 1\n0 7 1\n1 0 1\n1 1 1\n");
  CHECK_THROWS_AS(read_factor_table(symbol, Alphabet::binary(), 2), ValidationError);
  CHECK_THROWS_AS(read_factor_table("/nonexistent/table", Alphabet::binary(), 2), ValidationError);
}

TEST_CASE("a one-letter alphabet gives a single graph-independent count") {
  const Ensemble e(2, 2, Alphabet({0.0}), {1.0});
  CHECK(exact_expected_Z_rational(e, 4) == 1);
  CHECK(exact_log_expected_Z(e, 4) == doctest::Approx(0.0));
}

TEST_CASE("expected type counts against the permutation oracle") {
  const Ensemble e = make_ensemble(2, 2, Alphabet::binary(), "uniform");
  const auto oracle = brute_force_permutation_oracle(e, 2);
  CHECK(oracle.graphs == 24);
  const std::vector<std::int64_t> v{1, 1};
  for (const auto& [key, value] : oracle.type_counts) {
    if (key.first != v) continue;
    CHECK(expected_type_count_exact(e, TypeVector(key.first), TypeVector(key.second)) == value);
  }
  // u over {00, 01, 10, 11}, two factors.
  CHECK(expected_type_count_exact(e, TypeVector(v), TypeVector({1, 0, 0, 1})) == BigRational(2, 3));
  CHECK(expected_type_count_exact(e, TypeVector(v), TypeVector({0, 2, 0, 0})) == BigRational(1, 3));
  CHECK(expected_type_count_exact(e, TypeVector(v), TypeVector({0, 1, 1, 0})) == BigRational(2, 3));
  CHECK_THROWS_AS(log_expected_type_count(e, TypeVector(v), TypeVector({1, 1, 0, 0})), ValidationError);
}

TEST_CASE("oracle: type counts and E[Z] for several ensembles") {
  std::vector<Ensemble> ensembles{
      make_ensemble(2, 2, Alphabet::binary(), "uniform"),
      make_ensemble(2, 4, Alphabet::binary(), "parity"),
      Ensemble(2, 2, Alphabet::binary(), {0.5, 1.25, 2.0, 0.75}),
      random_ternary(2, 2, 3),
  };
  for (const auto& e : ensembles)
    for (std::int64_t N = 1; N * e.l() <= 8; ++N) {
      if (!e.admissible(N)) continue;
      const auto oracle = brute_force_permutation_oracle(e, N);
      for (const auto& [key, value] : oracle.type_counts) {
        if (!is_consistent(e, TypeVector(key.first), TypeVector(key.second))) continue;
        CHECK(expected_type_count_exact(e, TypeVector(key.first), TypeVector(key.second)) == value);
      }
      CHECK(exact_expected_Z_rational(e, N) == oracle.expected_Z);
    }
}

TEST_CASE("summing E[N(v, u)] over u recovers the multinomial") {
  const Ensemble e = make_ensemble(2, 2, Alphabet::binary(), "uniform");
  for (std::int64_t N = 1; N <= 4; ++N) {
    const auto oracle = brute_force_permutation_oracle(e, N);
    std::map<std::vector<std::int64_t>, BigRational> by_v;
    for (const auto& [key, value] : oracle.type_counts) by_v[key.first] += value;
    for (const auto& [v, total] : by_v) CHECK(total == multinomial_exact(TypeVector(v)));
  }
}

TEST_CASE("f = 1 gives |X|^N") {
  for (std::size_t q : {2u, 3u}) {
    std::vector<double> values;
    for (std::size_t k = 0; k < q; ++k) values.push_back(static_cast<double>(k));
    const auto e = make_ensemble(3, 3, Alphabet(values), "uniform");
    for (std::int64_t N : {2, 4, 6}) {
      BigInt expect = 1;
      for (std::int64_t i = 0; i < N; ++i) expect *= static_cast<unsigned>(q);
      CHECK(exact_expected_Z_rational(e, N) == BigRational(expect));
      CHECK(exact_log_expected_Z(e, N) == doctest::Approx(N * std::log(static_cast<double>(q))).epsilon(1e-12));
    }
  }
}

TEST_CASE("generating-function route equals type enumeration") {
  std::vector<std::pair<Ensemble, std::int64_t>> cases{
      {make_ensemble(3, 6, Alphabet::binary(), "parity"), 12},
      {make_ensemble(2, 3, Alphabet({0.0, 1.0, 2.0}), "all-equal"), 9},
      {Ensemble(3, 2, Alphabet::binary(), {1.0, 0.5, 2.0, 1.5}), 10},
      {random_ternary(2, 3, 7), 6},
      {random_ternary(3, 2, 8), 6},
  };
  for (const auto& [e, N] : cases) {
    const double by_types = exact_log_expected_Z_by_types(e, N);
    CHECK(exact_log_expected_Z(e, N) == doctest::Approx(by_types).epsilon(1e-12));
    CHECK(by_types == doctest::Approx(log_of(exact_expected_Z_rational(e, N))).epsilon(1e-12));
  }
}

TEST_CASE("no consistent pair gives -inf") {
  const Ensemble e(2, 2, Alphabet::binary(), {0.0, 1.0, 0.0, 0.0});
  CHECK(std::isinf(exact_log_expected_Z(e, 3)));
  CHECK(exact_log_expected_Z(e, 3) < 0);
  CHECK(exact_expected_Z_rational(e, 3) == 0);
}

TEST_CASE("Bethe exponent in closed-form cases") {
  const auto uniform = make_ensemble(3, 4, Alphabet({0.0, 1.0, 2.0}), "uniform");
  CHECK(solve_bethe(uniform).F == doctest::Approx(std::log(3.0)).epsilon(1e-10));

  const Ensemble single(3, 2, Alphabet({0.0}), {2.5});
  CHECK(solve_bethe(single).F == doctest::Approx(1.5 * std::log(2.5)).epsilon(1e-12));

  const auto parity = make_ensemble(3, 6, Alphabet::binary(), "parity");
  const auto sol = solve_bethe(parity);
  CHECK(sol.F == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-10));
  CHECK(sol.residual <= 1e-10);
  CHECK(sol.marginal_defect <= 1e-10);
  CHECK(sol.unique);
  CHECK_FALSE(sol.boundary);
}

TEST_CASE("Bethe maximum against a grid search") {
  // Binary (2,2) with f = (a, b, b, c): mu is symmetric at the optimum.
  const Ensemble e(2, 2, Alphabet::binary(), {1.0, 0.6, 0.6, 1.8});
  const auto sol = solve_bethe(e);
  double best = -1e300;
  const int G = 600;
  for (int i = 0; i <= G; ++i)
    for (int j = 0; i + 2 * j <= G; ++j) {
      const double p00 = static_cast<double>(i) / G, p01 = static_cast<double>(j) / G;
      const double p11 = 1.0 - p00 - 2 * p01;
      if (p11 < 0) continue;
      best = std::max(best, bethe_objective(e, ProbMeasure::normalized({p00, p01, p01, p11})));
    }
  CHECK(sol.F >= best - 1e-12);
  CHECK(sol.F - best < 1e-4);
  CHECK(bethe_objective(e, sol.mu_star) == doctest::Approx(sol.F).epsilon(1e-12));
}

TEST_CASE("factor-graph matrices") {
  const auto e = random_ternary(3, 3, 11);
  const auto sol = solve_bethe(e);
  const auto m = assemble_fg_matrices(e, sol);
  for (std::size_t w = 0; w < e.word_count(); ++w) {
    double row = 0.0;
    for (std::size_t z = 0; z < e.q(); ++z) row += m.k(w, z);
    CHECK(row == doctest::Approx(1.0));
  }
  CHECK(max_abs_diff(m.v_prime, m.v_prime.transpose()) < 1e-15);
  const auto ev = symmetric_eigenvalues(m.v);
  CHECK(ev.back() > 0.1);
  CHECK(std::abs(ev[0]) < 1e-14);
  CHECK(std::abs(ev[1]) < 1e-14);
  // V' is the pair marginal averaged over positions.
  Matrix pairs(3, 3);
  for (std::size_t w = 0; w < e.word_count(); ++w)
    for (std::size_t a : e.symbols(w))
      for (std::size_t b : e.symbols(w)) pairs(a, b) += sol.mu_star[w] / 9.0;
  CHECK(max_abs_diff(m.v_prime, pairs) < 1e-15);

  const auto u = make_ensemble(3, 4, Alphabet({0.0, 1.0, 2.0}), "uniform");
  const auto mu = assemble_fg_matrices(u, solve_bethe(u));
  const double r = 4.0, q = 3.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      const double expect = (a == b ? 1.0 / (r * q) : 0.0) + (r - 1) / r / (q * q);
      CHECK(mu.v_prime(a, b) == doctest::Approx(expect).epsilon(1e-9));
    }
  CHECK_THROWS_AS(assemble_fg_matrices(u, ProbMeasure({1.0, 0.0, 0.0}), solve_bethe(u).mu_star), BoundaryError);
}

TEST_CASE("stability determinant is invariant under symbol relabeling") {
  const auto e = random_ternary(2, 3, 21);
  const int perm[3] = {2, 0, 1};
  std::vector<double> table(e.word_count());
  for (std::size_t w = 0; w < e.word_count(); ++w) {
    const auto s = e.symbols(w);
    std::size_t mapped = 0;
    for (std::size_t k = 0; k < 3; ++k) mapped = mapped * 3 + static_cast<std::size_t>(perm[s[k]]);
    table[mapped] = e.factor(w);
  }
  const Ensemble relabeled(2, 3, e.alphabet(), table);
  const auto a = fg_asymptotics(e);
  const auto b = fg_asymptotics(relabeled);
  CHECK(a.det_value == doctest::Approx(b.det_value).epsilon(1e-9));
  CHECK(a.solution.F == doctest::Approx(b.solution.F).epsilon(1e-12));
  CHECK(a.log_constant == doctest::Approx(b.log_constant).epsilon(1e-9));
}

TEST_CASE("asymptotic estimate for f = 1 on (2,2) is exact") {
  const auto e = make_ensemble(2, 2, Alphabet::binary(), "uniform");
  const auto a = fg_asymptotics(e);
  CHECK(a.step == 2);
  CHECK(a.det_value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(a.log_constant) < 1e-9);
  for (std::int64_t N : {10, 100})
    CHECK(fg_asymptotic_log_estimate(e, a, N) == doctest::Approx(exact_log_expected_Z(e, N)).epsilon(1e-10));
}

TEST_CASE("asymptotic estimate improves with N for (2,4) parity") {
  const auto e = make_ensemble(2, 4, Alphabet::binary(), "parity");
  const auto a = fg_asymptotics(e);
  double prev = 1.0;
  for (std::int64_t N : {20, 40, 80, 160}) {
    const double dev = std::abs(std::expm1(exact_log_expected_Z(e, N) - fg_asymptotic_log_estimate(e, a, N)));
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 0.02);
  CHECK_THROWS_AS(fg_asymptotic_log_estimate(e, a, 3), ValidationError);
}

TEST_CASE("boundary maximizers are reported") {
  const auto e = make_ensemble(3, 3, Alphabet::binary(), "all-equal");
  const auto sol = solve_bethe(e);
  CHECK(sol.boundary);
  CHECK(sol.F == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(fg_asymptotics(e), BoundaryError);
}
