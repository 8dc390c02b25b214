#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "central_approx/dense_families.hpp"
#include "central_approx/dense_model.hpp"
#include "central_approx/error.hpp"

using namespace central_approx;

namespace {

DenseModel binary_quadratic(double lambda) {
  return DenseModel(1, Alphabet::binary(), zero_local(), self_quadratic_global(lambda, 1));
}

// rho = 1 / (1 + exp(-lambda rho)) by bisection.
double logistic_fixed_point(double lambda) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid < 1.0 / (1.0 + std::exp(-lambda * mid)) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// g(s) = (beta/2)(2s - 1)^2 on {0, 1}: symmetric Curie-Weiss coupling.
DenseModel curie_weiss(double beta) {
  std::vector<Monomial> terms{{2.0 * beta, {{0, 2}}}, {-2.0 * beta, {{0, 1}}}, {beta / 2.0, {}}};
  return DenseModel(1, Alphabet::binary(), zero_local(), polynomial_global(terms, 1));
}

}  // namespace

TEST_CASE("type summation agrees with brute force over configurations") {
  const DenseModel sk(2, Alphabet::spins(), field_local(0.2), sk_global(0.3, 2));
  for (std::int64_t N : {1, 2, 3, 5}) {
    const double brute = brute_force_log_expectation(sk, N);
    CHECK(exact_log_type_sum(sk, N) == doctest::Approx(brute).epsilon(1e-12));
  }
  const DenseModel ternary(1, Alphabet({-1.0, 0.0, 2.0}), field_local(0.1), self_quadratic_global(0.4, 1));
  CHECK(exact_log_type_sum(ternary, 6) == doctest::Approx(brute_force_log_expectation(ternary, 6)).epsilon(1e-12));
}

TEST_CASE("solver finds the logistic fixed point of the binary quadratic model") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto model = binary_quadratic(lambda);
    const auto sol = solve_variational(model);
    const double rho = logistic_fixed_point(lambda);
    CHECK(sol.nu_star[1] == doctest::Approx(rho).epsilon(1e-9));
    CHECK(sol.unique);
    CHECK(sol.residual <= 1e-10);
    // Grid oracle for F over s in (0, 1).
    double best = -1e300;
    for (int k = 1; k < 200000; ++k) {
      const double s = k / 200000.0;
      best = std::max(best, -s * std::log(s) - (1 - s) * std::log(1 - s) + lambda * s * s / 2.0);
    }
    CHECK(sol.F == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("scalar central constant and convergence") {
  const auto model = binary_quadratic(0.5);
  const auto sol = solve_variational(model);
  const auto c = central_approx_constant(model, sol);
  const double rho = sol.nu_star[1];
  CHECK(c.det_value == doctest::Approx(1.0 - 0.5 * rho * (1.0 - rho)).epsilon(1e-12));
  double prev = 1.0;
  for (std::int64_t N : {50, 200, 800, 3200}) {
    const double dev = std::abs(std::expm1(exact_log_type_sum(model, N) - asymptotic_log_estimate(c, N)));
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("two symmetric maximizers contribute two constants") {
  const auto model = curie_weiss(1.5);
  const auto sol = solve_variational(model);
  REQUIRE(sol.maximizers.size() == 2);
  CHECK_FALSE(sol.unique);
  CHECK(sol.maximizers[0].measure[1] == doctest::Approx(sol.maximizers[1].measure[0]).epsilon(1e-8));
  const auto c = central_approx_constant(model, sol);
  CHECK(c.log_constant == doctest::Approx(std::log(2.0) - 0.5 * std::log(c.det_value)).epsilon(1e-9));
  const double dev = std::abs(std::expm1(exact_log_type_sum(model, 4000) - asymptotic_log_estimate(c, 4000)));
  CHECK(dev < 5e-3);
}

TEST_CASE("instability and boundary are reported") {
  const auto model = curie_weiss(1.5);
  VariationalSolution saddle{ProbMeasure::uniform(2), model.objective(ProbMeasure::uniform(2)),
                             {{ProbMeasure::uniform(2), 0.0, 0.0}}, 0.0, true, false, 1, 1, 0.0};
  CHECK_THROWS_AS(central_approx_constant(model, saddle), InstabilityError);
  try {
    central_approx_constant(model, saddle);
  } catch (const InstabilityError& e) {
    CHECK(std::string(e.what()).find("det(I - D^2g(U'-U))") != std::string::npos);
  }
  CHECK_THROWS_AS(assemble_matrices(model, ProbMeasure({1.0, 0.0})), BoundaryError);
  saddle.boundary = true;
  CHECK_THROWS_AS(central_approx_constant(model, saddle), BoundaryError);
}

TEST_CASE("replica symmetry is enforced") {
  GlobalTerm g{[](std::span<const double> q) { return q[1]; }, {}, {}};  // q12 only
  CHECK_THROWS_AS(DenseModel(3, Alphabet::spins(), zero_local(), g), ValidationError);
  GlobalTerm ok{[](std::span<const double> q) { return q[1] + q[2] + q[4]; }, {}, {}};  // q12+q13+q23
  CHECK_NOTHROW(DenseModel(3, Alphabet::spins(), zero_local(), ok));
}

TEST_CASE("finite differences match analytic derivatives") {
  const DenseModel sk(3, Alphabet::spins(), zero_local(), p_spin_global(0.7, 3, 3));
  CHECK(derivative_self_check(sk, 8, 1) < 1e-6);
  auto poly = p_spin_global(0.7, 3, 3);
  const DenseModel fd(3, Alphabet::spins(), zero_local(), GlobalTerm{poly.value, {}, {}});
  const std::vector<double> q{1.0, 0.2, -0.1, 1.0, 0.3, 1.0};
  const auto ga = sk.gradient(q), gf = fd.gradient(q);
  for (std::size_t k = 0; k < q.size(); ++k) CHECK(gf[k] == doctest::Approx(ga[k]).epsilon(1e-7));
  CHECK(max_abs_diff(fd.hessian(q), sk.hessian(q)) < 1e-5);
}

TEST_CASE("type-space matrix identities") {
  std::mt19937_64 rng(9);
  std::exponential_distribution<double> e(1.0);
  const DenseModel model(2, Alphabet({-1.0, 0.5, 2.0}), zero_local(), zero_global());
  for (int k = 0; k < 10; ++k) {
    std::vector<double> w(model.config_count());
    for (double& x : w) x = e(rng) + 0.01;
    const auto m = assemble_matrices(model, ProbMeasure::normalized(w));
    const Matrix ht = m.h.transpose();
    CHECK(max_abs_diff(m.h * inverse(ht * m.b * m.h) * ht, m.s_prime - m.s) < 1e-10);
    CHECK(max_abs_diff(m.j.transpose() * (m.s_prime - m.s) * m.j, m.u_prime - m.u) < 1e-10);
  }
}

TEST_CASE("windowed sum approaches the full sum") {
  const auto model = binary_quadratic(1.0);
  const auto sol = solve_variational(model);
  const std::int64_t N = 2000;
  const double full = exact_log_type_sum(model, N);
  CHECK(windowed_log_type_sum(model, N, 0.75, sol.nu_star) == doctest::Approx(full).epsilon(1e-12));
  CHECK(windowed_log_type_sum(model, N, 0.3, sol.nu_star) < full);
}

TEST_CASE("results do not depend on the worker count") {
  const DenseModel sk(2, Alphabet::spins(), field_local(0.1), sk_global(0.4, 2));
  setenv("CENTRAL_APPROX_THREADS", "1", 1);
  const double one = exact_log_type_sum(sk, 40);
  const auto s1 = solve_variational(sk);
  setenv("CENTRAL_APPROX_THREADS", "4", 1);
  const double four = exact_log_type_sum(sk, 40);
  const auto s4 = solve_variational(sk);
  unsetenv("CENTRAL_APPROX_THREADS");
  CHECK(one == four);
  CHECK(s1.F == s4.F);
  CHECK(s1.nu_star.weights() == s4.nu_star.weights());
}

TEST_CASE("guards") {
  const auto model = binary_quadratic(1.0);
  CHECK_THROWS_AS(brute_force_log_expectation(model, 40), GuardError);
  const DenseModel big(4, Alphabet::spins(), zero_local(), zero_global());
  CHECK_THROWS_AS(exact_log_type_sum(big, 200, EnumerationLimits{1e6}), GuardError);
}
