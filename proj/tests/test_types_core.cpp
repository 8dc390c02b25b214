#include <doctest.h>

#include <cmath>
#include <random>

#include "central_approx/error.hpp"
#include "central_approx/types_core.hpp"

using namespace central_approx;

TEST_CASE("alphabet validation") {
  CHECK_THROWS_AS(Alphabet({0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(Alphabet({0.0, NAN}), ValidationError);
  CHECK_THROWS_AS(Alphabet({}), ValidationError);
  const Alphabet s = Alphabet::spins();
  CHECK(s.index_of(-1.0) == 1);
  CHECK_THROWS_AS(s.index_of(0.0), ValidationError);
}

TEST_CASE("probability measures") {
  CHECK_THROWS_AS(ProbMeasure({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(ProbMeasure({1.5, -0.5}), ValidationError);
  const auto p = ProbMeasure::normalized({1.0, 3.0});
  CHECK(p[1] == doctest::Approx(0.75));
  const double logits[3] = {0.0, std::log(2.0), 1000.0};
  const auto q = ProbMeasure::from_logits(logits);
  CHECK(q[2] == doctest::Approx(1.0));
  CHECK(ProbMeasure::uniform(4).min() == 0.25);
}

TEST_CASE("exact helpers") {
  CHECK(std::abs(log_of(BigInt(1) << 3000) - 3000.0 * std::log(2.0)) < 1e-9);
  CHECK(exact_rational(0.1) == BigRational(BigInt(3602879701896397LL), BigInt(1) << 55));
  CHECK(exact_rational(-2.5) == BigRational(-5, 2));
  CHECK(factorial(20) == BigInt(2432902008176640000ULL));
}

TEST_CASE("multinomials: lgamma route against exact big integers") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cnt(0, 60);
  for (int k = 0; k < 200; ++k) {
    std::vector<std::int64_t> v(1 + k % 5);
    for (auto& x : v) x = cnt(rng);
    const TypeVector t(v);
    const double exact = log_multinomial_exact(t);
    CHECK(std::abs(log_multinomial(t) - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
  }
  CHECK(multinomial_exact(TypeVector({2, 2})) == 6);
  CHECK_THROWS_AS(multinomial_exact(TypeVector({1500, 1000})), GuardError);
}

TEST_CASE("sum of multinomials over all types is q^N") {
  for (std::size_t q : {2u, 3u, 4u}) {
    const std::int64_t N = 7;
    BigInt total = 0;
    for (const auto& v : enumerate_types(N, q)) total += multinomial_exact(TypeVector(v));
    BigInt expect = 1;
    for (int i = 0; i < N; ++i) expect *= static_cast<unsigned>(q);
    CHECK(total == expect);
  }
}

TEST_CASE("type enumeration order and count") {
  std::vector<std::vector<std::int64_t>> seen;
  for (const auto& v : TypeEnumeration(5, 3)) seen.push_back(v);
  CHECK(seen.size() == 21);
  CHECK(seen.front() == std::vector<std::int64_t>{0, 0, 5});
  CHECK(seen.back() == std::vector<std::int64_t>{5, 0, 0});
  for (std::size_t i = 0; i < seen.size(); ++i) {
    CHECK(seen[i][0] + seen[i][1] + seen[i][2] == 5);
    if (i) CHECK(seen[i - 1] < seen[i]);
  }
  CHECK(type_count(5, 3) == 21.0);
  CHECK_THROWS_AS(enumerate_types(1000, 10, EnumerationLimits{1e6}), GuardError);
}

TEST_CASE("entropy") {
  const double u[4] = {0.25, 0.25, 0.25, 0.25};
  CHECK(entropy(u) == doctest::Approx(std::log(4.0)));
  const double d[3] = {1.0, 0.0, 0.0};
  CHECK(entropy(d) == 0.0);
}

TEST_CASE("log-sum-exp against direct summation") {
  LogSumExp a, b;
  double direct = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double x = 0.3 * i - 1.0;
    (i % 2 ? a : b).add(x);
    direct += std::exp(x);
  }
  a.merge(b);
  CHECK(a.value() == doctest::Approx(std::log(direct)).epsilon(1e-14));
  CHECK(LogSumExp().empty());
}

TEST_CASE("local approximation of multinomials") {
  const ProbMeasure nu({0.2, 0.3, 0.5});
  // Off-center counts N nu + sqrt(N) v with v summing to zero.
  double prev = 1.0;
  for (std::int64_t N : {100, 400, 1600}) {
    const double s = std::sqrt(static_cast<double>(N));
    const double v[3] = {1.0, -1.0, 0.0};
    const auto k = static_cast<std::int64_t>(s);
    const TypeVector t({N / 5 + k, 3 * N / 10 - k, N / 2});
    const double err = std::abs(std::expm1(local_approx_log_multinomial(nu, v, N) - log_multinomial_exact(t)));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);
  const double bad[3] = {0.1, 0.0, 0.0};
  CHECK_THROWS_AS(local_approx_log_multinomial(nu, bad, 100), ValidationError);
  const double zero[2] = {0.0, 0.0};
  CHECK_THROWS_AS(local_approx_log_multinomial(ProbMeasure({1.0, 0.0}), zero, 100), ValidationError);
}
