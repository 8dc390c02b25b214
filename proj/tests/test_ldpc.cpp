#include <doctest.h>

#include <cmath>
#include <limits>

#include "central_approx/error.hpp"
#include "central_approx/ldpc.hpp"

using namespace central_approx;

namespace {

double h2(double x) { return x <= 0 || x >= 1 ? 0.0 : -x * std::log(x) - (1 - x) * std::log(1 - x); }

// Weight-class grid for (3,6): mu puts p_k / C(6,k) on each even word of
// weight k, with sum_k k p_k / 6 = omega.
double grid_growth_rate(double omega, int G) {
  const double binom[4] = {1, 15, 15, 1};
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= G; ++i)
    for (int j = 0; i + j <= G; ++j) {
      const double p4 = static_cast<double>(i) / G, p6 = static_cast<double>(j) / G;
      const double p2 = (6 * omega - 4 * p4 - 6 * p6) / 2;
      const double p0 = 1 - p2 - p4 - p6;
      if (p2 < 0 || p0 < 0) continue;
      const double p[4] = {p0, p2, p4, p6};
      double h = 0.0;
      for (int k = 0; k < 4; ++k)
        if (p[k] > 0) h += -p[k] * std::log(p[k]) + p[k] * std::log(binom[k]);
      best = std::max(best, 0.5 * h - 2 * h2(omega));
    }
  return best;
}

}  // namespace

TEST_CASE("endpoint weights") {
  const auto zero = ldpc_weight_growth_rate(3, 6, 0.0);
  CHECK(zero.first == 0.0);
  CHECK(std::isinf(zero.second));
  CHECK(ldpc_weight_growth_rate(3, 6, 1.0).first == 0.0);
  CHECK(std::isinf(ldpc_weight_growth_rate(3, 5, 1.0).first));
  CHECK(ldpc_expected_codewords(3, 6, 20, 0.0).log_count == doctest::Approx(0.0));
  CHECK(ldpc_expected_codewords(3, 6, 20, 1.0).log_count == doctest::Approx(0.0));
}

TEST_CASE("growth rate at one half is the Bethe exponent") {
  const auto g = ldpc_weight_growth_rate(3, 6, 0.5);
  CHECK(g.first == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-9));
  CHECK(std::abs(g.second) < 1e-8);
  const auto total = ldpc_expected_codewords(3, 6, 40);
  CHECK(total.growth_rate == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("growth rate against a weight-class grid") {
  for (double omega : {0.05, 0.3, 0.7}) {
    const double g = ldpc_weight_growth_rate(3, 6, omega).first;
    const double grid = grid_growth_rate(omega, 4000);
    CHECK(g >= grid - 1e-9);
    CHECK(g - grid < 1e-5);
  }
}

TEST_CASE("small weights: G changes sign and matches the tilted ensemble") {
  CHECK(ldpc_weight_growth_rate(3, 6, 0.02).first < 0.0);
  CHECK(ldpc_weight_growth_rate(3, 6, 0.03).first > 0.0);
  // The reported tilt is a Lagrange multiplier: dG/domega = -h.
  const double w = 0.1, d = 1e-5;
  const double slope = (ldpc_weight_growth_rate(3, 6, w + d).first - ldpc_weight_growth_rate(3, 6, w - d).first) / (2 * d);
  CHECK(slope == doctest::Approx(-ldpc_weight_growth_rate(3, 6, w).second).epsilon(1e-6));
}

TEST_CASE("weight-resolved counts add up to the total") {
  const std::int64_t N = 24;
  const auto total = ldpc_expected_codewords(3, 6, N);
  CHECK(total.log_count == doctest::Approx(exact_log_expected_Z(ldpc_ensemble(3, 6), N)).epsilon(1e-12));
  LogSumExp acc;
  for (std::int64_t w = 0; w <= N; ++w) {
    const auto r = ldpc_expected_codewords(3, 6, N, static_cast<double>(w) / N);
    if (std::isfinite(r.log_count)) acc.add(r.log_count);
    if (w > 0 && w < N && std::isfinite(r.log_count))
      CHECK(r.log_constant == doctest::Approx(r.log_count - N * r.growth_rate).epsilon(1e-12));
  }
  CHECK(acc.value() == doctest::Approx(total.log_count).epsilon(1e-12));
}

TEST_CASE("infeasible weights have no codewords") {
  const auto one = ldpc_expected_codewords(3, 6, 10, 0.1);
  CHECK(std::isinf(one.log_count));
  CHECK(one.log_count < 0);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(ldpc_expected_codewords(3, 6, 10, 0.33), ValidationError);
  CHECK_THROWS_AS(ldpc_expected_codewords(3, 6, 10, 1.5), ValidationError);
  CHECK_THROWS_AS(ldpc_expected_codewords(3, 6, 3), ValidationError);
  CHECK_THROWS_AS(ldpc_ensemble(1, 6), ValidationError);
}
