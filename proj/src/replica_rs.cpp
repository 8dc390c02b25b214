#include "central_approx/replica_rs.hpp"

#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include "central_approx/error.hpp"

namespace central_approx {

void RSParams::validate() const {
  if (!(std::abs(q) <= 1.0)) throw ValidationError("RS parameters: |q| must be <= 1");
  if (!(std::abs(r) <= 1.0)) throw ValidationError("RS parameters: |r| must be <= 1");
  for (double v : {P, Q, R})
    if (!std::isfinite(v)) throw ValidationError("RS parameters: P, Q, R must be finite");
}

Matrix build_pqr_matrix(int n, double P, double Q, double R) {
  if (n < 2) throw ValidationError("PQR matrix needs n >= 2 replicas");
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  Matrix m(pairs.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const auto [a, b] = pairs[i];
      const auto [c, d] = pairs[j];
      const int shared = (a == c || a == d) + (b == c || b == d);
      m(i, j) = shared == 2 ? P : shared == 1 ? Q : R;
    }
  }
  return m;
}

Matrix rs_moment_matrix(int n, double q, double r) {
  return build_pqr_matrix(n, 1.0 - q * q, q - q * q, r - q * q);
}

std::array<double, 3> pqr_eigenvalues(double n, double P, double Q, double R) {
  return {P + 2.0 * (n - 2.0) * Q + 0.5 * (n - 2.0) * (n - 3.0) * R,
          P + (n - 4.0) * Q - (n - 3.0) * R,
          P - 2.0 * Q + R};
}

namespace {

std::array<double, 3> rs_factors(double n, const RSParams& p) {
  const auto g = pqr_eigenvalues(n, p.P, p.Q, p.R);
  const auto u = pqr_eigenvalues(n, 1.0 - p.q * p.q, p.q * (1.0 - p.q), p.r - p.q * p.q);
  return {1.0 - u[0] * g[0], 1.0 - u[1] * g[1], 1.0 - u[2] * g[2]};
}

}  // namespace

double rs_determinant(int n, const RSParams& p) {
  if (n < 2) throw ValidationError("rs_determinant needs n >= 2");
  if (n == 2) return 1.0 - p.P * (1.0 - p.q * p.q);
  const auto f = rs_factors(n, p);
  return f[0] * std::pow(f[1], n - 1) * std::pow(f[2], n * (n - 3) / 2);
}

double rs_log_determinant(double n, const RSParams& p) {
  const auto f = rs_factors(n, p);
  for (double v : f)
    if (!(v > 0.0)) throw InstabilityError("rs_log_determinant: non-positive factor");
  return std::log(f[0]) + (n - 1.0) * std::log(f[1]) + 0.5 * n * (n - 3.0) * std::log(f[2]);
}

double rs_correction_n0(std::int64_t N, const RSParams& p) {
  if (N < 1) throw ValidationError("rs_correction_n0: N must be >= 1");
  const double longitudinal = 1.0 - (1.0 - 4.0 * p.q + 3.0 * p.r) * (p.P - 4.0 * p.Q + 3.0 * p.R);
  const double replicon = 1.0 - (1.0 - 2.0 * p.q + p.r) * (p.P - 2.0 * p.Q + p.R);
  if (!(longitudinal > 0.0) || !(replicon > 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "RS correction undefined (instability): log arguments %.6g and %.6g must be > 0",
                  longitudinal, replicon);
    throw InstabilityError(buf);
  }
  return -(std::log(longitudinal) - 1.5 * std::log(replicon)) / (2.0 * static_cast<double>(N));
}

double sk_paramagnetic_correction(double beta, std::int64_t N) {
  if (N < 1) throw ValidationError("sk correction: N must be >= 1");
  if (!(beta >= 0.0)) throw ValidationError("sk correction: beta must be >= 0");
  if (beta >= 1.0)
    throw ValidationError(
        "sk correction: beta >= 1 is the critical or RSB regime, out of scope for the "
        "second-order analysis");
  return std::log(1.0 - beta * beta) / (4.0 * static_cast<double>(N));
}

}  // namespace central_approx
