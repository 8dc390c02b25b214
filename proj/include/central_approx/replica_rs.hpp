#pragma once

#include <array>
#include <cstdint>

#include "central_approx/linalg.hpp"

namespace central_approx {

/// Replica-symmetric parameters on X = {+1, -1}: q = <x^a x^b>,
/// r = <x^a x^b x^c x^d> (distinct indices), and the entries P, Q, R of
/// D^2g by pair intersection size 2, 1, 0.
struct RSParams {
  double q = 0.0;
  double r = 0.0;
  double P = 0.0;
  double Q = 0.0;
  double R = 0.0;

  /// Throws ValidationError unless |q| <= 1 and |r| <= 1.
  void validate() const;
};

/// Matrix over unordered pairs a < b (lexicographic) with entry P, Q or R
/// according to |{a,b} ∩ {c,d}| = 2, 1, 0. n = 2 gives the 1x1 matrix [P];
/// n = 3 has no disjoint pairs so R never appears. n < 2 is rejected.
Matrix build_pqr_matrix(int n, double P, double Q, double R);

/// U' - U on the off-diagonal pairs of an RS measure: PQR(1-q^2, q-q^2, r-q^2).
Matrix rs_moment_matrix(int n, double q, double r);

/// Eigenvalues of a PQR matrix with multiplicities 1, n-1, n(n-3)/2.
std::array<double, 3> pqr_eigenvalues(double n, double P, double Q, double R);

/// Closed-form det(I - D^2g (U'-U)) as a product of three factors raised to
/// 1, n-1 and n(n-3)/2. For n = 2 the single pair gives 1 - P(1-q^2).
double rs_determinant(int n, const RSParams& p);

/// log of the three-factor product for formal (real) n; every factor must be
/// positive.
double rs_log_determinant(double n, const RSParams& p);

/// n -> 0 finite-size correction to E[log Z]/N:
/// -(1/2N)[log(1-(1-4q+3r)(P-4Q+3R)) - (3/2) log(1-(1-2q+r)(P-2Q+R))].
/// Throws InstabilityError if either log argument is not positive.
double rs_correction_n0(std::int64_t N, const RSParams& p);

/// (1/(4N)) log(1 - beta^2) for the SK paramagnet. beta >= 1 is rejected
/// as the critical/RSB regime.
double sk_paramagnetic_correction(double beta, std::int64_t N);

}  // namespace central_approx
