#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "central_approx/dense_model.hpp"
#include "central_approx/factor_graph.hpp"
#include "central_approx/linalg.hpp"

namespace central_approx {

/// A (possibly singular) covariance matrix with its basis labels and
/// spectral diagnostics.
struct CovarianceResult {
  Matrix matrix;
  std::vector<std::string> labels;
  std::vector<double> eigenvalues;  ///< ascending, of the symmetric part
  double min_eigenvalue = 0.0;
  std::size_t rank = 0;             ///< eigenvalues above 1e-9 * max(1, |largest|)
  double symmetry_defect = 0.0;     ///< max |A - A^T|
};

CovarianceResult make_covariance(Matrix m, std::vector<std::string> labels);

/// Variance of the all-ones direction, 1^T A 1 / dim.
double ones_direction_variance(const Matrix& m);

// ---- dense model ----

/// (S' - S)(I - J D^2g J^T (S' - S))^-1 on the X^n basis.
/// Throws InstabilityError when det(I - D^2g(U' - U)) <= 0.
CovarianceResult dense_type_covariance(const DenseModel& model, const ProbMeasure& nu);

/// (U' - U)(I - D^2g(U' - U))^-1 on the (a, b) pair basis. For m < n the
/// block of pairs inside replicas 1..m is returned.
CovarianceResult overlap_covariance(const DenseModel& model, const ProbMeasure& nu, int m);

/// Exact covariance of v / sqrt(N) under the weights
/// multinomial(v) exp{ sum_x v(x) f(x) + N g(q(v / N)) }, by full summation
/// over types of length N.
CovarianceResult empirical_type_covariance_oracle(const DenseModel& model, std::int64_t N,
                                                  const EnumerationLimits& limits = {});

// ---- factor graphs ----

struct FactorGraphCovariances {
  CovarianceResult factor;    ///< (T' - T)(I - K C K^T (T' - T))^-1 on X^r
  CovarianceResult variable;  ///< (V' - V)(I - C(V' - V))^-1 on X
};

/// Both covariances at the Bethe maximizer. They describe the fluctuations
/// sqrt(M)(u/M - mu*) and sqrt(M)(v/N - nu*), M = N l / r.
/// Throws InstabilityError when det(I - C(V' - V)) <= 0.
FactorGraphCovariances fg_type_covariances(const Ensemble& e, const BetheSolution& solution);

/// Exact covariance of sqrt(M) v / N under the ensemble weights
/// sum_{u} E[N(v, u)] prod f^u.
CovarianceResult fg_variable_covariance_oracle(const Ensemble& e, std::int64_t N);

/// Exact covariance of u / sqrt(M) under E[N(v, u)] prod f^u, by enumeration
/// of factor types on the support.
CovarianceResult fg_factor_covariance_oracle(const Ensemble& e, std::int64_t N,
                                             const EnumerationLimits& limits = {});

}  // namespace central_approx
