#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "central_approx/linalg.hpp"
#include "central_approx/types_core.hpp"

namespace central_approx {

/// f: the per-site term, a function of the n replica values x^(1..n).
using LocalTerm = std::function<double(std::span<const double>)>;

/// g: the global term, a function of the n(n+1)/2 overlaps q_ab (a <= b,
/// lexicographic pair order). Derivatives are optional; missing ones fall
/// back to central finite differences.
struct GlobalTerm {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  std::function<Matrix(std::span<const double>)> hessian;
};

/// The replicated dense model
///   E[Z^n] = sum over (X^n)^N of exp{ sum_i f(x_i) + N g(q) },
/// with q_ab = (1/N) sum_i x_i^(a) x_i^(b).
///
/// Replica configurations x in X^n are indexed in mixed radix with replica 1
/// the most significant digit, so configuration 0 has every replica at the
/// first alphabet symbol.
class DenseModel {
 public:
  DenseModel(int replicas, Alphabet alphabet, LocalTerm local, GlobalTerm global);

  int replicas() const noexcept { return replicas_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t config_count() const noexcept { return local_values_.size(); }
  std::size_t pair_count() const noexcept { return pairs_.size(); }

  /// 1-based replica pair (a, b), a <= b, of pair index k.
  std::pair<int, int> pair(std::size_t k) const { return pairs_.at(k); }
  std::size_t pair_index(int a, int b) const;

  std::span<const double> config(std::size_t c) const { return config_values_.row(c); }
  std::string config_label(std::size_t c) const;
  std::string pair_label(std::size_t k) const;

  /// f at configuration c.
  double local(std::size_t c) const { return local_values_[c]; }
  /// J(c, k) = x^(a) x^(b) for pair k = (a, b).
  const Matrix& pair_products() const noexcept { return pair_products_; }

  double global(std::span<const double> q) const;
  std::vector<double> gradient(std::span<const double> q) const;
  Matrix hessian(std::span<const double> q) const;
  bool has_analytic_gradient() const noexcept { return static_cast<bool>(global_.gradient); }
  bool has_analytic_hessian() const noexcept { return static_cast<bool>(global_.hessian); }
  std::vector<double> fd_gradient(std::span<const double> q) const;
  Matrix fd_hessian(std::span<const double> q) const;

  /// <x^(a) x^(b)>_nu for every pair.
  std::vector<double> overlaps(std::span<const double> nu) const;
  /// H(nu) + <f>_nu + g(<x^(a) x^(b)>_nu).
  double objective(const ProbMeasure& nu) const;
  /// f(x) + sum_k J(x,k) dg/dq_k at q(nu): the stationary measure is the
  /// softmax of these logits.
  std::vector<double> stationary_logits(const ProbMeasure& nu) const;
  double stationarity_residual(const ProbMeasure& nu) const;

  /// Index map of configurations under a replica permutation (perm is a
  /// permutation of 0..n-1: replica a of the image is replica perm[a] of the source).
  std::vector<std::size_t> permuted_configs(std::span<const int> perm) const;
  /// Same for the overlap vector.
  std::vector<std::size_t> permuted_pairs(std::span<const int> perm) const;

 private:
  int replicas_;
  Alphabet alphabet_;
  LocalTerm local_;
  GlobalTerm global_;
  std::vector<std::pair<int, int>> pairs_;
  Matrix config_values_;
  std::vector<std::size_t> config_symbols_;
  std::vector<double> local_values_;
  Matrix pair_products_;
};

/// Largest |g(q) - g(q permuted)| / (1 + |g(q)|) over sampled overlap points
/// and all replica permutations (n <= 6) or sampled ones.
double replica_symmetry_defect(const DenseModel& model, int samples, std::uint64_t seed);

/// Largest relative discrepancy between the model's derivatives and central
/// finite differences at `points` random overlap vectors.
double derivative_self_check(const DenseModel& model, int points, std::uint64_t seed);

// ---- exact partition-function oracles ----

/// log E[Z^n] by direct summation over all |X|^(nN) configurations.
double brute_force_log_expectation(const DenseModel& model, std::int64_t N,
                                   double max_configurations = 1e8);

/// log E[Z^n] by summation over types of length N on X^n.
double exact_log_type_sum(const DenseModel& model, std::int64_t N,
                          const EnumerationLimits& limits = {});

/// The type sum restricted to ||v - N center||_2 <= N^alpha.
double windowed_log_type_sum(const DenseModel& model, std::int64_t N, double alpha,
                             const ProbMeasure& center, const EnumerationLimits& limits = {});

// ---- variational problem ----

struct SolverOptions {
  double damping = 0.5;
  double tolerance = 1e-12;
  long max_iterations = 100000;
  int restarts = 32;
  std::uint64_t seed = 0;
  double comaximizer_tolerance = 1e-9;
  double dedup_distance = 1e-8;
  double boundary_threshold = 1e-10;
};

struct StationaryPoint {
  ProbMeasure measure;
  double objective;
  double residual;
};

struct VariationalSolution {
  ProbMeasure nu_star;
  double F;
  /// Distinct maximizers (objective within tolerance of the best); [0] is nu_star.
  std::vector<StationaryPoint> maximizers;
  double residual;
  bool unique;
  /// Some maximizer has an entry below the boundary threshold.
  bool boundary;
  std::size_t converged_restarts;
  std::size_t total_restarts;
  /// Best objective minus the best objective among non-maximal stationary
  /// points found (infinity when every restart reached a maximizer).
  double objective_gap;
};

/// Maximizes H(nu) + <f>_nu + g(<x^(a)x^(b)>_nu) over measures on X^n by
/// damped fixed-point iteration on the stationarity condition, from the
/// uniform measure plus `restarts` Dirichlet(1) starts. Throws
/// NonConvergenceError if no start converges.
VariationalSolution solve_variational(const DenseModel& model, const SolverOptions& options = {});

// ---- central approximation ----

struct DenseMatrices {
  Matrix u_prime;   ///< <x^a x^b x^c x^d>
  Matrix u;         ///< <x^a x^b><x^c x^d>
  Matrix j;         ///< J(x, (a,b)) = x^a x^b
  Matrix b;         ///< diag(1/nu)
  Matrix h;         ///< difference embedding, reference configuration 0
  Matrix s_prime;   ///< diag(nu)
  Matrix s;         ///< nu nu^T
  Matrix hessian;   ///< D^2 g at the overlaps of nu
  std::vector<double> overlaps;
};

/// Throws BoundaryError unless nu is strictly positive.
DenseMatrices assemble_matrices(const DenseModel& model, const ProbMeasure& nu);

/// I - D^2g (U' - U).
Matrix stability_matrix(const DenseMatrices& m);

struct CentralApproxResult {
  double F;
  /// log of sum over maximizers of det(I - D^2g(U'-U))^(-1/2).
  double log_constant;
  /// Determinant at nu_star.
  double det_value;
  std::vector<double> det_values;
  DenseMatrices matrices;
};

/// Throws BoundaryError for a boundary maximizer and InstabilityError when
/// some determinant is not positive.
CentralApproxResult central_approx_constant(const DenseModel& model,
                                            const VariationalSolution& solution);

/// N F + log_constant.
double asymptotic_log_estimate(const CentralApproxResult& result, std::int64_t N);

}  // namespace central_approx
