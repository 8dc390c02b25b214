#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "central_approx/linalg.hpp"
#include "central_approx/types_core.hpp"

namespace central_approx {

/// Random (l, r)-regular factor graph ensemble under the configuration
/// model, with one factor function f: X^r -> [0, inf) shared by all factor
/// nodes. Words x in X^r are indexed in mixed radix with position 1 the most
/// significant digit; the argument order of f matters.
class Ensemble {
 public:
  Ensemble(int l, int r, Alphabet alphabet, std::vector<double> factor_table);

  int l() const noexcept { return l_; }
  int r() const noexcept { return r_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t q() const noexcept { return alphabet_.size(); }
  std::size_t word_count() const noexcept { return table_.size(); }

  double factor(std::size_t word) const { return table_.at(word); }
  const std::vector<double>& factor_table() const noexcept { return table_; }
  /// Words with f > 0, ascending.
  const std::vector<std::size_t>& support() const noexcept { return support_; }

  /// Symbol index at each of the r positions.
  std::span<const std::size_t> symbols(std::size_t word) const {
    return {symbols_.data() + word * static_cast<std::size_t>(r_), static_cast<std::size_t>(r_)};
  }
  /// N_z(x): how many positions of word x carry symbol z.
  std::span<const int> letter_counts(std::size_t word) const {
    return {letters_.data() + word * q(), q()};
  }
  std::string word_label(std::size_t word) const;

  bool admissible(std::int64_t N) const noexcept;
  /// M = N l / r; throws ValidationError when r does not divide N l.
  std::int64_t factor_nodes(std::int64_t N) const;

 private:
  int l_;
  int r_;
  Alphabet alphabet_;
  std::vector<double> table_;
  std::vector<std::size_t> support_;
  std::vector<std::size_t> symbols_;
  std::vector<int> letters_;
};

/// Built-in factor tables by name: "parity" (binary alphabets only: even
/// number of second-symbol letters), "all-equal", "uniform", or
/// "table:<path>".
std::vector<double> factor_table_by_name(const std::string& name, const Alphabet& alphabet, int r);

/// Reads a value table: one line per word, r symbols then the value,
/// whitespace-separated, words in the alphabet's lexicographic order.
/// Blank lines and lines starting with '#' are skipped.
std::vector<double> read_factor_table(const std::string& path, const Alphabet& alphabet, int r);

Ensemble make_ensemble(int l, int r, const Alphabet& alphabet, const std::string& factor);

// ---- types ----

/// v over X (total N) and u over X^r (total M) with
/// sum_x N_z(x) u(x) = l v(z) for all z.
bool is_consistent(const Ensemble& e, const TypeVector& v, const TypeVector& u);

/// log E[N(v,u)] = log[ N!/prod v! * M!/prod u! * prod (l v)! / (N l)! ].
/// Throws ValidationError for an inconsistent pair.
double log_expected_type_count(const Ensemble& e, const TypeVector& v, const TypeVector& u);

/// Exact E[N(v,u)]; limited to N l <= 60.
BigRational expected_type_count_exact(const Ensemble& e, const TypeVector& v, const TypeVector& u);

struct PermutationOracleResult {
  BigRational expected_Z;
  /// (v counts, u counts) -> E[N(v,u)].
  std::map<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>, BigRational> type_counts;
  std::uint64_t graphs = 0;
};

/// Averages Z and N(v,u) over all (N l)! socket matchings. Requires N l <= 8,
/// or N l <= 12 with `allow_large`.
PermutationOracleResult brute_force_permutation_oracle(const Ensemble& e, std::int64_t N,
                                                       bool allow_large = false);

/// E[Z] exactly, summing E[N(v,u)] prod f^u over consistent pairs with u on
/// the support. Requires N l <= 60.
BigRational exact_expected_Z_rational(const Ensemble& e, std::int64_t N,
                                      const EnumerationLimits& limits = {});

/// log E[Z] by log-domain summation over factor types u on the support.
double exact_log_expected_Z_by_types(const Ensemble& e, std::int64_t N,
                                     const EnumerationLimits& limits = {});

/// log of W(v) = sum over u consistent with v of E[N(v,u)] prod f^u, for
/// every variable type v (in enumerate_types order). Uses the generating
/// function prod-free identity sum_u M!/prod u! prod (f(x) t^N(x))^u(x) =
/// (sum_x f(x) t^N(x))^M, so the cost is polynomial in N.
struct VariableTypeWeights {
  std::vector<std::vector<std::int64_t>> types;
  std::vector<double> log_weights;
};
VariableTypeWeights variable_type_log_weights(const Ensemble& e, std::int64_t N);

/// log E[Z] = log sum_v W(v). -inf when no consistent pair exists.
double exact_log_expected_Z(const Ensemble& e, std::int64_t N);

// ---- Bethe exponent ----

struct BetheOptions {
  double damping = 0.5;
  double tolerance = 1e-12;
  long max_iterations = 100000;
  int restarts = 32;
  std::uint64_t seed = 0;
  double comaximizer_tolerance = 1e-9;
  double dedup_distance = 1e-8;
  double boundary_threshold = 1e-10;
};

struct BethePoint {
  ProbMeasure nu;
  ProbMeasure mu;
  double F;
  double residual;
};

struct BetheSolution {
  ProbMeasure nu_star;   ///< over X
  ProbMeasure mu_star;   ///< over X^r, zero off the support
  double F;
  double residual;
  /// max_z |(1/r) sum_i mu(x_i = z) - nu(z)|
  double marginal_defect;
  bool unique;
  bool boundary;
  /// Distinct maximizers; [0] is (nu_star, mu_star).
  std::vector<BethePoint> maximizers;
  std::size_t converged_restarts;
  std::size_t total_restarts;
};

/// (l/r) H(mu) - (l-1) H(nu) + (l/r) sum mu log f, with nu the marginal of mu.
double bethe_objective(const Ensemble& e, const ProbMeasure& mu);

/// Maximizes the Bethe objective with damped fixed-point iteration on the
/// message m: mu(x) ∝ f(x) prod_i m(x_i), m(z) ← nu(z)^((l-1)/l).
BetheSolution solve_bethe(const Ensemble& e, const BetheOptions& options = {});

struct FactorGraphMatrices {
  Matrix c;        ///< diag(r(l-1) / (l nu))
  Matrix v_prime;  ///< (1/r^2) sum_{k,k'} mu(x_k = x, x_k' = x')
  Matrix v;        ///< nu nu^T
  Matrix t_prime;  ///< diag(mu) over X^r
  Matrix t;        ///< mu mu^T
  Matrix k;        ///< K(x, z) = N_z(x) / r
};

/// Throws BoundaryError unless nu is strictly positive.
FactorGraphMatrices assemble_fg_matrices(const Ensemble& e, const ProbMeasure& nu,
                                         const ProbMeasure& mu);
inline FactorGraphMatrices assemble_fg_matrices(const Ensemble& e, const BetheSolution& s) {
  return assemble_fg_matrices(e, s.nu_star, s.mu_star);
}

/// I - C (V' - V).
Matrix fg_stability_matrix(const FactorGraphMatrices& m);

struct FactorGraphAsymptotics {
  BetheSolution solution;
  FactorGraphMatrices matrices;
  double det_value;        ///< det(I - C(V' - V)) at the first maximizer
  std::vector<double> det_values;
  std::int64_t step;       ///< lattice step s
  /// ((|X|-1)/2) log l - log s + log sum over maximizers of det^(-1/2)
  double log_constant;
};

/// Throws BoundaryError / InstabilityError when the assumptions fail.
FactorGraphAsymptotics fg_asymptotics(const Ensemble& e, const BetheOptions& options = {});

/// N F + log_constant; N must be admissible.
double fg_asymptotic_log_estimate(const Ensemble& e, const FactorGraphAsymptotics& a,
                                  std::int64_t N);

}  // namespace central_approx
