#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "central_approx/factor_graph.hpp"

namespace central_approx {

/// Integer matrix, row-major.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}
  std::int64_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Elementary divisors d_1 | d_2 | ... (nonnegative), padded with zeros to
/// min(rows, cols).
std::vector<std::int64_t> smith_diagonal(IntMatrix a);

/// A(z, j) = N_z(x_j) - N_z(x_ref) for symbols z != reference_symbol and
/// support words x_j != x_ref (both in ascending order).
IntMatrix congruence_matrix(const Ensemble& e, std::size_t reference_word,
                            std::size_t reference_symbol);

/// prod_i l / gcd(d_i, l) over the |X|-1 elementary divisors (zero-padded).
std::int64_t step_from_smith(const std::vector<std::int64_t>& diag, std::size_t rows, int l);

/// Rank of A over the field Z_l; l must be prime.
std::size_t rank_mod_prime(const IntMatrix& a, int l);

/// Fraction of integer vectors eps in [-L, L]^(|S|-1) with A eps = 0 (mod l),
/// computed exactly by dynamic programming over residues.
double lattice_density(const IntMatrix& a, int l, int L);

/// The divisor d of l^rows closest to 1 / density on a log scale: the index
/// the density estimates, within the resolution of a finite box.
std::int64_t nearest_index(double density, int l, std::size_t rows);

bool is_prime(int l);

struct LatticeStep {
  std::int64_t s = 1;                         ///< Smith normal form rule
  std::vector<std::int64_t> elementary_divisors;
  std::optional<std::int64_t> prime_rank;     ///< l^rank, l prime
  std::optional<std::int64_t> binary_gcd;     ///< l / gcd(l, diffs), |X| = 2
  double empirical_density = 1.0;             ///< at L = 6
  std::int64_t empirical = 1;                 ///< nearest_index(density)
  bool agree = true;
};

inline constexpr int kLatticeDensityRange = 6;

/// Step size s of the factor-type lattice. Reference word and symbol default
/// to the first support word and the first alphabet symbol; `reference_word`
/// is a position within the support.
LatticeStep lattice_step(const Ensemble& e, std::size_t reference_word = 0,
                         std::size_t reference_symbol = 0);

}  // namespace central_approx
