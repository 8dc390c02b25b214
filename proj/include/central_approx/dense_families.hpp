#pragma once

#include <cstddef>
#include <vector>

#include "central_approx/dense_model.hpp"

namespace central_approx {

LocalTerm zero_local();
/// f(x) = h * sum_a x^(a).
LocalTerm field_local(double h);

/// One monomial c * prod_k q_k^(e_k) in the overlaps; `powers` holds
/// (pair index, exponent) with exponents >= 1.
struct Monomial {
  double coefficient = 0.0;
  std::vector<std::pair<std::size_t, int>> powers;
};

GlobalTerm zero_global();
/// Polynomial in the overlaps with analytic gradient and Hessian.
GlobalTerm polynomial_global(std::vector<Monomial> terms, std::size_t pair_count);

/// SK replicated coupling: (beta^2/2) sum_{a<b} q_ab^2 + (beta^2/4) sum_a q_aa^2.
GlobalTerm sk_global(double beta, int replicas);
/// p-spin: (beta^2/2) sum_{a<b} q_ab^p + (beta^2/4) sum_a q_aa^p.
GlobalTerm p_spin_global(double beta, int p, int replicas);
/// (lambda/2) sum_a q_aa^2; for n = 1 on {0,1} this is g(s) = lambda s^2 / 2.
GlobalTerm self_quadratic_global(double lambda, int replicas);

/// Pair index of (a, b), 1-based, a <= b, in lexicographic order.
std::size_t replica_pair_index(int a, int b, int replicas);

}  // namespace central_approx
