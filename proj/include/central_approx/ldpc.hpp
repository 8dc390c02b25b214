#pragma once

#include <cstdint>
#include <optional>

#include "central_approx/factor_graph.hpp"

namespace central_approx {

/// (l, r)-regular LDPC ensemble: binary alphabet, parity factor.
Ensemble ldpc_ensemble(int l, int r);

struct LdpcResult {
  /// log of the exact expected number of codewords (of weight omega N when
  /// omega is given); -inf when there are none.
  double log_count;
  /// Exponential growth rate: F, or G(omega), the Bethe maximum subject to
  /// nu(1) = omega.
  double growth_rate;
  /// log of the constant factor. Without omega this is the central
  /// approximation constant; with omega it is log_count - N growth_rate.
  double log_constant;
  /// h, when omega is given: the factor f(x) exp(h N_1(x) / l) has a Bethe
  /// stationary point with nu(1) = omega and G = F_h - h omega there.
  std::optional<double> tilt;
};

/// Weight fraction omega must make omega N an integer (within 1e-9).
LdpcResult ldpc_expected_codewords(int l, int r, std::int64_t N,
                                   std::optional<double> omega = std::nullopt);

/// G(omega); -inf outside the feasible range. With nu fixed the maximizer is
/// mu ∝ f exp(theta N_1), found by bisection on theta. Returns {G, h}.
std::pair<double, double> ldpc_weight_growth_rate(int l, int r, double omega);

}  // namespace central_approx
