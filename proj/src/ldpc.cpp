#include "central_approx/ldpc.hpp"

#include <cmath>
#include <limits>

#include "central_approx/error.hpp"

namespace central_approx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

// log sum_k c_k e^(theta k) and the mean weight under c_k e^(theta k).
std::pair<double, double> weight_moments(const std::vector<double>& log_c, double theta) {
  double top = kNegInf;
  for (std::size_t k = 0; k < log_c.size(); ++k)
    if (log_c[k] != kNegInf) top = std::max(top, log_c[k] + theta * static_cast<double>(k));
  double z = 0.0, m = 0.0;
  for (std::size_t k = 0; k < log_c.size(); ++k) {
    if (log_c[k] == kNegInf) continue;
    const double w = std::exp(log_c[k] + theta * static_cast<double>(k) - top);
    z += w;
    m += w * static_cast<double>(k);
  }
  return {top + std::log(z), m / z};
}

}  // namespace

Ensemble ldpc_ensemble(int l, int r) { return make_ensemble(l, r, Alphabet::binary(), "parity"); }

std::pair<double, double> ldpc_weight_growth_rate(int l, int r, double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw ValidationError("ldpc: omega must lie in [0, 1]");
  // With nu = (1 - omega, omega) fixed, the Bethe objective is maximized by
  // mu(x) ∝ f(x) e^(theta N_1(x)) with mean weight r omega.
  const Ensemble e = ldpc_ensemble(l, r);
  std::vector<double> count(static_cast<std::size_t>(r) + 1, 0.0);
  for (std::size_t w : e.support()) count[static_cast<std::size_t>(e.letter_counts(w)[1])] += 1.0;
  std::vector<double> log_c(count.size());
  std::size_t kmin = count.size(), kmax = 0;
  for (std::size_t k = 0; k < count.size(); ++k) {
    log_c[k] = count[k] > 0 ? std::log(count[k]) : kNegInf;
    if (count[k] > 0) {
      kmin = std::min(kmin, k);
      kmax = k;
    }
  }
  const double target = omega * r;
  const double lr = static_cast<double>(l) / r;
  const double entropy_term = (l - 1) * binary_entropy(omega);
  if (target < static_cast<double>(kmin) || target > static_cast<double>(kmax)) return {kNegInf, kNegInf};
  if (target == static_cast<double>(kmin) || target == static_cast<double>(kmax)) {
    const double G = lr * log_c[static_cast<std::size_t>(target)] - entropy_term;
    return {G, target == static_cast<double>(kmax) && kmax != kmin ? kInf : kNegInf};
  }

  double lo = -1.0, hi = 1.0;
  while (weight_moments(log_c, lo).second > target) lo *= 2;
  while (weight_moments(log_c, hi).second < target) hi *= 2;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (weight_moments(log_c, mid).second < target ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  const double log_z = weight_moments(log_c, theta).first;
  const double G = lr * (log_z - theta * target) - entropy_term;
  // Tilt h of f(x) e^(h N_1(x) / l) whose Bethe stationary point has nu(1) = omega.
  const double h = l * theta - (l - 1) * std::log(omega / (1.0 - omega));
  return {G, h};
}

LdpcResult ldpc_expected_codewords(int l, int r, std::int64_t N, std::optional<double> omega) {
  const Ensemble e = ldpc_ensemble(l, r);
  e.factor_nodes(N);
  if (!omega) {
    const auto a = fg_asymptotics(e);
    return {exact_log_expected_Z(e, N), a.solution.F, a.log_constant, std::nullopt};
  }
  const double target = *omega * static_cast<double>(N);
  const double rounded = std::round(target);
  if (!(*omega >= 0.0 && *omega <= 1.0) || std::abs(target - rounded) > 1e-9)
    throw ValidationError("ldpc: omega N must be an integer weight in [0, N]");
  const auto weight = static_cast<std::int64_t>(rounded);

  double log_count = kNegInf;
  const auto weights = variable_type_log_weights(e, N);
  for (std::size_t k = 0; k < weights.types.size(); ++k)
    if (weights.types[k][1] == weight) log_count = weights.log_weights[k];

  const auto [G, h] = ldpc_weight_growth_rate(l, r, *omega);
  double log_constant = kNegInf;
  if (log_count != kNegInf && G != kNegInf) log_constant = log_count - static_cast<double>(N) * G;
  return {log_count, G, log_constant, h};
}

}  // namespace central_approx
