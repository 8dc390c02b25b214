#include "central_approx/clt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "central_approx/error.hpp"

namespace central_approx {

namespace {

void require_stable(double d, const char* what) {
  if (!(d > 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.6g <= 0", what, d);
    throw InstabilityError(buf);
  }
}

// Weighted covariance of integer count vectors scaled by `scale`:
// scale * (E[x x^T] - E[x] E[x]^T), weights given as logs.
Matrix weighted_covariance(const std::vector<std::vector<std::int64_t>>& xs,
                           const std::vector<double>& log_w, double scale) {
  const std::size_t d = xs.empty() ? 0 : xs.front().size();
  double mx = -std::numeric_limits<double>::infinity();
  for (double w : log_w) mx = std::max(mx, w);
  if (!std::isfinite(mx)) throw NumericalError("covariance oracle: every type has zero weight");
  std::vector<double> mean(d, 0.0);
  Matrix second(d, d);
  double total = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double w = std::exp(log_w[k] - mx);
    if (w == 0.0) continue;
    total += w;
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = static_cast<double>(xs[k][i]);
      if (xi == 0.0) continue;
      mean[i] += w * xi;
      for (std::size_t j = 0; j < d; ++j) second(i, j) += w * xi * static_cast<double>(xs[k][j]);
    }
  }
  Matrix cov(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      cov(i, j) = scale * (second(i, j) / total - (mean[i] / total) * (mean[j] / total));
  return cov;
}

Matrix push_through(const Matrix& a, const Matrix& b) {
  // a (I - b a)^-1
  const Matrix stab = Matrix::identity(a.rows()) - b * a;
  return solve(stab.transpose(), a.transpose()).transpose();
}

}  // namespace

CovarianceResult make_covariance(Matrix m, std::vector<std::string> labels) {
  if (!m.square()) throw ValidationError("covariance: matrix must be square");
  CovarianceResult out;
  out.symmetry_defect = max_abs_diff(m, m.transpose());
  out.eigenvalues = m.rows() ? symmetric_eigenvalues(m) : std::vector<double>{};
  out.min_eigenvalue = out.eigenvalues.empty() ? 0.0 : out.eigenvalues.front();
  const double top = out.eigenvalues.empty() ? 0.0 : std::abs(out.eigenvalues.back());
  const double tol = 1e-9 * std::max(1.0, top);
  out.rank = static_cast<std::size_t>(
      std::count_if(out.eigenvalues.begin(), out.eigenvalues.end(), [&](double x) { return x > tol; }));
  out.matrix = std::move(m);
  out.labels = std::move(labels);
  return out;
}

double ones_direction_variance(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x;
  return s / static_cast<double>(m.rows());
}

CovarianceResult dense_type_covariance(const DenseModel& model, const ProbMeasure& nu) {
  const DenseMatrices m = assemble_matrices(model, nu);
  require_stable(det(stability_matrix(m)), "AT instability: det(I - D^2g(U'-U))");
  const Matrix s = m.s_prime - m.s;
  const Matrix coupling = m.j * m.hessian * m.j.transpose();
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < model.config_count(); ++c) labels.push_back(model.config_label(c));
  return make_covariance(push_through(s, coupling), std::move(labels));
}

CovarianceResult overlap_covariance(const DenseModel& model, const ProbMeasure& nu, int m) {
  if (m < 1 || m > model.replicas())
    throw ValidationError("overlap covariance: m must lie in 1..n");
  const DenseMatrices mats = assemble_matrices(model, nu);
  const Matrix stab = stability_matrix(mats);
  require_stable(det(stab), "AT instability: det(I - D^2g(U'-U))");
  const Matrix full = push_through(mats.u_prime - mats.u, mats.hessian);
  std::vector<std::size_t> keep;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < model.pair_count(); ++k) {
    const auto [a, b] = model.pair(k);
    if (b <= m) {
      keep.push_back(k);
      labels.push_back(model.pair_label(k));
    }
  }
  return make_covariance(full.submatrix(keep), std::move(labels));
}

CovarianceResult empirical_type_covariance_oracle(const DenseModel& model, std::int64_t N,
                                                  const EnumerationLimits& limits) {
  if (N < 1) throw ValidationError("covariance oracle: N must be >= 1");
  const std::size_t cells = model.config_count();
  const LogFactorials lf(N);
  std::vector<std::vector<std::int64_t>> types;
  std::vector<double> log_w;
  std::vector<double> nu(cells);
  for (const auto& v : enumerate_types(N, cells, limits)) {
    double w = log_multinomial(v, lf);
    for (std::size_t c = 0; c < cells; ++c) {
      nu[c] = static_cast<double>(v[c]) / static_cast<double>(N);
      if (v[c]) w += static_cast<double>(v[c]) * model.local(c);
    }
    w += static_cast<double>(N) * model.global(model.overlaps(nu));
    types.push_back(v);
    log_w.push_back(w);
  }
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < cells; ++c) labels.push_back(model.config_label(c));
  return make_covariance(weighted_covariance(types, log_w, 1.0 / static_cast<double>(N)),
                         std::move(labels));
}

FactorGraphCovariances fg_type_covariances(const Ensemble& e, const BetheSolution& solution) {
  const FactorGraphMatrices m = assemble_fg_matrices(e, solution);
  require_stable(det(fg_stability_matrix(m)), "factor graph instability: det(I - C(V'-V))");
  const Matrix kckt = m.k * m.c * m.k.transpose();
  std::vector<std::string> words, symbols;
  for (std::size_t w = 0; w < e.word_count(); ++w) words.push_back(e.word_label(w));
  for (std::size_t z = 0; z < e.q(); ++z) symbols.push_back(e.alphabet().label(z));
  return {make_covariance(push_through(m.t_prime - m.t, kckt), std::move(words)),
          make_covariance(push_through(m.v_prime - m.v, m.c), std::move(symbols))};
}

CovarianceResult fg_variable_covariance_oracle(const Ensemble& e, std::int64_t N) {
  const std::int64_t M = e.factor_nodes(N);
  auto weights = variable_type_log_weights(e, N);
  std::vector<std::string> labels;
  for (std::size_t z = 0; z < e.q(); ++z) labels.push_back(e.alphabet().label(z));
  const double scale = static_cast<double>(M) / (static_cast<double>(N) * static_cast<double>(N));
  return make_covariance(weighted_covariance(weights.types, weights.log_weights, scale),
                         std::move(labels));
}

CovarianceResult fg_factor_covariance_oracle(const Ensemble& e, std::int64_t N,
                                             const EnumerationLimits& limits) {
  const std::int64_t M = e.factor_nodes(N);
  const auto& S = e.support();
  std::vector<std::vector<std::int64_t>> types;
  std::vector<double> log_w;
  std::vector<std::int64_t> v(e.q()), u(e.word_count());
  for (const auto& us : enumerate_types(M, S.size(), limits)) {
    bool ok = true;
    for (std::size_t z = 0; z < e.q() && ok; ++z) {
      std::int64_t lhs = 0;
      for (std::size_t j = 0; j < S.size(); ++j) lhs += e.letter_counts(S[j])[z] * us[j];
      ok = lhs % e.l() == 0;
      v[z] = lhs / e.l();
    }
    if (!ok) continue;
    std::fill(u.begin(), u.end(), 0);
    double w = 0.0;
    for (std::size_t j = 0; j < S.size(); ++j) {
      u[S[j]] = us[j];
      if (us[j]) w += static_cast<double>(us[j]) * std::log(e.factor(S[j]));
    }
    w += log_expected_type_count(e, TypeVector(v), TypeVector(u));
    types.push_back(u);
    log_w.push_back(w);
  }
  std::vector<std::string> labels;
  for (std::size_t w = 0; w < e.word_count(); ++w) labels.push_back(e.word_label(w));
  return make_covariance(weighted_covariance(types, log_w, 1.0 / static_cast<double>(M)),
                         std::move(labels));
}

}  // namespace central_approx
