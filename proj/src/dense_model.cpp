#include "central_approx/dense_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "central_approx/error.hpp"
#include "central_approx/parallel.hpp"

namespace central_approx {

namespace {

constexpr std::size_t kMaxConfigurations = 1u << 16;

std::vector<double> softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] = std::exp(logits[i] - mx));
  for (double& x : w) x /= total;
  return w;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<std::vector<int>> replica_permutations(int n, std::mt19937_64& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  if (n <= 6) {
    do {
      out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  } else {
    for (int k = 0; k < 64; ++k) {
      std::shuffle(p.begin(), p.end(), rng);
      out.push_back(p);
    }
  }
  return out;
}

std::vector<double> random_overlaps(const DenseModel& model, std::mt19937_64& rng) {
  double scale = 0.0;
  for (double x : model.alphabet().values()) scale = std::max(scale, x * x);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> q(model.pair_count());
  for (double& v : q) v = u(rng);
  return q;
}

}  // namespace

DenseModel::DenseModel(int replicas, Alphabet alphabet, LocalTerm local, GlobalTerm global)
    : replicas_(replicas),
      alphabet_(std::move(alphabet)),
      local_(std::move(local)),
      global_(std::move(global)) {
  if (replicas_ < 1) throw ValidationError("dense model: replica count must be >= 1");
  if (!local_) throw ValidationError("dense model: local term f is required");
  if (!global_.value) throw ValidationError("dense model: global term g is required");
  const double configs = std::pow(static_cast<double>(alphabet_.size()), replicas_);
  if (configs > static_cast<double>(kMaxConfigurations))
    throw GuardError("dense model: |X|^n exceeds 65536 replica configurations");

  for (int a = 1; a <= replicas_; ++a)
    for (int b = a; b <= replicas_; ++b) pairs_.emplace_back(a, b);

  const auto count = static_cast<std::size_t>(configs);
  const std::size_t q = alphabet_.size();
  const auto n = static_cast<std::size_t>(replicas_);
  config_values_ = Matrix(count, n);
  config_symbols_.assign(count * n, 0);
  local_values_.resize(count);
  pair_products_ = Matrix(count, pairs_.size());
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t rest = c;
    for (std::size_t a = n; a-- > 0;) {
      config_symbols_[c * n + a] = rest % q;
      config_values_(c, a) = alphabet_.value(rest % q);
      rest /= q;
    }
    local_values_[c] = local_(config_values_.row(c));
    if (!std::isfinite(local_values_[c]))
      throw ValidationError("dense model: f is not finite at " + config_label(c));
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto [a, b] = pairs_[k];
      pair_products_(c, k) = config_values_(c, a - 1) * config_values_(c, b - 1);
    }
  }
  if (replicas_ > 1) {
    const double defect = replica_symmetry_defect(*this, 16, 0);
    if (defect > 1e-10) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "dense model: g is not invariant under replica permutations (defect %.3g)",
                    defect);
      throw ValidationError(buf);
    }
  }
}

std::size_t DenseModel::pair_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  if (a < 1 || b > replicas_) throw ValidationError("pair index out of range");
  // Pairs starting at a' < a occupy sum_{a'<a} (n - a' + 1) slots.
  std::size_t k = 0;
  for (int s = 1; s < a; ++s) k += static_cast<std::size_t>(replicas_ - s + 1);
  return k + static_cast<std::size_t>(b - a);
}

std::string DenseModel::config_label(std::size_t c) const {
  std::string s = "(";
  for (std::size_t a = 0; a < static_cast<std::size_t>(replicas_); ++a) {
    if (a) s += ',';
    s += alphabet_.label(config_symbols_[c * static_cast<std::size_t>(replicas_) + a]);
  }
  return s + ")";
}

std::string DenseModel::pair_label(std::size_t k) const {
  const auto [a, b] = pairs_.at(k);
  return "q" + std::to_string(a) + std::to_string(b);
}

double DenseModel::global(std::span<const double> q) const { return global_.value(q); }

std::vector<double> DenseModel::fd_gradient(std::span<const double> q) const {
  std::vector<double> x(q.begin(), q.end());
  std::vector<double> grad(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double h = 1e-5 * (1.0 + std::abs(q[k]));
    x[k] = q[k] + h;
    const double up = global_.value(x);
    x[k] = q[k] - h;
    const double down = global_.value(x);
    x[k] = q[k];
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

Matrix DenseModel::fd_hessian(std::span<const double> q) const {
  const std::size_t p = q.size();
  Matrix hess(p, p);
  std::vector<double> x(q.begin(), q.end());
  if (global_.gradient) {
    for (std::size_t k = 0; k < p; ++k) {
      const double h = 1e-5 * (1.0 + std::abs(q[k]));
      x[k] = q[k] + h;
      const auto up = global_.gradient(x);
      x[k] = q[k] - h;
      const auto down = global_.gradient(x);
      x[k] = q[k];
      for (std::size_t j = 0; j < p; ++j) hess(j, k) = (up[j] - down[j]) / (2.0 * h);
    }
  } else {
    // Second differences of the value need a wider step than gradients.
    const double g0 = global_.value(q);
    for (std::size_t i = 0; i < p; ++i) {
      const double hi = 1e-4 * (1.0 + std::abs(q[i]));
      x[i] = q[i] + hi;
      const double up = global_.value(x);
      x[i] = q[i] - hi;
      const double down = global_.value(x);
      x[i] = q[i];
      hess(i, i) = (up - 2.0 * g0 + down) / (hi * hi);
      for (std::size_t j = 0; j < i; ++j) {
        const double hj = 1e-4 * (1.0 + std::abs(q[j]));
        double acc = 0.0;
        for (int si : {1, -1}) {
          for (int sj : {1, -1}) {
            x[i] = q[i] + si * hi;
            x[j] = q[j] + sj * hj;
            acc += si * sj * global_.value(x);
          }
        }
        x[i] = q[i];
        x[j] = q[j];
        hess(i, j) = hess(j, i) = acc / (4.0 * hi * hj);
      }
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double m = 0.5 * (hess(i, j) + hess(j, i));
      hess(i, j) = hess(j, i) = m;
    }
  }
  return hess;
}

std::vector<double> DenseModel::gradient(std::span<const double> q) const {
  return global_.gradient ? global_.gradient(q) : fd_gradient(q);
}

Matrix DenseModel::hessian(std::span<const double> q) const {
  return global_.hessian ? global_.hessian(q) : fd_hessian(q);
}

std::vector<double> DenseModel::overlaps(std::span<const double> nu) const {
  if (nu.size() != config_count()) throw ValidationError("overlaps: measure size mismatch");
  std::vector<double> q(pair_count(), 0.0);
  for (std::size_t c = 0; c < nu.size(); ++c) {
    if (nu[c] == 0.0) continue;
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += nu[c] * pair_products_(c, k);
  }
  return q;
}

double DenseModel::objective(const ProbMeasure& nu) const {
  double mean_f = 0.0;
  for (std::size_t c = 0; c < nu.size(); ++c) mean_f += nu[c] * local_values_[c];
  return entropy(nu) + mean_f + global(overlaps(nu.weights()));
}

std::vector<double> DenseModel::stationary_logits(const ProbMeasure& nu) const {
  const auto grad = gradient(overlaps(nu.weights()));
  std::vector<double> logits(local_values_);
  for (std::size_t c = 0; c < logits.size(); ++c)
    for (std::size_t k = 0; k < grad.size(); ++k) logits[c] += pair_products_(c, k) * grad[k];
  return logits;
}

double DenseModel::stationarity_residual(const ProbMeasure& nu) const {
  return sup_diff(nu.weights(), softmax(stationary_logits(nu)));
}

std::vector<std::size_t> DenseModel::permuted_configs(std::span<const int> perm) const {
  const auto n = static_cast<std::size_t>(replicas_);
  if (perm.size() != n) throw ValidationError("permutation size mismatch");
  const std::size_t q = alphabet_.size();
  std::vector<std::size_t> out(config_count());
  for (std::size_t c = 0; c < out.size(); ++c) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < n; ++a)
      idx = idx * q + config_symbols_[c * n + static_cast<std::size_t>(perm[a])];
    out[c] = idx;
  }
  return out;
}

std::vector<std::size_t> DenseModel::permuted_pairs(std::span<const int> perm) const {
  std::vector<std::size_t> out(pair_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto [a, b] = pairs_[k];
    out[k] = pair_index(perm[static_cast<std::size_t>(a - 1)] + 1,
                        perm[static_cast<std::size_t>(b - 1)] + 1);
  }
  return out;
}

double replica_symmetry_defect(const DenseModel& model, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto perms = replica_permutations(model.replicas(), rng);
  double worst = 0.0;
  std::vector<double> permuted(model.pair_count());
  for (int s = 0; s < samples; ++s) {
    const auto q = random_overlaps(model, rng);
    const double g0 = model.global(q);
    for (const auto& p : perms) {
      const auto map = model.permuted_pairs(p);
      for (std::size_t k = 0; k < q.size(); ++k) permuted[k] = q[map[k]];
      worst = std::max(worst, std::abs(model.global(permuted) - g0) / (1.0 + std::abs(g0)));
    }
  }
  return worst;
}

double derivative_self_check(const DenseModel& model, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  auto rel = [](double a, double b, double scale) {
    return std::abs(a - b) / std::max(1.0, scale);
  };
  for (int s = 0; s < points; ++s) {
    const auto q = random_overlaps(model, rng);
    if (model.has_analytic_gradient()) {
      const auto g = model.gradient(q);
      const auto fd = model.fd_gradient(q);
      double scale = 0.0;
      for (double v : g) scale = std::max(scale, std::abs(v));
      for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, rel(g[k], fd[k], scale));
    }
    if (model.has_analytic_hessian()) {
      const Matrix h = model.hessian(q);
      const Matrix fd = model.fd_hessian(q);
      worst = std::max(worst, max_abs_diff(h, fd) / std::max(1.0, h.max_abs()));
    }
  }
  return worst;
}

// ---- exact sums ----

namespace {

struct TypeTermEvaluator {
  const DenseModel& model;
  std::int64_t N;
  LogFactorials lf;
  std::vector<double> q;

  TypeTermEvaluator(const DenseModel& m, std::int64_t n) : model(m), N(n), lf(n), q(m.pair_count()) {}

  double operator()(std::span<const std::int64_t> counts) {
    const Matrix& J = model.pair_products();
    std::fill(q.begin(), q.end(), 0.0);
    double local = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      const auto v = static_cast<double>(counts[c]);
      local += v * model.local(c);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] += v * J(c, k);
    }
    const auto n = static_cast<double>(N);
    for (double& x : q) x /= n;
    return log_multinomial(counts, lf) + local + n * model.global(q);
  }
};

// Sums log-terms over all types, split by the count of configuration 0 so
// the partition (and hence the rounding) is independent of the worker count.
template <class Accept>
double chunked_type_sum(const DenseModel& model, std::int64_t N, const EnumerationLimits& limits,
                        Accept accept) {
  if (N < 1) throw ValidationError("type sum: N must be >= 1");
  const std::size_t cells = model.config_count();
  (void)enumerate_types(N, cells, limits);  // guard check
  const auto chunks = parallel_map(static_cast<std::size_t>(N) + 1, [&](std::size_t k) {
    LogSumExp acc;
    TypeTermEvaluator eval(model, N);
    const auto first = static_cast<std::int64_t>(k);
    std::vector<std::int64_t> full(cells);
    full[0] = first;
    if (cells == 1) {
      if (first == N && accept(std::span<const std::int64_t>(full))) acc.add(eval(full));
      return acc;
    }
    for (const auto& rest : TypeEnumeration(N - first, cells - 1)) {
      std::copy(rest.begin(), rest.end(), full.begin() + 1);
      if (accept(std::span<const std::int64_t>(full))) acc.add(eval(full));
    }
    return acc;
  });
  LogSumExp total;
  for (const auto& c : chunks) total.merge(c);
  return total.value();
}

}  // namespace

double brute_force_log_expectation(const DenseModel& model, std::int64_t N,
                                   double max_configurations) {
  if (N < 1) throw ValidationError("brute force: N must be >= 1");
  const std::size_t base = model.config_count();
  const double total = std::pow(static_cast<double>(base), static_cast<double>(N));
  if (total > max_configurations) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "brute force guard: %.4g configurations exceeds limit %.4g",
                  total, max_configurations);
    throw GuardError(buf);
  }
  const Matrix& J = model.pair_products();
  const auto n = static_cast<double>(N);
  std::vector<std::size_t> digits(static_cast<std::size_t>(N), 0);
  std::vector<double> q(model.pair_count());
  LogSumExp acc;
  while (true) {
    std::fill(q.begin(), q.end(), 0.0);
    double local = 0.0;
    for (std::size_t c : digits) {
      local += model.local(c);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] += J(c, k);
    }
    for (double& x : q) x /= n;
    acc.add(local + n * model.global(q));
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] == base) digits[i++] = 0;
    if (i == digits.size()) break;
  }
  return acc.value();
}

double exact_log_type_sum(const DenseModel& model, std::int64_t N, const EnumerationLimits& limits) {
  return chunked_type_sum(model, N, limits, [](std::span<const std::int64_t>) { return true; });
}

double windowed_log_type_sum(const DenseModel& model, std::int64_t N, double alpha,
                             const ProbMeasure& center, const EnumerationLimits& limits) {
  if (center.size() != model.config_count())
    throw ValidationError("windowed sum: center measure size mismatch");
  if (!(center.min() > 0.0)) throw ValidationError("windowed sum: center must be strictly positive");
  const auto n = static_cast<double>(N);
  const double radius2 = std::pow(n, 2.0 * alpha);
  return chunked_type_sum(model, N, limits, [&](std::span<const std::int64_t> counts) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      const double d = static_cast<double>(counts[c]) - n * center[c];
      d2 += d * d;
    }
    return d2 <= radius2;
  });
}

// ---- variational solver ----

namespace {

struct FixedPointRun {
  std::vector<double> measure;
  bool converged = false;
  double last_change = std::numeric_limits<double>::infinity();
};

FixedPointRun run_fixed_point(const DenseModel& model, std::vector<double> nu,
                              const SolverOptions& opt) {
  FixedPointRun run;
  const Matrix& J = model.pair_products();
  std::vector<double> logits(nu.size());
  for (long it = 0; it < opt.max_iterations; ++it) {
    const auto grad = model.gradient(model.overlaps(nu));
    for (std::size_t c = 0; c < nu.size(); ++c) {
      double l = model.local(c);
      for (std::size_t k = 0; k < grad.size(); ++k) l += J(c, k) * grad[k];
      logits[c] = l;
    }
    const auto target = softmax(logits);
    double change = 0.0;
    double total = 0.0;
    for (std::size_t c = 0; c < nu.size(); ++c) {
      const double next = (1.0 - opt.damping) * nu[c] + opt.damping * target[c];
      change = std::max(change, std::abs(next - nu[c]));
      total += (nu[c] = next);
    }
    for (double& x : nu) x /= total;
    run.last_change = change;
    if (change < opt.tolerance) {
      run.converged = true;
      break;
    }
  }
  run.measure = std::move(nu);
  return run;
}

std::vector<double> dirichlet_start(std::size_t size, std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<double> w(size);
  double total = 0.0;
  for (double& x : w) total += (x = gamma1(rng) + 1e-300);
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

VariationalSolution solve_variational(const DenseModel& model, const SolverOptions& opt) {
  if (!(opt.damping > 0.0 && opt.damping <= 1.0))
    throw ValidationError("solver: damping must lie in (0, 1]");
  const std::size_t size = model.config_count();
  const auto starts = static_cast<std::size_t>(std::max(opt.restarts, 0)) + 1;
  const auto runs = parallel_map(starts, [&](std::size_t i) {
    auto start = i == 0 ? std::vector<double>(size, 1.0 / static_cast<double>(size))
                        : dirichlet_start(size, opt.seed, i);
    return run_fixed_point(model, std::move(start), opt);
  });

  std::vector<StationaryPoint> points;
  double best_change = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) {
    best_change = std::min(best_change, r.last_change);
    if (!r.converged) continue;
    ProbMeasure m = ProbMeasure::normalized(r.measure);
    const double obj = model.objective(m);
    const double res = model.stationarity_residual(m);
    points.push_back({std::move(m), obj, res});
  }
  if (points.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "variational solver did not converge in %ld iterations from any of %zu starts "
                  "(best step change %.3g)",
                  opt.max_iterations, starts, best_change);
    throw NonConvergenceError(buf, best_change);
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const auto& a, const auto& b) { return a.objective > b.objective; });

  const double best = points.front().objective;
  std::vector<StationaryPoint> maxima;
  double runner_up = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.objective < best - opt.comaximizer_tolerance) {
      runner_up = std::max(runner_up, p.objective);
      continue;
    }
    const bool seen = std::any_of(maxima.begin(), maxima.end(), [&](const auto& m) {
      return sup_distance(m.measure, p.measure) <= opt.dedup_distance;
    });
    if (!seen) maxima.push_back(p);
  }
  const bool boundary = std::any_of(maxima.begin(), maxima.end(), [&](const auto& m) {
    return m.measure.min() < opt.boundary_threshold;
  });
  VariationalSolution sol{maxima.front().measure,
                          maxima.front().objective,
                          maxima,
                          maxima.front().residual,
                          maxima.size() == 1,
                          boundary,
                          points.size(),
                          starts,
                          best - runner_up};
  return sol;
}

// ---- central approximation ----

DenseMatrices assemble_matrices(const DenseModel& model, const ProbMeasure& nu) {
  const std::size_t C = model.config_count();
  const std::size_t P = model.pair_count();
  if (nu.size() != C) throw ValidationError("assemble_matrices: measure size mismatch");
  if (!(nu.min() > 0.0))
    throw BoundaryError("assemble_matrices: measure has a zero entry (boundary maximizer)");
  const Matrix& J = model.pair_products();
  DenseMatrices m;
  m.overlaps = model.overlaps(nu.weights());
  m.u_prime = Matrix(P, P);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t k = 0; k < P; ++k)
      for (std::size_t l = 0; l < P; ++l) m.u_prime(k, l) += nu[c] * J(c, k) * J(c, l);
  m.u = Matrix::outer(m.overlaps, m.overlaps);
  m.j = J;
  std::vector<double> inv(C);
  for (std::size_t c = 0; c < C; ++c) inv[c] = 1.0 / nu[c];
  m.b = Matrix::diagonal(inv);
  m.h = Matrix(C, C - 1);
  for (std::size_t j = 0; j + 1 < C; ++j) {
    m.h(0, j) = -1.0;
    m.h(j + 1, j) = 1.0;
  }
  m.s_prime = Matrix::diagonal(nu.weights());
  m.s = Matrix::outer(nu.weights(), nu.weights());
  m.hessian = model.hessian(m.overlaps);
  return m;
}

Matrix stability_matrix(const DenseMatrices& m) {
  return Matrix::identity(m.u.rows()) - m.hessian * (m.u_prime - m.u);
}

CentralApproxResult central_approx_constant(const DenseModel& model,
                                            const VariationalSolution& solution) {
  if (solution.boundary)
    throw BoundaryError("central approximation requires an interior maximizer (some nu*(x) < 1e-10)");
  CentralApproxResult out{solution.F, 0.0, 0.0, {}, {}};
  LogSumExp acc;
  for (std::size_t i = 0; i < solution.maximizers.size(); ++i) {
    DenseMatrices m = assemble_matrices(model, solution.maximizers[i].measure);
    const double d = det(stability_matrix(m));
    if (!(d > 0.0)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "AT instability: det(I - D^2g(U'-U)) = %.6g <= 0 at maximizer %zu; "
                    "the central approximation does not apply",
                    d, i);
      throw InstabilityError(buf);
    }
    out.det_values.push_back(d);
    acc.add(-0.5 * std::log(d));
    if (i == 0) out.matrices = std::move(m);
  }
  out.det_value = out.det_values.front();
  out.log_constant = acc.value();
  return out;
}

double asymptotic_log_estimate(const CentralApproxResult& result, std::int64_t N) {
  return static_cast<double>(N) * result.F + result.log_constant;
}

}  // namespace central_approx
