#include "central_approx/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "central_approx/error.hpp"
#include "central_approx/lattice.hpp"
#include "central_approx/parallel.hpp"

namespace central_approx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxWords = 1u << 16;
constexpr std::int64_t kExactSocketLimit = 60;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) {
    out *= base;
    if (out > kMaxWords) throw GuardError("factor graph: |X|^r exceeds 65536 words");
  }
  return out;
}

BigRational rational_power(const BigRational& x, std::int64_t k) {
  BigRational out = 1;
  for (std::int64_t i = 0; i < k; ++i) out *= x;
  return out;
}

}  // namespace

Ensemble::Ensemble(int l, int r, Alphabet alphabet, std::vector<double> factor_table)
    : l_(l), r_(r), alphabet_(std::move(alphabet)), table_(std::move(factor_table)) {
  if (l_ < 2) throw ValidationError("ensemble: variable degree l must be >= 2");
  if (r_ < 2) throw ValidationError("ensemble: factor degree r must be >= 2");
  const std::size_t q = alphabet_.size();
  const std::size_t words = ipow(q, r_);
  if (table_.size() != words)
    throw ValidationError("ensemble: factor table must have |X|^r entries");
  for (double v : table_)
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("ensemble: factor values must be finite and nonnegative");

  const auto ru = static_cast<std::size_t>(r_);
  symbols_.resize(words * ru);
  letters_.assign(words * q, 0);
  for (std::size_t w = 0; w < words; ++w) {
    std::size_t rest = w;
    for (std::size_t k = ru; k-- > 0;) {
      const std::size_t z = rest % q;
      rest /= q;
      symbols_[w * ru + k] = z;
      ++letters_[w * q + z];
    }
    if (table_[w] > 0.0) support_.push_back(w);
  }
  if (support_.empty()) throw ValidationError("ensemble: factor support is empty");
}

std::string Ensemble::word_label(std::size_t word) const {
  std::string out = "(";
  const auto s = symbols(word);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ',';
    out += alphabet_.label(s[k]);
  }
  return out + ")";
}

bool Ensemble::admissible(std::int64_t N) const noexcept { return N >= 1 && (N * l_) % r_ == 0; }

std::int64_t Ensemble::factor_nodes(std::int64_t N) const {
  if (N < 1) throw ValidationError("ensemble: N must be >= 1");
  if ((N * l_) % r_ != 0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "ensemble: N = %lld is not admissible (r = %d does not divide N l = %lld)",
                  static_cast<long long>(N), r_, static_cast<long long>(N * l_));
    throw ValidationError(buf);
  }
  return N * l_ / r_;
}

std::vector<double> read_factor_table(const std::string& path, const Alphabet& alphabet, int r) {
  std::ifstream in(path);
  if (!in) throw ValidationError("factor table: cannot open '" + path + "'");
  const std::size_t q = alphabet.size();
  const std::size_t words = ipow(q, r);
  std::vector<double> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::size_t expected = table.size();
    std::size_t word = 0;
    for (int k = 0; k < r; ++k) {
      double sym;
      if (!(ls >> sym))
        throw ValidationError("factor table: line " + std::to_string(lineno) + ": expected " +
                              std::to_string(r) + " symbols and a value");
      word = word * q + alphabet.index_of(sym);
    }
    double value;
    std::string extra;
    if (!(ls >> value) || (ls >> extra))
      throw ValidationError("factor table: line " + std::to_string(lineno) +
                            ": expected exactly one value after the word");
    if (word != expected)
      throw ValidationError("factor table: line " + std::to_string(lineno) +
                            ": words must be listed in lexicographic order");
    table.push_back(value);
  }
  if (table.size() != words)
    throw ValidationError("factor table: expected " + std::to_string(words) + " words, found " +
                          std::to_string(table.size()));
  return table;
}

std::vector<double> factor_table_by_name(const std::string& name, const Alphabet& alphabet, int r) {
  if (name.rfind("table:", 0) == 0) return read_factor_table(name.substr(6), alphabet, r);
  const std::size_t q = alphabet.size();
  const std::size_t words = ipow(q, r);
  std::vector<double> table(words);
  for (std::size_t w = 0; w < words; ++w) {
    std::size_t rest = w;
    std::size_t ones = 0;
    bool equal = true;
    const std::size_t last = w % q;
    for (int k = 0; k < r; ++k) {
      const std::size_t z = rest % q;
      rest /= q;
      ones += z == 1;
      equal = equal && z == last;
    }
    if (name == "uniform") {
      table[w] = 1.0;
    } else if (name == "all-equal") {
      table[w] = equal ? 1.0 : 0.0;
    } else if (name == "parity") {
      if (q != 2) throw ValidationError("factor 'parity' requires a binary alphabet");
      table[w] = ones % 2 == 0 ? 1.0 : 0.0;
    } else {
      throw ValidationError("unknown factor '" + name +
                            "' (expected parity, all-equal, uniform or table:<path>)");
    }
  }
  return table;
}

Ensemble make_ensemble(int l, int r, const Alphabet& alphabet, const std::string& factor) {
  if (r < 2) throw ValidationError("ensemble: factor degree r must be >= 2");
  return Ensemble(l, r, alphabet, factor_table_by_name(factor, alphabet, r));
}

// ---- types ----

bool is_consistent(const Ensemble& e, const TypeVector& v, const TypeVector& u) {
  if (v.cells() != e.q() || u.cells() != e.word_count()) return false;
  const std::int64_t N = v.total();
  if (!e.admissible(N) || u.total() != N * e.l() / e.r()) return false;
  for (std::size_t z = 0; z < e.q(); ++z) {
    std::int64_t lhs = 0;
    for (std::size_t w = 0; w < e.word_count(); ++w)
      if (u[w]) lhs += e.letter_counts(w)[z] * u[w];
    if (lhs != e.l() * v[z]) return false;
  }
  return true;
}

double log_expected_type_count(const Ensemble& e, const TypeVector& v, const TypeVector& u) {
  if (!is_consistent(e, v, u))
    throw ValidationError("expected type count: (v, u) violates the consistency condition");
  const std::int64_t N = v.total();
  double out = log_multinomial(v) + log_multinomial(u) - std::lgamma(static_cast<double>(N * e.l()) + 1.0);
  for (std::size_t z = 0; z < e.q(); ++z)
    out += std::lgamma(static_cast<double>(e.l() * v[z]) + 1.0);
  return out;
}

BigRational expected_type_count_exact(const Ensemble& e, const TypeVector& v, const TypeVector& u) {
  if (!is_consistent(e, v, u))
    throw ValidationError("expected type count: (v, u) violates the consistency condition");
  const std::int64_t N = v.total();
  if (N * e.l() > kExactSocketLimit)
    throw GuardError("exact expected type count: requires N l <= 60");
  BigRational out(multinomial_exact(v) * multinomial_exact(u));
  BigInt num = 1;
  for (std::size_t z = 0; z < e.q(); ++z) num *= factorial(e.l() * v[z]);
  out *= BigRational(num, factorial(N * e.l()));
  return out;
}

PermutationOracleResult brute_force_permutation_oracle(const Ensemble& e, std::int64_t N,
                                                       bool allow_large) {
  const std::int64_t M = e.factor_nodes(N);
  const std::int64_t sockets = N * e.l();
  if (sockets > (allow_large ? 12 : 8))
    throw GuardError("permutation oracle: requires N l <= 8 (or <= 12 when explicitly allowed)");
  const std::size_t q = e.q();
  const auto l = static_cast<std::size_t>(e.l());
  const auto r = static_cast<std::size_t>(e.r());
  const auto n = static_cast<std::size_t>(N);
  const auto m = static_cast<std::size_t>(M);

  std::size_t assignments = 1;
  for (std::size_t i = 0; i < n; ++i) assignments *= q;

  // Key: v counts followed by the sorted factor words.
  std::map<std::vector<std::int64_t>, std::uint64_t> counts;
  std::vector<std::size_t> perm(static_cast<std::size_t>(sockets));
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> x(n);
  std::vector<std::int64_t> key(q + m);
  std::uint64_t graphs = 0;
  do {
    ++graphs;
    for (std::size_t a = 0; a < assignments; ++a) {
      std::size_t rest = a;
      std::fill(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(q), 0);
      for (std::size_t i = n; i-- > 0;) {
        x[i] = rest % q;
        rest /= q;
        ++key[x[i]];
      }
      for (std::size_t f = 0; f < m; ++f) {
        std::size_t word = 0;
        for (std::size_t k = 0; k < r; ++k) word = word * q + x[perm[f * r + k] / l];
        key[q + f] = static_cast<std::int64_t>(word);
      }
      std::sort(key.begin() + static_cast<std::ptrdiff_t>(q), key.end());
      ++counts[key];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  PermutationOracleResult out;
  out.graphs = graphs;
  const BigInt total = factorial(sockets);
  std::vector<BigRational> fx(e.word_count());
  for (std::size_t w = 0; w < e.word_count(); ++w) fx[w] = exact_rational(e.factor(w));
  for (const auto& [k, c] : counts) {
    std::vector<std::int64_t> v(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(q));
    std::vector<std::int64_t> u(e.word_count(), 0);
    for (std::size_t f = 0; f < m; ++f) ++u[static_cast<std::size_t>(k[q + f])];
    BigRational expected(BigInt(c), total);
    BigRational weight = expected;
    for (std::size_t w = 0; w < u.size(); ++w)
      if (u[w]) weight *= rational_power(fx[w], u[w]);
    out.expected_Z += weight;
    out.type_counts[{std::move(v), std::move(u)}] += expected;
  }
  return out;
}

namespace {

// Calls fn(v, u) for every u on the support with a consistent v.
template <class Fn>
void for_each_supported_pair(const Ensemble& e, std::int64_t N, const EnumerationLimits& limits,
                             Fn&& fn) {
  const std::int64_t M = e.factor_nodes(N);
  const auto& S = e.support();
  const std::size_t q = e.q();
  std::vector<std::int64_t> v(q), u(e.word_count());
  for (const auto& us : enumerate_types(M, S.size(), limits)) {
    bool ok = true;
    for (std::size_t z = 0; z < q && ok; ++z) {
      std::int64_t lhs = 0;
      for (std::size_t j = 0; j < S.size(); ++j) lhs += e.letter_counts(S[j])[z] * us[j];
      ok = lhs % e.l() == 0;
      v[z] = lhs / e.l();
    }
    if (!ok) continue;
    std::fill(u.begin(), u.end(), 0);
    for (std::size_t j = 0; j < S.size(); ++j) u[S[j]] = us[j];
    fn(v, u);
  }
}

}  // namespace

BigRational exact_expected_Z_rational(const Ensemble& e, std::int64_t N,
                                      const EnumerationLimits& limits) {
  if (e.factor_nodes(N) * e.r() > kExactSocketLimit)
    throw GuardError("exact expected Z: requires N l <= 60");
  std::vector<BigRational> fx(e.word_count());
  for (std::size_t w : e.support()) fx[w] = exact_rational(e.factor(w));
  BigRational total = 0;
  for_each_supported_pair(e, N, limits, [&](const auto& v, const auto& u) {
    BigRational term = expected_type_count_exact(e, TypeVector(v), TypeVector(u));
    for (std::size_t w = 0; w < u.size(); ++w)
      if (u[w]) term *= rational_power(fx[w], u[w]);
    total += term;
  });
  return total;
}

double exact_log_expected_Z_by_types(const Ensemble& e, std::int64_t N,
                                     const EnumerationLimits& limits) {
  LogSumExp acc;
  for_each_supported_pair(e, N, limits, [&](const auto& v, const auto& u) {
    double term = log_expected_type_count(e, TypeVector(v), TypeVector(u));
    for (std::size_t w = 0; w < u.size(); ++w)
      if (u[w]) term += static_cast<double>(u[w]) * std::log(e.factor(w));
    acc.add(term);
  });
  return acc.value();
}

VariableTypeWeights variable_type_log_weights(const Ensemble& e, std::int64_t N) {
  const std::int64_t M = e.factor_nodes(N);
  const std::int64_t sockets = N * e.l();
  const std::size_t q = e.q();
  const std::size_t dims = q - 1;
  const auto side = static_cast<std::size_t>(sockets + 1);
  double cells = 1.0;
  for (std::size_t d = 0; d < dims; ++d) cells *= static_cast<double>(side);
  if (cells > 5e7) throw GuardError("variable type weights: generating function table too large");

  std::vector<std::size_t> stride(dims);
  for (std::size_t d = 0; d < dims; ++d) stride[d] = d == 0 ? 1 : stride[d - 1] * side;
  const auto size = static_cast<std::size_t>(cells);

  // Polynomial P(t) = sum_x f(x) t^N(x), grouped by letter-count offset.
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t w : e.support()) {
    std::size_t offset = 0;
    for (std::size_t d = 0; d < dims; ++d)
      offset += static_cast<std::size_t>(e.letter_counts(w)[d]) * stride[d];
    const double lf = std::log(e.factor(w));
    auto it = std::find_if(terms.begin(), terms.end(), [&](const auto& t) { return t.first == offset; });
    if (it == terms.end())
      terms.emplace_back(offset, lf);
    else
      it->second = log_add(it->second, lf);
  }

  std::vector<double> poly(size, kNegInf), next(size);
  poly[0] = 0.0;
  for (std::int64_t step = 0; step < M; ++step) {
    std::fill(next.begin(), next.end(), kNegInf);
    // Every coordinate stays below the total degree (step + 1) r <= N l.
    for (std::size_t c = 0; c < size; ++c) {
      if (poly[c] == kNegInf) continue;
      for (const auto& [offset, lf] : terms) {
        double& slot = next[c + offset];
        slot = log_add(slot, poly[c] + lf);
      }
    }
    poly.swap(next);
  }

  VariableTypeWeights out;
  const LogFactorials lf(sockets);
  for (const auto& v : enumerate_types(N, q)) {
    std::size_t index = 0;
    for (std::size_t d = 0; d < dims; ++d)
      index += static_cast<std::size_t>(e.l() * v[d]) * stride[d];
    double w = poly[index];
    if (w != kNegInf) {
      w += log_multinomial(v, lf) - lf(sockets);
      for (std::size_t z = 0; z < q; ++z) w += lf(e.l() * v[z]);
    }
    out.types.push_back(v);
    out.log_weights.push_back(w);
  }
  return out;
}

double exact_log_expected_Z(const Ensemble& e, std::int64_t N) {
  const auto weights = variable_type_log_weights(e, N);
  LogSumExp acc;
  for (double w : weights.log_weights)
    if (w != kNegInf) acc.add(w);
  return acc.value();
}

// ---- Bethe exponent ----

double bethe_objective(const Ensemble& e, const ProbMeasure& mu) {
  if (mu.size() != e.word_count()) throw ValidationError("bethe objective: mu must live on X^r");
  const double lr = static_cast<double>(e.l()) / e.r();
  std::vector<double> nu(e.q(), 0.0);
  double energy = 0.0;
  for (std::size_t w = 0; w < e.word_count(); ++w) {
    if (mu[w] == 0.0) continue;
    if (e.factor(w) == 0.0) return kNegInf;
    energy += mu[w] * std::log(e.factor(w));
    for (std::size_t z = 0; z < e.q(); ++z)
      nu[z] += mu[w] * e.letter_counts(w)[z] / static_cast<double>(e.r());
  }
  return lr * entropy(mu) - (e.l() - 1) * entropy(nu) + lr * energy;
}

namespace {

struct BetheRun {
  std::vector<double> log_message;
  std::vector<double> mu;
  std::vector<double> nu;
  double change = std::numeric_limits<double>::infinity();
  bool converged = false;
};

void bethe_marginals(const Ensemble& e, std::span<const double> log_message,
                     std::vector<double>& mu, std::vector<double>& nu) {
  const auto& S = e.support();
  std::vector<double> logits(S.size());
  for (std::size_t j = 0; j < S.size(); ++j) {
    double s = std::log(e.factor(S[j]));
    for (std::size_t z : e.symbols(S[j])) s += log_message[z];
    logits[j] = s;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& x : logits) total += (x = std::exp(x - mx));
  mu.assign(e.word_count(), 0.0);
  nu.assign(e.q(), 0.0);
  for (std::size_t j = 0; j < S.size(); ++j) {
    const double p = logits[j] / total;
    mu[S[j]] = p;
    for (std::size_t z = 0; z < e.q(); ++z)
      nu[z] += p * e.letter_counts(S[j])[z] / static_cast<double>(e.r());
  }
}

// Target log message ((l-1)/l) log nu, centered.
std::vector<double> bethe_target(const Ensemble& e, const std::vector<double>& nu) {
  const double a = static_cast<double>(e.l() - 1) / e.l();
  std::vector<double> t(nu.size());
  for (std::size_t z = 0; z < nu.size(); ++z) t[z] = a * std::log(std::max(nu[z], 1e-300));
  const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
  for (double& x : t) x -= mean;
  return t;
}

BetheRun run_bethe(const Ensemble& e, std::vector<double> log_message, const BetheOptions& opt) {
  BetheRun run;
  for (long it = 0; it < opt.max_iterations; ++it) {
    bethe_marginals(e, log_message, run.mu, run.nu);
    const auto target = bethe_target(e, run.nu);
    double change = 0.0;
    for (std::size_t z = 0; z < target.size(); ++z) {
      const double next = (1.0 - opt.damping) * log_message[z] + opt.damping * target[z];
      change = std::max(change, std::abs(next - log_message[z]));
      log_message[z] = next;
    }
    run.change = change;
    if (change < opt.tolerance) {
      run.converged = true;
      break;
    }
  }
  bethe_marginals(e, log_message, run.mu, run.nu);
  run.log_message = std::move(log_message);
  return run;
}

std::vector<double> random_message(std::size_t q, std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> m(q);
  for (double& x : m) x = g(rng);
  return m;
}

}  // namespace

BetheSolution solve_bethe(const Ensemble& e, const BetheOptions& opt) {
  if (!(opt.damping > 0.0 && opt.damping <= 1.0))
    throw ValidationError("bethe solver: damping must lie in (0, 1]");
  const std::size_t q = e.q();
  const auto starts = static_cast<std::size_t>(std::max(opt.restarts, 0)) + 1;
  const auto runs = parallel_map(starts, [&](std::size_t i) {
    return run_bethe(e, i == 0 ? std::vector<double>(q, 0.0) : random_message(q, opt.seed, i), opt);
  });

  std::vector<std::pair<BethePoint, std::size_t>> points;
  double best_change = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    best_change = std::min(best_change, r.change);
    if (!r.converged) continue;
    ProbMeasure mu = ProbMeasure::normalized(r.mu);
    ProbMeasure nu = ProbMeasure::normalized(r.nu);
    const auto target = bethe_target(e, r.nu);
    double residual = 0.0;
    for (std::size_t z = 0; z < q; ++z)
      residual = std::max(residual, std::abs(target[z] - r.log_message[z]));
    const double F = bethe_objective(e, mu);
    points.push_back({BethePoint{std::move(nu), std::move(mu), F, residual}, i});
  }
  if (points.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "bethe solver did not converge in %ld iterations from any of %zu starts "
                  "(best step change %.3g)",
                  opt.max_iterations, starts, best_change);
    throw NonConvergenceError(buf, best_change);
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const auto& a, const auto& b) { return a.first.F > b.first.F; });
  const double best = points.front().first.F;
  std::vector<BethePoint> maxima;
  for (const auto& [p, i] : points) {
    if (p.F < best - opt.comaximizer_tolerance) continue;
    const bool seen = std::any_of(maxima.begin(), maxima.end(), [&](const auto& m) {
      return sup_distance(m.mu, p.mu) <= opt.dedup_distance;
    });
    if (!seen) maxima.push_back(p);
  }
  const auto& top = maxima.front();
  double defect = 0.0;
  for (std::size_t z = 0; z < q; ++z) {
    double marginal = 0.0;
    for (std::size_t w = 0; w < e.word_count(); ++w)
      for (std::size_t s : e.symbols(w))
        if (s == z) marginal += top.mu[w];
    defect = std::max(defect, std::abs(marginal / e.r() - top.nu[z]));
  }
  const bool boundary = std::any_of(maxima.begin(), maxima.end(), [&](const auto& m) {
    return m.nu.min() < opt.boundary_threshold;
  });
  return BetheSolution{top.nu,   top.mu,   top.F,  top.residual,  defect,
                       maxima.size() == 1,  boundary, maxima, points.size(), starts};
}

FactorGraphMatrices assemble_fg_matrices(const Ensemble& e, const ProbMeasure& nu,
                                         const ProbMeasure& mu) {
  const std::size_t q = e.q();
  const std::size_t W = e.word_count();
  if (nu.size() != q || mu.size() != W)
    throw ValidationError("factor graph matrices: measure dimensions do not match the ensemble");
  for (std::size_t z = 0; z < q; ++z)
    if (!(nu[z] > 0.0))
      throw BoundaryError("factor graph matrices: nu* has a zero entry at symbol " +
                          e.alphabet().label(z));
  FactorGraphMatrices m{Matrix(q, q), Matrix(q, q), Matrix::outer(nu.weights(), nu.weights()),
                        Matrix::diagonal(mu.weights()), Matrix::outer(mu.weights(), mu.weights()),
                        Matrix(W, q)};
  const double l = e.l();
  const double r = e.r();
  for (std::size_t z = 0; z < q; ++z) m.c(z, z) = r * (l - 1.0) / (l * nu[z]);
  for (std::size_t w = 0; w < W; ++w) {
    const auto n = e.letter_counts(w);
    for (std::size_t z = 0; z < q; ++z) m.k(w, z) = n[z] / r;
    if (mu[w] == 0.0) continue;
    for (std::size_t z = 0; z < q; ++z)
      for (std::size_t y = 0; y < q; ++y) m.v_prime(z, y) += mu[w] * n[z] * n[y] / (r * r);
  }
  return m;
}

Matrix fg_stability_matrix(const FactorGraphMatrices& m) {
  return Matrix::identity(m.c.rows()) - m.c * (m.v_prime - m.v);
}

FactorGraphAsymptotics fg_asymptotics(const Ensemble& e, const BetheOptions& options) {
  BetheSolution sol = solve_bethe(e, options);
  if (sol.boundary)
    throw BoundaryError("factor graph: the Bethe maximizer has nu*(x) = 0 for some symbol");
  const auto step = lattice_step(e);
  FactorGraphMatrices matrices = assemble_fg_matrices(e, sol);
  std::vector<double> dets;
  LogSumExp acc;
  for (const auto& p : sol.maximizers) {
    const double d = det(fg_stability_matrix(assemble_fg_matrices(e, p.nu, p.mu)));
    if (!(d > 0.0)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "factor graph instability: det(I - C(V'-V)) = %.6g <= 0", d);
      throw InstabilityError(buf);
    }
    dets.push_back(d);
    acc.add(-0.5 * std::log(d));
  }
  const double log_constant = 0.5 * static_cast<double>(e.q() - 1) * std::log(static_cast<double>(e.l())) -
                              std::log(static_cast<double>(step.s)) + acc.value();
  const double first = dets.front();
  return FactorGraphAsymptotics{std::move(sol), std::move(matrices), first, std::move(dets), step.s,
                                log_constant};
}

double fg_asymptotic_log_estimate(const Ensemble& e, const FactorGraphAsymptotics& a,
                                  std::int64_t N) {
  e.factor_nodes(N);
  return static_cast<double>(N) * a.solution.F + a.log_constant;
}

}  // namespace central_approx
