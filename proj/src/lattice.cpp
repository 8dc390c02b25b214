#include "central_approx/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <utility>

#include "central_approx/error.hpp"

namespace central_approx {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
  std::int64_t result = 1;
  std::int64_t base = mod(a, p);
  for (std::int64_t e = p - 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
  }
  return result;
}

}  // namespace

std::vector<std::int64_t> smith_diagonal(IntMatrix a) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  const std::size_t k = std::min(m, n);
  std::vector<std::int64_t> diag(k, 0);
  for (std::size_t t = 0; t < k; ++t) {
    for (;;) {
      std::size_t pi = m, pj = n;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a(i, j) != 0 && (pi == m || std::llabs(a(i, j)) < std::llabs(a(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == m) return diag;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(t, j), a(pi, j));
      for (std::size_t i = 0; i < m; ++i) std::swap(a(i, t), a(i, pj));

      bool clean = true;
      const std::int64_t p = a(t, t);
      for (std::size_t i = t + 1; i < m; ++i) {
        const std::int64_t f = a(i, t) / p;
        if (f != 0)
          for (std::size_t j = t; j < n; ++j) a(i, j) -= f * a(t, j);
        clean = clean && a(i, t) == 0;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        const std::int64_t f = a(t, j) / p;
        if (f != 0)
          for (std::size_t i = t; i < m; ++i) a(i, j) -= f * a(i, t);
        clean = clean && a(t, j) == 0;
      }
      if (!clean) continue;

      bool divides = true;
      for (std::size_t i = t + 1; i < m && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (a(i, j) % p != 0) {
            for (std::size_t c = t; c < n; ++c) a(t, c) += a(i, c);
            divides = false;
            break;
          }
      if (divides) break;
    }
    diag[t] = std::llabs(a(t, t));
  }
  return diag;
}

IntMatrix congruence_matrix(const Ensemble& e, std::size_t reference_word,
                            std::size_t reference_symbol) {
  const auto& S = e.support();
  if (reference_word >= S.size()) throw ValidationError("lattice: reference word out of range");
  if (reference_symbol >= e.q()) throw ValidationError("lattice: reference symbol out of range");
  IntMatrix a(e.q() - 1, S.size() - 1);
  const auto base = e.letter_counts(S[reference_word]);
  std::size_t col = 0;
  for (std::size_t j = 0; j < S.size(); ++j) {
    if (j == reference_word) continue;
    const auto n = e.letter_counts(S[j]);
    std::size_t row = 0;
    for (std::size_t z = 0; z < e.q(); ++z) {
      if (z == reference_symbol) continue;
      a(row++, col) = n[z] - base[z];
    }
    ++col;
  }
  return a;
}

std::int64_t step_from_smith(const std::vector<std::int64_t>& diag, std::size_t rows, int l) {
  std::int64_t s = 1;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::int64_t d = i < diag.size() ? diag[i] : 0;
    s *= l / std::gcd(d, static_cast<std::int64_t>(l));
  }
  return s;
}

std::int64_t nearest_index(double density, int l, std::size_t rows) {
  std::int64_t bound = 1;
  for (std::size_t i = 0; i < rows; ++i) bound *= l;
  std::int64_t best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::int64_t d = 1; d <= bound; ++d) {
    if (bound % d != 0) continue;
    const double gap = std::abs(std::log(density * static_cast<double>(d)));
    if (gap < best_gap) {
      best_gap = gap;
      best = d;
    }
  }
  return best;
}

bool is_prime(int l) {
  if (l < 2) return false;
  for (int d = 2; d * d <= l; ++d)
    if (l % d == 0) return false;
  return true;
}

std::size_t rank_mod_prime(const IntMatrix& in, int l) {
  if (!is_prime(l)) throw ValidationError("rank mod l: l must be prime");
  IntMatrix a = in;
  for (auto& x : a.data) x = mod(x, l);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < a.cols && rank < a.rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < a.rows && a(pivot, c) == 0) ++pivot;
    if (pivot == a.rows) continue;
    for (std::size_t j = 0; j < a.cols; ++j) std::swap(a(rank, j), a(pivot, j));
    const std::int64_t inv = mod_inverse(a(rank, c), l);
    for (std::size_t i = 0; i < a.rows; ++i) {
      if (i == rank || a(i, c) == 0) continue;
      const std::int64_t f = a(i, c) * inv % l;
      for (std::size_t j = 0; j < a.cols; ++j) a(i, j) = mod(a(i, j) - f * a(rank, j), l);
    }
    ++rank;
  }
  return rank;
}

double lattice_density(const IntMatrix& a, int l, int L) {
  if (L < 0) throw ValidationError("lattice density: L must be >= 0");
  double states = 1.0;
  for (std::size_t i = 0; i < a.rows; ++i) states *= l;
  if (states > 1e6) throw GuardError("lattice density: too many residue states");
  const auto count = static_cast<std::size_t>(states);

  std::vector<double> dist(count, 0.0), next(count);
  dist[0] = 1.0;
  const double p = 1.0 / (2.0 * L + 1.0);
  for (std::size_t c = 0; c < a.cols; ++c) {
    // Residue-vector shift for each eps in [-L, L].
    std::vector<std::size_t> shifts;
    for (std::int64_t eps = -L; eps <= L; ++eps) {
      std::size_t code = 0;
      for (std::size_t i = a.rows; i-- > 0;) code = code * l + static_cast<std::size_t>(mod(eps * a(i, c), l));
      shifts.push_back(code);
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < count; ++s) {
      if (dist[s] == 0.0) continue;
      for (std::size_t sh : shifts) {
        // Digit-wise addition mod l.
        std::size_t x = s, y = sh, out = 0, place = 1;
        for (std::size_t i = 0; i < a.rows; ++i) {
          out += ((x % l + y % l) % l) * place;
          x /= l;
          y /= l;
          place *= l;
        }
        next[out] += dist[s] * p;
      }
    }
    dist.swap(next);
  }
  return dist[0];
}

LatticeStep lattice_step(const Ensemble& e, std::size_t reference_word,
                         std::size_t reference_symbol) {
  const IntMatrix a = congruence_matrix(e, reference_word, reference_symbol);
  const int l = e.l();
  LatticeStep out;
  out.elementary_divisors = smith_diagonal(a);
  out.s = step_from_smith(out.elementary_divisors, a.rows, l);
  if (is_prime(l)) {
    std::int64_t s = 1;
    for (std::size_t i = 0, c = rank_mod_prime(a, l); i < c; ++i) s *= l;
    out.prime_rank = s;
  }
  if (e.q() == 2) {
    std::int64_t g = l;
    for (auto x : a.data) g = std::gcd(g, x);
    out.binary_gcd = l / g;
  }
  out.empirical_density = lattice_density(a, l, kLatticeDensityRange);
  out.empirical = nearest_index(out.empirical_density, l, a.rows);
  out.agree = out.empirical == out.s && (!out.prime_rank || *out.prime_rank == out.s) &&
              (!out.binary_gcd || *out.binary_gcd == out.s);
  return out;
}

}  // namespace central_approx
