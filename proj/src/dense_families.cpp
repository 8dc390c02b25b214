#include "central_approx/dense_families.hpp"

#include <cmath>
#include <memory>

#include "central_approx/error.hpp"

namespace central_approx {

LocalTerm zero_local() {
  return [](std::span<const double>) { return 0.0; };
}

LocalTerm field_local(double h) {
  return [h](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return h * s;
  };
}

GlobalTerm zero_global() {
  GlobalTerm g;
  g.value = [](std::span<const double>) { return 0.0; };
  g.gradient = [](std::span<const double> q) { return std::vector<double>(q.size(), 0.0); };
  g.hessian = [](std::span<const double> q) { return Matrix(q.size(), q.size()); };
  return g;
}

namespace {

// Integer power with 0^0 = 1 and negative exponents mapped to 0 (their
// coefficient is zero whenever they arise in derivatives).
double ipow(double x, int e) {
  if (e < 0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

struct Polynomial {
  std::vector<Monomial> terms;
  std::size_t pairs;

  double value(std::span<const double> q) const {
    double s = 0.0;
    for (const auto& t : terms) {
      double m = t.coefficient;
      for (const auto& [k, e] : t.powers) m *= ipow(q[k], e);
      s += m;
    }
    return s;
  }

  std::vector<double> gradient(std::span<const double> q) const {
    std::vector<double> g(pairs, 0.0);
    for (const auto& t : terms) {
      for (std::size_t i = 0; i < t.powers.size(); ++i) {
        const auto [ki, ei] = t.powers[i];
        double m = t.coefficient * ei * ipow(q[ki], ei - 1);
        for (std::size_t j = 0; j < t.powers.size(); ++j)
          if (j != i) m *= ipow(q[t.powers[j].first], t.powers[j].second);
        g[ki] += m;
      }
    }
    return g;
  }

  Matrix hessian(std::span<const double> q) const {
    Matrix h(pairs, pairs);
    for (const auto& t : terms) {
      for (std::size_t i = 0; i < t.powers.size(); ++i) {
        for (std::size_t j = 0; j < t.powers.size(); ++j) {
          const auto [ki, ei] = t.powers[i];
          const auto [kj, ej] = t.powers[j];
          double m = t.coefficient;
          if (i == j) {
            m *= ei * (ei - 1) * ipow(q[ki], ei - 2);
          } else {
            m *= ei * ej * ipow(q[ki], ei - 1) * ipow(q[kj], ej - 1);
          }
          for (std::size_t k = 0; k < t.powers.size(); ++k)
            if (k != i && k != j) m *= ipow(q[t.powers[k].first], t.powers[k].second);
          h(ki, kj) += m;
        }
      }
    }
    return h;
  }
};

}  // namespace

GlobalTerm polynomial_global(std::vector<Monomial> terms, std::size_t pair_count) {
  for (auto& t : terms) {
    if (!std::isfinite(t.coefficient)) throw ValidationError("polynomial g: non-finite coefficient");
    for (std::size_t i = 0; i < t.powers.size(); ++i) {
      const auto [k, e] = t.powers[i];
      if (k >= pair_count) throw ValidationError("polynomial g: pair index out of range");
      if (e < 1) throw ValidationError("polynomial g: exponents must be >= 1");
      for (std::size_t j = 0; j < i; ++j)
        if (t.powers[j].first == k)
          throw ValidationError("polynomial g: repeated pair inside one monomial");
    }
  }
  auto poly = std::make_shared<const Polynomial>(Polynomial{std::move(terms), pair_count});
  GlobalTerm g;
  g.value = [poly](std::span<const double> q) { return poly->value(q); };
  g.gradient = [poly](std::span<const double> q) { return poly->gradient(q); };
  g.hessian = [poly](std::span<const double> q) { return poly->hessian(q); };
  return g;
}

std::size_t replica_pair_index(int a, int b, int replicas) {
  if (a > b) std::swap(a, b);
  if (a < 1 || b > replicas) throw ValidationError("replica pair out of range");
  std::size_t k = 0;
  for (int s = 1; s < a; ++s) k += static_cast<std::size_t>(replicas - s + 1);
  return k + static_cast<std::size_t>(b - a);
}

GlobalTerm p_spin_global(double beta, int p, int replicas) {
  if (p < 2) throw ValidationError("p-spin: p must be >= 2");
  const auto pairs = static_cast<std::size_t>(replicas * (replicas + 1) / 2);
  std::vector<Monomial> terms;
  for (int a = 1; a <= replicas; ++a) {
    for (int b = a; b <= replicas; ++b) {
      const double c = a == b ? beta * beta / 4.0 : beta * beta / 2.0;
      terms.push_back({c, {{replica_pair_index(a, b, replicas), p}}});
    }
  }
  return polynomial_global(std::move(terms), pairs);
}

GlobalTerm sk_global(double beta, int replicas) { return p_spin_global(beta, 2, replicas); }

GlobalTerm self_quadratic_global(double lambda, int replicas) {
  const auto pairs = static_cast<std::size_t>(replicas * (replicas + 1) / 2);
  std::vector<Monomial> terms;
  for (int a = 1; a <= replicas; ++a)
    terms.push_back({lambda / 2.0, {{replica_pair_index(a, a, replicas), 2}}});
  return polynomial_global(std::move(terms), pairs);
}

}  // namespace central_approx
