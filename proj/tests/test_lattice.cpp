#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "central_approx/error.hpp"
#include "central_approx/lattice.hpp"

using namespace central_approx;

namespace {

IntMatrix make(std::size_t r, std::size_t c, std::vector<std::int64_t> data) {
  IntMatrix a(r, c);
  a.data = std::move(data);
  return a;
}

// |image of Z^cols in (Z_l)^rows| by breadth-first closure: the index of the
// kernel lattice.
std::int64_t image_index(const IntMatrix& a, int l) {
  std::set<std::vector<std::int64_t>> seen{std::vector<std::int64_t>(a.rows, 0)};
  std::vector<std::vector<std::int64_t>> frontier(seen.begin(), seen.end());
  while (!frontier.empty()) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& x : frontier)
      for (std::size_t j = 0; j < a.cols; ++j) {
        auto y = x;
        for (std::size_t i = 0; i < a.rows; ++i) y[i] = ((y[i] + a(i, j)) % l + l) % l;
        if (seen.insert(y).second) next.push_back(y);
      }
    frontier.swap(next);
  }
  return static_cast<std::int64_t>(seen.size());
}

}  // namespace

TEST_CASE("Smith normal form of small matrices") {
  CHECK(smith_diagonal(make(2, 2, {2, 4, 6, 8})) == std::vector<std::int64_t>{2, 4});
  CHECK(smith_diagonal(make(2, 2, {1, 1, 1, 1})) == std::vector<std::int64_t>{1, 0});
  CHECK(smith_diagonal(make(2, 3, {0, 0, 0, 0, 0, 0})) == std::vector<std::int64_t>{0, 0});
  CHECK(smith_diagonal(make(1, 3, {4, 6, -10})) == std::vector<std::int64_t>{2});
  CHECK(smith_diagonal(make(3, 3, {2, 0, 0, 0, 3, 0, 0, 0, 5})) == std::vector<std::int64_t>{1, 1, 30});
}

TEST_CASE("step from Smith normal form against the image size") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> entry(-6, 6);
  for (int k = 0; k < 300; ++k) {
    const int l = 2 + k % 5;
    const std::size_t rows = 1 + k % 3, cols = 1 + (k / 3) % 4;
    IntMatrix a(rows, cols);
    for (auto& x : a.data) x = entry(rng);
    const auto diag = smith_diagonal(a);
    for (std::size_t i = 1; i < diag.size(); ++i)
      if (diag[i - 1] != 0) CHECK(diag[i] % diag[i - 1] == 0);
    CHECK(step_from_smith(diag, rows, l) == image_index(a, l));
    if (is_prime(l)) {
      std::int64_t p = 1;
      for (std::size_t i = 0, r = rank_mod_prime(a, l); i < r; ++i) p *= l;
      CHECK(p == step_from_smith(diag, rows, l));
    }
  }
  CHECK_THROWS_AS(rank_mod_prime(make(1, 1, {1}), 4), ValidationError);
}

TEST_CASE("lattice density tends to 1/s") {
  const IntMatrix a = make(1, 2, {2, 4});  // l = 6: image {0, 2, 4}, s = 3
  CHECK(step_from_smith(smith_diagonal(a), 1, 6) == 3);
  const double coarse = std::abs(lattice_density(a, 6, 2) * 3 - 1);
  const double fine = std::abs(lattice_density(a, 6, 40) * 3 - 1);
  CHECK(fine < coarse);
  CHECK(fine < 0.01);
  CHECK(lattice_density(a, 6, 0) == 1.0);
  CHECK(nearest_index(0.26, 2, 2) == 4);
  CHECK(nearest_index(0.29, 2, 2) == 4);
  CHECK(nearest_index(0.9, 3, 1) == 1);
  CHECK_THROWS_AS(lattice_density(a, 6, -1), ValidationError);
}

TEST_CASE("known step sizes") {
  const auto p24 = lattice_step(make_ensemble(2, 4, Alphabet::binary(), "parity"));
  CHECK(p24.s == 1);
  CHECK(p24.agree);
  const auto p36 = lattice_step(make_ensemble(3, 6, Alphabet::binary(), "parity"));
  CHECK(p36.s == 3);
  CHECK(*p36.prime_rank == 3);
  CHECK(*p36.binary_gcd == 3);
  CHECK(p36.agree);
  for (int l : {2, 3})
    for (std::size_t q : {2u, 3u}) {
      std::vector<double> values;
      for (std::size_t k = 0; k < q; ++k) values.push_back(static_cast<double>(k));
      const auto full = lattice_step(make_ensemble(l, 3, Alphabet(values), "uniform"));
      CHECK(full.s == std::llround(std::pow(l, q - 1)));
      CHECK(full.agree);
    }
  const auto eq = lattice_step(make_ensemble(2, 3, Alphabet({0.0, 1.0, 2.0}), "all-equal"));
  CHECK(eq.s == 4);
  CHECK(eq.elementary_divisors == std::vector<std::int64_t>{3, 3});
}

TEST_CASE("step does not depend on the reference word or symbol") {
  std::vector<Ensemble> ensembles{
      make_ensemble(3, 6, Alphabet::binary(), "parity"),
      make_ensemble(4, 2, Alphabet({0.0, 1.0, 2.0}), "all-equal"),
      Ensemble(2, 2, Alphabet({0.0, 1.0, 2.0}), {1, 0, 0, 0, 0, 1, 0, 1, 0}),
  };
  for (const auto& e : ensembles) {
    const auto base = lattice_step(e).s;
    for (std::size_t w = 0; w < e.support().size(); ++w)
      for (std::size_t z = 0; z < e.q(); ++z) CHECK(lattice_step(e, w, z).s == base);
  }
  CHECK_THROWS_AS(lattice_step(ensembles[0], 99, 0), ValidationError);
  CHECK_THROWS_AS(lattice_step(ensembles[0], 0, 2), ValidationError);
}
