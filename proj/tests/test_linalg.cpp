#include <doctest.h>

#include <cmath>
#include <random>

#include "central_approx/error.hpp"
#include "central_approx/linalg.hpp"

using namespace central_approx;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// Cofactor expansion, independent of the LU route.
double det_expansion(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  double out = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t k = 0, c = 0; k < n; ++k)
        if (k != j) minor(i - 1, c++) = m(i, k);
    out += (j % 2 ? -1.0 : 1.0) * m(0, j) * det_expansion(minor);
  }
  return out;
}

}  // namespace

TEST_CASE("determinant against cofactor expansion") {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n <= 6; ++n) {
    const Matrix m = random_matrix(n, n, rng);
    CHECK(det(m) == doctest::Approx(det_expansion(m)).epsilon(1e-12));
  }
  CHECK(det(Matrix(0, 0)) == 1.0);
  CHECK(det(Matrix{{1, 2}, {2, 4}}) == 0.0);
}

TEST_CASE("inverse and solve") {
  std::mt19937_64 rng(2);
  const Matrix a = random_matrix(5, 5, rng);
  CHECK(max_abs_diff(a * inverse(a), Matrix::identity(5)) < 1e-12);
  const std::vector<double> b{1, 2, 3, 4, 5};
  const auto x = solve(a, b);
  const auto back = a * std::span<const double>(x);
  for (std::size_t i = 0; i < 5; ++i) CHECK(back[i] == doctest::Approx(b[i]).epsilon(1e-12));
  CHECK_THROWS_AS(inverse(Matrix{{1, 1}, {1, 1}}), SingularMatrixError);
}

TEST_CASE("dimension and finiteness checks") {
  CHECK_THROWS_AS(Matrix(2, 3) * Matrix(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(Matrix(2, 2) + Matrix(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(det(Matrix{{1, NAN}, {0, 1}}), ValidationError);
}

TEST_CASE("symmetric eigen decomposition") {
  std::mt19937_64 rng(4);
  const Matrix r = random_matrix(6, 6, rng);
  const Matrix s = r + r.transpose();
  const auto ev = symmetric_eigenvalues(s);
  const Matrix v = symmetric_eigenvectors(s);
  CHECK(std::is_sorted(ev.begin(), ev.end()));
  CHECK(max_abs_diff(v.transpose() * v, Matrix::identity(6)) < 1e-12);
  CHECK(max_abs_diff(v.transpose() * s * v, Matrix::diagonal(ev)) < 1e-12);
  double prod = 1.0;
  for (double x : ev) prod *= x;
  CHECK(prod == doctest::Approx(det(s)).epsilon(1e-10));
}

TEST_CASE("Sylvester identity on rectangular pairs") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const std::size_t m = 1 + k % 7, n = 1 + (k / 7) % 5;
    Matrix a = random_matrix(m, n, rng), b = random_matrix(n, m, rng);
    a *= 0.3;
    const double d1 = det(Matrix::identity(m) - a * b);
    const double d2 = det(Matrix::identity(n) - b * a);
    CHECK(std::abs(d1 - d2) <= 1e-9 * std::max(std::abs(d1), 1e-3));
  }
}

TEST_CASE("principal submatrix") {
  const Matrix m{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const std::size_t idx[2] = {0, 2};
  const Matrix s = m.submatrix(idx);
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 7.0);
  CHECK(s(1, 1) == 9.0);
}
