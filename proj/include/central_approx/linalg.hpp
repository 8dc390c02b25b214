#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace central_approx {

/// Dense row-major real matrix. Every product and sum checks dimensions and
/// throws std::invalid_argument on mismatch.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix outer(std::span<const double> a, std::span<const double> b);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  /// Principal submatrix on the given (sorted or unsorted) index set.
  Matrix submatrix(std::span<const std::size_t> idx) const;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// max |a(i,j) - b(i,j)|; dimensions must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// PA = LU with partial pivoting. `singular` is set when some pivot falls
/// below 1e-14 times the largest entry magnitude of the input.
struct LuDecomposition {
  Matrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

LuDecomposition lu_decompose(const Matrix& m);

/// Determinant via LU; exactly 0 for a numerically singular matrix.
double det(const Matrix& m);

/// Throws SingularMatrixError on a singular input.
Matrix inverse(const Matrix& m);
std::vector<double> solve(const Matrix& a, std::span<const double> b);
Matrix solve(const Matrix& a, const Matrix& b);

/// Eigenvalues of the symmetric part (A + A^T)/2, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

/// Orthonormal eigenvectors (columns) of the symmetric part, matching the
/// ascending order of symmetric_eigenvalues.
Matrix symmetric_eigenvectors(const Matrix& m);

}  // namespace central_approx
