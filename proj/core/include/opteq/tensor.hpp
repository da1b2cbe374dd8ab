#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal dense linear algebra: row-major 64-bit matrices/vectors,
// power-iteration operator norm, one-sided Jacobi SVD for small matrices,
// and the block/permutation constructions used by the multi-block lift.
namespace opteq {

struct Vector {
  std::vector<double> data;

  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data(n, fill) {}
  Vector(std::initializer_list<double> init) : data(init) {}

  std::size_t dim() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c, 0.0); }
};

// ---- elementwise / BLAS-1 style ----
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);
Vector& operator+=(Vector& a, const Vector& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);
Matrix& operator+=(Matrix& a, const Matrix& b);

double dot(const Vector& a, const Vector& b);
double norm(const Vector& v);
double frobenius_norm(const Matrix& m);
// rank-1 accumulate: m += s * a b^T
void add_outer(Matrix& m, double s, const Vector& a, const Vector& b);

// ---- BLAS-2/3 ----
Vector matvec(const Matrix& m, const Vector& v);
Vector matvec_transpose(const Matrix& m, const Vector& v);  // m^T v
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

// Deterministic pseudo-random fills (seeded mt19937_64, N(0,1)).
Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);
Vector random_vector(std::size_t n, std::uint64_t seed);

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

struct SvdResult {
  Matrix u;  // rows x k, column-orthonormal
  Vector s;  // k singular values, descending
  Matrix v;  // cols x k, column-orthonormal
};

// One-sided Jacobi SVD; guarded to min(rows, cols) <= 64.
SvdResult svd(const Matrix& a);

// Largest singular value by power iteration on A^T A. Deterministic
// all-ones start, seeded restart if the Rayleigh quotient stalls.
double spectral_norm(const Matrix& a, double tol = 1e-12, std::size_t max_iter = 10000);

// Uniform rescale of W so that its spectral norm is <= bound.
Matrix spectral_project(const Matrix& w, double bound);

// Solve W^T u = z through the SVD; throws when cond(W) exceeds the guard.
Vector solve_transpose(const Matrix& w, const Vector& z, double cond_limit = 1e8);

// Eigenvalues of a symmetric matrix (classic Jacobi), ascending.
Vector symmetric_eigenvalues(const Matrix& a);

// The mL x mL cyclic block permutation of the multi-block lift: block row 1
// holds I in block column L, block row i (i >= 2) holds I in block column i-1.
Matrix block_permutation(std::size_t l_count, std::size_t m);

}  // namespace opteq
