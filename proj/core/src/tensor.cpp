#include "opteq/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace opteq {

namespace {

void check_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch " +
                                std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector operator+(const Vector& a, const Vector& b) {
  check_same_dim(a.dim(), b.dim(), "vector add");
  Vector r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector operator-(const Vector& a, const Vector& b) {
  check_same_dim(a.dim(), b.dim(), "vector sub");
  Vector r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector operator*(double s, const Vector& v) {
  Vector r(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) r[i] = s * v[i];
  return r;
}

Vector& operator+=(Vector& a, const Vector& b) {
  check_same_dim(a.dim(), b.dim(), "vector add");
  for (std::size_t i = 0; i < a.dim(); ++i) a[i] += b[i];
  return a;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_dim(a.rows, b.rows, "matrix add rows");
  check_same_dim(a.cols, b.cols, "matrix add cols");
  Matrix r(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = a.data[i] + b.data[i];
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_dim(a.rows, b.rows, "matrix sub rows");
  check_same_dim(a.cols, b.cols, "matrix sub cols");
  Matrix r(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = a.data[i] - b.data[i];
  return r;
}

Matrix operator*(double s, const Matrix& m) {
  Matrix r(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) r.data[i] = s * m.data[i];
  return r;
}

Matrix& operator+=(Matrix& a, const Matrix& b) {
  check_same_dim(a.rows, b.rows, "matrix add rows");
  check_same_dim(a.cols, b.cols, "matrix add cols");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
  return a;
}

double dot(const Vector& a, const Vector& b) {
  check_same_dim(a.dim(), b.dim(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data) s += x * x;
  return std::sqrt(s);
}

void add_outer(Matrix& m, double s, const Vector& a, const Vector& b) {
  check_same_dim(m.rows, a.dim(), "outer rows");
  check_same_dim(m.cols, b.dim(), "outer cols");
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double sa = s * a[i];
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) += sa * b[j];
  }
}

Vector matvec(const Matrix& m, const Vector& v) {
  check_same_dim(m.cols, v.dim(), "matvec");
  Vector r(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Vector matvec_transpose(const Matrix& m, const Vector& v) {
  check_same_dim(m.rows, v.dim(), "matvec_transpose");
  Vector r(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double vi = v[i];
    for (std::size_t j = 0; j < m.cols; ++j) r[j] += m(i, j) * vi;
  }
  return r;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_same_dim(a.cols, b.rows, "matmul");
  Matrix r(a.rows, b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

Matrix transpose(const Matrix& m) {
  Matrix r(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) r(j, i) = m(i, j);
  return r;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& x : m.data) x = dist(rng);
  return m;
}

Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (double& x : v.data) x = dist(rng);
  return v;
}

bool all_finite(const Vector& v) {
  return std::all_of(v.data.begin(), v.data.end(),
                     [](double x) { return std::isfinite(x); });
}

bool all_finite(const Matrix& m) {
  return std::all_of(m.data.begin(), m.data.end(),
                     [](double x) { return std::isfinite(x); });
}

SvdResult svd(const Matrix& a) {
  if (a.rows == 0 || a.cols == 0) throw std::invalid_argument("svd: empty matrix");
  if (std::min(a.rows, a.cols) > 64)
    throw std::invalid_argument("svd: min dimension exceeds the 64 guard");

  // Work on a tall copy; if wide, factor the transpose and swap U/V.
  const bool wide = a.cols > a.rows;
  Matrix work = wide ? transpose(a) : a;
  const std::size_t n = work.rows;
  const std::size_t k = work.cols;

  Matrix v = Matrix::identity(k);

  // One-sided Jacobi: orthogonalize column pairs of `work` until the
  // off-diagonal mass of work^T work is negligible.
  const double eps = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double cp = work(i, p), cq = work(i, q);
          app += cp * cp;
          aqq += cq * cq;
          apq += cp * cq;
        }
        if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double wp = work(i, p), wq = work(i, q);
          work(i, p) = c * wp - s * wq;
          work(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < k; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector s(k);
  Matrix u(n, k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double nj = 0.0;
    for (std::size_t i = 0; i < n; ++i) nj += work(i, j) * work(i, j);
    nj = std::sqrt(nj);
    s[j] = nj;
    if (nj > 0.0) {
      for (std::size_t i = 0; i < n; ++i) u(i, j) = work(i, j) / nj;
    }
    // A zero singular value leaves a zero U column; no caller of the thin
    // factorization needs the orthonormal completion.
  }

  // Sort descending.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });
  SvdResult out;
  out.s = Vector(k);
  out.u = Matrix(n, k);
  out.v = Matrix(k, k);
  Matrix vfull(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    out.s[j] = s[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.u(i, j) = u(i, order[j]);
    for (std::size_t i = 0; i < k; ++i) vfull(i, j) = v(i, order[j]);
  }
  out.v = vfull;

  if (wide) std::swap(out.u, out.v);
  return out;
}

double spectral_norm(const Matrix& a, double tol, std::size_t max_iter) {
  if (a.rows == 0 || a.cols == 0)
    throw std::invalid_argument("spectral_norm: empty matrix");
  if (tol <= 0.0) throw std::invalid_argument("spectral_norm: tol must be > 0");

  Vector v(a.cols, 1.0 / std::sqrt(static_cast<double>(a.cols)));
  double sigma_prev = -1.0;
  std::size_t restarts = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vector w = matvec_transpose(a, matvec(a, v));
    const double wn = norm(w);
    if (wn == 0.0) {
      if (restarts++ == 0) {
        // All-ones start lies in the null space; restart from a seeded vector.
        v = random_vector(a.cols, 0x5eed);
        const double n0 = norm(v);
        v = (1.0 / n0) * v;
        sigma_prev = -1.0;
        continue;
      }
      return 0.0;
    }
    v = (1.0 / wn) * w;
    const double sigma = std::sqrt(wn);
    if (sigma_prev >= 0.0 &&
        std::abs(sigma - sigma_prev) <= tol * std::max(sigma, 1e-300)) {
      return sigma;
    }
    sigma_prev = sigma;
  }
  throw std::runtime_error("spectral_norm: no convergence after " +
                           std::to_string(max_iter) +
                           " iterations; last estimate " +
                           std::to_string(sigma_prev));
}

Matrix spectral_project(const Matrix& w, double bound) {
  if (bound <= 0.0) throw std::invalid_argument("spectral_project: bound must be > 0");
  const double sigma = spectral_norm(w);
  if (sigma <= bound) return w;
  return (bound / sigma) * w;
}

Vector solve_transpose(const Matrix& w, const Vector& z, double cond_limit) {
  if (w.rows != w.cols) throw std::invalid_argument("solve_transpose: W must be square");
  check_same_dim(w.rows, z.dim(), "solve_transpose");
  const SvdResult f = svd(w);
  const double smax = f.s[0];
  const double smin = f.s[f.s.dim() - 1];
  if (smin <= 0.0 || smax / smin > cond_limit)
    throw std::runtime_error("solve_transpose: W is singular or too ill-conditioned");
  // W^T = V S U^T  =>  u = U S^{-1} V^T z
  Vector t = matvec_transpose(f.v, z);
  for (std::size_t i = 0; i < t.dim(); ++i) t[i] /= f.s[i];
  return matvec(f.u, t);
}

Vector symmetric_eigenvalues(const Matrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("symmetric_eigenvalues: not square");
  const std::size_t n = a.rows;
  Matrix m = a;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (off < 1e-28) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(m(p, q)) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double mip = m(i, p), miq = m(i, q);
          m(i, p) = c * mip - s * miq;
          m(i, q) = s * mip + c * miq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double mpi = m(p, i), mqi = m(q, i);
          m(p, i) = c * mpi - s * mqi;
          m(q, i) = s * mpi + c * mqi;
        }
      }
    }
  }
  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = m(i, i);
  std::sort(eig.data.begin(), eig.data.end());
  return eig;
}

Matrix block_permutation(std::size_t l_count, std::size_t m) {
  if (l_count < 1 || m < 1)
    throw std::invalid_argument("block_permutation: L and m must be >= 1");
  const std::size_t n = l_count * m;
  Matrix p(n, n, 0.0);
  for (std::size_t i = 0; i < l_count; ++i) {
    const std::size_t src = (i == 0) ? l_count - 1 : i - 1;
    for (std::size_t r = 0; r < m; ++r) p(i * m + r, src * m + r) = 1.0;
  }
  return p;
}

}  // namespace opteq
