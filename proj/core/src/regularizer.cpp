#include "opteq/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opteq {

namespace {

constexpr double kRowNormGuard = 1e-12;

Vector column(const Matrix& m, std::size_t j) {
  Vector v(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) v[i] = m(i, j);
  return v;
}

void require_batch(const Matrix& z) {
  if (z.cols < 2) throw std::invalid_argument("regularizer: batch needs B >= 2");
}

// Gaussian kernel matrix over the columns of x, median-distance bandwidth.
Matrix rbf_kernel(const Matrix& x) {
  const std::size_t b = x.cols;
  Matrix d2(b, b, 0.0);
  std::vector<double> dists;
  dists.reserve(b * (b - 1) / 2);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = i + 1; j < b; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < x.rows; ++r) {
        const double diff = x(r, i) - x(r, j);
        s += diff * diff;
      }
      d2(i, j) = d2(j, i) = s;
      dists.push_back(std::sqrt(s));
    }
  std::sort(dists.begin(), dists.end());
  const std::size_t n = dists.size();
  double h = n % 2 == 1 ? dists[n / 2] : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
  if (h <= 0.0) h = 1.0;
  Matrix k(b, b);
  const double scale = -1.0 / (2.0 * h * h);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j) k(i, j) = std::exp(scale * d2(i, j));
  return k;
}

Matrix center(const Matrix& k) {
  const std::size_t b = k.rows;
  Matrix h = Matrix::identity(b);
  const double inv = 1.0 / static_cast<double>(b);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j) h(i, j) -= inv;
  return matmul(h, matmul(k, h));
}

double decorrelation_value(const Matrix& z) {
  const std::size_t m = z.rows;
  Vector r(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < z.cols; ++j) s += z(i, j) * z(i, j);
    r[i] = std::max(std::sqrt(s), kRowNormGuard);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double ip = 0.0;
      for (std::size_t c = 0; c < z.cols; ++c) ip += z(i, c) * z(j, c);
      const double e = ip / (r[i] * r[j]) - (i == j ? 1.0 : 0.0);
      total += e * e;
    }
  return 0.5 * total;
}

// Exact gradient with D = diag(1/max(|z_i|, guard)) differentiated through,
// so it matches finite differences away from the guard boundary.
Matrix decorrelation_grad(const Matrix& z) {
  const std::size_t m = z.rows;
  const std::size_t b = z.cols;
  Vector r(m);
  std::vector<bool> active(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < b; ++j) s += z(i, j) * z(i, j);
    const double nrm = std::sqrt(s);
    active[i] = nrm > kRowNormGuard;
    r[i] = std::max(nrm, kRowNormGuard);
  }
  Matrix c(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double ip = 0.0;
      for (std::size_t s = 0; s < b; ++s) ip += z(i, s) * z(j, s);
      c(i, j) = ip / (r[i] * r[j]);
    }
  Matrix g(m, b, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double rk2 = r[k] * r[k];
    for (std::size_t j = 0; j < m; ++j) {
      const double e = c(k, j) - (k == j ? 1.0 : 0.0);
      if (e == 0.0) continue;
      const double pair_weight = (j == k) ? 1.0 : 2.0;
      for (std::size_t s = 0; s < b; ++s) {
        // dC_kj/dz_k = z_j/(r_k r_j) + [j==k] z_k/(r_k^2)
        //             - active_k C_kj z_k/r_k^2 (1 + [j==k])
        double d = z(j, s) / (r[k] * r[j]);
        if (j == k) d += z(k, s) / rk2;
        if (active[k]) d -= c(k, j) * z(k, s) / rk2 * (j == k ? 2.0 : 1.0);
        g(k, s) += pair_weight * e * d;
      }
    }
  }
  return g;
}

}  // namespace

Regularizer Regularizer::none() { return Regularizer{}; }

Regularizer Regularizer::l1(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("l1: lambda must be >= 0");
  Regularizer r;
  r.kind = RegKind::L1;
  r.lambda = lambda;
  return r;
}

Regularizer Regularizer::squared_l2(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("squared_l2: lambda must be >= 0");
  Regularizer r;
  r.kind = RegKind::SquaredL2;
  r.lambda = lambda;
  r.l_z = lambda;  // the gradient lambda z is exactly lambda-Lipschitz
  return r;
}

Regularizer Regularizer::inverse_norm(double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("inverse_norm: epsilon must be > 0");
  Regularizer r;
  r.kind = RegKind::InverseNorm;
  r.epsilon = epsilon;
  r.l_z = 2.0 / (epsilon * epsilon);  // conservative bound on the Hessian norm
  return r;
}

Regularizer Regularizer::decorrelation() {
  Regularizer r;
  r.kind = RegKind::Decorrelation;
  return r;
}

Regularizer Regularizer::hsic() {
  Regularizer r;
  r.kind = RegKind::Hsic;
  return r;
}

bool Regularizer::has_grad() const {
  return kind == RegKind::SquaredL2 || kind == RegKind::InverseNorm ||
         kind == RegKind::None;
}

bool Regularizer::has_prox() const {
  return kind == RegKind::L1 || kind == RegKind::SquaredL2 || kind == RegKind::None;
}

bool Regularizer::batch_only() const {
  return kind == RegKind::Decorrelation || kind == RegKind::Hsic;
}

std::string Regularizer::name() const {
  switch (kind) {
    case RegKind::None: return "none";
    case RegKind::L1: return "l1";
    case RegKind::SquaredL2: return "squared_l2";
    case RegKind::InverseNorm: return "inverse_norm";
    case RegKind::Decorrelation: return "decorrelation";
    case RegKind::Hsic: return "hsic";
  }
  throw std::logic_error("regularizer: bad kind");
}

Regularizer Regularizer::from_name(const std::string& name) {
  if (name == "none") return none();
  if (name == "l1") return l1(0.0);
  if (name == "squared_l2") return squared_l2(0.0);
  if (name == "inverse_norm") return inverse_norm();
  if (name == "decorrelation") return decorrelation();
  if (name == "hsic") return hsic();
  throw std::invalid_argument("regularizer: unknown kind '" + name + "'");
}

double reg_value(const Regularizer& r, const Vector& z) {
  switch (r.kind) {
    case RegKind::None:
      return 0.0;
    case RegKind::L1: {
      double s = 0.0;
      for (std::size_t i = 0; i < z.dim(); ++i) s += std::abs(z[i]);
      return r.lambda * s;
    }
    case RegKind::SquaredL2:
      return 0.5 * r.lambda * dot(z, z);
    case RegKind::InverseNorm:
      return 1.0 / (dot(z, z) + r.epsilon);
    default:
      throw std::invalid_argument("reg_value: " + r.name() + " needs a batch matrix");
  }
}

Vector reg_grad(const Regularizer& r, const Vector& z) {
  switch (r.kind) {
    case RegKind::None:
      return Vector(z.dim(), 0.0);
    case RegKind::SquaredL2:
      return r.lambda * z;
    case RegKind::InverseNorm: {
      const double q = dot(z, z) + r.epsilon;
      return (-2.0 / (q * q)) * z;
    }
    case RegKind::L1:
      throw std::invalid_argument("reg_grad: l1 is nonsmooth, use reg_prox");
    default:
      throw std::invalid_argument("reg_grad: " + r.name() + " needs a batch matrix");
  }
}

Vector reg_hvp(const Regularizer& r, const Vector& z, const Vector& v) {
  switch (r.kind) {
    case RegKind::None:
      return Vector(z.dim(), 0.0);
    case RegKind::SquaredL2:
      return r.lambda * v;
    case RegKind::InverseNorm: {
      const double q = dot(z, z) + r.epsilon;
      const double zv = dot(z, v);
      return (-2.0 / (q * q)) * v + (8.0 * zv / (q * q * q)) * z;
    }
    default:
      throw std::invalid_argument("reg_hvp: no Hessian for " + r.name());
  }
}

double reg_value(const Regularizer& r, const Matrix& z) {
  if (r.kind == RegKind::Decorrelation) {
    require_batch(z);
    return decorrelation_value(z);
  }
  if (r.kind == RegKind::Hsic) {
    require_batch(z);
    return hsic_pairwise_penalty(z);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < z.cols; ++j) total += reg_value(r, column(z, j));
  return total;
}

Matrix reg_grad(const Regularizer& r, const Matrix& z) {
  if (r.kind == RegKind::Decorrelation) {
    require_batch(z);
    return decorrelation_grad(z);
  }
  if (r.kind == RegKind::Hsic)
    throw std::invalid_argument("reg_grad: hsic gradient is not provided");
  Matrix g(z.rows, z.cols);
  for (std::size_t j = 0; j < z.cols; ++j) {
    const Vector gj = reg_grad(r, column(z, j));
    for (std::size_t i = 0; i < z.rows; ++i) g(i, j) = gj[i];
  }
  return g;
}

Vector reg_prox(const Regularizer& r, const Vector& z, double step) {
  if (step <= 0.0) throw std::invalid_argument("reg_prox: step must be > 0");
  switch (r.kind) {
    case RegKind::None:
      return z;
    case RegKind::L1: {
      Vector out(z.dim());
      const double t = step * r.lambda;
      for (std::size_t i = 0; i < z.dim(); ++i) {
        const double mag = std::abs(z[i]) - t;
        out[i] = mag > 0.0 ? (z[i] > 0.0 ? mag : -mag) : 0.0;
      }
      return out;
    }
    case RegKind::SquaredL2:
      return (1.0 / (1.0 + step * r.lambda)) * z;
    default:
      throw std::invalid_argument("reg_prox: no prox for " + r.name());
  }
}

double hsic_value(const Matrix& x, const Matrix& y) {
  if (x.cols != y.cols) throw std::invalid_argument("hsic_value: batch sizes differ");
  if (x.cols < 2) throw std::invalid_argument("hsic_value: needs B >= 2");
  const Matrix kx = rbf_kernel(x);
  const Matrix ky_c = center(rbf_kernel(y));
  const Matrix prod = matmul(center(kx), ky_c);
  double tr = 0.0;
  for (std::size_t i = 0; i < prod.rows; ++i) tr += prod(i, i);
  const double bm1 = static_cast<double>(x.cols - 1);
  return tr / (bm1 * bm1);
}

double hsic_pairwise_penalty(const Matrix& z) {
  if (z.rows < 2) throw std::invalid_argument("hsic_pairwise_penalty: needs m >= 2");
  require_batch(z);
  double total = 0.0;
  for (std::size_t i = 0; i < z.rows; ++i) {
    Matrix ri(1, z.cols);
    for (std::size_t c = 0; c < z.cols; ++c) ri(0, c) = z(i, c);
    for (std::size_t j = i + 1; j < z.rows; ++j) {
      Matrix rj(1, z.cols);
      for (std::size_t c = 0; c < z.cols; ++c) rj(0, c) = z(j, c);
      total += hsic_value(ri, rj);
    }
  }
  return total;
}

}  // namespace opteq
