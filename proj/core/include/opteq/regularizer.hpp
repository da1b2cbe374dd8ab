#pragma once

#include <string>

#include "opteq/tensor.hpp"

// Feature regularizers: value / gradient / prox where each exists, plus the
// HSIC batch estimator. Vector kinds also evaluate on a batch matrix
// column-wise; batch kinds (decorrelation, hsic) require the matrix form.
namespace opteq {

enum class RegKind { None, L1, SquaredL2, InverseNorm, Decorrelation, Hsic };

struct Regularizer {
  RegKind kind = RegKind::None;
  double lambda = 0.0;   // weight of l1 / squared_l2
  double epsilon = 1e-2; // inverse_norm offset
  double l_z = 0.0;      // Lipschitz bound of the gradient where defined

  static Regularizer none();
  static Regularizer l1(double lambda);
  static Regularizer squared_l2(double lambda);
  static Regularizer inverse_norm(double epsilon = 1e-2);
  static Regularizer decorrelation();
  static Regularizer hsic();

  bool has_grad() const;  // smooth on vectors
  bool has_prox() const;
  bool batch_only() const;
  // hsic is the one non-convex kind; SAM callers must opt in explicitly
  // since the selection guarantee does not cover it.
  bool convex() const { return kind != RegKind::Hsic; }

  std::string name() const;
  static Regularizer from_name(const std::string& name);
};

double reg_value(const Regularizer& r, const Vector& z);
Vector reg_grad(const Regularizer& r, const Vector& z);
// Hessian-vector product of the smooth vector kinds; used when training
// backpropagates through the SAM descent operator.
Vector reg_hvp(const Regularizer& r, const Vector& z, const Vector& v);

// Batch forms; columns are samples. Vector kinds sum over columns.
double reg_value(const Regularizer& r, const Matrix& z);
Matrix reg_grad(const Regularizer& r, const Matrix& z);

Vector reg_prox(const Regularizer& r, const Vector& z, double step);

// Biased finite-sample HSIC estimate (B-1)^{-2} tr(Kx H Ky H) with Gaussian
// kernels over the columns; bandwidth is the median pairwise distance per
// call, falling back to 1.0 when the median vanishes.
double hsic_value(const Matrix& x, const Matrix& y);

// sum over feature-row pairs i < j of hsic_value(Z_i, Z_j).
double hsic_pairwise_penalty(const Matrix& z);

}  // namespace opteq
