#include "opteq/activation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace opteq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// log(cosh(a)) without overflow for large |a|.
double log_cosh(double a) {
  const double x = std::abs(a);
  return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}
}  // namespace

Activation Activation::leaky_relu(double s) {
  if (s < 0.0 || s > 1.0)
    throw std::invalid_argument("leaky_relu: slope must lie in [0, 1]");
  return {ActKind::LeakyRelu, s};
}

double Activation::lipschitz() const {
  switch (kind) {
    case ActKind::Relu:
    case ActKind::LeakyRelu:
    case ActKind::Tanh:
      return 1.0;
    case ActKind::SigmoidShifted:
      return 0.25;
  }
  return 1.0;
}

double Activation::apply(double a) const {
  switch (kind) {
    case ActKind::Relu:
      return a > 0.0 ? a : 0.0;
    case ActKind::LeakyRelu:
      return a > 0.0 ? a : slope * a;
    case ActKind::Tanh:
      return std::tanh(a);
    case ActKind::SigmoidShifted:
      return 1.0 / (1.0 + std::exp(-a)) - 0.5;
  }
  return 0.0;
}

double Activation::derivative(double a) const {
  switch (kind) {
    case ActKind::Relu:
      return a > 0.0 ? 1.0 : 0.0;
    case ActKind::LeakyRelu:
      return a > 0.0 ? 1.0 : slope;
    case ActKind::Tanh: {
      const double t = std::tanh(a);
      return 1.0 - t * t;
    }
    case ActKind::SigmoidShifted: {
      const double s = 1.0 / (1.0 + std::exp(-a));
      return s * (1.0 - s);
    }
  }
  return 0.0;
}

double Activation::antiderivative(double a) const {
  switch (kind) {
    case ActKind::Relu:
      return a > 0.0 ? 0.5 * a * a : 0.0;
    case ActKind::LeakyRelu:
      return a > 0.0 ? 0.5 * a * a : 0.5 * slope * a * a;
    case ActKind::Tanh:
      return log_cosh(a);
    case ActKind::SigmoidShifted:
      // integral of logistic(a) - 1/2 from 0: softplus(a) - a/2 - log 2
      return (a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a))) -
             0.5 * a - std::log(2.0);
  }
  return 0.0;
}

bool Activation::has_conjugate() const {
  return kind == ActKind::Relu || kind == ActKind::LeakyRelu;
}

double Activation::conjugate_antiderivative(double x) const {
  switch (kind) {
    case ActKind::Relu:
      if (x > 0.0) return 0.5 * x * x;
      return x == 0.0 ? 0.0 : kInf;
    case ActKind::LeakyRelu:
      if (slope == 0.0) {
        if (x > 0.0) return 0.5 * x * x;
        return x == 0.0 ? 0.0 : kInf;
      }
      return x > 0.0 ? 0.5 * x * x : 0.5 * x * x / slope;
    default:
      throw std::invalid_argument(
          "conjugate_antiderivative: no elementary form for " + name());
  }
}

Vector Activation::apply(const Vector& v) const {
  Vector r(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) r[i] = apply(v[i]);
  return r;
}

std::string Activation::name() const {
  switch (kind) {
    case ActKind::Relu:
      return "relu";
    case ActKind::LeakyRelu:
      return "leaky_relu";
    case ActKind::Tanh:
      return "tanh";
    case ActKind::SigmoidShifted:
      return "sigmoid_shifted";
  }
  return "?";
}

Activation Activation::from_name(const std::string& name, double slope) {
  if (name == "relu") return relu();
  if (name == "leaky_relu") return leaky_relu(slope);
  if (name == "tanh") return tanh();
  if (name == "sigmoid_shifted") return sigmoid_shifted();
  throw std::invalid_argument("unknown activation kind: " + name);
}

}  // namespace opteq
