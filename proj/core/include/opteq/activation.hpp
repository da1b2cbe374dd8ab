#pragma once

#include <string>

#include "opteq/tensor.hpp"

namespace opteq {

enum class ActKind { Relu, LeakyRelu, Tanh, SigmoidShifted };

// Monotone, Lipschitz scalar activation with its derivative, antiderivative
// (normalized so antiderivative(0) = 0) and, for the piecewise-linear kinds,
// the convex conjugate of the antiderivative.
struct Activation {
  ActKind kind = ActKind::Relu;
  double slope = 0.0;  // leaky_relu negative-side slope

  static Activation relu() { return {ActKind::Relu, 0.0}; }
  static Activation leaky_relu(double s);
  static Activation tanh() { return {ActKind::Tanh, 0.0}; }
  static Activation sigmoid_shifted() { return {ActKind::SigmoidShifted, 0.0}; }

  double lipschitz() const;

  double apply(double a) const;
  // Right-derivative convention at kinks (ReLU: derivative(0) = 0).
  double derivative(double a) const;
  double antiderivative(double a) const;

  // Conjugate of the antiderivative; +inf outside its domain, with the
  // l.s.c. closure value 0 at the ReLU boundary x = 0.
  bool has_conjugate() const;
  double conjugate_antiderivative(double x) const;

  Vector apply(const Vector& v) const;

  std::string name() const;
  static Activation from_name(const std::string& name, double slope = 0.1);
};

}  // namespace opteq
