#pragma once

#include <cstdint>
#include <functional>

#include "opteq/activation.hpp"
#include "opteq/tensor.hpp"

// The unit layer f(z) = (1/mu) W^T sigma(Wz + Ux + b), its Moreau-averaged
// form, the potentials psi / phi behind it, Moreau envelopes, and the
// numerical prox-characterization verifier.
namespace opteq {

struct LayerParams {
  Matrix w;  // n_l x m
  Matrix u;  // n_l x d
  Vector b;  // n_l
  double certified_norm = 0.0;  // cached spectral norm of w

  static LayerParams make(Matrix w, Matrix u, Vector b);
  void recertify();
};

struct UnitLayerConfig {
  double mu = 1.0;
  double alpha = 1.0;  // Moreau averaging weight, in (0, 1]
};

// (1/mu) W^T sigma(Wz + Ux + b)
Vector unit_forward(const LayerParams& p, const Activation& act, const Vector& z,
                    const Vector& x, double mu = 1.0);

// alpha * W^T sigma(Wz + Ux + b) + (1 - alpha) z; same fixed points as
// unit_forward at mu = 1.
Vector averaged_forward(const LayerParams& p, const Activation& act, const Vector& z,
                        const Vector& x, double alpha);

// psi(z) = (1/mu) * 1^T antideriv(Wz + Ux + b); grad_z psi = unit_forward.
double psi_value(const LayerParams& p, const Activation& act, const Vector& z,
                 const Vector& x, double mu = 1.0);

// phi(z) = 1^T conj(W^{-T} z) - <Ux + b, W^{-T} z> - 0.5 |z|^2, valid for
// square invertible W, mu = 1 and activations with a conjugate.
double phi_closed_form(const LayerParams& p, const Activation& act, const Vector& z,
                       const Vector& x);

struct ProxCheckReport {
  double max_jacobian_asymmetry = 0.0;
  double max_expansion = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

// Samples seeded points and checks, by central finite differences, that the
// layer Jacobian is symmetric PSD with eigenvalues <= 1 and that sampled
// expansion ratios stay below 1. Report-only; never throws on violation.
ProxCheckReport prox_characterization_check(const LayerParams& p,
                                            const UnitLayerConfig& cfg,
                                            const Activation& act,
                                            const Vector& x,
                                            std::size_t samples,
                                            std::uint64_t seed);

// A proper convex function given by oracles. `project` maps onto the closure
// of the domain (identity when absent); `grad` is valid on the interior.
struct ConvexFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
  std::function<Vector(const Vector&)> project;
};

struct MoreauResult {
  double value = 0.0;
  Vector prox_point;
  std::size_t iterations = 0;
};

// M_phi^mu(x) = min_u phi(u) + |u - x|^2 / (2 mu), by projected gradient
// with backtracking. Throws on non-convergence, carrying the best iterate
// norm in the message.
MoreauResult moreau_envelope(const ConvexFunction& phi, double mu, const Vector& x,
                             double inner_tol = 1e-8, std::size_t max_iter = 10000);

// Moreau envelope of the layer potential phi (invertible W, conjugate-capable
// activation). Solved in the substituted coordinates w = W^{-T} u, where the
// domain constraint is a simple orthant and projected gradient is exact.
MoreauResult layer_moreau_envelope(const LayerParams& p, const Activation& act,
                                   const Vector& x_in, double mu, const Vector& point,
                                   double inner_tol = 1e-10,
                                   std::size_t max_iter = 200000);

}  // namespace opteq
