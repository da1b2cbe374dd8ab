#pragma once

#include <cstdint>
#include <vector>

#include "opteq/activation.hpp"
#include "opteq/regularizer.hpp"
#include "opteq/solver.hpp"
#include "opteq/tensor.hpp"
#include "opteq/unit_layer.hpp"

// The deep equilibrium network: affine extractor, composed averaged layers
// T = f_L o ... o f_1, readout, the multi-block lift, the wide one-layer
// limit system and the underlying objectives it minimizes.
namespace opteq {

struct DeepOptEqModel {
  Matrix extractor;  // W0, d x d_x
  bool extractor_tanh = false;
  std::vector<LayerParams> layers;  // each W: n_l x m, U: n_l x d
  double alpha = 1.0;               // in (0, 1]
  double mu = 1.0;
  Activation activation;
  Matrix readout;  // W_{L+1}, d_y x m

  // Selection layer appended after the composition, when set: the forward
  // map becomes T_R o T with T_R the prox (if available) or a gradient step.
  Regularizer appended_reg;  // kind None means no appended layer
  double appended_gamma = 0.0;

  std::size_t depth() const { return layers.size(); }
  std::size_t hidden_dim() const { return layers.empty() ? 0 : layers[0].w.cols; }

  void validate() const;

  // x = g(x0) = W0 x0, optionally passed through elementwise tanh.
  Vector extract(const Vector& x0) const;

  // T(z, x) = f_L o ... o f_1 (z), each f_l the averaged layer.
  Vector forward_map(const Vector& z, const Vector& x) const;

  Vector output(const Vector& z) const { return matvec(readout, z); }
};

struct BlockVector {
  std::vector<Vector> blocks;  // ordering z_1, ..., z_{L-1}, z_0
};

// Lift a fixed point of the composition to the multi-block system:
// (f_1(z0), f_2 o f_1(z0), ..., z0).
BlockVector block_lift(const DeepOptEqModel& model, const Vector& z_star,
                       const Vector& x);

// Relative residual of the block system
//   zt = alpha Wt^T sigma(Wt P zt + Ut x + bt) + (1 - alpha) P zt,
// assembled from the block-diagonal Wt, stacked Ut/bt and the cyclic P.
double block_system_residual(const DeepOptEqModel& model, const BlockVector& zt,
                             const Vector& x);

// Picard solve of L z = sum_i W_i^T sigma(W_i z + U_i x + b_i), the wide
// one-layer system the deep equilibrium collapses to as alpha -> 0.
SolveReport wide_system_solve(const DeepOptEqModel& model, const Vector& x, double tol,
                              std::size_t max_iter = 200000);

// Corollary objective for L = 2:
//   alpha M_{phi_1}^{1-alpha}(z1) + alpha M_{phi_2}^{1-alpha}(z0)
//   + 0.5 |z1 - z0|^2.
double two_block_objective(const DeepOptEqModel& model, const Vector& z1,
                           const Vector& z0, const Vector& x,
                           double inner_tol = 1e-10);

// Joint objective sum_l phi_l(x_l) + 0.5 |x_l - y|^2 of the wide limit.
double wide_joint_objective(const DeepOptEqModel& model, const std::vector<Vector>& xs,
                            const Vector& y, const Vector& x);

// Independent projected-gradient minimizer of the wide joint objective,
// returning the y component. Solved in conjugate coordinates per block.
Vector wide_joint_minimizer(const DeepOptEqModel& model, const Vector& x,
                            double tol = 1e-10, std::size_t max_iter = 400000);

// Returns a copy of the model with the selection layer T_R appended, so the
// forward map is T_R o T. Needs a prox or a vector gradient; batch kinds
// (decorrelation, hsic) are rejected here.
DeepOptEqModel append_structural_regularizer(const DeepOptEqModel& model,
                                             const Regularizer& r, double gamma);

// Factorization of a feedforward chain W_k = Wb_k Wb_{k-1}^T over a shared
// hidden width m >= 2 max(n_k); seeded full-rank padding for the free block.
std::vector<Matrix> universal_factorize(const std::vector<Matrix>& w_seq,
                                        std::size_t m, std::uint64_t seed);

}  // namespace opteq
