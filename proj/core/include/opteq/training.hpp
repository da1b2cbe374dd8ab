#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opteq/dataset.hpp"
#include "opteq/deep_net.hpp"
#include "opteq/regularizer.hpp"
#include "opteq/solver.hpp"

// Losses, reverse-mode gradients through the K-step unroll, IFT adjoint
// gradients at the equilibrium, SGD, and the finite-difference oracle.
namespace opteq {

enum class LossKind { Squared, SoftmaxCrossEntropy };

struct LossSpec {
  LossKind kind = LossKind::Squared;
  double weight_decay = 0.0;  // xi of R_w = xi |theta|^2
};

struct GradientBundle {
  Matrix extractor;
  std::vector<Matrix> w;
  std::vector<Matrix> u;
  std::vector<Vector> b;
  Matrix readout;

  static GradientBundle zeros_like(const DeepOptEqModel& model);
  void accumulate(const GradientBundle& other, double scale = 1.0);
  void scale(double s);
  bool finite() const;
  double max_abs() const;
};

// Flat parameter views used by the finite-difference oracle and SGD.
std::size_t parameter_count(const DeepOptEqModel& model);
double* parameter_at(DeepOptEqModel& model, std::size_t idx);
double bundle_entry(const GradientBundle& g, std::size_t idx);

double loss_value(const LossSpec& loss, const Vector& y_hat, const Vector& y);
Vector loss_grad(const LossSpec& loss, const Vector& y_hat, const Vector& y);

struct UnrolledResult {
  double loss = 0.0;
  GradientBundle grad;
  double residual_mean = 0.0;  // relative residual of z^K under T
};

// Records K steps of the SAM iteration (Picard when sched.eta = 0) starting
// from z = 0 and runs an exact reverse sweep, including through the
// extractor. Weight decay enters analytically as 2 xi theta.
UnrolledResult unrolled_loss_and_grad(const DeepOptEqModel& model,
                                      const std::vector<Sample>& batch,
                                      const Regularizer& reg, const SamSchedule& sched,
                                      std::size_t k_steps, const LossSpec& loss);

struct IftResult {
  double loss = 0.0;
  GradientBundle grad;
  SolveReport fwd_report;  // from the last sample of the batch
  double residual_mean = 0.0;
};

// Equilibrium gradients: solve z* = T(z*), then the adjoint fixed point
// v = J_T(z*)^T v + dl/dz* by Neumann-style iteration, then one analytic
// vector-Jacobian sweep over the parameters. Throws on non-convergence.
IftResult ift_loss_and_grad(const DeepOptEqModel& model,
                            const std::vector<Sample>& batch, double tol_fwd,
                            double tol_adj, const LossSpec& loss);

// Loss of the K-step unrolled pipeline, forward only.
double pipeline_loss(const DeepOptEqModel& model, const std::vector<Sample>& batch,
                     const Regularizer& reg, const SamSchedule& sched,
                     std::size_t k_steps, const LossSpec& loss);

// Loss at the Picard equilibrium solved to tol.
double equilibrium_loss(const DeepOptEqModel& model, const std::vector<Sample>& batch,
                        double tol, const LossSpec& loss);

// Central differences of the unrolled pipeline loss, coordinate by
// coordinate. Guarded to at most 10^4 parameters.
GradientBundle finite_diff_grad(const DeepOptEqModel& model,
                                const std::vector<Sample>& batch,
                                const Regularizer& reg, const SamSchedule& sched,
                                std::size_t k_steps, const LossSpec& loss, double step);

enum class TrainMode { Unrolled, Ift };

struct TrainOptions {
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  double lr = 0.1;
  std::size_t lr_halve_every = 30;  // 0 disables halving
  LossSpec loss;
  TrainMode mode = TrainMode::Unrolled;
  Regularizer reg;       // SAM selection regularizer (unrolled mode)
  SamSchedule sched;     // eta = 0 gives plain Picard unrolling
  std::size_t k_steps = 20;
  double tol_fwd = 1e-8;
  double tol_adj = 1e-8;
  bool project_spectral = false;  // rescale each W to norm <= bound after steps
  double spectral_bound = 1.0;
  std::uint64_t seed = 0;
  std::string metrics_path;  // CSV sink, empty for none
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double residual_mean = 0.0;
  double reg_value = 0.0;
  double lr = 0.0;
  double wallclock_ms = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  bool diverged = false;
};

// Minibatch SGD with weight decay; aborts (diverged flag) when the epoch
// loss exceeds 1e6. Deterministic given seed and OPTEQ_THREADS.
TrainLog sgd_train(DeepOptEqModel& model, const Dataset& data,
                   const TrainOptions& opt);

// Batch parallelism cap from OPTEQ_THREADS; 0 or unset means serial.
std::size_t thread_cap();

}  // namespace opteq
