#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "opteq/tensor.hpp"

namespace opteq {

using VectorMap = std::function<Vector(const Vector&)>;

struct SolveReport {
  Vector z_star;
  double residual = 0.0;  // |z - T(z)| / max(|z|, 1)
  std::size_t iterations = 0;
  bool converged = false;
  std::optional<std::vector<double>> trajectory;
};

// |z - t| / max(|z|, 1); the guarded form of the relative residual.
double relative_residual(const Vector& z, const Vector& t);

// Plain fixed-point iteration z <- T(z). Non-convergence is reported, not
// thrown; callers decide.
SolveReport picard_solve(const VectorMap& map, const Vector& z0, double tol,
                         std::size_t max_iter, bool record_trajectory = false);

// Step-size schedule of the modified SAM iteration:
//   beta_k = eta / k^rho, lambda_k = eta / k^c, gamma = 1 / (2 L_z),
// valid when rho, c > 0, rho + 2c < 1 and eta <= min(sqrt(2 L_z), L_z/2, 1/2).
struct SamSchedule {
  double eta = 0.0;
  double rho = 0.2;
  double c = 0.3;
  double gamma = 0.0;
  double l_z = 1.0;  // Lipschitz constant of grad R_z

  static SamSchedule defaults(double l_z);
  void validate() const;
  double beta(std::size_t k) const;
  double lambda(std::size_t k) const;
};

// Modified SAM: z^k = beta_k S_{lambda_k}(z^{k-1}) + (1 - beta_k) T(z^{k-1}),
// S_lambda(z) = (1 - gamma lambda) z - gamma grad R_z(z). Selects, among the
// fixed points of T, the minimizer of the convex regularizer. The residual is
// measured against T alone. With beta identically zero the float path is the
// Picard one, bit for bit.
SolveReport sam_solve(const VectorMap& map, const VectorMap& reg_grad,
                      const SamSchedule& sched, const Vector& z0, std::size_t k_steps,
                      bool record_trajectory = false);

// R_z(z) - min over oracle fixed points of R_z: a selection certificate.
double selection_gap(const std::function<double(const Vector&)>& reg_value,
                     const Vector& z, const std::vector<Vector>& oracle_points);

}  // namespace opteq
