#include "opteq/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace opteq {

double relative_residual(const Vector& z, const Vector& t) {
  return norm(z - t) / std::max(norm(z), 1.0);
}

SolveReport picard_solve(const VectorMap& map, const Vector& z0, double tol,
                         std::size_t max_iter, bool record_trajectory) {
  if (tol <= 0.0) throw std::invalid_argument("picard_solve: tol must be > 0");
  SolveReport rep;
  if (record_trajectory) rep.trajectory.emplace();
  Vector z = z0;
  for (std::size_t k = 0; k < max_iter; ++k) {
    Vector t = map(z);
    const double res = relative_residual(z, t);
    if (rep.trajectory) rep.trajectory->push_back(res);
    z = std::move(t);
    rep.iterations = k + 1;
    if (res <= tol) {
      rep.converged = true;
      rep.residual = res;
      rep.z_star = std::move(z);
      return rep;
    }
  }
  rep.residual = relative_residual(z, map(z));
  rep.converged = rep.residual <= tol;
  rep.z_star = std::move(z);
  return rep;
}

SamSchedule SamSchedule::defaults(double l_z) {
  if (l_z <= 0.0) throw std::invalid_argument("SamSchedule: L_z must be > 0");
  SamSchedule s;
  s.l_z = l_z;
  s.eta = std::min({std::sqrt(2.0 * l_z), l_z / 2.0, 0.5});
  s.gamma = 1.0 / (2.0 * l_z);
  s.rho = 0.2;
  s.c = 0.3;
  return s;
}

void SamSchedule::validate() const {
  if (l_z <= 0.0) throw std::invalid_argument("SamSchedule: L_z must be > 0");
  if (rho <= 0.0 || c <= 0.0 || rho + 2.0 * c >= 1.0)
    throw std::invalid_argument("SamSchedule: need rho, c > 0 and rho + 2c < 1");
  // eta == 0 disables the regularizer path and reduces SAM to Picard.
  const double eta_max = std::min({std::sqrt(2.0 * l_z), l_z / 2.0, 0.5});
  if (eta < 0.0 || eta > eta_max + 1e-15)
    throw std::invalid_argument("SamSchedule: eta must lie in [0, min(sqrt(2 L_z), L_z/2, 1/2)]");
  if (gamma <= 0.0) throw std::invalid_argument("SamSchedule: gamma must be > 0");
}

double SamSchedule::beta(std::size_t k) const {
  return eta / std::pow(static_cast<double>(k), rho);
}

double SamSchedule::lambda(std::size_t k) const {
  return eta / std::pow(static_cast<double>(k), c);
}

SolveReport sam_solve(const VectorMap& map, const VectorMap& reg_grad,
                      const SamSchedule& sched, const Vector& z0, std::size_t k_steps,
                      bool record_trajectory) {
  if (k_steps < 1) throw std::invalid_argument("sam_solve: K must be >= 1");
  sched.validate();
  SolveReport rep;
  if (record_trajectory) rep.trajectory.emplace();
  Vector z = z0;
  for (std::size_t k = 1; k <= k_steps; ++k) {
    Vector t = map(z);
    if (rep.trajectory) rep.trajectory->push_back(relative_residual(z, t));
    const double beta = sched.beta(k);
    if (beta == 0.0) {
      z = std::move(t);
      continue;
    }
    const double lambda = sched.lambda(k);
    const Vector g = reg_grad(z);
    Vector next(z.dim());
    for (std::size_t i = 0; i < z.dim(); ++i) {
      const double s_i = (1.0 - sched.gamma * lambda) * z[i] - sched.gamma * g[i];
      next[i] = beta * s_i + (1.0 - beta) * t[i];
    }
    z = std::move(next);
  }
  rep.iterations = k_steps;
  rep.residual = relative_residual(z, map(z));
  rep.converged = true;  // SAM runs a fixed budget; residual is informational
  rep.z_star = std::move(z);
  return rep;
}

double selection_gap(const std::function<double(const Vector&)>& reg_value,
                     const Vector& z, const std::vector<Vector>& oracle_points) {
  if (oracle_points.empty())
    throw std::invalid_argument("selection_gap: oracle_points must be nonempty");
  double best = reg_value(oracle_points.front());
  for (const Vector& p : oracle_points) best = std::min(best, reg_value(p));
  return reg_value(z) - best;
}

}  // namespace opteq
