#include "opteq/unit_layer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace opteq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Vector preactivation(const LayerParams& p, const Vector& z, const Vector& x) {
  if (p.w.cols != z.dim())
    throw std::invalid_argument("unit layer: z has dim " + std::to_string(z.dim()) +
                                ", W expects " + std::to_string(p.w.cols));
  if (p.u.cols != x.dim())
    throw std::invalid_argument("unit layer: x has dim " + std::to_string(x.dim()) +
                                ", U expects " + std::to_string(p.u.cols));
  Vector pre = matvec(p.w, z);
  const Vector ux = matvec(p.u, x);
  for (std::size_t i = 0; i < pre.dim(); ++i) pre[i] += ux[i] + p.b[i];
  return pre;
}
}  // namespace

LayerParams LayerParams::make(Matrix w, Matrix u, Vector b) {
  if (w.rows != u.rows || w.rows != b.dim())
    throw std::invalid_argument("LayerParams: W, U, b row counts disagree");
  LayerParams p{std::move(w), std::move(u), std::move(b), 0.0};
  p.recertify();
  return p;
}

void LayerParams::recertify() { certified_norm = spectral_norm(w); }

Vector unit_forward(const LayerParams& p, const Activation& act, const Vector& z,
                    const Vector& x, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("unit_forward: mu must be > 0");
  Vector pre = preactivation(p, z, x);
  for (std::size_t i = 0; i < pre.dim(); ++i) pre[i] = act.apply(pre[i]);
  Vector out = matvec_transpose(p.w, pre);
  if (mu != 1.0) out = (1.0 / mu) * out;
  return out;
}

Vector averaged_forward(const LayerParams& p, const Activation& act, const Vector& z,
                        const Vector& x, double alpha) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("averaged_forward: alpha must lie in (0, 1]");
  Vector f = unit_forward(p, act, z, x, 1.0);
  Vector out(z.dim());
  for (std::size_t i = 0; i < z.dim(); ++i) out[i] = alpha * f[i] + (1.0 - alpha) * z[i];
  return out;
}

double psi_value(const LayerParams& p, const Activation& act, const Vector& z,
                 const Vector& x, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("psi_value: mu must be > 0");
  const Vector pre = preactivation(p, z, x);
  double s = 0.0;
  for (std::size_t i = 0; i < pre.dim(); ++i) s += act.antiderivative(pre[i]);
  return s / mu;
}

double phi_closed_form(const LayerParams& p, const Activation& act, const Vector& z,
                       const Vector& x) {
  if (!act.has_conjugate())
    throw std::invalid_argument("phi_closed_form: activation " + act.name() +
                                " has no conjugate antiderivative");
  const Vector w = solve_transpose(p.w, z);  // W^{-T} z
  const Vector c = matvec(p.u, x) + p.b;
  double s = 0.0;
  for (std::size_t i = 0; i < w.dim(); ++i) {
    const double conj = act.conjugate_antiderivative(w[i]);
    if (conj == kInf) return kInf;
    s += conj - c[i] * w[i];
  }
  return s - 0.5 * dot(z, z);
}

ProxCheckReport prox_characterization_check(const LayerParams& p,
                                            const UnitLayerConfig& cfg,
                                            const Activation& act,
                                            const Vector& x,
                                            std::size_t samples,
                                            std::uint64_t seed) {
  const std::size_t m = p.w.cols;
  ProxCheckReport rep;
  rep.min_eigenvalue = kInf;
  rep.max_eigenvalue = -kInf;
  const double h = 1e-5;  // central-difference step; independent of the
                          // analytic Jacobians used by training
  for (std::size_t s = 0; s < samples; ++s) {
    Vector z = random_vector(m, seed + 1000 * s);
    Matrix jac(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      Vector zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      const Vector fp = unit_forward(p, act, zp, x, cfg.mu);
      const Vector fm = unit_forward(p, act, zm, x, cfg.mu);
      for (std::size_t i = 0; i < m; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
    Matrix sym(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        rep.max_jacobian_asymmetry =
            std::max(rep.max_jacobian_asymmetry, std::abs(jac(i, j) - jac(j, i)));
        sym(i, j) = 0.5 * (jac(i, j) + jac(j, i));
      }
    const Vector eig = symmetric_eigenvalues(sym);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, eig[0]);
    rep.max_eigenvalue = std::max(rep.max_eigenvalue, eig[m - 1]);

    // Expansion ratio against a second sampled point.
    const Vector z2 = random_vector(m, seed + 1000 * s + 7);
    const Vector d = z - z2;
    const double dn = norm(d);
    if (dn > 1e-12) {
      const Vector f1 = unit_forward(p, act, z, x, cfg.mu);
      const Vector f2 = unit_forward(p, act, z2, x, cfg.mu);
      rep.max_expansion = std::max(rep.max_expansion, norm(f1 - f2) / dn);
    }
  }
  return rep;
}

MoreauResult moreau_envelope(const ConvexFunction& phi, double mu, const Vector& x,
                             double inner_tol, std::size_t max_iter) {
  if (mu <= 0.0) throw std::invalid_argument("moreau_envelope: mu must be > 0");
  const auto project = phi.project ? phi.project
                                   : [](const Vector& v) { return v; };
  auto objective = [&](const Vector& u) {
    const Vector d = u - x;
    return phi.value(u) + dot(d, d) / (2.0 * mu);
  };
  Vector u = project(x);
  double fu = objective(u);
  double step = mu;  // the quadratic term alone has curvature 1/mu
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vector g = phi.grad(u);
    for (std::size_t i = 0; i < u.dim(); ++i) g[i] += (u[i] - x[i]) / mu;
    // Backtracking on the projected step.
    for (int bt = 0; bt < 60; ++bt) {
      Vector cand = project(u - step * g);
      const double fc = objective(cand);
      const Vector diff = cand - u;
      if (fc <= fu - 0.25 / step * dot(diff, diff) + 1e-18) {
        const double move = norm(diff) / step;
        u = std::move(cand);
        fu = fc;
        if (move <= inner_tol) return {fu, u, it + 1};
        step *= 1.5;
        break;
      }
      step *= 0.5;
      if (bt == 59)
        throw std::runtime_error(
            "moreau_envelope: line search failed; best value " + std::to_string(fu));
    }
  }
  throw std::runtime_error("moreau_envelope: no convergence; best value " +
                           std::to_string(fu));
}

MoreauResult layer_moreau_envelope(const LayerParams& p, const Activation& act,
                                   const Vector& x_in, double mu, const Vector& point,
                                   double inner_tol, std::size_t max_iter) {
  if (!act.has_conjugate())
    throw std::invalid_argument("layer_moreau_envelope: activation " + act.name() +
                                " has no conjugate antiderivative");
  if (p.w.rows != p.w.cols)
    throw std::invalid_argument("layer_moreau_envelope: W must be square");
  if (mu <= 0.0) throw std::invalid_argument("layer_moreau_envelope: mu must be > 0");

  // Substituting u = W^T w turns the inner problem into
  //   min_w  sum_i conj(w_i) - <c, w> - 0.5 |W^T w|^2 + |W^T w - point|^2 / (2 mu)
  // over the conjugate's domain (w >= 0 for ReLU), a smooth strongly convex
  // problem with an exact orthant projection.
  const bool orthant = (act.kind == ActKind::Relu) ||
                       (act.kind == ActKind::LeakyRelu && act.slope == 0.0);
  const double inv_slope =
      (act.kind == ActKind::LeakyRelu && act.slope > 0.0) ? 1.0 / act.slope : 1.0;
  const Vector c = matvec(p.u, x_in) + p.b;
  const std::size_t n = p.w.rows;

  auto value_w = [&](const Vector& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (orthant) {
        s += 0.5 * w[i] * w[i];
      } else {
        s += w[i] > 0.0 ? 0.5 * w[i] * w[i] : 0.5 * w[i] * w[i] * inv_slope;
      }
      s -= c[i] * w[i];
    }
    const Vector u = matvec_transpose(p.w, w);
    const Vector d = u - point;
    return s - 0.5 * dot(u, u) + dot(d, d) / (2.0 * mu);
  };
  auto grad_w = [&](const Vector& w) {
    Vector g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = (orthant || w[i] > 0.0) ? w[i] : w[i] * inv_slope;
      g[i] -= c[i];
    }
    const Vector u = matvec_transpose(p.w, w);
    Vector r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = (1.0 / mu - 1.0) * u[i] - point[i] / mu;
    return g + matvec(p.w, r);
  };

  const double wn = p.certified_norm > 0.0 ? p.certified_norm : spectral_norm(p.w);
  const double lip = std::max(1.0, inv_slope) + std::abs(1.0 / mu - 1.0) * wn * wn;
  const double step = 1.0 / lip;

  Vector w(n, 0.0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vector g = grad_w(w);
    Vector next = w - step * g;
    if (orthant)
      for (std::size_t i = 0; i < n; ++i) next[i] = std::max(next[i], 0.0);
    const double move = norm(next - w) / step;
    w = std::move(next);
    if (move <= inner_tol) {
      return {value_w(w), matvec_transpose(p.w, w), it + 1};
    }
  }
  throw std::runtime_error("layer_moreau_envelope: no convergence; residual map norm " +
                           std::to_string(norm(grad_w(w))));
}

}  // namespace opteq
