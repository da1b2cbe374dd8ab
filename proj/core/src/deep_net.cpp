#include "opteq/deep_net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opteq {

namespace {

// Extend the column-orthonormal V (m x k) to a full orthonormal basis of R^m
// using seeded candidates and Gram-Schmidt.
Matrix complete_basis(const Matrix& v, std::uint64_t seed) {
  const std::size_t m = v.rows;
  const std::size_t k = v.cols;
  Matrix full(m, m);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < m; ++i) full(i, j) = v(i, j);
  std::size_t next = k;
  std::uint64_t attempt = 0;
  while (next < m) {
    Vector cand = random_vector(m, seed + 7919 * (attempt++));
    for (std::size_t j = 0; j < next; ++j) {
      double proj = 0.0;
      for (std::size_t i = 0; i < m; ++i) proj += full(i, j) * cand[i];
      for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * full(i, j);
    }
    const double n = norm(cand);
    if (n < 1e-8) continue;
    for (std::size_t i = 0; i < m; ++i) full(i, next) = cand[i] / n;
    ++next;
  }
  return full;
}

// Orthonormal n x n factor from seeded Gram-Schmidt.
Matrix seeded_orthonormal(std::size_t n, std::uint64_t seed) {
  return complete_basis(Matrix(n, 0), seed);
}

}  // namespace

void DeepOptEqModel::validate() const {
  if (layers.empty()) throw std::invalid_argument("model: needs at least one layer");
  const std::size_t m = layers[0].w.cols;
  const std::size_t d = layers[0].u.cols;
  for (const LayerParams& p : layers) {
    if (p.w.cols != m) throw std::invalid_argument("model: layers disagree on hidden width");
    if (p.u.cols != d) throw std::invalid_argument("model: layers disagree on feature width");
    if (p.w.rows != p.u.rows || p.w.rows != p.b.dim())
      throw std::invalid_argument("model: layer parameter shapes disagree");
  }
  if (extractor.rows != d)
    throw std::invalid_argument("model: extractor output width does not match layers");
  if (readout.cols != m)
    throw std::invalid_argument("model: readout width does not match hidden dim");
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("model: alpha must lie in (0, 1]");
  if (mu <= 0.0) throw std::invalid_argument("model: mu must be > 0");
}

Vector DeepOptEqModel::extract(const Vector& x0) const {
  Vector x = matvec(extractor, x0);
  if (extractor_tanh)
    for (std::size_t i = 0; i < x.dim(); ++i) x[i] = std::tanh(x[i]);
  return x;
}

Vector DeepOptEqModel::forward_map(const Vector& z, const Vector& x) const {
  Vector cur = z;
  for (const LayerParams& p : layers)
    cur = averaged_forward(p, activation, cur, x, alpha);
  if (appended_reg.kind != RegKind::None) {
    if (appended_reg.has_prox())
      cur = reg_prox(appended_reg, cur, appended_gamma);
    else
      cur = cur - appended_gamma * reg_grad(appended_reg, cur);
  }
  return cur;
}

DeepOptEqModel append_structural_regularizer(const DeepOptEqModel& model,
                                             const Regularizer& r, double gamma) {
  if (gamma <= 0.0)
    throw std::invalid_argument("append_structural_regularizer: gamma must be > 0");
  if (!r.has_prox() && !r.has_grad())
    throw std::invalid_argument(
        "append_structural_regularizer: " + r.name() +
        " offers neither a prox nor a per-vector gradient");
  DeepOptEqModel out = model;
  out.appended_reg = r;
  out.appended_gamma = gamma;
  return out;
}

BlockVector block_lift(const DeepOptEqModel& model, const Vector& z_star,
                       const Vector& x) {
  BlockVector out;
  const std::size_t l_count = model.depth();
  out.blocks.reserve(l_count);
  Vector cur = z_star;
  for (std::size_t l = 0; l + 1 < l_count; ++l) {
    cur = averaged_forward(model.layers[l], model.activation, cur, x, model.alpha);
    out.blocks.push_back(cur);
  }
  out.blocks.push_back(z_star);  // z_0 closes the cycle
  return out;
}

double block_system_residual(const DeepOptEqModel& model, const BlockVector& zt,
                             const Vector& x) {
  const std::size_t l_count = model.depth();
  if (zt.blocks.size() != l_count)
    throw std::invalid_argument("block_system_residual: block count != L");
  const std::size_t m = model.hidden_dim();

  Vector flat(l_count * m);
  for (std::size_t i = 0; i < l_count; ++i)
    for (std::size_t r = 0; r < m; ++r) flat[i * m + r] = zt.blocks[i][r];

  const Matrix perm = block_permutation(l_count, m);
  const Vector pz = matvec(perm, flat);

  Vector rhs(l_count * m);
  for (std::size_t i = 0; i < l_count; ++i) {
    Vector zi(m);
    for (std::size_t r = 0; r < m; ++r) zi[r] = pz[i * m + r];
    const Vector fi =
        averaged_forward(model.layers[i], model.activation, zi, x, model.alpha);
    for (std::size_t r = 0; r < m; ++r) rhs[i * m + r] = fi[r];
  }
  return relative_residual(flat, rhs);
}

SolveReport wide_system_solve(const DeepOptEqModel& model, const Vector& x, double tol,
                              std::size_t max_iter) {
  const double inv_l = 1.0 / static_cast<double>(model.depth());
  auto map = [&](const Vector& z) {
    Vector acc(z.dim(), 0.0);
    for (const LayerParams& p : model.layers)
      acc += unit_forward(p, model.activation, z, x, 1.0);
    return inv_l * acc;
  };
  return picard_solve(map, Vector(model.hidden_dim(), 0.0), tol, max_iter);
}

double two_block_objective(const DeepOptEqModel& model, const Vector& z1,
                           const Vector& z0, const Vector& x, double inner_tol) {
  if (model.depth() != 2)
    throw std::invalid_argument("two_block_objective: model must have L = 2");
  if (model.alpha >= 1.0)
    throw std::invalid_argument("two_block_objective: needs alpha < 1");
  const double env_mu = 1.0 - model.alpha;
  const double m1 =
      layer_moreau_envelope(model.layers[0], model.activation, x, env_mu, z1, inner_tol)
          .value;
  const double m2 =
      layer_moreau_envelope(model.layers[1], model.activation, x, env_mu, z0, inner_tol)
          .value;
  const Vector d = z1 - z0;
  return model.alpha * (m1 + m2) + 0.5 * dot(d, d);
}

double wide_joint_objective(const DeepOptEqModel& model, const std::vector<Vector>& xs,
                            const Vector& y, const Vector& x) {
  if (xs.size() != model.depth())
    throw std::invalid_argument("wide_joint_objective: needs one x_l per layer");
  double total = 0.0;
  for (std::size_t l = 0; l < xs.size(); ++l) {
    const double phi = phi_closed_form(model.layers[l], model.activation, xs[l], x);
    const Vector d = xs[l] - y;
    total += phi + 0.5 * dot(d, d);
  }
  return total;
}

Vector wide_joint_minimizer(const DeepOptEqModel& model, const Vector& x, double tol,
                            std::size_t max_iter) {
  // In the conjugate coordinates x_l = W_l^T w_l the joint objective is a
  // convex quadratic over a product of orthants (ReLU) or all of R^n
  // (leaky),
  //   sum_l [ conj(w_l) - <c_l + W_l y, w_l> ] + (L/2) |y|^2,
  // solved here by plain projected gradient, independent of any fixed-point
  // iteration on the network.
  const Activation& act = model.activation;
  if (!act.has_conjugate())
    throw std::invalid_argument("wide_joint_minimizer: unsupported activation");
  const bool orthant =
      act.kind == ActKind::Relu || (act.kind == ActKind::LeakyRelu && act.slope == 0.0);
  const double inv_slope =
      (act.kind == ActKind::LeakyRelu && act.slope > 0.0) ? 1.0 / act.slope : 1.0;
  const std::size_t l_count = model.depth();
  const std::size_t m = model.hidden_dim();

  std::vector<Vector> c(l_count);
  for (std::size_t l = 0; l < l_count; ++l)
    c[l] = matvec(model.layers[l].u, x) + model.layers[l].b;

  std::vector<Vector> w(l_count, Vector(m, 0.0));
  Vector y(m, 0.0);
  const double lf = static_cast<double>(l_count);
  const double step =
      1.0 / (std::max(std::max(1.0, inv_slope), lf) + std::sqrt(lf) + 1.0);

  for (std::size_t it = 0; it < max_iter; ++it) {
    double move_sq = 0.0;
    Vector gy(m);
    for (std::size_t r = 0; r < m; ++r) gy[r] = lf * y[r];
    std::vector<Vector> wn(l_count);
    for (std::size_t l = 0; l < l_count; ++l) {
      const Vector wy = matvec(model.layers[l].w, y);
      Vector g(m);
      for (std::size_t r = 0; r < m; ++r) {
        const double diag = (orthant || w[l][r] > 0.0) ? 1.0 : inv_slope;
        g[r] = diag * w[l][r] - c[l][r] - wy[r];
      }
      wn[l] = w[l] - step * g;
      if (orthant)
        for (std::size_t r = 0; r < m; ++r) wn[l][r] = std::max(wn[l][r], 0.0);
      const Vector wtw = matvec_transpose(model.layers[l].w, w[l]);
      for (std::size_t r = 0; r < m; ++r) gy[r] -= wtw[r];
    }
    Vector ynext = y - step * gy;
    for (std::size_t l = 0; l < l_count; ++l) {
      const Vector d = wn[l] - w[l];
      move_sq += dot(d, d);
      w[l] = std::move(wn[l]);
    }
    const Vector dy = ynext - y;
    move_sq += dot(dy, dy);
    y = std::move(ynext);
    if (std::sqrt(move_sq) / step <= tol) return y;
  }
  throw std::runtime_error("wide_joint_minimizer: no convergence");
}

std::vector<Matrix> universal_factorize(const std::vector<Matrix>& w_seq,
                                        std::size_t m, std::uint64_t seed) {
  if (w_seq.empty()) throw std::invalid_argument("universal_factorize: empty chain");
  std::size_t max_width = w_seq.front().cols;
  for (std::size_t k = 0; k < w_seq.size(); ++k) {
    max_width = std::max({max_width, w_seq[k].rows, w_seq[k].cols});
    if (k > 0 && w_seq[k].cols != w_seq[k - 1].rows)
      throw std::invalid_argument("universal_factorize: chain dims do not compose");
  }
  if (m < 2 * max_width)
    throw std::invalid_argument("universal_factorize: need m >= 2 max layer width");

  const std::size_t k_count = w_seq.size();
  std::vector<Matrix> bars(k_count + 1);

  // Seed the top factor with orthonormal rows: full rank with singular
  // values 1, which keeps the chain well conditioned.
  {
    const std::size_t n_top = w_seq.back().rows;
    const Matrix q = seeded_orthonormal(m, seed + 1);
    Matrix top(n_top, m);
    for (std::size_t i = 0; i < n_top; ++i)
      for (std::size_t j = 0; j < m; ++j) top(i, j) = q(j, i);
    bars[k_count] = std::move(top);
  }

  for (std::size_t k = k_count; k >= 1; --k) {
    const Matrix& a = bars[k];        // n_k x m, full rank
    const Matrix& target = w_seq[k - 1];  // n_k x n_{k-1}
    const std::size_t n_k = a.rows;
    const std::size_t n_prev = target.cols;

    const SvdResult f = svd(a);  // u: n_k x n_k, s: n_k, v: m x n_k
    double s_min = f.s[0];
    for (std::size_t i = 0; i < f.s.dim(); ++i)
      if (f.s[i] > 0.0) s_min = std::min(s_min, f.s[i]);
    if (f.s[f.s.dim() - 1] <= 1e-12 * f.s[0])
      throw std::runtime_error("universal_factorize: intermediate factor lost rank");

    const Matrix vfull = complete_basis(f.v, seed + 131 * k);
    const Matrix omega = matmul(transpose(f.u), target);  // n_k x n_prev

    Matrix c(m, n_prev, 0.0);
    for (std::size_t i = 0; i < n_k; ++i)
      for (std::size_t j = 0; j < n_prev; ++j) c(i, j) = omega(i, j) / f.s[i];
    // Free block: seeded orthonormal rows scaled by the smallest used
    // singular value keep rank(C) = n_prev deterministically.
    const Matrix q = seeded_orthonormal(n_prev, seed + 977 * k);
    const double scale = s_min > 0.0 ? s_min : 1.0;
    for (std::size_t i = 0; i < n_prev; ++i)
      for (std::size_t j = 0; j < n_prev; ++j) c(n_k + i, j) = scale * q(i, j);

    bars[k - 1] = transpose(matmul(vfull, c));  // B = C^T Vfull^T, n_prev x m
  }
  return bars;
}

}  // namespace opteq
