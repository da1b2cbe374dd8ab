#include "opteq/dataset.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace opteq {

namespace {

Vector one_hot(std::size_t k, std::size_t classes) {
  Vector y(classes, 0.0);
  y[k] = 1.0;
  return y;
}

}  // namespace

Dataset gaussian_blobs(std::size_t n, std::size_t classes, std::size_t dim,
                       std::uint64_t seed) {
  if (n == 0 || classes == 0 || dim == 0)
    throw std::invalid_argument("gaussian_blobs: zero size");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> centers(classes, Vector(dim));
  for (auto& c : centers)
    for (std::size_t i = 0; i < dim; ++i) c[i] = 3.0 * gauss(rng);
  Dataset out;
  out.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i % classes;
    Vector x(dim);
    for (std::size_t j = 0; j < dim; ++j) x[j] = centers[k][j] + gauss(rng);
    out.samples.push_back({std::move(x), one_hot(k, classes)});
  }
  return out;
}

Dataset two_moons(std::size_t n, double noise, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("two_moons: zero size");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n_upper = (n + 1) / 2;
  Dataset out;
  out.samples.reserve(n);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool upper = i < n_upper;
    const std::size_t idx = upper ? i : i - n_upper;
    const std::size_t count = upper ? n_upper : n - n_upper;
    const double t = pi * static_cast<double>(idx) /
                     static_cast<double>(count > 1 ? count - 1 : 1);
    Vector x(2);
    if (upper) {
      x[0] = std::cos(t);
      x[1] = std::sin(t);
    } else {
      x[0] = 1.0 - std::cos(t);
      x[1] = 0.5 - std::sin(t);
    }
    x[0] += noise * gauss(rng);
    x[1] += noise * gauss(rng);
    out.samples.push_back({std::move(x), one_hot(upper ? 0 : 1, 2)});
  }
  return out;
}

PlantedRegression planted_regression(std::size_t n, std::size_t x_dim,
                                     std::size_t hidden, std::size_t depth,
                                     std::size_t y_dim, const Activation& act,
                                     double noise, std::uint64_t seed) {
  if (n == 0 || depth == 0) throw std::invalid_argument("planted_regression: zero size");

  DeepOptEqModel teacher;
  teacher.activation = act;
  teacher.extractor = random_matrix(hidden, x_dim, seed + 11);
  teacher.extractor_tanh = true;
  teacher.alpha = 1.0;
  teacher.mu = 1.0;
  for (std::size_t l = 0; l < depth; ++l) {
    Matrix w = spectral_project(random_matrix(hidden, hidden, seed + 100 + l), 0.9);
    Matrix u = 0.5 * random_matrix(hidden, hidden, seed + 200 + l);
    Vector b = random_vector(hidden, seed + 300 + l);
    teacher.layers.push_back(LayerParams::make(std::move(w), std::move(u), std::move(b)));
  }
  teacher.readout = random_matrix(y_dim, hidden, seed + 17);
  teacher.validate();

  std::mt19937_64 rng(seed + 423);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PlantedRegression out;
  out.data.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector x0(x_dim);
    for (std::size_t j = 0; j < x_dim; ++j) x0[j] = gauss(rng);
    const Vector x = teacher.extract(x0);
    const SolveReport rep = picard_solve(
        [&](const Vector& z) { return teacher.forward_map(z, x); },
        Vector(hidden, 0.0), 1e-12, 100000);
    if (!rep.converged)
      throw std::runtime_error("planted_regression: teacher solve failed");
    Vector y = teacher.output(rep.z_star);
    for (std::size_t j = 0; j < y.dim(); ++j) y[j] += noise * gauss(rng);
    out.data.samples.push_back({std::move(x0), std::move(y)});
  }
  out.teacher = std::move(teacher);
  return out;
}

}  // namespace opteq
