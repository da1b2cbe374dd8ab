#pragma once

#include <cstdint>
#include <vector>

#include "opteq/deep_net.hpp"
#include "opteq/tensor.hpp"

// Synthetic dataset generators, deterministic given the seed.
namespace opteq {

struct Sample {
  Vector x0;
  Vector y;
};

struct Dataset {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  std::size_t input_dim() const { return samples.empty() ? 0 : samples[0].x0.dim(); }
  std::size_t target_dim() const { return samples.empty() ? 0 : samples[0].y.dim(); }
};

// Isotropic Gaussian clusters around seeded centers, one-hot targets,
// classes assigned round robin so counts stay balanced.
Dataset gaussian_blobs(std::size_t n, std::size_t classes, std::size_t dim,
                       std::uint64_t seed);

// Two interleaved half circles with Gaussian noise, one-hot targets.
Dataset two_moons(std::size_t n, double noise, std::uint64_t seed);

struct PlantedRegression {
  Dataset data;
  DeepOptEqModel teacher;  // attains zero loss when noise = 0
};

// Targets produced by a hidden contraction model evaluated at its
// equilibrium, plus optional additive noise.
PlantedRegression planted_regression(std::size_t n, std::size_t x_dim,
                                     std::size_t hidden, std::size_t depth,
                                     std::size_t y_dim, const Activation& act,
                                     double noise, std::uint64_t seed);

}  // namespace opteq
