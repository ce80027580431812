#pragma once

// Deterministic test-function families: random simple functions for property
// tests, dyadically sampled power-log profiles that sit near the boundary of
// a target space, and pre-drawn spike/bump data descriptors for grid
// experiments (drawn once, realizable at any resolution).

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "rearrange.hpp"
#include "solver.hpp"

namespace rispace {

SimpleFunction random_simple(std::mt19937_64& rng, int max_pieces = 12);
std::vector<SimpleFunction> random_simple_family(std::uint64_t seed, int count,
                                                 int max_pieces = 12);

// Dyadic sampling of t^{-gamma} (1 - log t)^{lambda} on (0, 1], capped on the
// first dyadic interval; decreasing for lambda >= 0, near-decreasing otherwise.
SimpleFunction power_log_profile(double gamma, double lambda, int pieces = 40);

// Graded tail exponents climbing toward gamma_max (exclusive), with cycling
// logarithmic twists; stresses a space whose finiteness boundary is gamma_max.
std::vector<SimpleFunction> power_log_family(double gamma_max, int count);

struct SpikeSpec {
  std::array<double, 2> x0{0.5, 0.5};
  double gamma = 1.0;
  double amp = 1.0;
};

struct BumpSpec {
  std::array<double, 2> x0{0.5, 0.5};
  double width = 0.1;
  double amp = 1.0;
};

// f(x) = Σ amp · min(cap_radius^{-gamma}, |x-x0|^{-gamma}) + Σ amp · e^{-|x-x0|²/w²}.
// An empty descriptor realizes the constant 1.
struct DataDescriptor {
  std::vector<SpikeSpec> spikes;
  std::vector<BumpSpec> bumps;
  double cap_radius = 0.02;

  GridFunction realize(const Grid& g) const;
};

void to_json(nlohmann::json& j, const DataDescriptor& d);
void from_json(const nlohmann::json& j, DataDescriptor& d);

// 1-3 spikes with tail exponents in [gamma_lo, gamma_hi], away from the
// domain boundary, plus 1-2 smooth bumps.
DataDescriptor draw_descriptor(std::mt19937_64& rng, int dim, double gamma_lo,
                               double gamma_hi);

}  // namespace rispace
