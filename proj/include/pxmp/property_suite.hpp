#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pxmp/exponent.hpp"
#include "pxmp/mesh.hpp"

namespace pxmp {

/// Outcome of one named check of a randomized property suite.
struct PropertyCheck {
  std::string suite;
  std::string check;
  int draws = 0;
  int failures = 0;
  double worst_slack = 0.0;  // smallest margin by which the bound held (negative = violated)
  bool pass() const { return failures == 0; }
};

/// Random exponent field with p- > 1.5 (constant, affine or sinusoidal).
ExponentField random_exponent(const Mesh& m, std::mt19937_64& rng);

/// Random zero-trace function, magnitudes log-uniform across 10^-2..10^2 so
/// both branches of the norm-modular sandwich get exercised.
FeFunction random_zero_trace(const Mesh& m, std::mt19937_64& rng);

/// The randomized function-space suite on one mesh: norm axioms
/// (homogeneity, triangle, definiteness), unit-sphere identity, modular
/// monotonicity, norm-modular sandwich and the Hoelder bound with c = 2.
std::vector<PropertyCheck> run_function_space_suite(const Mesh& m, int draws, std::uint64_t seed);

}  // namespace pxmp
