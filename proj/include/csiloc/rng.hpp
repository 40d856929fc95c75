#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace csiloc {

/// Derives a child seed from a master seed and a stream label, so that every
/// stochastic stage of a run (scene geometry, hidden weights, noise, ...) is
/// independently reproducible from the one seed recorded in the config.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
std::complex<double> complex_gaussian(std::mt19937_64& eng);

}  // namespace csiloc
