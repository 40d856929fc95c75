#include "csiloc/rng.hpp"

namespace csiloc {

namespace {

// splitmix64 finalizer; standard mixing for seed derivation.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index) {
  return mix(mix(master ^ fnv1a(label)) ^ index);
}

std::complex<double> complex_gaussian(std::mt19937_64& eng) {
  // Real part drawn before imaginary part; the order is part of the
  // reproducibility contract.
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(eng);
  const double im = normal(eng);
  return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
}

}  // namespace csiloc
