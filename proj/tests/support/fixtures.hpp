#pragma once
// Shared test fixtures: small valid decompositions and seeded generators.

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "strebel/surface.hpp"

namespace fixtures {

// A necklace of k cylinders: side 2 of each glued to side 1 of the next,
// wrapping around.  All circumferences 1.  One puncture and one simple zero
// keep the counting checks happy for any k.
inline strebel::CylinderDecomposition necklace(const std::vector<double>& moduli) {
  strebel::CylinderDecomposition s;
  s.genus = 1;
  s.punctures = 1;
  const std::size_t k = moduli.size();
  for (std::size_t i = 0; i < k; ++i)
    s.cylinders.push_back({"C" + std::to_string(i), 1.0, moduli[i]});
  for (std::size_t i = 0; i < k; ++i) {
    const auto& a = s.cylinders[i].label;
    const auto& b = s.cylinders[(i + 1) % k].label;
    s.gluings.push_back({{a, 2, 0.0, 1.0}, {b, 1, 0.0, 1.0}});
  }
  s.critical_points = {{-1}, {1}};
  return s;
}

// The one-cylinder square torus with a marked puncture.
inline strebel::CylinderDecomposition torus(double modulus = 1.0) {
  return necklace({modulus});
}

// Two necklaces over the same labels, checked similar, with the given end
// distance attached.
inline strebel::SimilarPair matched_pair(const std::vector<double>& left,
                                         const std::vector<double>& right,
                                         double end_distance) {
  auto outcome = strebel::check_similar(necklace(left), necklace(right));
  auto& pair = std::get<strebel::SimilarPair>(outcome);
  pair.end_distance = end_distance;
  return pair;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace fixtures
