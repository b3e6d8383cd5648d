// Seeded Bernoulli index selection and the selection-density formulas.
#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace orlicz {

// Result of one Bernoulli draw over [1, n]. The same (n, delta, seed)
// reproduces the identical set on any platform (see rng.hpp for the pinned
// generator; index i is decided by counter i).
struct IndexSet {
  std::vector<std::size_t> indices;  // 1-based, strictly increasing
  std::size_t n = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> zero_based() const;
  nlohmann::json to_json() const;  // {"n":.., "delta":.., "seed":.., "indices":[..]}
  static IndexSet from_json(const nlohmann::json& j);
};

// 1 / (e ln^{alpha+1} n), clamped to 1. Requires n >= 3 so ln n > 1.
double delta_main(std::size_t n, double alpha);

// (ln n)^{-rho}, clamped to 1. Requires n >= 3.
double delta_power(std::size_t n, double rho);

// Include each index of [1, n] independently with probability delta.
IndexSet bernoulli_subset(std::size_t n, double delta, std::uint64_t seed);

}  // namespace orlicz
