#include "orlicz/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "orlicz/rng.hpp"

namespace orlicz {

namespace rng {

std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(mix(seed, counter) >> 11) * 0x1.0p-53;
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return mix(seed, tag);
}

std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = 1.0 - unit(seed, 2 * counter);  // (0, 1]
  const double u2 = unit(seed, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace rng

double delta_main(std::size_t n, double alpha) {
  if (n < 3) {
    throw std::invalid_argument("delta_main: n must be >= 3");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("delta_main: alpha must be > 0");
  }
  const double d =
      1.0 / (std::exp(1.0) * std::pow(std::log(static_cast<double>(n)), alpha + 1.0));
  return std::min(d, 1.0);
}

double delta_power(std::size_t n, double rho) {
  if (n < 3) {
    throw std::invalid_argument("delta_power: n must be >= 3");
  }
  if (!(rho > 0.0)) {
    throw std::invalid_argument("delta_power: rho must be > 0");
  }
  const double d = std::pow(std::log(static_cast<double>(n)), -rho);
  return std::min(d, 1.0);
}

IndexSet bernoulli_subset(std::size_t n, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("bernoulli_subset: delta must lie in [0, 1]");
  }
  IndexSet set;
  set.n = n;
  set.delta = delta;
  set.seed = seed;
  for (std::size_t i = 1; i <= n; ++i) {
    if (rng::unit(seed, i) < delta) {
      set.indices.push_back(i);
    }
  }
  return set;
}

std::vector<std::size_t> IndexSet::zero_based() const {
  std::vector<std::size_t> out(indices.size());
  for (std::size_t t = 0; t < indices.size(); ++t) out[t] = indices[t] - 1;
  return out;
}

nlohmann::json IndexSet::to_json() const {
  return nlohmann::json{{"n", n}, {"delta", delta}, {"seed", seed}, {"indices", indices}};
}

IndexSet IndexSet::from_json(const nlohmann::json& j) {
  IndexSet set;
  set.n = j.at("n").get<std::size_t>();
  set.delta = j.at("delta").get<double>();
  set.seed = j.at("seed").get<std::uint64_t>();
  set.indices = j.at("indices").get<std::vector<std::size_t>>();
  std::size_t prev = 0;
  for (std::size_t i : set.indices) {
    if (i == 0 || i > set.n || i <= prev) {
      throw std::invalid_argument("IndexSet: indices must be strictly increasing in [1, n]");
    }
    prev = i;
  }
  return set;
}

}  // namespace orlicz
