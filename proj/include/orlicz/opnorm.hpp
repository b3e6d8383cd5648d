// Operator-norm estimation on random subsystems: certified lower bounds by
// projected gradient ascent on the coefficient sphere, the exact quadratic
// case via power iteration, and a sphere-sampling oracle for tiny subsets.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "orlicz/luxemburg.hpp"
#include "orlicz/systems.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct SingularPair {
  double value = 0.0;
  std::vector<cplx> vector;  // unit l2 coefficient vector
  int iterations = 0;
};

// Top singular value/vector of a -> (sqrt(w_j) sum_t a_t phi(x_j))_j by
// power iteration on the Gram operator (one synthesize + one analyze per
// step, never forming the matrix).
SingularPair l2_top_singular(const System& sys, std::span<const std::size_t> subset,
                             double tol = 1e-10);

struct AscentConfig {
  int restarts = 8;
  int max_iters = 500;
  double tol = 1e-8;
  double init_step = 0.5;
  double backtrack = 0.5;
  std::uint64_t seed = 0;
  double norm_rel_tol = 1e-10;
};

struct OpNormEstimate {
  double value = 0.0;          // certified: the Luxemburg norm at argmax
  std::vector<cplx> argmax;    // unit l2, first nonzero coordinate real positive
  int restarts_used = 0;
  bool converged = false;      // best restart met the tolerance before the cap
};

// Maximizes ||sum_t a_t phi||_Phi over the unit coefficient sphere:
// projected gradient ascent with backtracking line search, initialized once
// from l2_top_singular and otherwise from seeded random directions. The
// returned value re-evaluates the norm at argmax, so it is always a valid
// lower bound on the true operator norm.
OpNormEstimate opnorm_ascent(const YoungSpec& spec, const System& sys,
                             std::span<const std::size_t> subset,
                             const AscentConfig& cfg = {});

// Max of the norm over `samples` random unit coefficient vectors plus the
// ascent output as a candidate. Only for |subset| <= 3.
double opnorm_bruteforce(const YoungSpec& spec, const System& sys,
                         std::span<const std::size_t> subset, std::size_t samples,
                         std::uint64_t seed, int threads = 1);

}  // namespace orlicz
