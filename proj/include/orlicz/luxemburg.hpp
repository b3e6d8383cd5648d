// Luxemburg norm solver and its coefficient gradient.
#pragma once

#include <span>
#include <vector>

#include "orlicz/space.hpp"
#include "orlicz/systems.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct NormResult {
  double value = 0.0;            // feasible endpoint of the final bracket
  double modular_at_value = 0.0; // E[Phi(|f|/value)], <= 1 by construction
  int iterations = 0;
  double lo = 0.0;               // final bracket, lo <= value <= hi
  double hi = 0.0;
};

// E[Phi(|f|/k)].
double modular(const ProbSpace& space, const YoungSpec& spec, const Func& f, double k);
double modular(const ProbSpace& space, const YoungSpec& spec,
               std::span<const cplx> values, double k);

// inf{k > 0 : E[Phi(|f|/k)] <= 1} by bracketing from ||f||_2 and bisecting;
// the modular is monotone and continuous on a finite space, so this is
// globally convergent. f identically zero (on positive-weight atoms)
// returns 0. rel_tol must lie in (0, 1e-2].
NormResult luxemburg_norm(const ProbSpace& space, const YoungSpec& spec,
                          const Func& f, double rel_tol = 1e-10);
NormResult luxemburg_norm(const ProbSpace& space, const YoungSpec& spec,
                          std::span<const cplx> values, double rel_tol = 1e-10);

// Gradient of a -> ||sum_t a_t phi_{subset[t]}||_Phi with respect to
// (Re a_t, Im a_t), interleaved: out[2t] = d/dRe, out[2t+1] = d/dIm.
// Implicit differentiation of E[Phi(|f_a|/k)] = 1 at k = k*(a); atoms where
// f_a vanishes contribute zero. Requires f_a != 0. A positive k_hint is
// taken as the already-solved norm and skips the internal solve.
std::vector<double> luxemburg_gradient(const YoungSpec& spec, const System& sys,
                                       std::span<const std::size_t> subset,
                                       std::span<const cplx> coeffs,
                                       double rel_tol = 1e-12,
                                       double k_hint = 0.0);

namespace detail {

// Preprocessed modular evaluations for repeated k on one function. For the
// piecewise-quadratic families (close2, ryou) the atoms are grouped into
// binary-exponent buckets of |f| with compensated quadratic suffix sums:
// an evaluation pays the log terms only on the buckets at or above the
// junction cutoff and reads the quadratic head from the sums. Other
// families use the plain per-atom loop. Buffers come from a thread-local
// pool, so repeated evaluations do not churn the allocator.
class ModularEvaluator {
 public:
  ModularEvaluator(const ProbSpace& space, const YoungSpec& spec,
                   std::span<const cplx> values);
  ~ModularEvaluator();
  ModularEvaluator(const ModularEvaluator&) = delete;
  ModularEvaluator& operator=(const ModularEvaluator&) = delete;

  double operator()(double k) const;
  double max_abs() const { return max_abs_; }  // over positive weights
  double l2() const { return l2_; }            // weighted L2 norm
  bool essentially_zero() const { return max_abs_ == 0.0; }

  struct Buffers;

 private:
  static constexpr int kBuckets = 64;

  const YoungSpec& spec_;
  bool bucketed_ = false;
  Buffers* buf_ = nullptr;     // pooled; a/w grouped by bucket when bucketed_
  std::size_t count_ = 0;      // kept atoms (positive weight, nonzero value)
  int e_max_ = 0;              // binary exponent of max_abs_
  std::size_t offsets_[kBuckets + 1] = {};
  double suffix_sq_[kBuckets + 1] = {};  // sum of w|f|^2 over buckets >= b
  double max_abs_ = 0.0;
  double l2_ = 0.0;
};

}  // namespace detail

}  // namespace orlicz
