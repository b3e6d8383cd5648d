// Bounded orthogonal systems: Fourier characters, Walsh functions,
// user-supplied families, with synthesis/analysis transforms.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orlicz/space.hpp"

namespace orlicz {

inline constexpr double kDefaultP1 = 4.0;

struct SystemStats {
  double S = 0.0;                // max_i ||phi_i||_{p1}
  double max_ortho_defect = 0.0; // max_{i != j} |<phi_i, phi_j>|
  double max_sup = 0.0;          // max_i ||phi_i||_inf
};

// Ordered family (phi_i)_{i=1..n} on a shared ProbSpace. Fourier systems
// on uniform grids store only the phase table and frequency list; rows
// materialize on demand, and synthesis/analysis go through an FFT when the
// grid size is a power of two. Dense systems store their values.
//
// Construction computes the validation statistics (S, max_sup and, except
// on the aliased sharpness grids, max_ortho_defect); no constructor throws
// on an orthogonality defect — callers gate on the recorded stats.
class System {
 public:
  // Characters phi_k(x_j) = exp(-2 pi i k j / M), k = 1..n, on the uniform
  // M-grid. Requires M >= 2n so frequencies stay distinct mod M.
  static System fourier(std::size_t n, std::size_t grid_m, double p1 = kDefaultP1);

  // Same characters without the M >= 2n requirement. Frequencies above the
  // grid bandwidth alias, so global pairwise orthogonality is not measured
  // (max_ortho_defect is NaN). Intended for block-local use where only
  // contiguous runs of fewer than M frequencies are ever combined.
  static System fourier_aliased(std::size_t n, std::size_t grid_m,
                                double p1 = kDefaultP1);

  // All 2^d - 1 nonempty Walsh characters (products of Rademacher bits) on
  // the uniform space of 2^d atoms; values are +-1.
  static System walsh(unsigned d, double p1 = kDefaultP1);

  static System from_functions(ProbSpace space, std::vector<Func> functions,
                               double p1 = kDefaultP1);

  // CSV: row j holds atom j's values as interleaved re,im pairs for
  // phi_1..phi_n; the space is the uniform grid implied by the row count.
  static System load_csv(const std::string& path, double p1 = kDefaultP1);

  std::size_t size() const { return n_; }
  const ProbSpace& space() const { return space_; }
  bool fourier_structured() const { return !freqs_.empty(); }

  Func function(std::size_t i) const;  // 0-based

  // f(x_j) = sum_t coeffs[t] * phi_{subset[t]}(x_j). Subset entries are
  // 0-based positions into the system.
  std::vector<cplx> synthesize(std::span<const cplx> coeffs,
                               std::span<const std::size_t> subset) const;

  // out[t] = <g, phi_{subset[t]}> = sum_j w_j g_j conj(phi(x_j)).
  std::vector<cplx> analyze(std::span<const cplx> g,
                            std::span<const std::size_t> subset) const;

  double S() const { return stats_.S; }
  double max_sup() const { return stats_.max_sup; }
  double max_ortho_defect() const { return stats_.max_ortho_defect; }
  bool orthogonality_measured() const { return ortho_measured_; }
  double p1() const { return p1_; }

 private:
  System(ProbSpace space, double p1);
  static System fourier_impl(std::size_t n, std::size_t grid_m, double p1,
                             bool check_orthogonality);
  void fill_row(std::size_t i, std::vector<cplx>& out) const;
  void compute_stats(bool measure_orthogonality);

  ProbSpace space_;
  std::size_t n_ = 0;
  double p1_ = kDefaultP1;
  std::vector<Func> funcs_;              // dense storage (empty for Fourier)
  std::vector<std::size_t> freqs_;       // Fourier frequencies (empty for dense)
  std::vector<cplx> phase_table_;        // e^{-2 pi i t / M}, t = 0..M-1
  SystemStats stats_;
  bool ortho_measured_ = false;
};

// Recomputes the three statistics by direct O(n^2 M) summation. Never
// throws on a violation; callers gate. p1 > 2 required.
SystemStats validate_system(const System& sys, double p1);

}  // namespace orlicz
