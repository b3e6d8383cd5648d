// Finite probability spaces and complex-valued functions on their atoms.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orlicz {

using cplx = std::complex<double>;

// Order parameter value selecting the sup norm in lp_norm.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Raised when an iteration stalls or a bracket cannot be established.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kahan-Babuska (Neumaier) compensated accumulator. Weighted sums over up
// to ~1e6 atoms must hold ~1e-12 relative accuracy.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Atoms with nonnegative weights summing to one. Spaces built on the unit
// interval carry per-atom coordinates in [0,1).
class ProbSpace {
 public:
  ProbSpace(std::vector<double> weights,
            std::optional<std::vector<double>> coordinates = std::nullopt);

  // M atoms of weight 1/M at x_j = j/M. Left endpoints keep discrete
  // Fourier orthogonality exact for distinct frequencies mod M.
  static ProbSpace uniform_grid(std::size_t m);

  std::size_t atom_count() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  bool has_coordinates() const { return coords_.has_value(); }
  const std::vector<double>& coordinates() const;

 private:
  std::vector<double> weights_;
  std::optional<std::vector<double>> coords_;
};

// One complex value per atom of some ProbSpace.
struct Func {
  std::vector<cplx> values;
};

Func constant_func(const ProbSpace& space, cplx value);

// E[g] = sum_j w_j g_j.
cplx expectation(const ProbSpace& space, const Func& g);

// (E|f|^p)^{1/p}; p = kInfinity gives the max of |f_j| over atoms of
// positive weight.
double lp_norm(const ProbSpace& space, const Func& f, double p);

// sum_j w_j f_j conj(g_j).
cplx inner_product(const ProbSpace& space, const Func& f, const Func& g);

// CSV with two columns re,im, one row per atom, no header.
Func read_func_csv(const std::string& path);
void write_func_csv(const std::string& path, const Func& f);

}  // namespace orlicz
