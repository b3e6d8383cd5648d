// Young function families: evaluation, derivatives, numeric axiom checks.
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orlicz {

enum class YoungFamily { power, close2, ryou, kashin_g };

// One Young function. close2 and ryou are piecewise with a quadratic head
// below the junction u0; kashin_g is the ratio-of-logs weight. Natural
// logarithm throughout.
class YoungSpec {
 public:
  // Phi(u) = u^2 for u < e, u^2 (ln u)^alpha for u >= e. Junction u0 = e,
  // c = 1 gives continuity and an upward derivative jump (2e -> (2+alpha)e).
  static YoungSpec close2(double alpha);

  // Phi(u) = u^p, p >= 1. Young for all p >= 1; nice only for p > 1.
  static YoungSpec power(double p);

  // Phi(u) = c u^2 for u < e, u^p (ln u)^{alpha p} for u >= e, with
  // c = e^{p-2} forcing continuity at the junction. Requires p > 2.
  static YoungSpec ryou(double p, double alpha);

  // G_alpha(u) = u^2 ln^alpha(e+u) / ln^alpha(e+1/u), G_alpha(0) = 0.
  // Convexity is established in the literature for alpha > 1/2 only, so
  // smaller alpha is rejected.
  static YoungSpec kashin_g(double alpha);

  // "close2:alpha=1.0", "power:p=2", "ryou:p=3,alpha=0.5", "kashinG:alpha=1".
  static YoungSpec parse(std::string_view text);

  double eval(double u) const;
  // Right-derivative at the junction for the piecewise families.
  double deriv(double u) const;

  YoungFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double p() const { return p_; }
  double u0() const { return u0_; }
  double c() const { return c_; }
  std::string to_string() const;

 private:
  YoungSpec() = default;
  YoungFamily family_ = YoungFamily::power;
  double alpha_ = 0.0;
  double p_ = 0.0;
  double u0_ = 0.0;
  double c_ = 0.0;
};

struct ValidationReport {
  bool zero_at_zero = false;
  bool increasing = false;
  bool convex = false;          // derivative nondecreasing along the grid
  bool nice_at_zero = false;    // Phi(u)/u small at the grid minimum
  bool nice_at_infinity = false;  // Phi(u)/u large at the grid maximum
  bool all_ok() const {
    return zero_at_zero && increasing && convex && nice_at_zero && nice_at_infinity;
  }
};

// Geometric grid of `points` values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

// Default validation grid: 400 log-spaced points in [1e-6, 1e8].
std::vector<double> default_validation_grid();

// Scans the grid (strictly increasing, positive) for the Young axioms.
// Reports flags; never throws on a failed flag.
ValidationReport young_validate(const YoungSpec& spec, std::span<const double> grid);

}  // namespace orlicz
