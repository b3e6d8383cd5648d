#include "orlicz/young.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace orlicz {

namespace {

const double kE = std::exp(1.0);

// Hot path of the modular sums; the common exponents skip libm pow.
inline double pow_fast(double base, double e) {
  if (e == 1.0) return base;
  if (e == 2.0) return base * base;
  if (e == 0.5) return std::sqrt(base);
  if (e == 0.0) return 1.0;
  if (e == 3.0) return base * base * base;
  if (e == 1.5) return base * std::sqrt(base);
  return std::pow(base, e);
}

void require_nonnegative_arg(double u) {
  if (!(u >= 0.0)) {
    throw std::invalid_argument("Young function argument must be >= 0");
  }
}

double parse_named_value(std::string_view text, std::string_view key) {
  const std::string pat = std::string(key) + "=";
  const auto pos = text.find(pat);
  if (pos == std::string_view::npos) {
    throw std::invalid_argument("YoungSpec::parse: missing parameter '" +
                                std::string(key) + "' in '" + std::string(text) + "'");
  }
  const std::string rest(text.substr(pos + pat.size()));
  try {
    return std::stod(rest);
  } catch (const std::exception&) {
    throw std::invalid_argument("YoungSpec::parse: bad value for '" +
                                std::string(key) + "' in '" + std::string(text) + "'");
  }
}

}  // namespace

YoungSpec YoungSpec::close2(double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("close2: alpha must be > 0");
  }
  YoungSpec s;
  s.family_ = YoungFamily::close2;
  s.alpha_ = alpha;
  s.p_ = 2.0;
  s.u0_ = kE;
  s.c_ = 1.0;
  return s;
}

YoungSpec YoungSpec::power(double p) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("power: p must be >= 1");
  }
  YoungSpec s;
  s.family_ = YoungFamily::power;
  s.p_ = p;
  return s;
}

YoungSpec YoungSpec::ryou(double p, double alpha) {
  if (!(p > 2.0)) {
    throw std::invalid_argument("ryou: p must be > 2");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("ryou: alpha must be > 0");
  }
  YoungSpec s;
  s.family_ = YoungFamily::ryou;
  s.alpha_ = alpha;
  s.p_ = p;
  s.u0_ = kE;
  s.c_ = std::exp(p - 2.0);  // c e^2 = e^p joins the pieces
  return s;
}

YoungSpec YoungSpec::kashin_g(double alpha) {
  if (!(alpha > 0.5)) {
    throw std::invalid_argument("kashinG: alpha must be > 1/2");
  }
  YoungSpec s;
  s.family_ = YoungFamily::kashin_g;
  s.alpha_ = alpha;
  return s;
}

YoungSpec YoungSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view family = text.substr(0, colon);
  const std::string_view args =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (family == "close2") return close2(parse_named_value(args, "alpha"));
  if (family == "power") return power(parse_named_value(args, "p"));
  if (family == "ryou") {
    return ryou(parse_named_value(args, "p"), parse_named_value(args, "alpha"));
  }
  if (family == "kashinG") return kashin_g(parse_named_value(args, "alpha"));
  throw std::invalid_argument("YoungSpec::parse: unknown family in '" +
                              std::string(text) + "'");
}

double YoungSpec::eval(double u) const {
  require_nonnegative_arg(u);
  switch (family_) {
    case YoungFamily::power:
      return pow_fast(u, p_);
    case YoungFamily::close2:
      if (u < u0_) return c_ * u * u;
      return u * u * pow_fast(std::log(u), alpha_);
    case YoungFamily::ryou:
      if (u < u0_) return c_ * u * u;
      return pow_fast(u, p_) * pow_fast(std::log(u), alpha_ * p_);
    case YoungFamily::kashin_g: {
      if (u == 0.0) return 0.0;
      const double num = std::log(kE + u);
      const double den = std::log(kE + 1.0 / u);
      return u * u * pow_fast(num / den, alpha_);
    }
  }
  throw std::logic_error("YoungSpec::eval: bad family");
}

double YoungSpec::deriv(double u) const {
  require_nonnegative_arg(u);
  switch (family_) {
    case YoungFamily::power:
      if (p_ == 1.0) return 1.0;
      return p_ * pow_fast(u, p_ - 1.0);
    case YoungFamily::close2: {
      if (u < u0_) return 2.0 * c_ * u;
      const double L = std::log(u);
      return 2.0 * u * pow_fast(L, alpha_) + alpha_ * u * pow_fast(L, alpha_ - 1.0);
    }
    case YoungFamily::ryou: {
      if (u < u0_) return 2.0 * c_ * u;
      const double L = std::log(u);
      const double ap = alpha_ * p_;
      return p_ * pow_fast(u, p_ - 1.0) * pow_fast(L, ap) +
             ap * pow_fast(u, p_ - 1.0) * pow_fast(L, ap - 1.0);
    }
    case YoungFamily::kashin_g: {
      if (u == 0.0) return 0.0;
      const double A = std::log(kE + u);
      const double B = std::log(kE + 1.0 / u);
      const double ratio = pow_fast(A / B, alpha_);
      double d = 2.0 * u * ratio;
      d += u * u * alpha_ * pow_fast(A, alpha_ - 1.0) / (pow_fast(B, alpha_) * (kE + u));
      d += alpha_ * pow_fast(A, alpha_) / (pow_fast(B, alpha_ + 1.0) * (kE + 1.0 / u));
      return d;
    }
  }
  throw std::logic_error("YoungSpec::deriv: bad family");
}

std::string YoungSpec::to_string() const {
  char buf[96];
  switch (family_) {
    case YoungFamily::power:
      std::snprintf(buf, sizeof(buf), "power:p=%g", p_);
      break;
    case YoungFamily::close2:
      std::snprintf(buf, sizeof(buf), "close2:alpha=%g", alpha_);
      break;
    case YoungFamily::ryou:
      std::snprintf(buf, sizeof(buf), "ryou:p=%g,alpha=%g", p_, alpha_);
      break;
    case YoungFamily::kashin_g:
      std::snprintf(buf, sizeof(buf), "kashinG:alpha=%g", alpha_);
      break;
  }
  return buf;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw std::invalid_argument("log_grid: need 0 < lo < hi and points >= 2");
  }
  std::vector<double> g(points);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo * std::exp(ratio * static_cast<double>(i) /
                         static_cast<double>(points - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_validation_grid() { return log_grid(1e-6, 1e8, 400); }

ValidationReport young_validate(const YoungSpec& spec, std::span<const double> grid) {
  if (grid.empty()) {
    throw std::invalid_argument("young_validate: empty grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw std::invalid_argument("young_validate: grid must be positive and strictly increasing");
    }
  }

  ValidationReport r;
  r.zero_at_zero = (spec.eval(0.0) == 0.0);

  r.increasing = true;
  double prev = spec.eval(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = spec.eval(grid[i]);
    if (cur < prev * (1.0 - 1e-12)) {
      r.increasing = false;
      break;
    }
    prev = cur;
  }
  if (!(spec.eval(grid.back()) > spec.eval(grid.front()))) r.increasing = false;

  r.convex = true;
  double dprev = spec.deriv(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double dcur = spec.deriv(grid[i]);
    if (dcur - dprev < -1e-9 * std::max(1.0, std::abs(dcur))) {
      r.convex = false;
      break;
    }
    dprev = dcur;
  }

  r.nice_at_zero = (spec.eval(grid.front()) / grid.front() < 1e-3);
  r.nice_at_infinity = (spec.eval(grid.back()) / grid.back() > 1e3);
  return r;
}

}  // namespace orlicz
