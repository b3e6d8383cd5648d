#include "orlicz/space.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orlicz {

ProbSpace::ProbSpace(std::vector<double> weights,
                     std::optional<std::vector<double>> coordinates)
    : weights_(std::move(weights)), coords_(std::move(coordinates)) {
  if (weights_.empty()) {
    throw std::invalid_argument("ProbSpace: needs at least one atom");
  }
  CompensatedSum total;
  for (double w : weights_) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("ProbSpace: negative or NaN weight");
    }
    total.add(w);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw std::invalid_argument("ProbSpace: weights must sum to 1 within 1e-12");
  }
  if (coords_) {
    if (coords_->size() != weights_.size()) {
      throw std::invalid_argument("ProbSpace: coordinate count mismatch");
    }
    for (double x : *coords_) {
      if (!(x >= 0.0 && x < 1.0)) {
        throw std::invalid_argument("ProbSpace: coordinates must lie in [0,1)");
      }
    }
  }
}

ProbSpace ProbSpace::uniform_grid(std::size_t m) {
  if (m == 0) {
    throw std::invalid_argument("uniform_grid: M must be positive");
  }
  std::vector<double> w(m, 1.0 / static_cast<double>(m));
  std::vector<double> x(m);
  for (std::size_t j = 0; j < m; ++j) {
    x[j] = static_cast<double>(j) / static_cast<double>(m);
  }
  return ProbSpace(std::move(w), std::move(x));
}

const std::vector<double>& ProbSpace::coordinates() const {
  if (!coords_) {
    throw std::logic_error("ProbSpace: no coordinates attached");
  }
  return *coords_;
}

Func constant_func(const ProbSpace& space, cplx value) {
  return Func{std::vector<cplx>(space.atom_count(), value)};
}

namespace {

void check_match(const ProbSpace& space, const Func& f, const char* who) {
  if (f.values.size() != space.atom_count()) {
    throw std::invalid_argument(std::string(who) + ": function/space length mismatch");
  }
}

}  // namespace

cplx expectation(const ProbSpace& space, const Func& g) {
  check_match(space, g, "expectation");
  CompensatedSum re, im;
  const auto& w = space.weights();
  for (std::size_t j = 0; j < w.size(); ++j) {
    re.add(w[j] * g.values[j].real());
    im.add(w[j] * g.values[j].imag());
  }
  return {re.value(), im.value()};
}

double lp_norm(const ProbSpace& space, const Func& f, double p) {
  check_match(space, f, "lp_norm");
  if (!(p >= 1.0)) {
    throw std::invalid_argument("lp_norm: order must satisfy p >= 1");
  }
  const auto& w = space.weights();
  if (p == kInfinity) {
    double m = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] > 0.0) {
        m = std::max(m, std::abs(f.values[j]));
      }
    }
    return m;
  }
  CompensatedSum acc;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double a = std::abs(f.values[j]);
    if (w[j] == 0.0 || a == 0.0) continue;
    acc.add(w[j] * (p == 2.0 ? a * a : std::pow(a, p)));
  }
  const double s = acc.value();
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

cplx inner_product(const ProbSpace& space, const Func& f, const Func& g) {
  check_match(space, f, "inner_product");
  check_match(space, g, "inner_product");
  CompensatedSum re, im;
  const auto& w = space.weights();
  for (std::size_t j = 0; j < w.size(); ++j) {
    const cplx t = f.values[j] * std::conj(g.values[j]);
    re.add(w[j] * t.real());
    im.add(w[j] * t.imag());
  }
  return {re.value(), im.value()};
}

Func read_func_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("read_func_csv: cannot open " + path);
  }
  Func f;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &re, &im) != 2) {
      throw std::invalid_argument("read_func_csv: bad row " + std::to_string(lineno) +
                                  " in " + path);
    }
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw std::invalid_argument("read_func_csv: non-finite value at row " +
                                  std::to_string(lineno));
    }
    f.values.emplace_back(re, im);
  }
  if (f.values.empty()) {
    throw std::invalid_argument("read_func_csv: empty file " + path);
  }
  return f;
}

void write_func_csv(const std::string& path, const Func& f) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("write_func_csv: cannot open " + path);
  }
  char buf[80];
  for (const cplx& v : f.values) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", v.real(), v.imag());
    out << buf;
  }
}

}  // namespace orlicz
