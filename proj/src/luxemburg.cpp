#include "orlicz/luxemburg.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace orlicz {

namespace detail {

// Scratch arrays for one evaluator, recycled through a thread-local pool.
struct ModularEvaluator::Buffers {
  std::vector<double> a_raw, w_raw;  // kept atoms in input order
  std::vector<double> a, w;          // grouped by bucket
};

namespace {

thread_local std::vector<std::unique_ptr<ModularEvaluator::Buffers>> t_buffer_pool;

ModularEvaluator::Buffers* acquire_buffers() {
  if (!t_buffer_pool.empty()) {
    ModularEvaluator::Buffers* b = t_buffer_pool.back().release();
    t_buffer_pool.pop_back();
    return b;
  }
  return new ModularEvaluator::Buffers;
}

void release_buffers(ModularEvaluator::Buffers* b) {
  if (b != nullptr) {
    t_buffer_pool.emplace_back(b);
  }
}

}  // namespace

ModularEvaluator::ModularEvaluator(const ProbSpace& space, const YoungSpec& spec,
                                   std::span<const cplx> values)
    : spec_(spec) {
  if (values.size() != space.atom_count()) {
    throw std::invalid_argument("ModularEvaluator: function/space length mismatch");
  }
  buf_ = acquire_buffers();
  const auto& w = space.weights();
  const std::size_t atoms = values.size();
  buf_->a_raw.clear();
  buf_->w_raw.clear();
  buf_->a_raw.reserve(atoms);
  buf_->w_raw.reserve(atoms);
  CompensatedSum sq;
  for (std::size_t j = 0; j < atoms; ++j) {
    const double a = std::abs(values[j]);
    if (!std::isfinite(a)) {
      release_buffers(buf_);
      buf_ = nullptr;
      throw std::invalid_argument("ModularEvaluator: non-finite function value");
    }
    if (w[j] == 0.0 || a == 0.0) continue;
    buf_->a_raw.push_back(a);
    buf_->w_raw.push_back(w[j]);
    max_abs_ = std::max(max_abs_, a);
    sq.add(w[j] * a * a);
  }
  count_ = buf_->a_raw.size();
  l2_ = std::sqrt(std::max(0.0, sq.value()));

  bucketed_ =
      (spec.family() == YoungFamily::close2 || spec.family() == YoungFamily::ryou) &&
      count_ > 0;
  if (!bucketed_) return;

  // Group by binary exponent, largest values in bucket 0. Bucket b holds
  // |f| with ilogb in (e_max - b - 1, e_max - b]; everything tinier lands
  // in the last bucket.
  e_max_ = std::ilogb(max_abs_);
  const auto bucket_of = [this](double a) {
    const int q = e_max_ - std::ilogb(a);
    return static_cast<std::size_t>(std::clamp(q, 0, kBuckets - 1));
  };
  std::size_t counts[kBuckets] = {};
  for (std::size_t t = 0; t < count_; ++t) ++counts[bucket_of(buf_->a_raw[t])];
  offsets_[0] = 0;
  for (int b = 0; b < kBuckets; ++b) offsets_[b + 1] = offsets_[b] + counts[b];
  buf_->a.resize(count_);
  buf_->w.resize(count_);
  std::size_t cursor[kBuckets];
  std::copy(offsets_, offsets_ + kBuckets, cursor);
  for (std::size_t t = 0; t < count_; ++t) {
    const std::size_t pos = cursor[bucket_of(buf_->a_raw[t])]++;
    buf_->a[pos] = buf_->a_raw[t];
    buf_->w[pos] = buf_->w_raw[t];
  }
  CompensatedSum run;
  suffix_sq_[kBuckets] = 0.0;
  for (int b = kBuckets - 1; b >= 0; --b) {
    for (std::size_t t = offsets_[b]; t < offsets_[b + 1]; ++t) {
      run.add(buf_->w[t] * buf_->a[t] * buf_->a[t]);
    }
    suffix_sq_[b] = run.value();
  }
}

ModularEvaluator::~ModularEvaluator() { release_buffers(buf_); }

double ModularEvaluator::operator()(double k) const {
  if (!(k > 0.0)) {
    throw std::invalid_argument("modular: k must be > 0");
  }
  if (count_ == 0) return 0.0;
  if (!bucketed_) {
    CompensatedSum acc;
    for (std::size_t t = 0; t < count_; ++t) {
      acc.add(buf_->w_raw[t] * spec_.eval(buf_->a_raw[t] / k));
    }
    return acc.value();
  }
  const double cutoff = spec_.u0() * k;
  const double inv_ksq = 1.0 / (k * k);
  if (cutoff > max_abs_) {
    return spec_.c() * suffix_sq_[0] * inv_ksq;  // fully quadratic
  }
  const std::size_t b_cut = static_cast<std::size_t>(
      std::clamp(e_max_ - std::ilogb(cutoff), 0, kBuckets - 1));
  CompensatedSum acc;
  // buckets strictly above the cutoff pay the full Young function
  for (std::size_t t = 0; t < offsets_[b_cut]; ++t) {
    acc.add(buf_->w[t] * spec_.eval(buf_->a[t] / k));
  }
  // boundary bucket splits atom by atom
  CompensatedSum quad;
  for (std::size_t t = offsets_[b_cut]; t < offsets_[b_cut + 1]; ++t) {
    if (buf_->a[t] >= cutoff) {
      acc.add(buf_->w[t] * spec_.eval(buf_->a[t] / k));
    } else {
      quad.add(buf_->w[t] * buf_->a[t] * buf_->a[t]);
    }
  }
  acc.add(spec_.c() * (quad.value() + suffix_sq_[b_cut + 1]) * inv_ksq);
  return acc.value();
}

}  // namespace detail

double modular(const ProbSpace& space, const YoungSpec& spec,
               std::span<const cplx> values, double k) {
  if (!(k > 0.0)) {
    throw std::invalid_argument("modular: k must be > 0");
  }
  if (values.size() != space.atom_count()) {
    throw std::invalid_argument("modular: function/space length mismatch");
  }
  const auto& w = space.weights();
  CompensatedSum acc;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (w[j] == 0.0) continue;
    const double a = std::abs(values[j]);
    if (a == 0.0) continue;
    acc.add(w[j] * spec.eval(a / k));
  }
  return acc.value();
}

double modular(const ProbSpace& space, const YoungSpec& spec, const Func& f,
               double k) {
  return modular(space, spec, std::span<const cplx>(f.values), k);
}

namespace {

constexpr int kMaxBracketSteps = 200;
constexpr int kMaxBisectSteps = 200;

NormResult solve_norm(const detail::ModularEvaluator& eval, double rel_tol) {
  if (!(rel_tol > 0.0) || rel_tol > 1e-2) {
    throw std::invalid_argument("luxemburg_norm: rel_tol must lie in (0, 1e-2]");
  }
  NormResult res;
  if (eval.essentially_zero()) {
    return res;  // every k > 0 is feasible, infimum 0
  }

  int iters = 0;
  double k = std::max(eval.l2(), std::numeric_limits<double>::min());
  double lo = 0.0, hi = 0.0;
  if (eval(k) > 1.0) {
    // double until feasible
    double prev = k;
    bool bracketed = false;
    for (int s = 0; s < kMaxBracketSteps; ++s) {
      ++iters;
      const double next = prev * 2.0;
      if (eval(next) <= 1.0) {
        lo = prev;
        hi = next;
        bracketed = true;
        break;
      }
      prev = next;
    }
    if (!bracketed) {
      throw NumericalError("luxemburg_norm: no feasible k after 200 doublings");
    }
  } else {
    // halve until infeasible
    double prev = k;
    bool bracketed = false;
    for (int s = 0; s < kMaxBracketSteps; ++s) {
      ++iters;
      const double next = prev * 0.5;
      if (next <= 0.0) break;
      if (eval(next) > 1.0) {
        lo = next;
        hi = prev;
        bracketed = true;
        break;
      }
      prev = next;
    }
    if (!bracketed) {
      throw NumericalError("luxemburg_norm: modular stayed <= 1 after 200 halvings");
    }
  }

  for (int s = 0; s < kMaxBisectSteps && (hi - lo) > rel_tol * hi; ++s) {
    ++iters;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (eval(mid) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  res.value = hi;
  res.modular_at_value = eval(hi);
  res.iterations = iters;
  res.lo = lo;
  res.hi = hi;
  return res;
}

}  // namespace

NormResult luxemburg_norm(const ProbSpace& space, const YoungSpec& spec,
                          std::span<const cplx> values, double rel_tol) {
  detail::ModularEvaluator eval(space, spec, values);
  return solve_norm(eval, rel_tol);
}

NormResult luxemburg_norm(const ProbSpace& space, const YoungSpec& spec,
                          const Func& f, double rel_tol) {
  return luxemburg_norm(space, spec, std::span<const cplx>(f.values), rel_tol);
}

std::vector<double> luxemburg_gradient(const YoungSpec& spec, const System& sys,
                                       std::span<const std::size_t> subset,
                                       std::span<const cplx> coeffs,
                                       double rel_tol, double k_hint) {
  if (subset.empty() || coeffs.size() != subset.size()) {
    throw std::invalid_argument("luxemburg_gradient: bad subset/coefficients");
  }
  bool any = false;
  for (const cplx& a : coeffs) {
    if (a != cplx{0.0, 0.0}) {
      any = true;
      break;
    }
  }
  if (!any) {
    throw std::invalid_argument("luxemburg_gradient: zero coefficient vector");
  }

  const ProbSpace& space = sys.space();
  const std::vector<cplx> f = sys.synthesize(coeffs, subset);
  const double k = k_hint > 0.0 ? k_hint : luxemburg_norm(space, spec, f, rel_tol).value;
  if (k == 0.0) {
    throw std::invalid_argument("luxemburg_gradient: synthesized function vanishes a.e.");
  }

  const auto& w = space.weights();
  const std::size_t atoms = f.size();
  // dG/dk = -sum w Phi'(|f|/k) |f| / k^2 < 0 at the norm
  CompensatedSum dgdk_acc;
  std::vector<cplx> psi_conj(atoms, cplx{0.0, 0.0});
  for (std::size_t j = 0; j < atoms; ++j) {
    if (w[j] == 0.0) continue;
    const double a = std::abs(f[j]);
    if (a == 0.0) continue;  // subgradient choice at the modulus kink
    const double dphi = spec.deriv(a / k);
    dgdk_acc.add(w[j] * dphi * a);
    // psi_j = (Phi'/k) conj(f_j)/|f_j|; analyze() conjugates the rows, so
    // feed conj(psi) and conjugate the output.
    psi_conj[j] = std::conj((dphi / k) * std::conj(f[j]) / a);
  }
  const double neg_dgdk = dgdk_acc.value() / (k * k);
  if (!(neg_dgdk > 1e-300) || !std::isfinite(neg_dgdk)) {
    throw NumericalError("luxemburg_gradient: modular is flat at the norm");
  }

  const std::vector<cplx> s_conj = sys.analyze(psi_conj, subset);
  std::vector<double> grad(2 * subset.size());
  for (std::size_t t = 0; t < subset.size(); ++t) {
    const cplx s = std::conj(s_conj[t]);  // s_t = sum_j w_j psi_j phi_t(x_j)
    grad[2 * t] = s.real() / neg_dgdk;
    grad[2 * t + 1] = -s.imag() / neg_dgdk;
  }
  return grad;
}

}  // namespace orlicz
