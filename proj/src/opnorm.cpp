#include "orlicz/opnorm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "orlicz/rng.hpp"

namespace orlicz {

namespace {

constexpr std::uint64_t kRestartTag = 0x6f70a5c3;
constexpr std::uint64_t kBruteTag = 0x6272757465;
constexpr std::uint64_t kPowerIterPerturbSeed = 0x706f776572ULL;

double l2_norm_sq(std::span<const cplx> v) {
  CompensatedSum acc;
  for (const cplx& z : v) acc.add(z.real() * z.real() + z.imag() * z.imag());
  return acc.value();
}

void scale_in_place(std::vector<cplx>& v, double s) {
  for (cplx& z : v) z *= s;
}

std::vector<cplx> random_unit_vector(std::uint64_t seed, std::size_t dim) {
  std::vector<cplx> v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto [g1, g2] = rng::gaussian_pair(seed, i);
    v[i] = cplx(g1, g2);
  }
  const double nrm = std::sqrt(l2_norm_sq(v));
  if (nrm == 0.0) {
    v.assign(dim, cplx{0.0, 0.0});
    v[0] = 1.0;
    return v;
  }
  scale_in_place(v, 1.0 / nrm);
  return v;
}

// First nonzero coordinate made real positive; the norm is phase invariant.
void apply_phase_gauge(std::vector<cplx>& v) {
  double biggest = 0.0;
  for (const cplx& z : v) biggest = std::max(biggest, std::abs(z));
  if (biggest == 0.0) return;
  for (const cplx& z : v) {
    if (std::abs(z) > 1e-12 * biggest) {
      const cplx phase = std::conj(z) / std::abs(z);
      for (cplx& y : v) y *= phase;
      return;
    }
  }
}

}  // namespace

SingularPair l2_top_singular(const System& sys, std::span<const std::size_t> subset,
                             double tol) {
  if (subset.empty()) {
    throw std::invalid_argument("l2_top_singular: empty subset");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("l2_top_singular: tol must be > 0");
  }
  const std::size_t m = subset.size();
  // Deterministic start: ones plus a fixed small perturbation so the seed
  // vector is never orthogonal to the top eigenvector.
  std::vector<cplx> v(m);
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = cplx(1.0 + 1e-3 * rng::unit(kPowerIterPerturbSeed, i),
                1e-3 * rng::unit(kPowerIterPerturbSeed, m + i));
  }
  scale_in_place(v, 1.0 / std::sqrt(l2_norm_sq(v)));

  SingularPair out;
  double lambda_prev = -1.0;
  constexpr int kMaxIters = 10000;
  for (int it = 0; it < kMaxIters; ++it) {
    const std::vector<cplx> u = sys.synthesize(v, subset);
    std::vector<cplx> bv = sys.analyze(u, subset);
    // Rayleigh quotient <Bv, v> with ||v|| = 1; B is Hermitian PSD.
    CompensatedSum ray;
    for (std::size_t i = 0; i < m; ++i) {
      ray.add((bv[i] * std::conj(v[i])).real());
    }
    const double lambda = std::max(0.0, ray.value());
    out.iterations = it + 1;
    const double bn = std::sqrt(l2_norm_sq(bv));
    if (bn == 0.0) {
      out.value = 0.0;
      out.vector = std::move(v);
      return out;
    }
    scale_in_place(bv, 1.0 / bn);
    v = std::move(bv);
    if (lambda_prev >= 0.0 &&
        std::abs(lambda - lambda_prev) <= tol * std::max(lambda, 1e-300)) {
      out.value = std::sqrt(lambda);
      out.vector = std::move(v);
      return out;
    }
    lambda_prev = lambda;
  }
  out.value = std::sqrt(std::max(0.0, lambda_prev));
  out.vector = std::move(v);
  return out;
}

OpNormEstimate opnorm_ascent(const YoungSpec& spec, const System& sys,
                             std::span<const std::size_t> subset,
                             const AscentConfig& cfg) {
  if (subset.empty()) {
    throw std::invalid_argument("opnorm_ascent: empty subset");
  }
  if (cfg.restarts < 1) {
    throw std::invalid_argument("opnorm_ascent: restarts must be >= 1");
  }
  const std::size_t m = subset.size();
  const ProbSpace& space = sys.space();
  const double grad_rel_tol = std::min(cfg.norm_rel_tol, 1e-12);

  const auto norm_of = [&](std::span<const cplx> fvals) {
    return luxemburg_norm(space, spec, fvals, cfg.norm_rel_tol).value;
  };

  OpNormEstimate best;
  best.value = -1.0;
  const SingularPair sing = l2_top_singular(sys, subset, 1e-10);

  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<cplx> a =
        (r == 0 && sing.value > 0.0)
            ? sing.vector
            : random_unit_vector(rng::derive(cfg.seed, kRestartTag + r), m);
    {
      const double nrm = std::sqrt(l2_norm_sq(a));
      if (nrm == 0.0) continue;
      scale_in_place(a, 1.0 / nrm);
    }
    std::vector<cplx> f = sys.synthesize(a, subset);
    double value = norm_of(f);
    bool converged = false;

    for (int it = 0; it < cfg.max_iters; ++it) {
      if (value == 0.0) break;  // flat zero function, nothing to climb
      // `value` is the solved norm at the current point; reuse it
      const std::vector<double> grad2m =
          luxemburg_gradient(spec, sys, subset, a, grad_rel_tol, value);

      std::vector<cplx> g(m);
      for (std::size_t i = 0; i < m; ++i) {
        g[i] = cplx(grad2m[2 * i], grad2m[2 * i + 1]);
      }
      // Riemannian gradient: project out the radial component.
      CompensatedSum radial;
      for (std::size_t i = 0; i < m; ++i) {
        radial.add((g[i] * std::conj(a[i])).real());
      }
      const double rad = radial.value();
      for (std::size_t i = 0; i < m; ++i) g[i] -= rad * a[i];
      const double gn = std::sqrt(l2_norm_sq(g));
      if (gn <= cfg.tol * std::max(1.0, value)) {
        converged = true;
        break;
      }

      // Retraction along g; candidates reuse f + t*f_g by linearity.
      const std::vector<cplx> fdir = sys.synthesize(g, subset);
      double t = cfg.init_step;
      bool accepted = false;
      std::vector<cplx> cand(m), candf(f.size());
      while (t >= 1e-14) {
        double nrm_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          cand[i] = a[i] + t * g[i];
          nrm_sq += cand[i].real() * cand[i].real() + cand[i].imag() * cand[i].imag();
        }
        const double inv = 1.0 / std::sqrt(nrm_sq);
        for (std::size_t j = 0; j < f.size(); ++j) {
          candf[j] = (f[j] + t * fdir[j]) * inv;
        }
        const double cand_value = norm_of(candf);
        if (cand_value > value) {
          for (std::size_t i = 0; i < m; ++i) a[i] = cand[i] * inv;
          const double gain = (cand_value - value) / std::max(value, 1e-300);
          value = cand_value;
          f = sys.synthesize(a, subset);  // fresh synthesis, no drift
          accepted = true;
          if (gain < cfg.tol) converged = true;
          break;
        }
        t *= cfg.backtrack;
      }
      if (!accepted) {
        converged = true;  // stationary within line-search resolution
        break;
      }
      if (converged) break;
    }

    const double certified = norm_of(sys.synthesize(a, subset));
    if (certified > best.value) {
      best.value = certified;
      best.argmax = a;
      best.converged = converged;
    }
  }

  best.restarts_used = cfg.restarts;
  apply_phase_gauge(best.argmax);
  const double nrm = std::sqrt(l2_norm_sq(best.argmax));
  if (nrm > 0.0) scale_in_place(best.argmax, 1.0 / nrm);
  return best;
}

double opnorm_bruteforce(const YoungSpec& spec, const System& sys,
                         std::span<const std::size_t> subset, std::size_t samples,
                         std::uint64_t seed, int threads) {
  if (subset.empty() || subset.size() > 3) {
    throw std::invalid_argument("opnorm_bruteforce: subset size must be in [1, 3]");
  }
  if (samples == 0) {
    throw std::invalid_argument("opnorm_bruteforce: samples must be >= 1");
  }
  const std::size_t m = subset.size();
  const ProbSpace& space = sys.space();
  const std::size_t atoms = space.atom_count();

  std::vector<std::vector<cplx>> rows(m);
  for (std::size_t t = 0; t < m; ++t) {
    rows[t] = sys.function(subset[t]).values;
  }

  AscentConfig ascent_cfg;
  ascent_cfg.restarts = 4;
  ascent_cfg.max_iters = 300;
  ascent_cfg.tol = 1e-9;
  ascent_cfg.seed = rng::derive(seed, kBruteTag);
  double best = opnorm_ascent(spec, sys, subset, ascent_cfg).value;

  const int workers = std::max(1, threads);
  std::vector<double> worker_best(workers, 0.0);
  const auto run_chunk = [&](int wid) {
    double local = 0.0;
    std::vector<cplx> a(m), f(atoms);
    for (std::size_t s = wid; s < samples; s += workers) {
      const std::uint64_t sub = rng::mix(seed, s);
      double nrm_sq = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto [g1, g2] = rng::gaussian_pair(sub, i);
        a[i] = cplx(g1, g2);
        nrm_sq += g1 * g1 + g2 * g2;
      }
      if (nrm_sq == 0.0) continue;
      const double inv = 1.0 / std::sqrt(nrm_sq);
      for (std::size_t j = 0; j < atoms; ++j) {
        cplx acc = a[0] * rows[0][j];
        for (std::size_t i = 1; i < m; ++i) acc += a[i] * rows[i][j];
        f[j] = acc * inv;
      }
      local = std::max(local, luxemburg_norm(space, spec, f, 1e-9).value);
    }
    worker_best[wid] = local;
  };

  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int wcur = 0; wcur < workers; ++wcur) pool.emplace_back(run_chunk, wcur);
    for (std::thread& th : pool) th.join();
  }
  for (double v : worker_best) best = std::max(best, v);
  return best;
}

}  // namespace orlicz
