#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "orlicz/luxemburg.hpp"
#include "orlicz/opnorm.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/systems.hpp"

using namespace orlicz;

namespace {

// Independent oracle for the top eigenvalue of a Hermitian PSD matrix:
// embed as the real symmetric [[Re B, -Im B], [Im B, Re B]] and run classic
// cyclic Jacobi sweeps. No shared code with the power iteration under test.
double jacobi_top_eigenvalue(const std::vector<std::vector<cplx>>& b) {
  const std::size_t m = b.size();
  const std::size_t d = 2 * m;
  std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i][j] = b[i][j].real();
      a[i][m + j] = -b[i][j].imag();
      a[m + i][j] = b[i][j].imag();
      a[m + i][m + j] = b[i][j].real();
    }
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        const double c = std::cos(theta), s = std::sin(theta);
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  double top = a[0][0];
  for (std::size_t i = 1; i < d; ++i) top = std::max(top, a[i][i]);
  return top;
}

std::vector<std::vector<cplx>> gram(const System& sys,
                                    const std::vector<std::size_t>& subset) {
  std::vector<std::vector<cplx>> b(subset.size(), std::vector<cplx>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = 0; j < subset.size(); ++j) {
      b[i][j] = inner_product(sys.space(), sys.function(subset[i]),
                              sys.function(subset[j]));
    }
  }
  return b;
}

}  // namespace

TEST_CASE("l2_top_singular on orthonormal systems") {
  const System sys = System::fourier(6, 32);
  for (const std::vector<std::size_t>& subset :
       {std::vector<std::size_t>{0}, {1, 3}, {0, 2, 4, 5}}) {
    const SingularPair sp = l2_top_singular(sys, subset);
    CHECK(sp.value == doctest::Approx(1.0).epsilon(1e-9));
    double nrm = 0.0;
    for (const cplx& z : sp.vector) nrm += std::norm(z);
    CHECK(std::sqrt(nrm) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(l2_top_singular(sys, std::vector<std::size_t>{}),
                  std::invalid_argument);
}

TEST_CASE("l2_top_singular single function equals its L2 norm") {
  const System f = System::fourier(3, 16);
  std::vector<Func> scaled;
  for (std::size_t i = 0; i < 3; ++i) {
    Func fi = f.function(i);
    for (cplx& v : fi.values) v *= 0.25 * static_cast<double>(i + 1);
    scaled.push_back(std::move(fi));
  }
  const System sys = System::from_functions(f.space(), std::move(scaled));
  for (std::size_t i = 0; i < 3; ++i) {
    const std::vector<std::size_t> subset{i};
    CHECK(l2_top_singular(sys, subset).value ==
          doctest::Approx(lp_norm(sys.space(), sys.function(i), 2.0)).epsilon(1e-9));
  }
}

TEST_CASE("l2_top_singular matches the dense Jacobi oracle") {
  // random non-orthonormal 3-function system
  const ProbSpace space = ProbSpace::uniform_grid(24);
  std::vector<Func> funcs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    funcs[i].values.resize(24);
    for (std::size_t j = 0; j < 24; ++j) {
      const auto [g1, g2] = rng::gaussian_pair(7000 + i, j);
      funcs[i].values[j] = 0.35 * cplx(g1, g2);
    }
  }
  const System sys = System::from_functions(space, std::move(funcs));
  const std::vector<std::size_t> subset{0, 1, 2};
  const double oracle = std::sqrt(jacobi_top_eigenvalue(gram(sys, subset)));
  const double solved = l2_top_singular(sys, subset, 1e-12).value;
  CHECK(std::abs(solved - oracle) / oracle <= 1e-8);
}

TEST_CASE("ascent equals the singular value for the quadratic family") {
  const System sys = System::fourier(5, 32);
  const YoungSpec p2 = YoungSpec::power(2.0);
  for (const std::vector<std::size_t>& subset :
       {std::vector<std::size_t>{2}, {0, 3}, {1, 2, 4}}) {
    AscentConfig cfg;
    cfg.seed = 17;
    const OpNormEstimate est = opnorm_ascent(p2, sys, subset, cfg);
    const double sigma = l2_top_singular(sys, subset).value;
    CHECK(std::abs(est.value - sigma) / sigma <= 1e-6);
    // argmax is unit and certifies the value
    double nrm = 0.0;
    for (const cplx& z : est.argmax) nrm += std::norm(z);
    CHECK(std::sqrt(nrm) == doctest::Approx(1.0).epsilon(1e-10));
    const auto f = sys.synthesize(est.argmax, subset);
    CHECK(luxemburg_norm(sys.space(), p2, f).value ==
          doctest::Approx(est.value).epsilon(1e-8));
  }
}

TEST_CASE("single-index ascent returns the function norm") {
  const System sys = System::fourier(4, 32);
  const YoungSpec spec = YoungSpec::close2(1.0);
  const std::vector<std::size_t> subset{2};
  AscentConfig cfg;
  cfg.restarts = 2;
  const OpNormEstimate est = opnorm_ascent(spec, sys, subset, cfg);
  const double direct =
      luxemburg_norm(sys.space(), spec, sys.function(2)).value;
  CHECK(est.value == doctest::Approx(direct).epsilon(1e-8));
  // phase gauge: first coordinate real positive
  CHECK(est.argmax[0].imag() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(est.argmax[0].real() > 0.0);
}

TEST_CASE("ascent against the sphere-sampling oracle") {
  const System sys = System::fourier(2, 64);
  const YoungSpec spec = YoungSpec::close2(1.0);
  const std::vector<std::size_t> subset{0, 1};
  AscentConfig cfg;
  cfg.seed = 5;
  const OpNormEstimate est = opnorm_ascent(spec, sys, subset, cfg);
  const double brute = opnorm_bruteforce(spec, sys, subset, 200'000, 99, 2);
  CHECK(brute >= est.value - 1e-12);  // ascent output is a brute candidate
  CHECK((brute - est.value) / brute <= 1e-3);
}

TEST_CASE("bruteforce basics") {
  const System sys = System::fourier(3, 32);
  const YoungSpec spec = YoungSpec::close2(1.0);

  // |J| = 1: every unit scalar gives the same norm
  const std::vector<std::size_t> one{1};
  const double direct = luxemburg_norm(sys.space(), spec, sys.function(1)).value;
  CHECK(opnorm_bruteforce(spec, sys, one, 100, 3) == doctest::Approx(direct).epsilon(1e-8));

  // power(2) on an orthonormal pair: known value 1
  const YoungSpec p2 = YoungSpec::power(2.0);
  const std::vector<std::size_t> two{0, 2};
  CHECK(opnorm_bruteforce(p2, sys, two, 100'000, 4) == doctest::Approx(1.0).epsilon(2e-3));

  // monotone nondecreasing in the sample count (same seed streams)
  const double b3 = opnorm_bruteforce(spec, sys, two, 1'000, 11);
  const double b4 = opnorm_bruteforce(spec, sys, two, 10'000, 11);
  const double b5 = opnorm_bruteforce(spec, sys, two, 100'000, 11);
  CHECK(b3 <= b4 + 1e-15);
  CHECK(b4 <= b5 + 1e-15);

  CHECK_THROWS_AS(opnorm_bruteforce(spec, sys, std::vector<std::size_t>{0, 1, 2, 2},
                                    100, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(opnorm_bruteforce(spec, sys, std::vector<std::size_t>{}, 100, 0),
                  std::invalid_argument);
}

TEST_CASE("subset monotonicity via zero-padded certificates") {
  const System sys = System::fourier(4, 32);
  const YoungSpec spec = YoungSpec::close2(1.0);
  const std::vector<std::size_t> small{0, 1};
  const std::vector<std::size_t> big{0, 1, 2, 3};
  AscentConfig cfg;
  cfg.seed = 21;
  const OpNormEstimate est_small = opnorm_ascent(spec, sys, small, cfg);
  const OpNormEstimate est_big = opnorm_ascent(spec, sys, big, cfg);
  // the zero-padded small argmax is feasible for the big subset
  std::vector<cplx> padded = est_small.argmax;
  padded.resize(4, cplx{0.0, 0.0});
  const double padded_value =
      luxemburg_norm(sys.space(), spec, sys.synthesize(padded, big)).value;
  CHECK(padded_value == doctest::Approx(est_small.value).epsilon(1e-9));
  CHECK(est_big.value >= est_small.value - 1e-9);
}

TEST_CASE("full-set ascent stays below the proved ceiling") {
  const std::size_t n = 16;
  const System sys = System::fourier(n, 64);
  std::vector<std::size_t> full(n);
  for (std::size_t i = 0; i < n; ++i) full[i] = i;
  for (double alpha : {0.5, 1.0}) {
    const YoungSpec spec = YoungSpec::close2(alpha);
    AscentConfig cfg;
    cfg.restarts = 4;
    cfg.seed = 31;
    const OpNormEstimate est = opnorm_ascent(spec, sys, full, cfg);
    const double ceiling = std::max(
        1.0, std::sqrt(1.0 + std::pow(std::log(static_cast<double>(n)), alpha) /
                                 std::pow(2.0, alpha)));
    CHECK(est.value <= ceiling + 1e-6);
    CHECK(est.value >= 1.0 - 1e-6);  // e_1 witness
  }
}
