#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "orlicz/rng.hpp"
#include "orlicz/young.hpp"

using namespace orlicz;

namespace {
const double kE = std::exp(1.0);
}

TEST_CASE("close2 family") {
  const YoungSpec phi = YoungSpec::close2(1.0);
  CHECK(phi.u0() == doctest::Approx(kE));
  CHECK(phi.c() == 1.0);

  // junction value from both closed forms: u^2 and u^2 (ln u)^alpha at u = e
  CHECK(phi.eval(kE) == doctest::Approx(kE * kE).epsilon(1e-14));
  CHECK(phi.eval(kE * (1 - 1e-9)) == doctest::Approx(kE * kE).epsilon(1e-6));
  CHECK(phi.eval(1.0) == doctest::Approx(1.0));
  CHECK(phi.eval(0.0) == 0.0);

  // finite-difference convexity scan on a log grid
  for (double alpha : {0.5, 1.0, 2.0}) {
    const YoungSpec spec = YoungSpec::close2(alpha);
    const auto grid = log_grid(1e-3, 1e6, 300);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double h = std::min(grid[i] - grid[i - 1], grid[i + 1] - grid[i]) * 0.49;
      const double second =
          spec.eval(grid[i] + h) - 2.0 * spec.eval(grid[i]) + spec.eval(grid[i] - h);
      CHECK(second >= -1e-9 * std::max(1.0, spec.eval(grid[i])));
    }
  }

  CHECK_THROWS_AS(YoungSpec::close2(0.0), std::invalid_argument);
  CHECK_THROWS_AS(YoungSpec::close2(-1.0), std::invalid_argument);
}

TEST_CASE("power family") {
  CHECK(YoungSpec::power(2.0).eval(3.0) == doctest::Approx(9.0));
  CHECK(YoungSpec::power(4.0).eval(2.0) == doctest::Approx(16.0));
  CHECK(YoungSpec::power(1.0).eval(5.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(YoungSpec::power(0.9), std::invalid_argument);

  // p = 1 is Young but not nice
  const auto rep = young_validate(YoungSpec::power(1.0), default_validation_grid());
  CHECK(rep.zero_at_zero);
  CHECK(rep.increasing);
  CHECK(rep.convex);
  CHECK_FALSE(rep.nice_at_zero);
}

TEST_CASE("ryou family") {
  const YoungSpec phi = YoungSpec::ryou(3.0, 1.0);
  CHECK(phi.c() == doctest::Approx(kE));  // e^{p-2}
  // junction from both pieces: c e^2 = e^3 and e^3 (ln e)^3
  CHECK(phi.eval(kE * (1 - 1e-12)) == doctest::Approx(std::pow(kE, 3.0)).epsilon(1e-9));
  CHECK(phi.eval(kE) == doctest::Approx(std::pow(kE, 3.0)).epsilon(1e-12));
  // e^2 is above the junction: (e^2)^3 (ln e^2)^3 = 8 e^6
  CHECK(phi.eval(kE * kE) == doctest::Approx(8.0 * std::pow(kE, 6.0)).epsilon(1e-12));

  // derivative jump at u0 is upward: one-sided difference quotients
  const YoungSpec q = YoungSpec::ryou(2.5, 0.5);
  const double h = 1e-7;
  const double left = (q.eval(q.u0()) - q.eval(q.u0() - h)) / h;
  const double right = (q.eval(q.u0() + h) - q.eval(q.u0())) / h;
  CHECK(left < right);
  CHECK(left == doctest::Approx(2.0 * q.c() * q.u0()).epsilon(1e-5));
  CHECK(right ==
        doctest::Approx((q.p() + q.alpha() * q.p()) * std::pow(kE, q.p() - 1.0))
            .epsilon(1e-5));

  CHECK_THROWS_AS(YoungSpec::ryou(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(YoungSpec::ryou(3.0, 0.0), std::invalid_argument);
}

TEST_CASE("kashinG family") {
  for (double alpha : {0.6, 1.0, 2.0}) {
    CHECK(YoungSpec::kashin_g(alpha).eval(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(YoungSpec::kashin_g(1.0).eval(1e-8) < 1e-14);
  CHECK(YoungSpec::kashin_g(1.0).eval(0.0) == 0.0);

  const double expected = kE * kE * std::log(2.0 * kE) / std::log(kE + 1.0 / kE);
  CHECK(YoungSpec::kashin_g(1.0).eval(kE) == doctest::Approx(expected).epsilon(1e-14));

  CHECK_THROWS_AS(YoungSpec::kashin_g(0.5), std::invalid_argument);
  CHECK_THROWS_AS(YoungSpec::kashin_g(0.3), std::invalid_argument);
}

TEST_CASE("derivatives") {
  const YoungSpec phi = YoungSpec::close2(1.0);
  CHECK(phi.deriv(1.5) == doctest::Approx(3.0));  // 2u on the quadratic piece
  // u >= e: 2u ln u + u
  const double u = 5.0;
  CHECK(phi.deriv(u) == doctest::Approx(2.0 * u * std::log(u) + u).epsilon(1e-14));

  // Phi'(u) <= (2 + alpha) Phi(u) / u on a log grid
  for (double alpha : {0.5, 1.0, 2.0}) {
    const YoungSpec spec = YoungSpec::close2(alpha);
    for (double x : log_grid(1.0, 1e6, 200)) {
      CHECK(spec.deriv(x) <= (2.0 + alpha) * spec.eval(x) / x * (1.0 + 1e-12));
    }
  }

  CHECK_THROWS_AS(phi.eval(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(phi.deriv(-1.0), std::invalid_argument);
}

TEST_CASE("derivative matches central differences away from the junction") {
  const YoungSpec specs[] = {YoungSpec::close2(1.0), YoungSpec::close2(0.5),
                             YoungSpec::power(2.5), YoungSpec::ryou(3.0, 1.0),
                             YoungSpec::kashin_g(1.0)};
  for (const YoungSpec& spec : specs) {
    for (double u : log_grid(1e-3, 1e5, 60)) {
      if (spec.u0() > 0.0 && std::abs(u - spec.u0()) < 0.05 * spec.u0()) continue;
      const double h = 1e-6 * u;
      const double fd = (spec.eval(u + h) - spec.eval(u - h)) / (2.0 * h);
      const double an = spec.deriv(u);
      if (std::abs(fd) < 1e-12) continue;
      CHECK(std::abs(an - fd) / std::abs(fd) <= 1e-6);
    }
  }
}

TEST_CASE("young_validate") {
  const auto grid = default_validation_grid();
  CHECK(young_validate(YoungSpec::close2(1.0), grid).all_ok());
  CHECK(young_validate(YoungSpec::close2(0.5), grid).all_ok());
  CHECK(young_validate(YoungSpec::ryou(3.0, 1.0), grid).all_ok());
  CHECK(young_validate(YoungSpec::power(2.0), grid).all_ok());

  const auto kg = young_validate(YoungSpec::kashin_g(1.0), grid);
  CHECK(kg.convex);
  CHECK(kg.all_ok());

  CHECK_THROWS_AS(young_validate(YoungSpec::power(2.0), std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(young_validate(YoungSpec::power(2.0), std::vector<double>{2.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("continuity at the junction") {
  for (const YoungSpec& spec : {YoungSpec::close2(1.0), YoungSpec::close2(2.0),
                                YoungSpec::ryou(3.0, 0.5)}) {
    // the pieces agree at u0: c u0^2 vs the log form evaluated at u0
    const double left_piece = spec.c() * spec.u0() * spec.u0();
    CHECK(std::abs(left_piece - spec.eval(spec.u0())) <= 1e-12 * left_piece);
    // straddling differences shrink like the step: any jump would stay put
    for (double h : {1e-4 * spec.u0(), 1e-5 * spec.u0(), 1e-6 * spec.u0()}) {
      const double diff = std::abs(spec.eval(spec.u0() - h) - spec.eval(spec.u0() + h));
      CHECK(diff <= 5.0 * h * spec.deriv(spec.u0() + h) + 1e-12);
    }
  }
}

TEST_CASE("superadditivity and monotonicity on random pairs") {
  const YoungSpec specs[] = {YoungSpec::close2(1.0), YoungSpec::power(3.0),
                             YoungSpec::ryou(2.5, 1.0), YoungSpec::kashin_g(1.0)};
  for (const YoungSpec& spec : specs) {
    for (std::uint64_t t = 0; t < 200; ++t) {
      const double u = std::exp(rng::unit(51, t) * 12.0 - 4.0);
      const double k = 1.0 + rng::unit(52, t) * 9.0;
      // Phi(u/k) <= Phi(u)/k from convexity and Phi(0) = 0
      CHECK(spec.eval(u / k) <= spec.eval(u) / k * (1.0 + 1e-12) + 1e-300);
      const double v = u * (1.0 + rng::unit(53, t));
      CHECK(spec.eval(u) <= spec.eval(v) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("family string parsing") {
  CHECK(YoungSpec::parse("close2:alpha=1.0").family() == YoungFamily::close2);
  CHECK(YoungSpec::parse("power:p=2").p() == 2.0);
  const YoungSpec r = YoungSpec::parse("ryou:p=3,alpha=0.5");
  CHECK(r.p() == 3.0);
  CHECK(r.alpha() == 0.5);
  CHECK(YoungSpec::parse("kashinG:alpha=1.0").family() == YoungFamily::kashin_g);
  CHECK(YoungSpec::parse(YoungSpec::close2(2.0).to_string()).alpha() == 2.0);
  CHECK_THROWS_AS(YoungSpec::parse("nope:alpha=1"), std::invalid_argument);
  CHECK_THROWS_AS(YoungSpec::parse("close2:beta=1"), std::invalid_argument);
}
