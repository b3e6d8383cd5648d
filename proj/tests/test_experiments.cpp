#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "orlicz/experiments.hpp"
#include "orlicz/rng.hpp"

using namespace orlicz;

TEST_CASE("analytic companions") {
  const double e = std::exp(1.0);
  CHECK(trivial_bound_ceiling(256, 1.0) ==
        doctest::Approx(std::sqrt(1.0 + std::log(256.0) / 2.0)).epsilon(1e-15));
  CHECK(main_theorem_factor(256, 1.0) ==
        doctest::Approx(std::sqrt(std::log(std::log(256.0)))).epsilon(1e-15));
  CHECK(256.0 * delta_main(256, 1.0) ==
        doctest::Approx(256.0 / (e * std::pow(std::log(256.0), 2.0))).epsilon(1e-13));
  CHECK(256.0 * delta_main(256, 1.0) == doctest::Approx(3.06).epsilon(1e-2));
  CHECK_THROWS_AS(main_theorem_factor(8, 1.0), std::invalid_argument);
}

TEST_CASE("block_hit_probability") {
  CHECK(block_hit_probability(1.0, 3, 10) == 1.0);
  CHECK(block_hit_probability(0.0, 3, 10) == 0.0);
  CHECK(block_hit_probability(0.1, 1, 10) ==
        doctest::Approx(1.0 - std::pow(0.9, 10.0)).epsilon(1e-14));
  CHECK(block_hit_probability(0.1, 1, 10) == doctest::Approx(0.6513215599).epsilon(1e-9));

  // 1 - (1-x)^T >= 1 - exp(-xT)
  for (std::uint64_t t = 0; t < 100; ++t) {
    const double delta = rng::unit(81, t);
    const long long nn = 1 + static_cast<long long>(rng::unit(82, t) * 4);
    const long long tt = 1 + static_cast<long long>(rng::unit(83, t) * 400);
    const double exact = block_hit_probability(delta, nn, tt);
    const double lower =
        1.0 - std::exp(-std::pow(delta, static_cast<double>(nn)) * tt);
    CHECK(exact >= lower - 1e-12);
  }

  CHECK_THROWS_AS(block_hit_probability(1.5, 1, 1), std::invalid_argument);
}

TEST_CASE("sharpness configuration and blocks") {
  const SharpnessSystem s = build_sharpness(4, 2, 1.0, 64);
  CHECK(s.cfg.n == 512);
  CHECK(s.cfg.blocks == 256);
  CHECK(s.cfg.rho == doctest::Approx(1.0));
  CHECK(s.sys.size() == 512);

  const SharpnessConfig c2 = SharpnessConfig::create(3, 1, 1.0, 32);
  CHECK(c2.n == 27);
  CHECK(c2.blocks == 27);
  CHECK(c2.rho == doctest::Approx(1.5));

  // blocks are disjoint and cover [1, n]
  std::vector<bool> seen(s.cfg.n + 1, false);
  for (const auto& [lo, hi] : s.blocks) {
    CHECK(hi - lo + 1 == 2);
    for (std::size_t i = lo; i <= hi; ++i) {
      CHECK_FALSE(seen[i]);
      seen[i] = true;
    }
  }
  for (std::size_t i = 1; i <= static_cast<std::size_t>(s.cfg.n); ++i) CHECK(seen[i]);

  CHECK_THROWS_AS(build_sharpness(4, 2, 1.0, 32), std::invalid_argument);  // M < 32N
  CHECK_THROWS_AS(build_sharpness(9, 2, 1.0, 64), std::invalid_argument);  // guard
}

TEST_CASE("witness lower bound on the leading interval") {
  // |sum_{k in S_t} phi_k(x)| equals |sum_{k=1..N} phi_k(x)| after factoring
  // the block phase, and on x in [0, 1/(8N)] that is at least N/2.
  const SharpnessSystem s = build_sharpness(4, 2, 1.0, 64);
  const auto& coords = s.sys.space().coordinates();
  const double sqrt_n = std::sqrt(2.0);
  for (std::size_t b = 0; b < s.blocks.size(); ++b) {
    const auto [lo, hi] = s.blocks[b];
    const std::vector<std::size_t> subset{lo - 1, hi - 1};
    const std::vector<cplx> coeffs(2, cplx{1.0 / sqrt_n, 0.0});
    const auto f = s.sys.synthesize(coeffs, subset);
    for (std::size_t j = 0; j < coords.size(); ++j) {
      if (coords[j] <= 1.0 / 16.0) {
        CHECK(std::abs(f[j]) >= sqrt_n / 2.0 - 1e-12);
      }
    }
  }
}

TEST_CASE("witness norm for single-frequency blocks") {
  const SharpnessSystem s = build_sharpness(3, 1, 1.0, 32);
  const YoungSpec spec = YoungSpec::close2(1.0);
  // N = 1: the witness is one unimodular character, and close2 gives norm 1
  CHECK(sharpness_witness_norm(spec, s.sys, s.blocks[0]) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sharpness_witness_norm(spec, s.sys, s.blocks[12]) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(sharpness_witness_norm(spec, s.sys, {5, 4}), std::invalid_argument);
  CHECK_THROWS_AS(sharpness_witness_norm(spec, s.sys, {1, 999}), std::invalid_argument);
}

TEST_CASE("w_star bisection solves the threshold equation") {
  const double u0 = std::exp(1.0);
  for (long long n_block : {2LL, 8LL, 64LL}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      const double w = sharpness_wstar(n_block, alpha, u0);
      const double wmax = std::sqrt(static_cast<double>(n_block)) / (2.0 * u0);
      CHECK(w > 0.0);
      CHECK(w <= wmax * (1.0 + 1e-12));
      if (w < wmax * (1.0 - 1e-9)) {
        // interior root: residual vanishes
        const double lhs = w * w;
        const double rhs =
            std::pow(std::log(std::sqrt(static_cast<double>(n_block)) / (2.0 * w)),
                     alpha) /
            32.0;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        CHECK(std::sqrt(static_cast<double>(n_block)) / (2.0 * w) >= u0);
      }
    }
  }
  // frozen from an independent scan of w^2 = ln(sqrt(2)/(2w))/32
  CHECK(sharpness_wstar(2, 1.0, u0) == doctest::Approx(0.1988).epsilon(2e-3));
}

TEST_CASE("sharpness run at desk scale") {
  SharpnessRunConfig cfg;
  cfg.m = 3;
  cfg.block_len = 2;
  cfg.alpha = 1.0;
  cfg.grid_m = 64;
  cfg.trials = 200;
  cfg.base_seed = 7;
  cfg.threads = 2;
  const ExperimentResult res = run_sharpness(cfg);
  REQUIRE(res.records.size() == 200);
  CHECK(res.summary.at("failures").get<int>() == 0);
  CHECK(res.summary.at("delta_pow_N_times_T").get<double>() >= 1.0);

  const double p_hat = res.summary.at("p_hit").get<double>();
  const double se = res.summary.at("se_hit").get<double>();
  const double analytic = res.summary.at("analytic_p").get<double>();
  CHECK(std::abs(p_hat - analytic) <= 3.0 * std::max(se, 0.002) + 0.01);
  CHECK(res.summary.at("witness_below_wstar").get<int>() == 0);

  // every hit record carries a witness norm at least w*
  const double wstar = res.summary.at("w_star").get<double>();
  for (const TrialRecord& r : res.records) {
    REQUIRE_FALSE(r.failed);
    if (r.extra.value("hit", false)) {
      CHECK(r.norm_lb >= wstar);
      CHECK(r.joint_ok);
    } else {
      CHECK(r.norm_lb == 0.0);
    }
  }
}

TEST_CASE("trial records are reproducible") {
  SharpnessRunConfig cfg;
  cfg.m = 3;
  cfg.block_len = 1;
  cfg.grid_m = 32;
  cfg.trials = 50;
  cfg.base_seed = 99;
  const ExperimentResult a = run_sharpness(cfg);
  cfg.threads = 2;
  const ExperimentResult b = run_sharpness(cfg);
  CHECK(records_csv(a.records) == records_csv(b.records));
  CHECK(a.summary.dump() == b.summary.dump());
}

TEST_CASE("main experiment on a small grid") {
  MainExperimentConfig cfg;
  cfg.alphas = {1.0};
  cfg.n_list = {64, 128};
  cfg.trials = 30;
  cfg.base_seed = 11;
  cfg.threads = 2;
  cfg.opnorm.restarts = 2;
  cfg.opnorm.max_iters = 60;
  cfg.opnorm.tol = 1e-6;
  const ExperimentResult res = run_main_experiment(cfg);
  REQUIRE(res.records.size() == 60);

  for (const TrialRecord& r : res.records) {
    REQUIRE_FALSE(r.failed);
    CHECK(r.experiment == "main");
    // size_threshold = n * delta exactly
    CHECK(r.size_threshold ==
          doctest::Approx(static_cast<double>(r.n) *
                          delta_main(static_cast<std::size_t>(r.n), r.alpha))
              .epsilon(1e-13));
    CHECK(r.ratio == doctest::Approx(r.norm_lb / r.factor).epsilon(1e-12));
    CHECK(r.size_ok == (static_cast<double>(r.J_size) >= r.size_threshold));
    if (r.J_size > 0) {
      CHECK(r.norm_lb >= 1.0 - 1e-6);  // single-coordinate witness
    }
  }

  // K-hat consistency: norm_ok graded against khat * factor
  const double khat = res.summary.at("per_alpha")[0].at("khat").get<double>();
  for (const TrialRecord& r : res.records) {
    CHECK(r.norm_ok == (r.norm_lb <= khat * r.factor));
    CHECK(r.joint_ok == (r.size_ok && r.norm_ok));
  }

  // reproducibility of one record: resample J and re-run the ascent path
  const TrialRecord& probe = res.records.front();
  const IndexSet J = bernoulli_subset(static_cast<std::size_t>(probe.n),
                                      delta_main(static_cast<std::size_t>(probe.n),
                                                 probe.alpha),
                                      probe.seed);
  CHECK(J.indices.size() == probe.J_size);
}

TEST_CASE("trivial bound run stays under the ceiling") {
  TrivialBoundConfig cfg;
  cfg.alpha = 1.0;
  cfg.n_list = {64};
  cfg.trials = 40;
  cfg.base_seed = 5;
  cfg.threads = 2;
  cfg.opnorm.restarts = 2;
  cfg.opnorm.max_iters = 80;
  cfg.opnorm.tol = 1e-6;
  const ExperimentResult res = run_trivial_bound(cfg);
  CHECK(res.summary.at("violations").get<int>() == 0);
  REQUIRE(res.records.size() == 41);  // 40 random draws + 1 ascent record
  for (const TrialRecord& r : res.records) {
    REQUIRE_FALSE(r.failed);
    CHECK(r.norm_lb <= trivial_bound_ceiling(64, 1.0) + 1e-6);
  }
  CHECK(res.records.back().extra.at("kind") == "ascent");
}

TEST_CASE("records CSV format") {
  TrialRecord r;
  r.experiment = "main";
  r.alpha = 1.0;
  r.n = 256;
  r.seed = 42;
  r.J_size = 3;
  r.size_threshold = 3.0628;
  r.norm_lb = 1.25;
  r.factor = 1.309;
  r.ratio = r.norm_lb / r.factor;
  r.size_ok = true;
  r.norm_ok = true;
  r.joint_ok = true;
  r.extra = {{"converged", true}};
  const std::string csv = records_csv({r});
  CHECK(csv.find("experiment,alpha,rho,n,m,N,seed,J_size,size_threshold,norm_lb,"
                 "factor,ratio,size_ok,norm_ok,joint_ok,extra_json") == 0);
  CHECK(csv.find("main,1,,256,,,42,3,") != std::string::npos);
  CHECK(csv.find("\"{\"\"converged\"\":true}\"") != std::string::npos);

  const std::string path = "test_records_io.csv";
  write_records_csv(path, {r});
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  REQUIRE(fp != nullptr);
  std::fclose(fp);
  std::remove(path.c_str());
}
