// Monte Carlo reproduction experiments: random-subsystem norm scaling,
// the full-system ceiling, and the block-hit lower-bound construction.
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orlicz/opnorm.hpp"
#include "orlicz/sampling.hpp"
#include "orlicz/systems.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

// Documented default base seed; runs are reproducible by default.
inline constexpr std::uint64_t kDefaultSeed = 42;

struct TrialRecord {
  std::string experiment;
  double alpha = 0.0;
  double rho = std::numeric_limits<double>::quiet_NaN();  // NaN = not applicable
  long long n = 0;
  long long m = -1;          // -1 = not applicable
  long long block_len = -1;  // N; -1 = not applicable
  std::uint64_t seed = 0;
  std::size_t J_size = 0;
  double size_threshold = 0.0;  // n * delta for the run's density
  double norm_lb = 0.0;
  double factor = 0.0;  // comparison factor; ratio = norm_lb / factor
  double ratio = 0.0;
  bool size_ok = false;
  bool norm_ok = false;
  bool joint_ok = false;
  bool failed = false;
  nlohmann::json extra = nlohmann::json::object();
};

// Fixed column order: experiment, alpha, rho, n, m, N, seed, J_size,
// size_threshold, norm_lb, factor, ratio, size_ok, norm_ok, joint_ok,
// extra_json. Missing optionals print as empty fields; doubles use
// shortest-round-trip formatting, so identical records give identical bytes.
std::string records_csv(const std::vector<TrialRecord>& records);
void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records);

struct ExperimentResult {
  std::vector<TrialRecord> records;
  nlohmann::json summary;
};

// max(1, sqrt(1 + ln^alpha(n) / 2^alpha)): proved ceiling for the norm of a
// unit-coefficient combination over the full system, with close2's c = 1.
double trivial_bound_ceiling(std::size_t n, double alpha);

// ln^{alpha/2}(ln n); requires n >= 16 so the inner log is safely positive.
double main_theorem_factor(std::size_t n, double alpha);

struct MainExperimentConfig {
  std::vector<double> alphas{1.0};
  std::vector<std::size_t> n_list{256, 1024};
  int trials = 100;
  std::uint64_t base_seed = kDefaultSeed;
  AscentConfig opnorm;
  int threads = 1;
  double khat_multiplier = 1.5;  // K-hat = multiplier * median ratio at smallest n
};

// Per (alpha, n, trial): draw J ~ Bernoulli(delta_main), estimate the
// subsystem norm by ascent under close2(alpha), and grade the trial. norm_ok
// compares against K-hat * ln^{alpha/2}(ln n) with K-hat calibrated per alpha
// at the smallest n (the constant in the scaling law is unspecified, so the
// run tests stability, not an absolute level).
ExperimentResult run_main_experiment(const MainExperimentConfig& cfg);

struct TrivialBoundConfig {
  double alpha = 1.0;
  std::vector<std::size_t> n_list{256};
  int trials = 100;
  std::uint64_t base_seed = kDefaultSeed;
  AscentConfig opnorm;
  int threads = 1;
};

// Random unit coefficient vectors on the full system, plus one ascent
// maximizer per n, all checked against trivial_bound_ceiling + 1e-6. The
// ceiling is proved, so summary["violations"] > 0 means a solver bug.
ExperimentResult run_trivial_bound(const TrivialBoundConfig& cfg);

struct SharpnessConfig {
  long long m = 0;
  long long block_len = 0;  // N
  double alpha = 1.0;
  long long grid_m = 0;  // M >= 32 N so [0, 1/(8N)] holds >= 4 atoms
  // derived
  double rho = 0.0;       // m / (2N)
  long long n = 0;        // N * m^m
  long long blocks = 0;   // T = m^m
  static SharpnessConfig create(long long m, long long block_len, double alpha,
                                long long grid_m);
};

struct SharpnessSystem {
  SharpnessConfig cfg;
  System sys;
  // [first, last] 1-based inclusive frequency ranges, T of them, disjoint,
  // covering [1, n].
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
};

// Fourier system of size n = N m^m on the M-grid (frequencies alias above
// the grid bandwidth by design; only single blocks are ever synthesized)
// plus the contiguous block partition. Guard: n <= 1e6.
SharpnessSystem build_sharpness(long long m, long long block_len, double alpha,
                                long long grid_m);

// Luxemburg norm of sum_{k in block} phi_k / sqrt(N).
double sharpness_witness_norm(const YoungSpec& spec, const System& sys,
                              std::pair<std::size_t, std::size_t> block);

// Exact 1 - (1 - delta^N)^T.
double block_hit_probability(double delta, long long block_len, long long blocks);

// Root of w^2 = (1/32) ln^alpha(sqrt(N)/(2w)) on (0, sqrt(N)/(2 u0)], found
// by bisection; returns the interval endpoint when the equation has no root
// there (the indicator already releases the constraint at that point).
double sharpness_wstar(long long block_len, double alpha, double u0);

struct SharpnessRunConfig {
  long long m = 4;
  long long block_len = 2;
  double alpha = 1.0;
  long long grid_m = 64;
  int trials = 1000;
  std::uint64_t base_seed = kDefaultSeed;
  int threads = 1;
  bool full_sup = false;  // also run opnorm_ascent over each sampled J
  AscentConfig opnorm;
};

// Per trial: J ~ Bernoulli(delta_power(n, rho)); a hit means some block is
// wholly selected, and the witness norm of the first hit block is the
// recorded lower bound for the subsystem sup.
ExperimentResult run_sharpness(const SharpnessRunConfig& cfg);

}  // namespace orlicz
