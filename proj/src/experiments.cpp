#include "orlicz/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include "orlicz/rng.hpp"

namespace orlicz {

namespace {

constexpr std::uint64_t kAscentSeedTag = 0x61736365;
constexpr std::uint64_t kTrivialDrawTag = 0x74726976;

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += "\"";
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double proportion_se(double p, std::size_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

// Trials are independent; each index writes only its own slot, so results
// are byte-identical for any worker count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = static_cast<std::size_t>(w); i < count; i += workers) {
        body(i);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

std::vector<cplx> random_unit_coeffs(std::uint64_t stream, std::size_t dim) {
  std::vector<cplx> a(dim);
  CompensatedSum nrm_sq;
  for (std::size_t i = 0; i < dim; ++i) {
    const auto [g1, g2] = rng::gaussian_pair(stream, i);
    a[i] = cplx(g1, g2);
    nrm_sq.add(g1 * g1 + g2 * g2);
  }
  const double nrm = std::sqrt(nrm_sq.value());
  if (nrm == 0.0) {
    a.assign(dim, cplx{0.0, 0.0});
    a[0] = 1.0;
    return a;
  }
  for (cplx& z : a) z /= nrm;
  return a;
}

}  // namespace

std::string records_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "experiment,alpha,rho,n,m,N,seed,J_size,size_threshold,norm_lb,factor,"
      "ratio,size_ok,norm_ok,joint_ok,extra_json\n";
  for (const TrialRecord& r : records) {
    out += r.experiment;
    out += ',';
    out += format_double(r.alpha);
    out += ',';
    if (!std::isnan(r.rho)) out += format_double(r.rho);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    if (r.m >= 0) out += std::to_string(r.m);
    out += ',';
    if (r.block_len >= 0) out += std::to_string(r.block_len);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.J_size);
    out += ',';
    out += format_double(r.size_threshold);
    out += ',';
    out += format_double(r.norm_lb);
    out += ',';
    out += format_double(r.factor);
    out += ',';
    out += format_double(r.ratio);
    out += ',';
    out += r.size_ok ? "true" : "false";
    out += ',';
    out += r.norm_ok ? "true" : "false";
    out += ',';
    out += r.joint_ok ? "true" : "false";
    out += ',';
    nlohmann::json extra = r.extra;
    if (r.failed) extra["failed"] = true;
    out += csv_quote(extra.dump());
    out += '\n';
  }
  return out;
}

void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("write_records_csv: cannot open " + path);
  }
  out << records_csv(records);
}

double trivial_bound_ceiling(std::size_t n, double alpha) {
  const double ln_n = std::log(static_cast<double>(n));
  return std::max(1.0, std::sqrt(1.0 + std::pow(ln_n, alpha) / std::pow(2.0, alpha)));
}

double main_theorem_factor(std::size_t n, double alpha) {
  if (n < 16) {
    throw std::invalid_argument("main_theorem_factor: n must be >= 16");
  }
  return std::pow(std::log(std::log(static_cast<double>(n))), alpha / 2.0);
}

ExperimentResult run_main_experiment(const MainExperimentConfig& cfg) {
  if (cfg.trials < 1) {
    throw std::invalid_argument("run_main_experiment: trials must be >= 1");
  }
  if (cfg.alphas.empty() || cfg.n_list.empty()) {
    throw std::invalid_argument("run_main_experiment: empty parameter grid");
  }
  for (std::size_t n : cfg.n_list) {
    if (n < 16) {
      throw std::invalid_argument("run_main_experiment: every n must be >= 16");
    }
  }
  std::vector<std::size_t> n_sorted = cfg.n_list;
  std::sort(n_sorted.begin(), n_sorted.end());

  ExperimentResult result;
  nlohmann::json cells = nlohmann::json::array();
  nlohmann::json per_alpha = nlohmann::json::array();

  for (double alpha : cfg.alphas) {
    const YoungSpec spec = YoungSpec::close2(alpha);
    // record blocks per n, in n_list order; calibration uses the smallest n
    std::vector<std::vector<TrialRecord>> blocks(cfg.n_list.size());

    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const std::size_t n = cfg.n_list[ni];
      const double delta = delta_main(n, alpha);
      const double threshold = static_cast<double>(n) * delta;
      const double factor = main_theorem_factor(n, alpha);
      const System sys = System::fourier(n, std::max<std::size_t>(4 * n, 1024));

      std::vector<TrialRecord>& recs = blocks[ni];
      recs.resize(cfg.trials);
      parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        TrialRecord rec;
        rec.experiment = "main";
        rec.alpha = alpha;
        rec.n = static_cast<long long>(n);
        rec.seed = cfg.base_seed + t;
        rec.size_threshold = threshold;
        rec.factor = factor;
        try {
          const IndexSet J = bernoulli_subset(n, delta, rec.seed);
          rec.J_size = J.indices.size();
          rec.size_ok = static_cast<double>(rec.J_size) >= threshold;
          if (!J.indices.empty()) {
            AscentConfig acfg = cfg.opnorm;
            acfg.seed = rng::derive(rec.seed, kAscentSeedTag);
            const auto subset = J.zero_based();
            const OpNormEstimate est = opnorm_ascent(spec, sys, subset, acfg);
            rec.norm_lb = est.value;
            rec.extra["converged"] = est.converged;
          }
          rec.ratio = rec.norm_lb / factor;
        } catch (const std::exception& e) {
          rec.failed = true;
          rec.extra["error"] = std::string(e.what());
        }
        recs[t] = std::move(rec);
      });
    }

    // K-hat from the smallest n of this alpha's grid.
    std::vector<double> ratios_at_min;
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      if (cfg.n_list[ni] != n_sorted.front()) continue;
      for (const TrialRecord& r : blocks[ni]) {
        if (!r.failed) ratios_at_min.push_back(r.ratio);
      }
    }
    const double khat = cfg.khat_multiplier * median(ratios_at_min);

    nlohmann::json medians_by_n = nlohmann::json::array();
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const std::size_t n = cfg.n_list[ni];
      std::size_t failures = 0, size_hits = 0, joint_hits = 0, graded = 0;
      std::vector<double> ratios;
      for (TrialRecord& r : blocks[ni]) {
        if (r.failed) {
          ++failures;
          continue;
        }
        r.norm_ok = r.norm_lb <= khat * r.factor;
        r.joint_ok = r.size_ok && r.norm_ok;
        ++graded;
        size_hits += r.size_ok ? 1 : 0;
        joint_hits += r.joint_ok ? 1 : 0;
        ratios.push_back(r.ratio);
      }
      const double p_size = graded ? static_cast<double>(size_hits) / graded : 0.0;
      const double p_joint = graded ? static_cast<double>(joint_hits) / graded : 0.0;
      const double med = median(ratios);
      cells.push_back({{"alpha", alpha},
                       {"n", n},
                       {"trials", cfg.trials},
                       {"failures", failures},
                       {"delta", delta_main(n, alpha)},
                       {"size_threshold", static_cast<double>(n) * delta_main(n, alpha)},
                       {"factor", main_theorem_factor(n, alpha)},
                       {"p_size", p_size},
                       {"se_size", proportion_se(p_size, graded)},
                       {"p_joint", p_joint},
                       {"se_joint", proportion_se(p_joint, graded)},
                       {"median_ratio", med},
                       {"khat", khat}});
      medians_by_n.push_back({{"n", n}, {"median_ratio", med}});
      for (TrialRecord& r : blocks[ni]) result.records.push_back(std::move(r));
    }

    double med_min = std::numeric_limits<double>::infinity();
    double med_max = 0.0;
    for (const auto& row : medians_by_n) {
      const double v = row.at("median_ratio").get<double>();
      med_min = std::min(med_min, v);
      med_max = std::max(med_max, v);
    }
    per_alpha.push_back({{"alpha", alpha},
                         {"khat", khat},
                         {"khat_multiplier", cfg.khat_multiplier},
                         {"medians_by_n", medians_by_n},
                         {"median_ratio_spread", med_min > 0.0 ? med_max / med_min
                                                               : std::numeric_limits<double>::infinity()}});
  }

  result.summary = {{"experiment", "main"},
                    {"trials", cfg.trials},
                    {"base_seed", cfg.base_seed},
                    {"cells", cells},
                    {"per_alpha", per_alpha}};
  return result;
}

ExperimentResult run_trivial_bound(const TrivialBoundConfig& cfg) {
  if (cfg.trials < 1) {
    throw std::invalid_argument("run_trivial_bound: trials must be >= 1");
  }
  for (std::size_t n : cfg.n_list) {
    if (n < 16) {
      throw std::invalid_argument("run_trivial_bound: every n must be >= 16");
    }
  }
  const YoungSpec spec = YoungSpec::close2(cfg.alpha);
  ExperimentResult result;
  nlohmann::json cells = nlohmann::json::array();
  std::size_t total_violations = 0;

  for (std::size_t n : cfg.n_list) {
    const double ceiling = trivial_bound_ceiling(n, cfg.alpha);
    const System sys = System::fourier(n, std::max<std::size_t>(4 * n, 1024));
    std::vector<std::size_t> full(n);
    for (std::size_t i = 0; i < n; ++i) full[i] = i;

    std::vector<TrialRecord> recs(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      TrialRecord rec;
      rec.experiment = "trivial";
      rec.alpha = cfg.alpha;
      rec.n = static_cast<long long>(n);
      rec.seed = cfg.base_seed + t;
      rec.J_size = n;
      rec.size_threshold = static_cast<double>(n);
      rec.size_ok = true;
      rec.factor = ceiling;
      rec.extra["kind"] = "random";
      try {
        const auto a = random_unit_coeffs(rng::derive(rec.seed, kTrivialDrawTag), n);
        const auto f = sys.synthesize(a, full);
        rec.norm_lb = luxemburg_norm(sys.space(), spec, f).value;
        rec.ratio = rec.norm_lb / ceiling;
        rec.norm_ok = rec.norm_lb <= ceiling + 1e-6;
        rec.joint_ok = rec.size_ok && rec.norm_ok;
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.extra["error"] = std::string(e.what());
      }
      recs[t] = std::move(rec);
    });

    TrialRecord ascent_rec;
    ascent_rec.experiment = "trivial";
    ascent_rec.alpha = cfg.alpha;
    ascent_rec.n = static_cast<long long>(n);
    ascent_rec.seed = cfg.base_seed;
    ascent_rec.J_size = n;
    ascent_rec.size_threshold = static_cast<double>(n);
    ascent_rec.size_ok = true;
    ascent_rec.factor = ceiling;
    ascent_rec.extra["kind"] = "ascent";
    try {
      AscentConfig acfg = cfg.opnorm;
      acfg.seed = rng::derive(cfg.base_seed, kAscentSeedTag);
      const OpNormEstimate est = opnorm_ascent(spec, sys, full, acfg);
      ascent_rec.norm_lb = est.value;
      ascent_rec.ratio = est.value / ceiling;
      ascent_rec.norm_ok = est.value <= ceiling + 1e-6;
      ascent_rec.joint_ok = ascent_rec.norm_ok;
      ascent_rec.extra["converged"] = est.converged;
    } catch (const std::exception& e) {
      ascent_rec.failed = true;
      ascent_rec.extra["error"] = std::string(e.what());
    }
    recs.push_back(std::move(ascent_rec));

    std::size_t violations = 0, failures = 0;
    double max_norm = 0.0;
    for (const TrialRecord& r : recs) {
      if (r.failed) {
        ++failures;
        continue;
      }
      if (!r.norm_ok) ++violations;
      max_norm = std::max(max_norm, r.norm_lb);
    }
    total_violations += violations;
    cells.push_back({{"alpha", cfg.alpha},
                     {"n", n},
                     {"ceiling", ceiling},
                     {"trials", cfg.trials},
                     {"failures", failures},
                     {"violations", violations},
                     {"max_norm", max_norm}});
    for (TrialRecord& r : recs) result.records.push_back(std::move(r));
  }

  result.summary = {{"experiment", "trivial"},
                    {"alpha", cfg.alpha},
                    {"trials", cfg.trials},
                    {"base_seed", cfg.base_seed},
                    {"violations", total_violations},
                    {"cells", cells}};
  return result;
}

SharpnessConfig SharpnessConfig::create(long long m, long long block_len, double alpha,
                                        long long grid_m) {
  if (m < 2) {
    throw std::invalid_argument("sharpness: m must be >= 2");
  }
  if (block_len < 1) {
    throw std::invalid_argument("sharpness: N must be >= 1");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("sharpness: alpha must be > 0");
  }
  if (grid_m < 32 * block_len) {
    throw std::invalid_argument("sharpness: grid must satisfy M >= 32 N");
  }
  SharpnessConfig cfg;
  cfg.m = m;
  cfg.block_len = block_len;
  cfg.alpha = alpha;
  cfg.grid_m = grid_m;
  cfg.rho = static_cast<double>(m) / (2.0 * static_cast<double>(block_len));
  long long t = 1;
  for (long long i = 0; i < m; ++i) {
    t *= m;
    if (t > 2'000'000) {
      throw std::invalid_argument("sharpness: n = N m^m exceeds the memory guard");
    }
  }
  cfg.blocks = t;
  cfg.n = block_len * t;
  if (cfg.n > 1'000'000) {
    throw std::invalid_argument("sharpness: n = N m^m exceeds the memory guard");
  }
  return cfg;
}

SharpnessSystem build_sharpness(long long m, long long block_len, double alpha,
                                long long grid_m) {
  SharpnessConfig cfg = SharpnessConfig::create(m, block_len, alpha, grid_m);
  System sys = System::fourier_aliased(static_cast<std::size_t>(cfg.n),
                                       static_cast<std::size_t>(cfg.grid_m));
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  blocks.reserve(static_cast<std::size_t>(cfg.blocks));
  for (long long t = 1; t <= cfg.blocks; ++t) {
    blocks.emplace_back(static_cast<std::size_t>(block_len * (t - 1) + 1),
                        static_cast<std::size_t>(block_len * t));
  }
  return SharpnessSystem{std::move(cfg), std::move(sys), std::move(blocks)};
}

double sharpness_witness_norm(const YoungSpec& spec, const System& sys,
                              std::pair<std::size_t, std::size_t> block) {
  if (block.first < 1 || block.second < block.first || block.second > sys.size()) {
    throw std::invalid_argument("sharpness_witness_norm: block out of range");
  }
  const std::size_t len = block.second - block.first + 1;
  std::vector<std::size_t> subset(len);
  for (std::size_t i = 0; i < len; ++i) subset[i] = block.first - 1 + i;
  const std::vector<cplx> coeffs(len, cplx{1.0 / std::sqrt(static_cast<double>(len)), 0.0});
  const auto f = sys.synthesize(coeffs, subset);
  return luxemburg_norm(sys.space(), spec, f).value;
}

double block_hit_probability(double delta, long long block_len, long long blocks) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("block_hit_probability: delta must lie in [0, 1]");
  }
  if (block_len < 1 || blocks < 1) {
    throw std::invalid_argument("block_hit_probability: N and T must be >= 1");
  }
  if (delta == 1.0) return 1.0;
  const double dn = std::pow(delta, static_cast<double>(block_len));
  return -std::expm1(static_cast<double>(blocks) * std::log1p(-dn));
}

double sharpness_wstar(long long block_len, double alpha, double u0) {
  if (block_len < 1 || !(alpha > 0.0) || !(u0 >= 1.0)) {
    throw std::invalid_argument("sharpness_wstar: bad parameters");
  }
  const double sqrt_n = std::sqrt(static_cast<double>(block_len));
  const double wmax = sqrt_n / (2.0 * u0);
  const auto residual = [&](double w) {
    return std::pow(std::log(sqrt_n / (2.0 * w)), alpha) / 32.0 - w * w;
  };
  if (residual(wmax) > 0.0) {
    // constraint still binding at the indicator boundary; the infimum sits there
    return wmax;
  }
  double lo = 1e-12 * wmax, hi = wmax;
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

ExperimentResult run_sharpness(const SharpnessRunConfig& cfg) {
  if (cfg.trials < 1) {
    throw std::invalid_argument("run_sharpness: trials must be >= 1");
  }
  SharpnessSystem built = build_sharpness(cfg.m, cfg.block_len, cfg.alpha, cfg.grid_m);
  const SharpnessConfig& sc = built.cfg;
  const YoungSpec spec = YoungSpec::close2(cfg.alpha);
  const std::size_t n = static_cast<std::size_t>(sc.n);
  const double delta = delta_power(n, sc.rho);
  const double threshold = static_cast<double>(n) * delta;
  const double factor = main_theorem_factor(n, cfg.alpha);
  const double analytic_p = block_hit_probability(delta, sc.block_len, sc.blocks);
  const double wstar = sharpness_wstar(sc.block_len, cfg.alpha, spec.u0());

  ExperimentResult result;
  result.records.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
    TrialRecord rec;
    rec.experiment = "sharpness";
    rec.alpha = cfg.alpha;
    rec.rho = sc.rho;
    rec.n = sc.n;
    rec.m = sc.m;
    rec.block_len = sc.block_len;
    rec.seed = cfg.base_seed + t;
    rec.size_threshold = threshold;
    rec.factor = factor;
    try {
      const IndexSet J = bernoulli_subset(n, delta, rec.seed);
      rec.J_size = J.indices.size();
      rec.size_ok = static_cast<double>(rec.J_size) >= threshold;
      std::vector<bool> present(n + 1, false);
      for (std::size_t i : J.indices) present[i] = true;
      long long hit_block = 0;
      for (std::size_t b = 0; b < built.blocks.size(); ++b) {
        bool whole = true;
        for (std::size_t i = built.blocks[b].first; i <= built.blocks[b].second; ++i) {
          if (!present[i]) {
            whole = false;
            break;
          }
        }
        if (whole) {
          hit_block = static_cast<long long>(b + 1);
          break;
        }
      }
      rec.extra["hit"] = hit_block != 0;
      rec.extra["block"] = hit_block;
      rec.extra["w_star"] = wstar;
      rec.extra["analytic_p"] = analytic_p;
      if (hit_block != 0) {
        const double witness = sharpness_witness_norm(
            spec, built.sys, built.blocks[static_cast<std::size_t>(hit_block - 1)]);
        rec.norm_lb = witness;
        rec.extra["witness_norm"] = witness;
        rec.norm_ok = witness >= wstar;
      }
      if (cfg.full_sup && !J.indices.empty()) {
        AscentConfig acfg = cfg.opnorm;
        acfg.seed = rng::derive(rec.seed, kAscentSeedTag);
        const auto subset = J.zero_based();
        rec.extra["sup_estimate"] = opnorm_ascent(spec, built.sys, subset, acfg).value;
      }
      rec.ratio = rec.norm_lb / factor;
      rec.joint_ok = (hit_block != 0) && rec.norm_ok;
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.extra["error"] = std::string(e.what());
    }
    result.records[t] = std::move(rec);
  });

  std::size_t hits = 0, failures = 0, witness_below = 0;
  CompensatedSum witness_sum;
  for (const TrialRecord& r : result.records) {
    if (r.failed) {
      ++failures;
      continue;
    }
    if (r.extra.value("hit", false)) {
      ++hits;
      witness_sum.add(r.norm_lb);
      if (!r.norm_ok) ++witness_below;
    }
  }
  const std::size_t graded = cfg.trials - failures;
  const double p_hit = graded ? static_cast<double>(hits) / graded : 0.0;
  result.summary = {{"experiment", "sharpness"},
                    {"m", sc.m},
                    {"N", sc.block_len},
                    {"rho", sc.rho},
                    {"alpha", cfg.alpha},
                    {"n", sc.n},
                    {"blocks", sc.blocks},
                    {"grid_m", sc.grid_m},
                    {"delta", delta},
                    {"trials", cfg.trials},
                    {"failures", failures},
                    {"base_seed", cfg.base_seed},
                    {"delta_pow_N_times_T",
                     std::pow(delta, static_cast<double>(sc.block_len)) *
                         static_cast<double>(sc.blocks)},
                    {"p_hit", p_hit},
                    {"se_hit", proportion_se(p_hit, graded)},
                    {"analytic_p", analytic_p},
                    {"one_minus_inv_e", 1.0 - std::exp(-1.0)},
                    {"mean_witness", hits ? witness_sum.value() / hits : 0.0},
                    {"w_star", wstar},
                    {"witness_below_wstar", witness_below}};
  return result;
}

}  // namespace orlicz
