#include "orlicz/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orlicz/experiments.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/opnorm.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/sampling.hpp"
#include "orlicz/space.hpp"
#include "orlicz/systems.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

namespace {

using nlohmann::json;

// "fourier:n=8,M=64" (M defaults to max(4n, 1024)), "walsh:d=3", "csv:PATH"
System parse_system(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  const auto get_num = [&](const std::string& key) -> std::optional<long long> {
    const auto pos = args.find(key + "=");
    if (pos == std::string::npos) return std::nullopt;
    return std::stoll(args.substr(pos + key.size() + 1));
  };
  if (kind == "fourier") {
    const auto n = get_num("n");
    if (!n || *n < 1) {
      throw std::invalid_argument("system: fourier needs n=<positive>");
    }
    const auto m = get_num("M");
    const std::size_t grid =
        m ? static_cast<std::size_t>(*m)
          : std::max<std::size_t>(4 * static_cast<std::size_t>(*n), 1024);
    return System::fourier(static_cast<std::size_t>(*n), grid);
  }
  if (kind == "walsh") {
    const auto d = get_num("d");
    if (!d || *d < 1) {
      throw std::invalid_argument("system: walsh needs d=<positive>");
    }
    return System::walsh(static_cast<unsigned>(*d));
  }
  if (kind == "csv") {
    if (args.empty()) {
      throw std::invalid_argument("system: csv needs a path");
    }
    return System::load_csv(args);
  }
  throw std::invalid_argument("system: unknown kind '" + kind + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot open output file " + path);
  }
  out << text;
}

void write_provenance(const std::string& out_prefix, const std::string& subcommand,
                      const json& params) {
  const json sidecar = {{"tool", "orlicz"},
                        {"version", kToolVersion},
                        {"subcommand", subcommand},
                        {"rng", "splitmix64-counter-v1"},
                        {"parameters", params}};
  write_text(out_prefix + ".provenance.json", sidecar.dump(2) + "\n");
}

json validation_to_json(const ValidationReport& r) {
  return {{"zero_at_zero", r.zero_at_zero},
          {"increasing", r.increasing},
          {"convex", r.convex},
          {"nice_at_zero", r.nice_at_zero},
          {"nice_at_infinity", r.nice_at_infinity},
          {"all_ok", r.all_ok()}};
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    out.push_back(static_cast<std::size_t>(std::stoull(text.substr(start, end - start))));
    start = end + 1;
  }
  if (out.empty()) {
    throw std::invalid_argument("empty list");
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    out.push_back(std::stod(text.substr(start, end - start)));
    start = end + 1;
  }
  if (out.empty()) {
    throw std::invalid_argument("empty list");
  }
  return out;
}

void emit_experiment_outputs(const std::string& out_prefix, const std::string& sub,
                             const json& params, const ExperimentResult& res) {
  if (!out_prefix.empty()) {
    write_records_csv(out_prefix + ".csv", res.records);
    write_text(out_prefix + ".summary.json", res.summary.dump(2) + "\n");
    write_provenance(out_prefix, sub, params);
  }
  std::cout << res.summary.dump(2) << "\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Luxemburg norms of random orthogonal subsystems"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // validate-young
  auto* val = app.add_subcommand("validate-young", "scan a Young family for the axioms");
  std::string val_family;
  double val_lo = 1e-6, val_hi = 1e8;
  std::size_t val_points = 400;
  std::string val_out;
  val->add_option("--family", val_family, "family spec, e.g. close2:alpha=1")->required();
  val->add_option("--grid-lo", val_lo, "validation grid minimum (default 1e-6)");
  val->add_option("--grid-hi", val_hi, "validation grid maximum (default 1e8)");
  val->add_option("--grid-points", val_points, "validation grid size (default 400)");
  val->add_option("--out", val_out, "also write the JSON report here");

  // norm
  auto* nrm = app.add_subcommand("norm", "Luxemburg norm of a function from CSV");
  std::string nrm_family, nrm_func;
  std::size_t nrm_grid = 0;
  double nrm_rel_tol = 1e-10;
  nrm->add_option("--family", nrm_family, "family spec")->required();
  nrm->add_option("--func", nrm_func, "CSV with re,im rows, one per atom")->required();
  nrm->add_option("--grid", nrm_grid,
                  "expected atom count (checked against the file when given)");
  nrm->add_option("--rel-tol", nrm_rel_tol, "solver relative tolerance (default 1e-10)");

  // opnorm
  auto* opn = app.add_subcommand("opnorm", "operator-norm lower bound on a subset");
  std::string opn_family, opn_system, opn_subset_json;
  double opn_delta = -1.0;
  std::uint64_t opn_subset_seed = kDefaultSeed;
  int opn_restarts = 8, opn_iters = 500;
  double opn_tol = 1e-8;
  std::uint64_t opn_seed = kDefaultSeed;
  opn->add_option("--family", opn_family, "family spec")->required();
  opn->add_option("--system", opn_system, "fourier:n=..,M=.. | walsh:d=.. | csv:PATH")
      ->required();
  opn->add_option("--subset-json", opn_subset_json, "IndexSet JSON file");
  opn->add_option("--delta", opn_delta, "Bernoulli density for a fresh subset");
  opn->add_option("--subset-seed", opn_subset_seed, "seed for --delta subsets");
  opn->add_option("--restarts", opn_restarts, "ascent restarts (default 8)");
  opn->add_option("--iters", opn_iters, "ascent iteration cap (default 500)");
  opn->add_option("--tol", opn_tol, "ascent tolerance (default 1e-8)");
  opn->add_option("--seed", opn_seed, "ascent restart seed");

  // experiment
  auto* expcmd = app.add_subcommand("experiment", "run a reproduction experiment");
  expcmd->require_subcommand(1);
  std::string exp_alphas = "1", exp_nlist = "256,1024";
  int exp_trials = 100, exp_threads = 1, exp_restarts = 4, exp_iters = 200;
  double exp_tol = 1e-7;
  std::uint64_t exp_seed = kDefaultSeed;
  std::string exp_out;
  auto* exp_main = expcmd->add_subcommand("main", "random-subsystem norm scaling");
  exp_main->add_option("--alphas", exp_alphas, "comma list of alpha values");
  exp_main->add_option("--n-list", exp_nlist, "comma list of system sizes");
  exp_main->add_option("--trials", exp_trials, "trials per (alpha, n)");
  exp_main->add_option("--seed", exp_seed, "base seed (trial t uses seed + t)");
  exp_main->add_option("--out", exp_out, "output prefix for .csv/.summary.json");
  exp_main->add_option("--threads", exp_threads, "worker cap (default 1)");
  exp_main->add_option("--restarts", exp_restarts, "ascent restarts per trial");
  exp_main->add_option("--iters", exp_iters, "ascent iteration cap");
  exp_main->add_option("--tol", exp_tol, "ascent tolerance");

  double triv_alpha = 1.0;
  auto* exp_triv = expcmd->add_subcommand("trivial", "full-system ceiling check");
  exp_triv->add_option("--alpha", triv_alpha, "alpha");
  exp_triv->add_option("--n-list", exp_nlist, "comma list of system sizes");
  exp_triv->add_option("--trials", exp_trials, "random unit vectors per n");
  exp_triv->add_option("--seed", exp_seed, "base seed");
  exp_triv->add_option("--out", exp_out, "output prefix");
  exp_triv->add_option("--threads", exp_threads, "worker cap");
  exp_triv->add_option("--restarts", exp_restarts, "ascent restarts");
  exp_triv->add_option("--iters", exp_iters, "ascent iteration cap");
  exp_triv->add_option("--tol", exp_tol, "ascent tolerance");

  long long sh_m = 4, sh_block = 2, sh_grid = 64;
  double sh_alpha = 1.0;
  bool sh_full_sup = false;
  auto* exp_sh = expcmd->add_subcommand("sharpness", "block-hit lower bound");
  exp_sh->add_option("--m", sh_m, "m (n = N m^m)");
  exp_sh->add_option("--N", sh_block, "block length N");
  exp_sh->add_option("--alpha", sh_alpha, "alpha");
  exp_sh->add_option("--grid", sh_grid, "grid size M >= 32 N");
  exp_sh->add_option("--trials", exp_trials, "trials");
  exp_sh->add_option("--seed", exp_seed, "base seed");
  exp_sh->add_option("--out", exp_out, "output prefix");
  exp_sh->add_option("--threads", exp_threads, "worker cap");
  exp_sh->add_flag("--full-sup", sh_full_sup, "also estimate the subsystem sup per trial");

  // hit-prob
  auto* hit = app.add_subcommand("hit-prob", "exact block-hit probability");
  double hit_delta = 0.0;
  long long hit_n = 1, hit_t = 1;
  hit->add_option("--delta", hit_delta, "Bernoulli density")->required();
  hit->add_option("--N", hit_n, "block length")->required();
  hit->add_option("--T", hit_t, "number of blocks")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version path prints via CLI11
      return app.exit(e);
    }
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 1;
  }

  try {
    if (*val) {
      const YoungSpec spec = YoungSpec::parse(val_family);
      const auto grid = log_grid(val_lo, val_hi, val_points);
      const ValidationReport rep = young_validate(spec, grid);
      json out = {{"family", spec.to_string()},
                  {"grid", {{"lo", val_lo}, {"hi", val_hi}, {"points", val_points}}},
                  {"flags", validation_to_json(rep)}};
      std::cout << out.dump(2) << "\n";
      if (!val_out.empty()) {
        write_text(val_out, out.dump(2) + "\n");
        write_provenance(val_out, "validate-young", {{"family", val_family}});
      }
      return 0;
    }

    if (*nrm) {
      const YoungSpec spec = YoungSpec::parse(nrm_family);
      const Func f = read_func_csv(nrm_func);
      if (nrm_grid != 0 && nrm_grid != f.values.size()) {
        throw std::invalid_argument("norm: --grid does not match the file's row count");
      }
      const ProbSpace space = ProbSpace::uniform_grid(f.values.size());
      const NormResult res = luxemburg_norm(space, spec, f, nrm_rel_tol);
      const json out = {{"family", spec.to_string()},
                        {"atoms", f.values.size()},
                        {"value", res.value},
                        {"modular_at_value", res.modular_at_value},
                        {"iterations", res.iterations},
                        {"bracket", {res.lo, res.hi}}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*opn) {
      const YoungSpec spec = YoungSpec::parse(opn_family);
      const System sys = parse_system(opn_system);
      IndexSet subset;
      if (!opn_subset_json.empty()) {
        std::ifstream in(opn_subset_json);
        if (!in) {
          throw std::invalid_argument("opnorm: cannot open " + opn_subset_json);
        }
        json j;
        in >> j;
        subset = IndexSet::from_json(j);
        if (subset.n != sys.size()) {
          throw std::invalid_argument("opnorm: subset n does not match the system");
        }
      } else if (opn_delta >= 0.0) {
        subset = bernoulli_subset(sys.size(), opn_delta, opn_subset_seed);
      } else {
        throw std::invalid_argument("opnorm: need --subset-json or --delta");
      }
      if (subset.indices.empty()) {
        throw std::invalid_argument("opnorm: sampled subset is empty");
      }
      AscentConfig acfg;
      acfg.restarts = opn_restarts;
      acfg.max_iters = opn_iters;
      acfg.tol = opn_tol;
      acfg.seed = opn_seed;
      const auto zero_based = subset.zero_based();
      const OpNormEstimate est = opnorm_ascent(spec, sys, zero_based, acfg);
      json argmax = json::array();
      for (const cplx& z : est.argmax) argmax.push_back({z.real(), z.imag()});
      const json out = {{"family", spec.to_string()},
                        {"value", est.value},
                        {"converged", est.converged},
                        {"restarts_used", est.restarts_used},
                        {"subset", subset.to_json()},
                        {"argmax", argmax}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*exp_main) {
      MainExperimentConfig cfg;
      cfg.alphas = parse_double_list(exp_alphas);
      cfg.n_list = parse_n_list(exp_nlist);
      cfg.trials = exp_trials;
      cfg.base_seed = exp_seed;
      cfg.threads = exp_threads;
      cfg.opnorm.restarts = exp_restarts;
      cfg.opnorm.max_iters = exp_iters;
      cfg.opnorm.tol = exp_tol;
      const json params = {{"alphas", cfg.alphas},   {"n_list", cfg.n_list},
                           {"trials", cfg.trials},   {"base_seed", cfg.base_seed},
                           {"threads", cfg.threads}, {"restarts", exp_restarts},
                           {"iters", exp_iters},     {"tol", exp_tol}};
      emit_experiment_outputs(exp_out, "experiment main", params,
                              run_main_experiment(cfg));
      return 0;
    }

    if (*exp_triv) {
      TrivialBoundConfig cfg;
      cfg.alpha = triv_alpha;
      cfg.n_list = parse_n_list(exp_nlist);
      cfg.trials = exp_trials;
      cfg.base_seed = exp_seed;
      cfg.threads = exp_threads;
      cfg.opnorm.restarts = exp_restarts;
      cfg.opnorm.max_iters = exp_iters;
      cfg.opnorm.tol = exp_tol;
      const json params = {{"alpha", cfg.alpha},     {"n_list", cfg.n_list},
                           {"trials", cfg.trials},   {"base_seed", cfg.base_seed},
                           {"threads", cfg.threads}, {"restarts", exp_restarts},
                           {"iters", exp_iters},     {"tol", exp_tol}};
      const ExperimentResult res = run_trivial_bound(cfg);
      emit_experiment_outputs(exp_out, "experiment trivial", params, res);
      if (res.summary.at("violations").get<std::size_t>() > 0) {
        std::cerr << "trivial bound violated; the ceiling is proved, so this is a bug\n";
        return 3;
      }
      return 0;
    }

    if (*exp_sh) {
      SharpnessRunConfig cfg;
      cfg.m = sh_m;
      cfg.block_len = sh_block;
      cfg.alpha = sh_alpha;
      cfg.grid_m = sh_grid;
      cfg.trials = exp_trials;
      cfg.base_seed = exp_seed;
      cfg.threads = exp_threads;
      cfg.full_sup = sh_full_sup;
      const json params = {{"m", cfg.m},
                           {"N", cfg.block_len},
                           {"alpha", cfg.alpha},
                           {"grid", cfg.grid_m},
                           {"trials", cfg.trials},
                           {"base_seed", cfg.base_seed},
                           {"threads", cfg.threads},
                           {"full_sup", cfg.full_sup}};
      emit_experiment_outputs(exp_out, "experiment sharpness", params,
                              run_sharpness(cfg));
      return 0;
    }

    if (*hit) {
      std::printf("%.6f\n", block_hit_probability(hit_delta, hit_n, hit_t));
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace orlicz
