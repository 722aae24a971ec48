// Benchmark and verification CLI.
//
//   hpca run --config experiments.cfg [--experiment ...] [--reps N]
//            [--seed S] [--grid param=v1,v2,...] [--methods a,b] [--out path]
//   hpca verify --trials N --seed S
//   hpca --version
//
// Exit codes: 0 success, 2 validation error, 3 run failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hpca/hpca.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRunFailure = 3;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::vector<double> parse_grid_values(const std::string& csv) {
  std::vector<double> out;
  for (const std::string& item : split(csv, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw hpca::ParameterError("grid: cannot parse value '" + item + "'");
    }
  }
  if (out.empty()) throw hpca::ParameterError("grid: no values given");
  return out;
}

void apply_key(hpca::ExperimentConfig& cfg, const std::string& key,
               const std::string& value) {
  const auto to_index = [&](const std::string& v) {
    return static_cast<hpca::Index>(std::stoll(v));
  };
  if (key == "experiment") {
    const auto e = hpca::experiment_from_string(value);
    if (!e) throw hpca::ParameterError("unknown experiment '" + value + "'");
    cfg.experiment = *e;
  } else if (key == "reps") {
    cfg.reps = to_index(value);
  } else if (key == "seed") {
    cfg.seed = std::stoull(value);
  } else if (key == "out") {
    cfg.out_path = value;
  } else if (key == "sweep") {
    cfg.sweep_param = value;
  } else if (key == "grid") {
    // Either "v1,v2,..." or "param=v1,v2,...".
    const auto eq = value.find('=');
    if (eq == std::string::npos) {
      cfg.grid = parse_grid_values(value);
    } else {
      cfg.sweep_param = value.substr(0, eq);
      cfg.grid = parse_grid_values(value.substr(eq + 1));
    }
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const std::string& name : split(value, ',')) {
      const auto m = hpca::method_from_string(name);
      if (!m) throw hpca::ParameterError("unknown method '" + name + "'");
      cfg.methods.push_back(*m);
    }
  } else if (key == "p") {
    cfg.p = to_index(value);
  } else if (key == "n") {
    cfg.n = to_index(value);
  } else if (key == "r") {
    cfg.r = to_index(value);
  } else if (key == "p1") {
    cfg.p1 = to_index(value);
  } else if (key == "p2") {
    cfg.p2 = to_index(value);
  } else if (key == "sigma0") {
    cfg.sigma0 = std::stod(value);
  } else if (key == "alpha") {
    cfg.alpha = std::stod(value);
  } else if (key == "lambda") {
    cfg.lambda_strength = std::stod(value);
  } else if (key == "theta") {
    cfg.theta = std::stod(value);
  } else if (key == "tail_ratio") {
    cfg.tail_ratio = std::stod(value);
  } else if (key == "weight_power") {
    cfg.loading_weight_power = std::stod(value);
  } else if (key == "missing_input") {
    if (value == "gram") {
      cfg.missing_input = hpca::MissingInput::kGram;
    } else if (value == "pairwise") {
      cfg.missing_input = hpca::MissingInput::kPairwise;
    } else {
      throw hpca::ParameterError("missing_input must be gram or pairwise");
    }
  } else if (key == "timing") {
    cfg.record_timing = (value == "on" || value == "true" || value == "1");
  } else {
    throw hpca::ParameterError("unknown config key '" + key + "'");
  }
}

int run_command(const std::string& config_path, const std::vector<std::string>& overrides,
                const std::string& plot_path, unsigned threads) {
  hpca::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot read config file '" << config_path << "'\n";
        return kExitValidation;
      }
      std::stringstream buf;
      buf << in.rdbuf();
      for (const auto& [key, value] : hpca::parse_flat_config(buf.str())) {
        apply_key(cfg, key, value);
      }
    }
    for (const std::string& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw hpca::ParameterError("override '" + item + "' is not key=value");
      }
      apply_key(cfg, item.substr(0, eq), item.substr(eq + 1));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    const hpca::RunResult result = hpca::run_experiment(cfg, threads);
    const std::string out_path =
        cfg.out_path.empty() ? std::string("hpca_trials.csv") : cfg.out_path;
    hpca::write_csv(result.trials, out_path);
    hpca::write_csv(result.aggregates, out_path + ".agg.csv");
    if (!plot_path.empty()) hpca::emit_plot(result.aggregates, plot_path);
    std::cerr << "wrote " << result.trials.size() << " trial rows to " << out_path
              << " (aggregates: " << out_path << ".agg.csv)\n";
    if (result.failed_trials > 0) {
      const double frac = static_cast<double>(result.failed_trials) /
                          static_cast<double>(result.trials.size());
      std::cerr << "warning: " << result.failed_trials << " failed trial rows ("
                << frac * 100.0 << "%)\n";
      if (frac >= 0.01) {
        std::cerr << "error: failure fraction >= 1%, aborting\n";
        return kExitRunFailure;
      }
    }
    return 0;
  } catch (const hpca::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
}

int verify_command(hpca::Index trials, std::uint64_t seed) {
  using hpca::LemmaReport;
  hpca::RngStream root(seed);
  bool all_pass = true;
  const auto print = [&](const LemmaReport& rep) {
    const bool pass = rep.violations == 0;
    all_pass = all_pass && pass;
    std::printf("%-22s trials=%-6lld violations=%-4lld worst_ratio=%.6f  %s\n",
                rep.lemma_id.c_str(), static_cast<long long>(rep.trials),
                static_cast<long long>(rep.violations), rep.worst_ratio,
                pass ? "PASS" : "FAIL");
  };
  try {
    hpca::RngStream r1 = root.derive(1), r2 = root.derive(2), r3 = root.derive(3),
                    r4 = root.derive(4);
    print(hpca::check_delta_norm(trials, r1));
    print(hpca::check_diag_projection(trials, r2));
    print(hpca::check_projection_after_svd(trials, r3));
    print(hpca::check_robust_recovery(std::min<hpca::Index>(trials, 100), r4));

    // Spot-check the rank-one objective against the exhaustive minimizer.
    hpca::RngStream r5 = root.derive(5);
    LemmaReport oracle{"rank1_oracle", 3, 0, 0.0};
    for (int k = 0; k < 3; ++k) {
      hpca::Vector u(3);
      for (int i = 0; i < 3; ++i) u(i) = 1.0 + 0.3 * r5.normal();
      u.normalize();
      hpca::Matrix s = u * u.transpose();
      hpca::Matrix z = r5.gaussian_matrix(3, 3);
      z = hpca::off_diagonal(0.5 * (z + z.transpose()));
      s += 0.02 / hpca::spectral_norm(z) * z;
      s /= hpca::spectral_norm(s);
      hpca::HeteroPcaConfig cfg;
      cfg.rank = 1;
      cfg.max_iterations = 2000;
      cfg.tolerance = 1e-13;
      const hpca::HeteroPcaResult res = hpca::hetero_pca(s, cfg);
      const hpca::Matrix trunc = hpca::rank_r_truncation(res.final_iterate, 1);
      const double achieved = hpca::spectral_norm(hpca::off_diagonal(trunc - s));
      const double best = hpca::rank1_offdiag_oracle(s, 1e-8).value;
      if (achieved - best > 1e-6) ++oracle.violations;
      oracle.worst_ratio = std::max(oracle.worst_ratio, achieved - best);
    }
    print(oracle);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return all_pass ? 0 : kExitRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heteroskedastic PCA benchmark harness"};
  app.set_version_flag("--version", std::string("hpca ") + hpca::kLibraryVersion +
                                        "\nrng: " + hpca::kRngAlgorithm);

  auto* run = app.add_subcommand("run", "run an experiment and write CSVs");
  std::string config_path, out_path, plot_path, experiment, grid, methods;
  std::vector<std::string> defines;
  unsigned threads = 0;
  long long reps = -1;
  long long seed = -1;
  run->add_option("--config", config_path, "flat key = value config file");
  run->add_option("--experiment", experiment, "experiment name");
  run->add_option("--reps", reps, "Monte-Carlo repetitions per grid point");
  run->add_option("--seed", seed, "root seed");
  run->add_option("--grid", grid, "sweep grid, e.g. n=100,200,400");
  run->add_option("--methods", methods, "comma list of heteropca,svd,dd");
  run->add_option("--out", out_path, "trials CSV path");
  run->add_option("--plot", plot_path, "also emit an SVG plot to this path");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");
  run->add_option("--set", defines, "extra key=value overrides")->take_all();

  auto* verify = app.add_subcommand("verify", "run the lemma checkers");
  long long verify_trials = 1000;
  long long verify_seed = 1;
  verify->add_option("--trials", verify_trials, "trials per checker");
  verify->add_option("--seed", verify_seed, "root seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (run->parsed()) {
    std::vector<std::string> overrides;
    if (!experiment.empty()) overrides.push_back("experiment=" + experiment);
    if (reps >= 0) overrides.push_back("reps=" + std::to_string(reps));
    if (seed >= 0) overrides.push_back("seed=" + std::to_string(seed));
    if (!grid.empty()) overrides.push_back("grid=" + grid);
    if (!methods.empty()) overrides.push_back("methods=" + methods);
    if (!out_path.empty()) overrides.push_back("out=" + out_path);
    overrides.insert(overrides.end(), defines.begin(), defines.end());
    return run_command(config_path, overrides, plot_path, threads);
  }
  if (verify->parsed()) {
    if (verify_trials < 1) {
      std::cerr << "error: --trials must be >= 1\n";
      return kExitValidation;
    }
    return verify_command(static_cast<hpca::Index>(verify_trials),
                          static_cast<std::uint64_t>(verify_seed));
  }
  std::cerr << app.help();
  return kExitValidation;
}
