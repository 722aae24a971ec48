#ifndef HPCA_BENCH_HPP_
#define HPCA_BENCH_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "hpca/estimators.hpp"
#include "hpca/matrix.hpp"
#include "hpca/models.hpp"
#include "hpca/rng.hpp"
#include "hpca/subspace.hpp"

namespace hpca {

enum class Experiment {
  kPcaVsN,
  kAlphaSweep,
  kDenoisingSweep,
  kPoissonSweep,
  kMissingSweep,
  kApproxRank,
};

enum class Method { kHeteroPca, kSvd, kDiagonalDeletion };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::kPcaVsN: return "pca_vs_n";
    case Experiment::kAlphaSweep: return "alpha_sweep";
    case Experiment::kDenoisingSweep: return "denoising_sweep";
    case Experiment::kPoissonSweep: return "poisson_sweep";
    case Experiment::kMissingSweep: return "missing_sweep";
    case Experiment::kApproxRank: return "approx_rank";
  }
  return "?";
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kHeteroPca: return "heteropca";
    case Method::kSvd: return "svd";
    case Method::kDiagonalDeletion: return "dd";
  }
  return "?";
}

inline std::optional<Experiment> experiment_from_string(const std::string& s) {
  for (Experiment e : {Experiment::kPcaVsN, Experiment::kAlphaSweep,
                       Experiment::kDenoisingSweep, Experiment::kPoissonSweep,
                       Experiment::kMissingSweep, Experiment::kApproxRank}) {
    if (s == to_string(e)) return e;
  }
  return std::nullopt;
}

inline std::optional<Method> method_from_string(const std::string& s) {
  for (Method m : {Method::kHeteroPca, Method::kSvd, Method::kDiagonalDeletion}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

/// Input builder for the missing-data experiment: Gram of the masked matrix,
/// or the pairwise-complete covariance of masked spiked-model samples.
enum class MissingInput { kGram, kPairwise };

struct ExperimentConfig {
  Experiment experiment = Experiment::kPcaVsN;
  // Fixed shape parameters; which ones apply depends on the experiment.
  Index p = 200, n = 400, r = 5;
  Index p1 = 50, p2 = 200;
  double sigma0 = 0.2;
  double alpha = 0.0;
  double lambda_strength = 1.0;
  double theta = 0.3;
  double tail_ratio = 0.1;
  double loading_weight_power = 1.0;
  MissingInput missing_input = MissingInput::kGram;

  std::string sweep_param;  // defaulted per experiment when empty
  std::vector<double> grid;
  Index reps = 200;
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::kHeteroPca, Method::kSvd,
                                 Method::kDiagonalDeletion};
  std::string out_path;
  // Off by default: trial wall times are the one nondeterministic field, and
  // the emitted CSV is byte-reproducible unless timing is requested.
  bool record_timing = false;
};

struct TrialRecord {
  std::string experiment;
  std::string method;
  std::string sweep_param;
  double sweep_value = 0.0;
  Index rep_index = 0;
  std::uint64_t stream_id = 0;
  std::string status = "ok";  // "ok" or a failure reason
  std::optional<double> sin_theta_u;
  std::optional<double> sin_theta_v;
  std::optional<double> frob_rel_err;
  Index iterations = 0;
  double wall_ms = 0.0;
};

struct AggregateRecord {
  std::string experiment;
  std::string method;
  std::string sweep_param;
  double sweep_value = 0.0;
  Index n_reps = 0;
  std::optional<double> mean_sin_theta_u, sd_sin_theta_u;
  std::optional<double> mean_sin_theta_v, sd_sin_theta_v;
  std::optional<double> mean_frob_rel_err, sd_frob_rel_err;
  double mean_iterations = 0.0, sd_iterations = 0.0;
  double mean_wall_ms = 0.0, sd_wall_ms = 0.0;
};

struct RunResult {
  std::vector<TrialRecord> trials;
  std::vector<AggregateRecord> aggregates;
  Index failed_trials = 0;
};

namespace bench_detail {

inline std::string default_sweep_param(Experiment e) {
  switch (e) {
    case Experiment::kPcaVsN: return "n";
    case Experiment::kAlphaSweep: return "alpha";
    case Experiment::kDenoisingSweep: return "sigma0";
    case Experiment::kPoissonSweep: return "lambda";
    case Experiment::kMissingSweep: return "theta";
    case Experiment::kApproxRank: return "tail_ratio";
  }
  return "";
}

inline std::vector<double> default_grid(Experiment e) {
  switch (e) {
    case Experiment::kPcaVsN: return {100, 200, 400, 800};
    case Experiment::kAlphaSweep: return {0, 1, 2, 4};
    case Experiment::kDenoisingSweep: return {0, 0.5, 1.0, 1.5, 2.0};
    case Experiment::kPoissonSweep: return {1, 2, 4, 8, 16};
    case Experiment::kMissingSweep: return {0.1, 0.3, 0.6};
    case Experiment::kApproxRank: return {0, 0.05, 0.1, 0.2};
  }
  return {};
}

inline std::vector<std::string> sweepable_params(Experiment e) {
  switch (e) {
    case Experiment::kPcaVsN: return {"n", "p"};
    case Experiment::kAlphaSweep: return {"alpha", "n"};
    case Experiment::kDenoisingSweep: return {"sigma0", "p2"};
    case Experiment::kPoissonSweep: return {"lambda", "p2"};
    case Experiment::kMissingSweep: return {"theta", "p2"};
    case Experiment::kApproxRank: return {"tail_ratio", "n"};
  }
  return {};
}

struct MethodOutcome {
  OrthonormalBasis basis;
  Index iterations = 1;
};

inline MethodOutcome run_method(Method m, const Matrix& input, Index r) {
  switch (m) {
    case Method::kHeteroPca: {
      HeteroPcaConfig cfg;
      cfg.rank = r;
      // Bench inputs estimate PSD covariance/Gram matrices; see TruncationRule.
      cfg.truncation = TruncationRule::kLargestAlgebraic;
      HeteroPcaResult res = hetero_pca(input, cfg);
      return MethodOutcome{std::move(res.basis), res.iterations_used};
    }
    case Method::kSvd:
      return MethodOutcome{regular_svd_estimator(input, r), 1};
    case Method::kDiagonalDeletion:
      return MethodOutcome{diagonal_deletion_estimator(input, r), 1};
  }
  throw ParameterError("run_method: unknown method");
}

// One generated dataset per trial, shared by all methods.
struct TrialData {
  Matrix input;                           // symmetric matrix fed to the methods
  OrthonormalBasis target_u;              // truth for sin_theta_u
  std::optional<Matrix> input_v;          // right-side input (denoising)
  std::optional<OrthonormalBasis> target_v;
  std::optional<Matrix> y;                // observation, for reconstruction error
  std::optional<Matrix> x;                // signal, for reconstruction error
};

// Fixed parameters come from the config; the one named by sweep_param is
// replaced with the current grid value.
struct ResolvedParams {
  Index p, n, r, p1, p2;
  double sigma0, alpha, lambda_strength, theta, tail_ratio;
};

inline ResolvedParams resolve_params(const ExperimentConfig& cfg, double sweep_value) {
  ResolvedParams out{cfg.p,     cfg.n,     cfg.r,
                     cfg.p1,    cfg.p2,    cfg.sigma0,
                     cfg.alpha, cfg.lambda_strength, cfg.theta,
                     cfg.tail_ratio};
  const std::string& key = cfg.sweep_param;
  if (key == "n") out.n = static_cast<Index>(sweep_value);
  else if (key == "p") out.p = static_cast<Index>(sweep_value);
  else if (key == "p2") out.p2 = static_cast<Index>(sweep_value);
  else if (key == "sigma0") out.sigma0 = sweep_value;
  else if (key == "alpha") out.alpha = sweep_value;
  else if (key == "lambda") out.lambda_strength = sweep_value;
  else if (key == "theta") out.theta = sweep_value;
  else if (key == "tail_ratio") out.tail_ratio = sweep_value;
  else throw ParameterError("unknown sweep parameter '" + key + "'");
  return out;
}

inline TrialData generate_trial(const ExperimentConfig& cfg, double sweep_value,
                                RngStream& rng) {
  const ResolvedParams prm = resolve_params(cfg, sweep_value);
  switch (cfg.experiment) {
    case Experiment::kPcaVsN:
    case Experiment::kAlphaSweep: {
      SpikedCovSpec spec;
      spec.p = prm.p;
      spec.n = prm.n;
      spec.r = prm.r;
      spec.loading_weight_power = cfg.loading_weight_power;
      spec.sigma_profile = cfg.experiment == Experiment::kPcaVsN
                               ? SigmaProfile::uniform01()
                               : SigmaProfile::alpha_profile(prm.alpha);
      SpikedSample s = gen_spiked(spec, rng);
      return TrialData{sample_covariance(s.y), std::move(s.u), {}, {}, {}, {}};
    }
    case Experiment::kDenoisingSweep: {
      DenoisingSpec spec{prm.p1, prm.p2, prm.r, prm.sigma0, -1.0};
      DenoisingSample s = gen_denoising(spec, rng);
      TrialData data{gram(s.y), std::move(s.u), gram(s.y.transpose()),
                     std::move(s.v), std::move(s.y), std::move(s.x)};
      return data;
    }
    case Experiment::kPoissonSweep: {
      PoissonSpec spec{prm.p1, prm.p2, prm.r, prm.lambda_strength};
      PoissonSample s = gen_poisson(spec, rng);
      return TrialData{gram(s.y), std::move(s.u), {}, {}, {}, {}};
    }
    case Experiment::kMissingSweep: {
      if (cfg.missing_input == MissingInput::kGram) {
        MissingSpec spec{DenoisingSpec{prm.p1, prm.p2, prm.r, prm.sigma0, -1.0},
                         prm.theta};
        MissingSample s = gen_missing(spec, rng);
        return TrialData{gram(s.y_tilde), std::move(s.u), {}, {}, {}, {}};
      }
      SpikedCovSpec spec;
      spec.p = prm.p;
      spec.n = prm.n;
      spec.r = prm.r;
      spec.loading_weight_power = cfg.loading_weight_power;
      SpikedSample s = gen_spiked(spec, rng);
      MaskedSample masked = apply_mask(s.y, prm.theta, rng);
      return TrialData{pairwise_complete_covariance(masked.y_tilde, masked.r_mask).cov,
                       std::move(s.u), {}, {}, {}, {}};
    }
    case Experiment::kApproxRank: {
      // Full-spectrum loading: r spikes plus a geometrically decaying tail
      // whose head is tail_ratio * lambda_r.
      OrthonormalBasis full =
          gen_loading_matrix(prm.p, prm.p, cfg.loading_weight_power, rng);
      Vector lambda = Vector::Zero(prm.p);
      for (Index k = 0; k < prm.r; ++k) {
        lambda(k) = 2.0 - static_cast<double>(k) / std::max<Index>(prm.r - 1, 1);
      }
      double tail = prm.tail_ratio * lambda(prm.r - 1);
      for (Index k = prm.r; k < prm.p; ++k) {
        lambda(k) = tail;
        tail *= 0.7;
      }
      const Vector variances = sigma_from_profile(SigmaProfile::uniform01(), prm.p, rng);
      const Matrix y = sample_spiked(full, lambda, variances, prm.n, rng);
      OrthonormalBasis target(full.matrix().leftCols(prm.r));
      return TrialData{sample_covariance(y), std::move(target), {}, {}, {}, {}};
    }
  }
  throw ParameterError("generate_trial: unknown experiment");
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sd_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace bench_detail

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw ParameterError("config: reps must be >= 1");
  if (cfg.grid.empty()) throw ParameterError("config: sweep grid must be nonempty");
  if (cfg.methods.empty()) throw ParameterError("config: methods must be nonempty");
  if (cfg.r < 1) throw ParameterError("config: r must be >= 1");
}

/// Runs reps x grid trials, every trial on its own derived stream, and
/// aggregates per (sweep value, method) cell. Deterministic for a given
/// config regardless of the number of worker threads. Throws IoError-free;
/// trial failures are recorded as failed rows, and more than 1% of them
/// fails the run (see RunResult::failed_trials).
inline RunResult run_experiment(ExperimentConfig cfg, unsigned n_threads = 0) {
  if (cfg.sweep_param.empty()) {
    cfg.sweep_param = bench_detail::default_sweep_param(cfg.experiment);
  }
  if (cfg.grid.empty()) cfg.grid = bench_detail::default_grid(cfg.experiment);
  validate(cfg);
  {
    const auto allowed = bench_detail::sweepable_params(cfg.experiment);
    if (std::find(allowed.begin(), allowed.end(), cfg.sweep_param) == allowed.end()) {
      throw ParameterError("config: experiment " +
                           std::string(to_string(cfg.experiment)) +
                           " cannot sweep '" + cfg.sweep_param + "'");
    }
  }

  const Index n_cells = static_cast<Index>(cfg.grid.size());
  const Index n_trials = n_cells * cfg.reps;
  const RngStream root(cfg.seed);

  // Trial slots are preallocated; workers fill disjoint slots.
  std::vector<std::vector<TrialRecord>> slots(static_cast<std::size_t>(n_trials));
  std::atomic<Index> next{0};

  const auto worker = [&] {
    for (;;) {
      const Index t = next.fetch_add(1);
      if (t >= n_trials) return;
      const Index cell = t / cfg.reps;
      const Index rep = t % cfg.reps;
      const double sweep_value = cfg.grid[static_cast<std::size_t>(cell)];
      const std::uint64_t stream_id = static_cast<std::uint64_t>(t);
      RngStream rng = root.derive(stream_id);

      auto& rows = slots[static_cast<std::size_t>(t)];
      const auto stamp_common = [&](TrialRecord& rec) {
        rec.experiment = to_string(cfg.experiment);
        rec.sweep_param = cfg.sweep_param;
        rec.sweep_value = sweep_value;
        rec.rep_index = rep;
        rec.stream_id = stream_id;
      };
      try {
        const bench_detail::TrialData data =
            bench_detail::generate_trial(cfg, sweep_value, rng);
        for (Method m : cfg.methods) {
          TrialRecord rec;
          stamp_common(rec);
          rec.method = to_string(m);
          try {
            const auto t0 = std::chrono::steady_clock::now();
            bench_detail::MethodOutcome left =
                bench_detail::run_method(m, data.input, cfg.r);
            rec.sin_theta_u = sin_theta(left.basis, data.target_u);
            rec.iterations = left.iterations;
            if (data.input_v.has_value()) {
              bench_detail::MethodOutcome right =
                  bench_detail::run_method(m, *data.input_v, cfg.r);
              rec.sin_theta_v = sin_theta(right.basis, *data.target_v);
              const Matrix xhat = reconstruct_low_rank(*data.y, left.basis, right.basis);
              rec.frob_rel_err =
                  frobenius_norm(xhat - *data.x) / frobenius_norm(*data.x);
            }
            if (cfg.record_timing) {
              rec.wall_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
            }
          } catch (const std::exception& e) {
            rec.status = std::string("estimator: ") + e.what();
          }
          rows.push_back(std::move(rec));
        }
      } catch (const std::exception& e) {
        for (Method m : cfg.methods) {
          TrialRecord rec;
          stamp_common(rec);
          rec.method = to_string(m);
          rec.status = std::string("generator: ") + e.what();
          rows.push_back(std::move(rec));
        }
      }
    }
  };

  unsigned workers = n_threads != 0 ? n_threads : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (workers > 1) {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  } else {
    worker();
  }

  RunResult out;
  for (auto& rows : slots) {
    for (auto& rec : rows) {
      if (rec.status != "ok") ++out.failed_trials;
      out.trials.push_back(std::move(rec));
    }
  }
  std::sort(out.trials.begin(), out.trials.end(),
            [](const TrialRecord& a, const TrialRecord& b) {
              return std::tie(a.sweep_value, a.rep_index, a.method) <
                     std::tie(b.sweep_value, b.rep_index, b.method);
            });

  // Per (sweep value, method) aggregation over successful trials.
  for (double value : cfg.grid) {
    for (Method m : cfg.methods) {
      const std::string method = to_string(m);
      std::vector<double> su, sv, fr, iters, wall;
      for (const TrialRecord& rec : out.trials) {
        if (rec.status != "ok" || rec.sweep_value != value || rec.method != method) {
          continue;
        }
        if (rec.sin_theta_u) su.push_back(*rec.sin_theta_u);
        if (rec.sin_theta_v) sv.push_back(*rec.sin_theta_v);
        if (rec.frob_rel_err) fr.push_back(*rec.frob_rel_err);
        iters.push_back(static_cast<double>(rec.iterations));
        wall.push_back(rec.wall_ms);
      }
      AggregateRecord agg;
      agg.experiment = to_string(cfg.experiment);
      agg.method = method;
      agg.sweep_param = cfg.sweep_param;
      agg.sweep_value = value;
      agg.n_reps = static_cast<Index>(iters.size());
      if (!su.empty()) {
        agg.mean_sin_theta_u = bench_detail::mean_of(su);
        agg.sd_sin_theta_u = bench_detail::sd_of(su, *agg.mean_sin_theta_u);
      }
      if (!sv.empty()) {
        agg.mean_sin_theta_v = bench_detail::mean_of(sv);
        agg.sd_sin_theta_v = bench_detail::sd_of(sv, *agg.mean_sin_theta_v);
      }
      if (!fr.empty()) {
        agg.mean_frob_rel_err = bench_detail::mean_of(fr);
        agg.sd_frob_rel_err = bench_detail::sd_of(fr, *agg.mean_frob_rel_err);
      }
      if (!iters.empty()) {
        agg.mean_iterations = bench_detail::mean_of(iters);
        agg.sd_iterations = bench_detail::sd_of(iters, agg.mean_iterations);
        agg.mean_wall_ms = bench_detail::mean_of(wall);
        agg.sd_wall_ms = bench_detail::sd_of(wall, agg.mean_wall_ms);
      }
      out.aggregates.push_back(std::move(agg));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV emission and parsing (RFC-4180 style, '.' decimal separator, 17
// significant digits so doubles round-trip exactly).

namespace bench_detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : std::string();
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace bench_detail

inline constexpr const char* kTrialsCsvHeader =
    "experiment,method,sweep_param,sweep_value,rep_index,stream_id,status,"
    "sin_theta_u,sin_theta_v,frob_rel_err,iterations,wall_ms";

inline void write_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_csv: cannot open '" + path + "' for writing");
  out << kTrialsCsvHeader << "\n";
  for (const TrialRecord& r : records) {
    out << bench_detail::csv_escape(r.experiment) << ','
        << bench_detail::csv_escape(r.method) << ','
        << bench_detail::csv_escape(r.sweep_param) << ','
        << bench_detail::format_double(r.sweep_value) << ',' << r.rep_index << ','
        << r.stream_id << ',' << bench_detail::csv_escape(r.status) << ','
        << bench_detail::format_optional(r.sin_theta_u) << ','
        << bench_detail::format_optional(r.sin_theta_v) << ','
        << bench_detail::format_optional(r.frob_rel_err) << ',' << r.iterations << ','
        << bench_detail::format_double(r.wall_ms) << "\n";
  }
  if (!out) throw IoError("write_csv: failed writing '" + path + "'");
}

inline constexpr const char* kAggregatesCsvHeader =
    "experiment,method,sweep_param,sweep_value,n_reps,"
    "mean_sin_theta_u,sd_sin_theta_u,mean_sin_theta_v,sd_sin_theta_v,"
    "mean_frob_rel_err,sd_frob_rel_err,mean_iterations,sd_iterations,"
    "mean_wall_ms,sd_wall_ms";

inline void write_csv(const std::vector<AggregateRecord>& records,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_csv: cannot open '" + path + "' for writing");
  out << kAggregatesCsvHeader << "\n";
  for (const AggregateRecord& r : records) {
    out << bench_detail::csv_escape(r.experiment) << ','
        << bench_detail::csv_escape(r.method) << ','
        << bench_detail::csv_escape(r.sweep_param) << ','
        << bench_detail::format_double(r.sweep_value) << ',' << r.n_reps << ','
        << bench_detail::format_optional(r.mean_sin_theta_u) << ','
        << bench_detail::format_optional(r.sd_sin_theta_u) << ','
        << bench_detail::format_optional(r.mean_sin_theta_v) << ','
        << bench_detail::format_optional(r.sd_sin_theta_v) << ','
        << bench_detail::format_optional(r.mean_frob_rel_err) << ','
        << bench_detail::format_optional(r.sd_frob_rel_err) << ','
        << bench_detail::format_double(r.mean_iterations) << ','
        << bench_detail::format_double(r.sd_iterations) << ','
        << bench_detail::format_double(r.mean_wall_ms) << ','
        << bench_detail::format_double(r.sd_wall_ms) << "\n";
  }
  if (!out) throw IoError("write_csv: failed writing '" + path + "'");
}

/// Parses a trials CSV produced by write_csv.
inline std::vector<TrialRecord> parse_trials_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("parse_trials_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("parse_trials_csv: empty file " + path);
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = bench_detail::split_csv_line(line);
    if (f.size() != 12) throw IoError("parse_trials_csv: malformed row in " + path);
    TrialRecord r;
    r.experiment = f[0];
    r.method = f[1];
    r.sweep_param = f[2];
    r.sweep_value = std::stod(f[3]);
    r.rep_index = static_cast<Index>(std::stoll(f[4]));
    r.stream_id = static_cast<std::uint64_t>(std::stoull(f[5]));
    r.status = f[6];
    if (!f[7].empty()) r.sin_theta_u = std::stod(f[7]);
    if (!f[8].empty()) r.sin_theta_v = std::stod(f[8]);
    if (!f[9].empty()) r.frob_rel_err = std::stod(f[9]);
    r.iterations = static_cast<Index>(std::stoll(f[10]));
    r.wall_ms = std::stod(f[11]);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Static SVG plot: mean sin_theta_u with +-sd error bars versus sweep value,
// one polyline per method. Purely presentational; bytes are a deterministic
// function of the aggregates.

inline void emit_plot(const std::vector<AggregateRecord>& aggregates,
                      const std::string& path) {
  if (aggregates.empty()) throw ParameterError("emit_plot: aggregates must be nonempty");
  const double width = 640, height = 480;
  const double ml = 70, mr = 160, mt = 30, mb = 50;

  std::vector<std::string> methods;
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  bool first = true;
  for (const auto& a : aggregates) {
    if (std::find(methods.begin(), methods.end(), a.method) == methods.end()) {
      methods.push_back(a.method);
    }
    if (!a.mean_sin_theta_u) continue;
    const double sd = a.sd_sin_theta_u.value_or(0.0);
    const double lo = *a.mean_sin_theta_u - sd, hi = *a.mean_sin_theta_u + sd;
    if (first) {
      x_min = x_max = a.sweep_value;
      y_min = lo;
      y_max = hi;
      first = false;
    } else {
      x_min = std::min(x_min, a.sweep_value);
      x_max = std::max(x_max, a.sweep_value);
      y_min = std::min(y_min, lo);
      y_max = std::max(y_max, hi);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const auto sx = [&](double x) {
    return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr);
  };
  const auto sy = [&](double y) {
    return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
  };
  const auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(height - mb) << "\" x2=\""
      << fmt(width - mr) << "\" y2=\"" << fmt(height - mb)
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml)
      << "\" y2=\"" << fmt(height - mb) << "\" stroke=\"black\"/>\n";
  // Axis extremes as tick labels.
  svg << "<text x=\"" << fmt(ml) << "\" y=\"" << fmt(height - mb + 18)
      << "\" font-size=\"11\">" << fmt(x_min) << "</text>\n"
      << "<text x=\"" << fmt(width - mr) << "\" y=\"" << fmt(height - mb + 18)
      << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(x_max) << "</text>\n"
      << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(height - mb)
      << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(y_min) << "</text>\n"
      << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(mt + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(y_max) << "</text>\n";

  int color_idx = 0;
  for (const std::string& method : methods) {
    const char* color = kColors[color_idx % 4];
    std::ostringstream points;
    for (const auto& a : aggregates) {
      if (a.method != method || !a.mean_sin_theta_u) continue;
      const double x = sx(a.sweep_value), y = sy(*a.mean_sin_theta_u);
      points << fmt(x) << "," << fmt(y) << " ";
      const double sd = a.sd_sin_theta_u.value_or(0.0);
      svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(sy(*a.mean_sin_theta_u - sd))
          << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(sy(*a.mean_sin_theta_u + sd))
          << "\" stroke=\"" << color << "\"/>\n";
      svg << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\""
        << points.str() << "\"/>\n";
    svg << "<text x=\"" << fmt(width - mr + 12) << "\" y=\""
        << fmt(mt + 16 * (color_idx + 1)) << "\" font-size=\"12\" fill=\"" << color
        << "\">" << method << "</text>\n";
    ++color_idx;
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit_plot: cannot open '" + path + "' for writing");
  out << svg.str();
  if (!out) throw IoError("emit_plot: failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Flat key = value config text ('#' comments, UTF-8).

inline std::map<std::string, std::string> parse_flat_config(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  const auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return std::string();
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
  };
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(line_no) +
                           ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParameterError("config line " + std::to_string(line_no) + ": empty key");
    }
    out[key] = value;
  }
  return out;
}

}  // namespace hpca

#endif  // HPCA_BENCH_HPP_
