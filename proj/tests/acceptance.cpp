// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Statistical criteria run the full benchmark pipeline at
// the review scale (hundreds of Monte-Carlo repetitions), so the whole suite
// takes a couple of minutes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hpca/hpca.hpp"

using namespace hpca;

namespace {

struct Criterion {
  int number;
  std::string description;
  std::function<bool(std::string&)> run;
};

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

const AggregateRecord& cell(const RunResult& run, const std::string& method,
                            double value) {
  for (const AggregateRecord& a : run.aggregates) {
    if (a.method == method && a.sweep_value == value) return a;
  }
  throw std::runtime_error("missing aggregate cell");
}

double stderr_of(const AggregateRecord& a) {
  return *a.sd_sin_theta_u / std::sqrt(static_cast<double>(a.n_reps));
}

bool criterion_noiseless_recovery(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const OrthonormalBasis u = construct_incoherent_basis(60, 3);
  Vector lambda(3);
  lambda << 3, 2, 1;
  const Matrix m = u.matrix() * lambda.asDiagonal() * u.matrix().transpose();
  HeteroPcaConfig cfg;
  cfg.rank = 3;
  cfg.max_iterations = 100;
  cfg.tolerance = 1e-12;
  const HeteroPcaResult res = hetero_pca(m, cfg);
  const double st = sin_theta(res.basis, u);
  const double secs = elapsed_s(t0);
  detail = fmt("sin_theta=%.2e iters=%lld runtime=%.3fs", st,
               static_cast<long long>(res.iterations_used), secs);
  return st <= 1e-8 && res.iterations_used <= 100 && secs < 1.0;
}

bool criterion_diagonal_invariance(std::string& detail) {
  RngStream rng(1001);
  HeteroPcaConfig cfg;
  cfg.rank = 3;
  cfg.max_iterations = 25;
  for (int t = 0; t < 100; ++t) {
    const Index p = 10 + static_cast<Index>(rng.next_u64() % 21);
    Matrix s = rng.gaussian_matrix(p, p);
    s = 0.5 * (s + s.transpose()).eval();
    Matrix shifted = s;
    for (Index i = 0; i < p; ++i) shifted(i, i) += 20.0 * (rng.uniform() - 0.5);
    const HeteroPcaResult a = hetero_pca(s, cfg);
    const HeteroPcaResult b = hetero_pca(shifted, cfg);
    if (a.basis.matrix() != b.basis.matrix() || a.final_iterate != b.final_iterate ||
        a.diag_residual_history != b.diag_residual_history ||
        a.iterations_used != b.iterations_used) {
      detail = fmt("bit mismatch at fixture %d", t);
      return false;
    }
  }
  detail = "100 fixtures bit-identical";
  return true;
}

bool criterion_lemma_suite(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream root(1002);
  RngStream r1 = root.derive(1), r2 = root.derive(2), r3 = root.derive(3);
  const LemmaReport delta = check_delta_norm(1000, r1);
  const LemmaReport proj = check_diag_projection(1000, r2);
  const LemmaReport svd = check_projection_after_svd(1000, r3);
  bool sharp_ok = true;
  const double expected[] = {1.0, 1.5, 1.75, 1.875};
  const Index ps[] = {2, 4, 8, 16};
  for (int i = 0; i < 4; ++i) {
    sharp_ok = sharp_ok && std::abs(delta_sharp_family_ratio(ps[i]) - expected[i]) <= 1e-10;
  }
  const double secs = elapsed_s(t0);
  detail = fmt("violations=%lld/%lld/%lld sharp_ok=%d runtime=%.1fs",
               static_cast<long long>(delta.violations),
               static_cast<long long>(proj.violations),
               static_cast<long long>(svd.violations), sharp_ok ? 1 : 0, secs);
  return delta.violations == 0 && proj.violations == 0 && svd.violations == 0 &&
         sharp_ok && secs < 60.0;
}

bool criterion_robust_recovery(std::string& detail) {
  RngStream rng(1003);
  const LemmaReport rep = check_robust_recovery(100, rng);
  detail = fmt("violations=%lld worst_ratio=%.3f",
               static_cast<long long>(rep.violations), rep.worst_ratio);
  return rep.violations == 0;
}

bool criterion_oracle_equivalence(std::string& detail) {
  RngStream rng(1004);
  double worst_gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    Vector u(3);
    for (int i = 0; i < 3; ++i) u(i) = 1.0 + 0.3 * rng.normal();
    u.normalize();
    Matrix z = rng.gaussian_matrix(3, 3);
    z = off_diagonal(0.5 * (z + z.transpose()));
    z *= 0.02 / spectral_norm(z);
    Matrix s = u * u.transpose() + z;
    s /= spectral_norm(s);

    HeteroPcaConfig cfg;
    cfg.rank = 1;
    cfg.tolerance = 1e-13;
    cfg.max_iterations = 2000;
    const HeteroPcaResult res = hetero_pca(s, cfg);
    const Matrix trunc = rank_r_truncation(res.final_iterate, 1);
    const double achieved = spectral_norm(off_diagonal(trunc - s));
    const double best = rank1_offdiag_oracle(s, 1e-8).value;
    worst_gap = std::max(worst_gap, achieved - best);
  }
  detail = fmt("worst residual gap=%.2e over 20 instances", worst_gap);
  return worst_gap <= 1e-6;
}

bool criterion_pca_ordering(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kPcaVsN;
  cfg.p = 200;
  cfg.r = 5;
  cfg.grid = {400};
  cfg.reps = 200;
  cfg.seed = 1006;
  cfg.methods = {Method::kHeteroPca, Method::kSvd};
  const RunResult run = run_experiment(cfg);
  const AggregateRecord& h = cell(run, "heteropca", 400);
  const AggregateRecord& s = cell(run, "svd", 400);
  const double sep = (*s.mean_sin_theta_u - *h.mean_sin_theta_u) /
                     std::hypot(stderr_of(h), stderr_of(s));
  const double secs = elapsed_s(t0);
  detail = fmt("heteropca=%.4f svd=%.4f separation=%.1f stderr runtime=%.0fs",
               *h.mean_sin_theta_u, *s.mean_sin_theta_u, sep, secs);
  return *h.mean_sin_theta_u < *s.mean_sin_theta_u && sep > 2.0 && secs < 300.0;
}

bool criterion_alpha_sweep(std::string& detail) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kAlphaSweep;
  cfg.p = 50;
  cfg.n = 30;
  cfg.r = 5;
  cfg.grid = {0, 1, 2, 4};
  cfg.reps = 200;
  cfg.seed = 1007;
  cfg.methods = {Method::kHeteroPca, Method::kSvd};
  const RunResult run = run_experiment(cfg);
  const AggregateRecord& h0 = cell(run, "heteropca", 0);
  const AggregateRecord& s0 = cell(run, "svd", 0);
  const AggregateRecord& h4 = cell(run, "heteropca", 4);
  const AggregateRecord& s4 = cell(run, "svd", 4);
  const double rel0 = std::abs(*h0.mean_sin_theta_u - *s0.mean_sin_theta_u) /
                      *s0.mean_sin_theta_u;
  const double sep4 = (*s4.mean_sin_theta_u - *h4.mean_sin_theta_u) /
                      std::hypot(stderr_of(h4), stderr_of(s4));
  detail = fmt("alpha0 rel gap=%.3f; alpha4 heteropca=%.4f svd=%.4f sep=%.1f",
               rel0, *h4.mean_sin_theta_u, *s4.mean_sin_theta_u, sep4);
  return rel0 <= 0.20 && *h4.mean_sin_theta_u < *s4.mean_sin_theta_u && sep4 > 2.0;
}

bool criterion_rate(std::string& detail) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kPcaVsN;
  cfg.p = 100;
  cfg.r = 3;
  cfg.grid = {200, 800, 3200};
  cfg.reps = 200;
  cfg.seed = 1008;
  cfg.methods = {Method::kHeteroPca};
  const RunResult run = run_experiment(cfg);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double n : cfg.grid) {
    const double x = std::log(n);
    const double y = std::log(*cell(run, "heteropca", n).mean_sin_theta_u);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = 3.0;
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  detail = fmt("means=%.4f/%.4f/%.4f log-log slope=%.3f",
               *cell(run, "heteropca", 200).mean_sin_theta_u,
               *cell(run, "heteropca", 800).mean_sin_theta_u,
               *cell(run, "heteropca", 3200).mean_sin_theta_u, slope);
  return slope >= -0.65 && slope <= -0.35;
}

bool criterion_missing_consistency(std::string& detail) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kMissingSweep;
  cfg.p1 = 50;
  cfg.p2 = 800;
  cfg.r = 3;
  cfg.sigma0 = 0.2;
  cfg.grid = {0.1, 0.3, 0.6};
  cfg.reps = 100;
  cfg.seed = 1009;
  cfg.methods = {Method::kHeteroPca};
  const RunResult run = run_experiment(cfg);
  const double m1 = *cell(run, "heteropca", 0.1).mean_sin_theta_u;
  const double m3 = *cell(run, "heteropca", 0.3).mean_sin_theta_u;
  const double m6 = *cell(run, "heteropca", 0.6).mean_sin_theta_u;
  detail = fmt("means=%.4f/%.4f/%.4f for theta=0.1/0.3/0.6", m1, m3, m6);
  return m1 > m3 && m3 > m6;
}

bool criterion_poisson_consistency(std::string& detail) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kPoissonSweep;
  cfg.p1 = 50;
  cfg.p2 = 500;
  cfg.r = 3;
  cfg.grid = {1, 4, 16};
  cfg.reps = 100;
  cfg.seed = 1010;
  cfg.methods = {Method::kHeteroPca, Method::kSvd};
  const RunResult run = run_experiment(cfg);
  const double h1 = *cell(run, "heteropca", 1).mean_sin_theta_u;
  const double h4 = *cell(run, "heteropca", 4).mean_sin_theta_u;
  const double h16 = *cell(run, "heteropca", 16).mean_sin_theta_u;
  const double s1 = *cell(run, "svd", 1).mean_sin_theta_u;
  detail = fmt("heteropca=%.4f/%.4f/%.4f svd(lambda=1)=%.4f", h1, h4, h16, s1);
  return h1 > h4 && h4 > h16 && h1 <= s1;
}

bool criterion_determinism(std::string& detail) {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kDenoisingSweep;
  cfg.p1 = 20;
  cfg.p2 = 50;
  cfg.r = 2;
  cfg.grid = {0.5, 1.5};
  cfg.reps = 4;
  cfg.seed = 1011;
  const auto render = [&](unsigned threads) {
    const RunResult run = run_experiment(cfg, threads);
    const std::string path = "acceptance_det.csv";
    write_csv(run.trials, path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::remove(path.c_str());
    return buf.str();
  };
  const std::string a = render(1);
  const std::string b = render(2);
  const std::string c = render(4);
  detail = fmt("%zu bytes, 1/2/4 workers identical=%d", a.size(),
               (a == b && b == c) ? 1 : 0);
  return a == b && b == c;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "noiseless exact recovery (p=60, r=3)", criterion_noiseless_recovery},
      {2, "diagonal invariance, bit-identical outputs", criterion_diagonal_invariance},
      {3, "deterministic lemma suite, 1000 trials", criterion_lemma_suite},
      {4, "robust recovery envelope, 100 fixtures", criterion_robust_recovery},
      {5, "rank-one objective matches exhaustive oracle", criterion_oracle_equivalence},
      {6, "spiked PCA ordering at p=200, n=400", criterion_pca_ordering},
      {7, "heteroskedasticity sweep (alpha 0 vs 4)", criterion_alpha_sweep},
      {8, "error rate slope in n within [-0.65, -0.35]", criterion_rate},
      {9, "missing-data error decreasing in theta", criterion_missing_consistency},
      {10, "count-model error decreasing in signal strength",
       criterion_poisson_consistency},
      {11, "byte-identical reruns across worker counts", criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", c.number,
                c.description.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  if (failures == 0) {
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("acceptance: %d criteria FAILED\n", failures);
  }
  return failures;
}
