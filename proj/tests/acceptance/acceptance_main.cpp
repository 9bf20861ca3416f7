// Acceptance suite: end-to-end checks of the library against its
// contracted tolerances. Each criterion prints one [PASS]/[FAIL] line;
// the exit code is 0 only if every requested criterion passes.
//
// Usage: qrem_acceptance [k ...]   (default: run all nine)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qrem/qrem.hpp"

namespace {

using namespace qrem;

constexpr int kThreads = 2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. U = 0 pressure equals ln cosh(beta Gamma) to 1e-10, dense, N <= 12.
Outcome criterion_1() {
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const auto field = DisorderField::constant(n, 0.0);
    for (double gamma : {0.5, 1.0, 2.0}) {
      const QremOperator op(gamma, field);
      const auto spectrum = dense_spectrum(op);
      for (double beta : {0.5, 1.0, 2.0}) {
        const double p = pressure_from_levels(spectrum, beta, n);
        worst = std::max(worst, std::abs(p - std::log(std::cosh(beta * gamma))));
      }
    }
  }
  std::ostringstream detail;
  detail << "max |p - ln cosh| = " << worst;
  return Outcome{worst <= 1e-10, detail.str()};
}

// 2. Spectrum of Gamma T at N = 10: Gamma(-10 + 2k) with multiplicity C(10,k).
Outcome criterion_2() {
  const int n = 10;
  const double gamma = 1.3;
  const QremOperator op(gamma, DisorderField::constant(n, 0.0));
  const auto spectrum = dense_spectrum(op);
  std::map<int, long> counts;
  double worst = 0.0;
  for (double ev : spectrum) {
    const double level = (ev / gamma + n) / 2.0;
    const int k = static_cast<int>(std::lround(level));
    worst = std::max(worst, std::abs(level - k));
    ++counts[k];
  }
  long binom = 1;
  bool mult_ok = true;
  for (int k = 0; k <= n; ++k) {
    if (counts[k] != binom) mult_ok = false;
    binom = binom * (n - k) / (k + 1);
  }
  std::ostringstream detail;
  detail << "max level offset = " << worst << ", multiplicities "
         << (mult_ok ? "exact" : "WRONG");
  return Outcome{mult_ok && worst < 1e-8, detail.str()};
}

// 3. Pressure sandwich over 100 REM realizations at N = 10.
Outcome criterion_3() {
  sweep::SweepConfig cfg;
  cfg.n_list = {10};
  cfg.beta_grid = {0.5, 1.0, 2.0};
  cfg.gamma_grid = {0.5, 1.0, 2.0};
  cfg.eps_grid = {0.4, 0.8};
  cfg.num_realizations = 100;
  cfg.base_seed = 1003;
  cfg.num_threads = kThreads;
  const auto out = sweep::run_bound_sandwich(cfg);
  const double min_slack =
      std::min({out.summary.min_slack_classical, out.summary.min_slack_para,
                out.summary.min_slack_gt});
  std::ostringstream detail;
  detail << out.rows.size() << " sandwich rows, min slack = " << min_slack;
  return Outcome{min_slack >= -1e-9, detail.str()};
}

// 4. Convergence toward the limiting pressure over N in {8, 12, 16}.
Outcome criterion_4() {
  struct Point {
    double beta, gamma, reference;
  };
  const std::vector<Point> points{{0.8, 2.0, goldschmidt_pressure(0.8, 2.0)},
                                  {1.0, 0.2, goldschmidt_pressure(1.0, 0.2)}};
  const std::vector<int> sizes{8, 12, 16};
  const int reals = 30;

  bool pass = true;
  std::ostringstream detail;
  for (const auto& point : points) {
    std::vector<double> mean_gap;
    for (int n : sizes) {
      std::vector<double> gaps(reals);
      parallel_for(reals, kThreads, [&](std::size_t r) {
        const auto field =
            sample_rem_field(n, sweep::realization_seed(4001, r));
        const QremOperator op(point.gamma, field);
        double p = 0.0;
        if (n <= 12) {
          p = pressure_exact_dense(op, point.beta).value;
        } else {
          SlqConfig slq;
          slq.num_probes = 32;
          slq.lanczos_steps = 48;
          slq.seed = rng::derive_key(field.seed(), rng::Stream::kSlqRun, 0);
          p = pressure_slq(op, point.beta, slq).value;
        }
        gaps[r] = std::abs(p - point.reference);
      });
      double sum = 0.0;
      for (double g : gaps) sum += g;
      mean_gap.push_back(sum / reals);
    }
    const bool decreasing =
        mean_gap[0] > mean_gap[1] && mean_gap[1] > mean_gap[2];
    const bool small_at_16 = point.beta == 0.8 ? mean_gap[2] <= 0.05 : true;
    pass = pass && decreasing && small_at_16;
    detail << "(beta=" << point.beta << ",gamma=" << point.gamma << "): "
           << mean_gap[0] << " > " << mean_gap[1] << " > " << mean_gap[2]
           << "; ";
  }
  return Outcome{pass, detail.str()};
}

// 5. SLQ vs dense: |delta| <= 3 stderr in at least 95 of 100 seeded runs.
Outcome criterion_5() {
  const auto field = sample_rem_field(10, 505);
  const QremOperator op(1.0, field);
  const double dense = pressure_exact_dense(op, 1.0).value;
  const int runs = 100;
  std::vector<int> hit(runs, 0);
  parallel_for(runs, kThreads, [&](std::size_t s) {
    SlqConfig cfg;  // contract defaults: 100 probes, 64 steps
    cfg.seed = 9000 + s;
    const auto rec = pressure_slq(op, 1.0, cfg);
    hit[s] = std::abs(rec.value - dense) <= 3.0 * rec.std_error ? 1 : 0;
  });
  int hits = 0;
  for (int h : hit) hits += h;
  std::ostringstream detail;
  detail << hits << "/100 runs within 3 stderr of dense";
  return Outcome{hits >= 95, detail.str()};
}

// 6. Cluster lemma at desk scale: K_1 = 3, omega frequency >= 0.95 over
//    200 realizations at N = 16, and exact norm <= sqrt(2 N max|C|) always.
Outcome criterion_6() {
  if (k_epsilon(1.0) != 3) {
    return Outcome{false, "K_eps(1.0) != 3"};
  }
  sweep::SweepConfig cfg;
  cfg.n_list = {16};
  cfg.eps_grid = {1.0};
  cfg.num_realizations = 200;
  cfg.base_seed = 606;
  cfg.num_threads = kThreads;
  const auto out = sweep::run_cluster_study(cfg);
  const auto& stat = out.summary.cluster_stats.front();
  std::ostringstream detail;
  detail << "omega frequency = " << stat.omega_frequency
         << ", norm-bound pass fraction = " << stat.norm_ok_fraction
         << ", K_eps = " << stat.k_eps;
  return Outcome{stat.k_eps == 3 && stat.omega_frequency >= 0.95 &&
                     stat.norm_ok_fraction == 1.0,
                 detail.str()};
}

// 7. Closed-form anchors and the bisection cross-check.
Outcome criterion_7() {
  bool pass = true;
  std::ostringstream detail;
  const double bc = beta_c();
  pass = pass && std::abs(bc - 1.1774100225154747) <= 1e-9;
  pass = pass && std::abs(p_rem(bc) - std::numbers::ln2) <= 1e-9;
  pass = pass && std::abs(gamma_c(0.0) - 1.0) <= 1e-9;
  pass = pass && std::abs(gamma_c(1e-8) - 1.0) <= 1e-9;
  const double gc = gamma_c(bc);
  pass = pass && std::abs(gc - std::acosh(2.0) / bc) <= 1e-9;
  pass = pass && std::abs(gc - 1.1185210519197087) <= 1e-9;
  double worst = 0.0;
  for (double beta = 0.05; beta <= 5.0; beta += 0.05) {
    worst = std::max(worst, std::abs(gamma_c(beta) - gamma_c_bisection(beta)));
  }
  pass = pass && worst <= 1e-10;
  detail << "beta_c = " << bc << ", Gamma_c(beta_c) = " << gc
         << ", max bisection gap = " << worst;
  return Outcome{pass, detail.str()};
}

// 8. Self-averaging: std of p_N at (1,1) strictly shrinks from N=8 to N=16.
Outcome criterion_8() {
  const int reals = 100;
  auto ensemble_std = [&](int n) {
    std::vector<double> values(reals);
    parallel_for(reals, kThreads, [&](std::size_t r) {
      const auto field = sample_rem_field(n, sweep::realization_seed(808, r));
      const QremOperator op(1.0, field);
      if (n <= 12) {
        values[r] = pressure_exact_dense(op, 1.0).value;
      } else {
        SlqConfig slq;
        slq.num_probes = 32;
        slq.lanczos_steps = 32;
        slq.seed = rng::derive_key(field.seed(), rng::Stream::kSlqRun, 0);
        values[r] = pressure_slq(op, 1.0, slq).value;
      }
    });
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= reals;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (reals - 1));
  };
  const double std8 = ensemble_std(8);
  const double std16 = ensemble_std(16);
  std::ostringstream detail;
  detail << "std(N=8) = " << std8 << ", std(N=16) = " << std16;
  return Outcome{std16 < std8, detail.str()};
}

// 9. Byte-identical sweep output with 8 worker threads vs 1.
Outcome criterion_9() {
  sweep::SweepConfig cfg;
  cfg.n_list = {6, 8};
  cfg.beta_grid = {0.0, 1.0};
  cfg.gamma_grid = {0.0, 1.0};
  cfg.num_realizations = 4;
  cfg.base_seed = 909;
  cfg.dense_cutoff = 6;  // push N = 8 through the SLQ path
  cfg.slq.num_probes = 8;
  cfg.slq.lanczos_steps = 16;

  sweep::SweepConfig one = cfg;
  one.num_threads = 1;
  sweep::SweepConfig eight = cfg;
  eight.num_threads = 8;

  const auto a = sweep::run_phase_diagram(one);
  const auto b = sweep::run_phase_diagram(eight);
  const bool rows_equal = a.rows_text(sweep::OutputFormat::kCsv) ==
                          b.rows_text(sweep::OutputFormat::kCsv);
  const bool summary_equal = a.summary_doc().dump() == b.summary_doc().dump();

  const auto c = sweep::run_cluster_study([&] {
    sweep::SweepConfig k = cfg;
    k.eps_grid = {0.5, 1.0};
    k.num_threads = 1;
    return k;
  }());
  const auto d = sweep::run_cluster_study([&] {
    sweep::SweepConfig k = cfg;
    k.eps_grid = {0.5, 1.0};
    k.num_threads = 8;
    return k;
  }());
  const bool cluster_equal = c.rows_text(sweep::OutputFormat::kCsv) ==
                             d.rows_text(sweep::OutputFormat::kCsv);

  std::ostringstream detail;
  detail << "pressure rows " << (rows_equal ? "identical" : "DIFFER")
         << ", summaries " << (summary_equal ? "identical" : "DIFFER")
         << ", cluster rows " << (cluster_equal ? "identical" : "DIFFER");
  return Outcome{rows_equal && summary_equal && cluster_equal, detail.str()};
}

const char* kDescriptions[] = {
    "paramagnetic exactness (U=0, dense, N<=12)",
    "transverse-field spectrum at N=10",
    "finite-N pressure sandwich (100 realizations, N=10)",
    "convergence toward the limiting pressure (N=8,12,16)",
    "SLQ agreement with the dense oracle",
    "cluster lemma at N=16 (omega frequency, norm bound)",
    "closed-form anchors and bisection boundary",
    "self-averaging: std shrinks from N=8 to N=16",
    "determinism: 8 workers vs 1 byte-identical",
};

Outcome (*kCriteria[])() = {criterion_1, criterion_2, criterion_3,
                            criterion_4, criterion_5, criterion_6,
                            criterion_7, criterion_8, criterion_9};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > 9) {
      std::fprintf(stderr, "usage: %s [criterion 1..9 ...]\n", argv[0]);
      return 2;
    }
    selected.push_back(k);
  }
  if (selected.empty()) {
    for (int k = 1; k <= 9; ++k) selected.push_back(k);
  }

  bool all_pass = true;
  for (int k : selected) {
    const Outcome outcome = kCriteria[k - 1]();
    all_pass = all_pass && outcome.pass;
    std::printf("[%s] criterion %d: %s (%s)\n",
                outcome.pass ? "PASS" : "FAIL", k, kDescriptions[k - 1],
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
