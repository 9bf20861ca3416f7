#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrem/errors.hpp"
#include "qrem/model.hpp"
#include "qrem/rng.hpp"

namespace qrem {

/// Spin count cap for the stochastic Lanczos estimator.
inline constexpr int kMaxSlqSpins = 26;

enum class PressureMethod { kExactDense, kExactClassical, kSlq };

inline std::string to_string(PressureMethod m) {
  switch (m) {
    case PressureMethod::kExactDense: return "EXACT_DENSE";
    case PressureMethod::kExactClassical: return "EXACT_CLASSICAL";
    case PressureMethod::kSlq: return "SLQ";
  }
  return "UNKNOWN";
}

inline PressureMethod parse_pressure_method(const std::string& s) {
  if (s == "EXACT_DENSE") return PressureMethod::kExactDense;
  if (s == "EXACT_CLASSICAL") return PressureMethod::kExactClassical;
  if (s == "SLQ") return PressureMethod::kSlq;
  throw domain_error("unknown pressure method '" + s + "'");
}

/// One computed pressure value p_N(beta, Gamma) with its provenance.
/// std_error is 0 for the exact methods.
struct PressureRecord {
  int num_spins;
  InteractionOrder order;
  std::uint64_t seed;
  double beta;
  double gamma;
  PressureMethod method;
  double value;
  double std_error;
};

enum class ProbeKind { kRademacher };

/// Stochastic Lanczos quadrature settings.
struct SlqConfig {
  int num_probes = 100;
  int lanczos_steps = 64;
  ProbeKind probe_kind = ProbeKind::kRademacher;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_probes < 1) throw config_error("SlqConfig: num_probes must be >= 1");
    if (lanczos_steps < 2) throw config_error("SlqConfig: lanczos_steps must be >= 2");
  }
};

/// ln sum_i exp(-beta * x_i), shifted by the extremal value so that no
/// exponential of an N beta-scale quantity is ever formed.
inline double log_sum_exp_neg(std::span<const double> levels, double beta) {
  double lmin = levels[0];
  for (double x : levels) lmin = std::min(lmin, x);
  double s = 0.0;
  for (double x : levels) s += std::exp(-beta * (x - lmin));
  return std::log(s) - beta * lmin;
}

/// p = N^{-1} (ln sum_i e^{-beta lambda_i} - N ln 2) from a full spectrum
/// (or from the diagonal values when Gamma = 0).
inline double pressure_from_levels(std::span<const double> levels, double beta,
                                   int num_spins) {
  if (beta < 0.0) throw domain_error("pressure: beta must be >= 0");
  if (beta == 0.0) return 0.0;  // Z(0) = 1 by the 2^{-N} normalization
  return (log_sum_exp_neg(levels, beta) - num_spins * std::numbers::ln2) /
         num_spins;
}

/// All 2^N eigenvalues of H, ascending. Dense oracle, N <= 14.
inline std::vector<double> dense_spectrum(const QremOperator& op) {
  const Eigen::MatrixXd h = dense_hamiltonian(op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

inline PressureRecord pressure_exact_dense(const QremOperator& op, double beta) {
  if (op.num_spins() > kMaxDenseSpins) {
    throw capacity_error("pressure_exact_dense: N > " +
                         std::to_string(kMaxDenseSpins));
  }
  const double value = beta == 0.0
                           ? 0.0
                           : pressure_from_levels(dense_spectrum(op), beta,
                                                  op.num_spins());
  return PressureRecord{op.num_spins(), op.field().order(), op.field().seed(),
                        beta, op.gamma(), PressureMethod::kExactDense, value, 0.0};
}

/// Classical (Gamma = 0) pressure by direct summation over configurations.
inline PressureRecord pressure_exact_classical(const DisorderField& field,
                                               double beta) {
  const double value = pressure_from_levels(field.values(), beta, field.num_spins());
  return PressureRecord{field.num_spins(), field.order(), field.seed(),
                        beta, 0.0, PressureMethod::kExactClassical, value, 0.0};
}

namespace detail {

/// Full-reorthogonalization Lanczos tridiagonalization of H started from
/// `start` (need not be normalized). Stops early when the residual norm
/// collapses (invariant subspace). `final_off` is the residual norm at
/// exit; `basis` holds the orthonormal Lanczos vectors.
struct LanczosRun {
  std::vector<double> diag;
  std::vector<double> off;  // off[k] couples steps k and k+1
  double final_off = 0.0;
  bool breakdown = false;
  std::vector<Eigen::VectorXd> basis;
};

inline LanczosRun lanczos_tridiagonalize(const QremOperator& op,
                                         Eigen::VectorXd start, int max_steps,
                                         bool keep_basis) {
  const auto dim = static_cast<Eigen::Index>(op.dimension());
  if (start.size() != dim) {
    throw dimension_error("lanczos: start vector length != 2^N");
  }
  LanczosRun run;
  const double norm0 = start.norm();
  if (norm0 == 0.0) throw domain_error("lanczos: zero start vector");
  start /= norm0;

  std::vector<Eigen::VectorXd> basis;
  basis.push_back(std::move(start));
  Eigen::VectorXd w(dim);
  double scale = 1.0;
  for (int k = 0; k < max_steps; ++k) {
    const Eigen::VectorXd& v = basis.back();
    op.apply({v.data(), static_cast<std::size_t>(dim)},
             {w.data(), static_cast<std::size_t>(dim)});
    const double alpha = v.dot(w);
    w -= alpha * v;
    if (k > 0) w -= run.off[k - 1] * basis[k - 1];
    for (const auto& q : basis) w -= q.dot(w) * q;  // full reorthogonalization
    const double beta = w.norm();
    run.diag.push_back(alpha);
    scale = std::max({scale, std::abs(alpha) + beta});
    if (k + 1 == max_steps) {
      run.final_off = beta;
      break;
    }
    if (beta <= 1e-13 * scale) {
      run.breakdown = true;
      run.final_off = beta;
      break;
    }
    run.off.push_back(beta);
    basis.push_back(w / beta);
  }
  if (keep_basis) run.basis = std::move(basis);
  return run;
}

/// Eigen-decomposition of the (small) symmetric tridiagonal matrix.
inline void tridiag_eigh(const std::vector<double>& diag,
                         const std::vector<double>& off,
                         Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  const auto k = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    t(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < k) {
      t(i, i + 1) = off[static_cast<std::size_t>(i)];
      t(i + 1, i) = off[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
  values = solver.eigenvalues();
  vectors = solver.eigenvectors();
}

}  // namespace detail

/// Gauss quadrature rule extracted from one probe's Lanczos run: Ritz
/// values and squared first-row weights (the weights sum to 1).
struct ProbeQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Runs the Lanczos process once per Rademacher probe. The rules do not
/// depend on beta, so one set serves a whole temperature grid. Probe r is
/// keyed by (cfg.seed, r) and is independent of evaluation order.
inline std::vector<ProbeQuadrature> slq_probe_quadratures(const QremOperator& op,
                                                          const SlqConfig& cfg) {
  cfg.validate();
  if (op.num_spins() > kMaxSlqSpins) {
    throw capacity_error("slq: N > " + std::to_string(kMaxSlqSpins));
  }
  const auto dim = static_cast<Eigen::Index>(op.dimension());
  std::vector<ProbeQuadrature> rules(static_cast<std::size_t>(cfg.num_probes));
  for (int r = 0; r < cfg.num_probes; ++r) {
    const rng::CounterRng probe(rng::derive_key(
        cfg.seed, rng::Stream::kSlqProbe, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      z(i) = probe.rademacher(static_cast<std::uint64_t>(i));
    }
    const auto run = detail::lanczos_tridiagonalize(op, std::move(z),
                                                    cfg.lanczos_steps, false);
    Eigen::VectorXd theta;
    Eigen::MatrixXd s;
    detail::tridiag_eigh(run.diag, run.off, theta, s);
    auto& rule = rules[static_cast<std::size_t>(r)];
    rule.nodes.assign(theta.data(), theta.data() + theta.size());
    rule.weights.resize(static_cast<std::size_t>(theta.size()));
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      rule.weights[static_cast<std::size_t>(k)] = s(0, k) * s(0, k);
    }
  }
  return rules;
}

/// Combines per-probe quadrature rules into a pressure estimate at one
/// beta. Works in log space throughout; the reported std_error is the
/// probe-sample standard error pushed through the logarithm.
inline PressureRecord pressure_from_quadratures(
    const QremOperator& op, double beta, std::span<const ProbeQuadrature> rules) {
  const int n = op.num_spins();
  if (beta < 0.0) throw domain_error("pressure: beta must be >= 0");
  if (beta == 0.0) {
    return PressureRecord{n, op.field().order(), op.field().seed(), beta,
                          op.gamma(), PressureMethod::kSlq, 0.0, 0.0};
  }
  std::vector<double> log_tau;
  log_tau.reserve(rules.size());
  for (const auto& rule : rules) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      if (rule.weights[k] <= 0.0) continue;
      best = std::max(best, std::log(rule.weights[k]) - beta * rule.nodes[k]);
    }
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      if (rule.weights[k] <= 0.0) continue;
      s += std::exp(std::log(rule.weights[k]) - beta * rule.nodes[k] - best);
    }
    log_tau.push_back(best + std::log(s));
  }
  // tau_r estimates 2^{-N} Tr e^{-beta H} directly: the probe is normalized
  // before the Lanczos run, which cancels the 2^{-N} against ||z||^2 = 2^N.
  const double shift = *std::max_element(log_tau.begin(), log_tau.end());
  double mean = 0.0;
  for (double lt : log_tau) mean += std::exp(lt - shift);
  const auto count = static_cast<double>(log_tau.size());
  mean /= count;
  const double value = (shift + std::log(mean)) / n;

  double std_error = 0.0;
  if (log_tau.size() > 1) {
    double ss = 0.0;
    for (double lt : log_tau) {
      const double d = std::exp(lt - shift) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (count - 1.0));
    std_error = sd / (std::sqrt(count) * mean * n);
  }
  return PressureRecord{n, op.field().order(), op.field().seed(), beta,
                        op.gamma(), PressureMethod::kSlq, value, std_error};
}

/// Hutchinson trace estimate of 2^{-N} Tr e^{-beta H} by stochastic
/// Lanczos quadrature. Deterministic in (cfg.seed, op).
inline PressureRecord pressure_slq(const QremOperator& op, double beta,
                                   const SlqConfig& cfg) {
  cfg.validate();
  if (beta < 0.0) throw domain_error("pressure_slq: beta must be >= 0");
  if (beta == 0.0) {
    return PressureRecord{op.num_spins(), op.field().order(), op.field().seed(),
                          beta, op.gamma(), PressureMethod::kSlq, 0.0, 0.0};
  }
  const auto rules = slq_probe_quadratures(op, cfg);
  return pressure_from_quadratures(op, beta, rules);
}

/// Smallest eigenvalue of H to absolute tolerance `tol`, by restarted
/// Lanczos on the matrix-free apply (diagonal scan when Gamma = 0).
/// Convergence is certified by the residual norm; once the 500-step
/// budget is spent, throws convergence_error carrying the best estimate.
inline double ground_state_energy(const QremOperator& op, double tol) {
  if (tol <= 0.0) throw domain_error("ground_state_energy: tol must be > 0");
  if (op.gamma() == 0.0) return op.field().min_value();

  constexpr int kStepBudget = 500;
  constexpr int kBlockSteps = 64;
  const auto dim = static_cast<Eigen::Index>(op.dimension());
  const rng::CounterRng start_rng(
      rng::derive_key(op.field().seed(), rng::Stream::kStartVector, 0));
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v(i) = start_rng.gaussian(static_cast<std::uint64_t>(i));
  }

  double best = std::numeric_limits<double>::infinity();
  int used = 0;
  while (used < kStepBudget) {
    const int steps = std::min(kBlockSteps, kStepBudget - used);
    auto run = detail::lanczos_tridiagonalize(op, std::move(v), steps, true);
    Eigen::VectorXd theta;
    Eigen::MatrixXd s;
    detail::tridiag_eigh(run.diag, run.off, theta, s);
    best = std::min(best, theta(0));
    const auto k = static_cast<Eigen::Index>(run.diag.size());
    const double residual = run.final_off * std::abs(s(k - 1, 0));
    if (residual <= tol) return theta(0);
    used += static_cast<int>(k);
    v = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index j = 0; j < k; ++j) {
      v += s(j, 0) * run.basis[static_cast<std::size_t>(j)];
    }
  }
  throw convergence_error("ground_state_energy: step budget exhausted", best);
}

}  // namespace qrem
