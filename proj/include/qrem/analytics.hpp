#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "qrem/errors.hpp"

namespace qrem {

/// Freezing inverse temperature sqrt(2 ln 2).
inline double beta_c() noexcept { return std::sqrt(2.0 * std::numbers::ln2); }

/// REM pressure: beta^2/2 up to beta_c, then the frozen tangent line.
/// C^1 at the junction.
inline double p_rem(double beta) {
  if (beta < 0.0) throw domain_error("p_rem: beta must be >= 0");
  const double bc = beta_c();
  if (beta <= bc) return 0.5 * beta * beta;
  return 0.5 * bc * bc + (beta - bc) * bc;
}

/// Paramagnetic pressure ln cosh(x) at x = beta * Gamma, overflow-safe.
inline double p_par(double x) noexcept {
  if (x == 0.0) return 0.0;
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

/// Limiting pressure max{p_rem(beta), p_par(beta * Gamma)}.
inline double goldschmidt_pressure(double beta, double gamma) {
  return std::max(p_rem(beta), p_par(beta * gamma));
}

/// First-order transition field Gamma_c(beta) = arcosh(exp(p_rem(beta)))/beta,
/// continuously extended to 1 at beta = 0. Uses
/// arcosh(e^y) = y + log1p(sqrt(1 - e^{-2y})) to stay finite for large beta.
inline double gamma_c(double beta) {
  if (beta < 0.0) throw domain_error("gamma_c: beta must be >= 0");
  if (beta == 0.0) return 1.0;
  const double y = p_rem(beta);
  const double t = -std::expm1(-2.0 * y);
  return (y + std::log1p(std::sqrt(t))) / beta;
}

/// Transverse magnetization tanh(beta * Gamma) of the paramagnet.
inline double magnetization_par(double beta, double gamma) noexcept {
  return std::tanh(beta * gamma);
}

/// REM-branch entropy ln 2 - beta^2/2, frozen to zero beyond beta_c.
/// Convention: s(beta) = p_rem - beta p_rem' + ln 2, so s(0) = ln 2.
inline double rem_entropy(double beta) {
  if (beta < 0.0) throw domain_error("rem_entropy: beta must be >= 0");
  if (beta >= beta_c()) return 0.0;
  return std::numbers::ln2 - 0.5 * beta * beta;
}

/// Exact Hamming-ball volume sum_{j<=r} C(N, j).
inline std::uint64_t hamming_ball_volume(int num_spins, int radius) {
  if (num_spins < 1 || num_spins > 64 || radius < 0 || radius > num_spins) {
    throw domain_error("hamming_ball_volume: need 0 <= r <= N <= 64");
  }
  unsigned __int128 sum = 0;
  unsigned __int128 binom = 1;  // C(N, 0)
  for (int j = 0; j <= radius; ++j) {
    sum += binom;
    binom = binom * static_cast<unsigned>(num_spins - j) / static_cast<unsigned>(j + 1);
  }
  if (sum > std::numeric_limits<std::uint64_t>::max()) {
    // only (N, r) = (64, 64), whose volume 2^64 has no 64-bit representation
    throw domain_error("hamming_ball_volume: result exceeds 64-bit range");
  }
  return static_cast<std::uint64_t>(sum);
}

/// Elementary volume bound e * N^r; dominates the exact volume for r < N/2.
inline double ball_volume_bound(int num_spins, int radius) {
  if (num_spins < 1 || radius < 0) {
    throw domain_error("ball_volume_bound: need N >= 1, r >= 0");
  }
  return std::numbers::e * std::pow(static_cast<double>(num_spins), radius);
}

/// Cluster-size cutoff K_eps = ceil(4 ln 2 / eps^2).
inline int k_epsilon(double eps) {
  if (eps <= 0.0) throw domain_error("k_epsilon: eps must be > 0");
  const double k = std::ceil(4.0 * std::numbers::ln2 / (eps * eps));
  if (k > static_cast<double>(std::numeric_limits<int>::max())) {
    throw domain_error("k_epsilon: eps too small");
  }
  return static_cast<int>(k);
}

/// Ball radius r_eps = 4 K_eps used in the percolation argument.
inline int r_epsilon(double eps) { return 4 * k_epsilon(eps); }

/// Leading term 2N sqrt(rho(1-rho)) of the adjacency-norm bound on a
/// Hamming ball of radius N rho; comparison utility.
inline double ball_adjacency_norm_bound(int num_spins, double rho) {
  if (rho <= 0.0 || rho >= 0.5) {
    throw domain_error("ball_adjacency_norm_bound: need 0 < rho < 1/2");
  }
  return 2.0 * num_spins * std::sqrt(rho * (1.0 - rho));
}

enum class Phase { kRemHighT, kRemFrozen, kParamagnet, kBoundary };

inline std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::kRemHighT: return "REM_HIGH_T";
    case Phase::kRemFrozen: return "REM_FROZEN";
    case Phase::kParamagnet: return "PARAMAGNET";
    case Phase::kBoundary: return "BOUNDARY";
  }
  return "UNKNOWN";
}

struct PhasePoint {
  double beta = 0.0;
  double gamma = 0.0;
  Phase phase = Phase::kRemHighT;
};

/// Classifies (beta, Gamma) against the limiting phase diagram. Points with
/// |p_par - p_rem| <= tol sit on the first-order line.
inline PhasePoint classify_phase(double beta, double gamma, double tol = 1e-9) {
  if (tol <= 0.0) throw domain_error("classify_phase: tol must be > 0");
  const double diff = p_par(beta * gamma) - p_rem(beta);
  Phase phase = Phase::kBoundary;
  if (diff > tol) {
    phase = Phase::kParamagnet;
  } else if (diff < -tol) {
    phase = beta > beta_c() ? Phase::kRemFrozen : Phase::kRemHighT;
  }
  return PhasePoint{beta, gamma, phase};
}

/// Solves p_par(beta * Gamma) = p_rem(beta) for Gamma by bisection;
/// root-finder cross-check of gamma_c.
inline double gamma_c_bisection(double beta) {
  if (beta <= 0.0) throw domain_error("gamma_c_bisection: beta must be > 0");
  const double target = p_rem(beta);
  double lo = 0.0;
  double hi = 1.0;
  while (p_par(beta * hi) < target) {
    hi *= 2.0;
    if (hi > 1e12) throw convergence_error("gamma_c_bisection: no bracket", hi);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (p_par(beta * mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qrem
