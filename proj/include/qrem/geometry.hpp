#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qrem/analytics.hpp"
#include "qrem/errors.hpp"
#include "qrem/model.hpp"
#include "qrem/spectral.hpp"

namespace qrem {

/// Configurations with U(sigma) <= -eps N, sorted by index.
struct LargeDeviationSet {
  double eps = 0.0;
  int num_spins = 0;
  std::vector<std::uint64_t> members;
};

inline LargeDeviationSet large_deviation_set(const DisorderField& field,
                                             double eps) {
  if (eps <= 0.0) throw domain_error("large_deviation_set: eps must be > 0");
  LargeDeviationSet set{eps, field.num_spins(), {}};
  const double threshold = -eps * field.num_spins();
  const auto values = field.values();
  for (std::uint64_t i = 0; i < values.size(); ++i) {
    if (values[i] <= threshold) set.members.push_back(i);
  }
  return set;
}

/// The large-deviation set split into maximal components under
/// Hamming-distance-<=-2 adjacency between members. Distinct components
/// are therefore separated by distance > 2.
struct ClusterDecomposition {
  double eps = 0.0;
  int num_spins = 0;
  std::vector<std::vector<std::uint64_t>> components;
  std::size_t max_size = 0;
  int k_eps = 0;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void merge(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// All XOR masks reaching Hamming distance 1 or 2.
inline std::vector<std::uint64_t> near_masks(int num_spins) {
  std::vector<std::uint64_t> masks;
  masks.reserve(static_cast<std::size_t>(num_spins) * (num_spins + 1) / 2);
  for (int j = 0; j < num_spins; ++j) {
    masks.push_back(std::uint64_t{1} << j);
    for (int k = j + 1; k < num_spins; ++k) {
      masks.push_back((std::uint64_t{1} << j) | (std::uint64_t{1} << k));
    }
  }
  return masks;
}

inline std::ptrdiff_t member_rank(const std::vector<std::uint64_t>& members,
                                  std::uint64_t index) {
  const auto it = std::lower_bound(members.begin(), members.end(), index);
  if (it == members.end() || *it != index) return -1;
  return it - members.begin();
}

}  // namespace detail

inline ClusterDecomposition cluster_decomposition(const LargeDeviationSet& set) {
  ClusterDecomposition decomp{set.eps, set.num_spins, {}, 0, k_epsilon(set.eps)};
  const auto& members = set.members;
  if (members.empty()) return decomp;

  detail::UnionFind uf(members.size());
  const auto masks = detail::near_masks(set.num_spins);
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (const std::uint64_t mask : masks) {
      const auto j = detail::member_rank(members, members[i] ^ mask);
      if (j >= 0) uf.merge(i, static_cast<std::size_t>(j));
    }
  }

  std::vector<std::ptrdiff_t> component_of_root(members.size(), -1);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::size_t root = uf.find(i);
    if (component_of_root[root] < 0) {
      component_of_root[root] =
          static_cast<std::ptrdiff_t>(decomp.components.size());
      decomp.components.emplace_back();
    }
    decomp.components[static_cast<std::size_t>(component_of_root[root])]
        .push_back(members[i]);
  }
  for (const auto& c : decomp.components) {
    decomp.max_size = std::max(decomp.max_size, c.size());
  }
  return decomp;
}

/// The 0/1 remainder matrix A: one entry per hypercube edge with at least
/// one endpoint in the large-deviation set. Edges stored as (u, v), u < v,
/// sorted and deduplicated.
struct RemainderOperator {
  int num_spins = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
};

inline RemainderOperator build_remainder(const LargeDeviationSet& set) {
  RemainderOperator a{set.num_spins, {}};
  a.edges.reserve(set.members.size() * static_cast<std::size_t>(set.num_spins));
  for (const std::uint64_t u : set.members) {
    for (int j = 0; j < set.num_spins; ++j) {
      const std::uint64_t v = u ^ (std::uint64_t{1} << j);
      a.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  std::sort(a.edges.begin(), a.edges.end());
  a.edges.erase(std::unique(a.edges.begin(), a.edges.end()), a.edges.end());
  return a;
}

/// Operator norm of the remainder by power iteration on the touched
/// vertices. The hypercube is bipartite, so the iteration runs on the
/// shifted matrix A + N I to keep the dominant eigenvalue unique.
/// Deterministic all-ones start, relative tolerance 1e-10, 10^4 cap.
inline double remainder_norm_exact(const RemainderOperator& a) {
  if (a.edges.empty()) return 0.0;

  std::vector<std::uint64_t> vertices;
  vertices.reserve(2 * a.edges.size());
  for (const auto& [u, v] : a.edges) {
    vertices.push_back(u);
    vertices.push_back(v);
  }
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(a.edges.size());
  for (const auto& [u, v] : a.edges) {
    const auto iu = std::lower_bound(vertices.begin(), vertices.end(), u);
    const auto iv = std::lower_bound(vertices.begin(), vertices.end(), v);
    edges.emplace_back(iu - vertices.begin(), iv - vertices.begin());
  }

  const double shift = a.num_spins;
  std::vector<double> x(vertices.size(), 1.0 / std::sqrt(double(vertices.size())));
  std::vector<double> y(vertices.size());
  double rho_prev = 0.0;
  for (int it = 0; it < 10000; ++it) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = shift * x[i];
    for (const auto& [u, v] : edges) {
      y[u] += x[v];
      y[v] += x[u];
    }
    double rho = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      rho += x[i] * y[i];
      norm2 += y[i] * y[i];
    }
    const double norm = std::sqrt(norm2);
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / norm;
    if (it > 0 && std::abs(rho - rho_prev) <= 1e-10 * std::max(1.0, rho)) {
      return rho - shift;
    }
    rho_prev = rho;
  }
  return rho_prev - shift;
}

/// Closed-form norm bound sqrt(2 N max_alpha |C^(alpha)|).
inline double remainder_norm_bound(const ClusterDecomposition& decomp,
                                   int num_spins) {
  if (decomp.max_size == 0) return 0.0;
  return std::sqrt(2.0 * num_spins * static_cast<double>(decomp.max_size));
}

/// H split as U_L (+) H_{L^c} - Gamma A: the diagonal restricted to the
/// large-deviation set, the natural restriction to its complement, and the
/// 0/1 remainder on the crossing and interior edges of L.
struct HamiltonianDecomposition {
  LargeDeviationSet set;
  RemainderOperator remainder;
};

inline HamiltonianDecomposition decompose_hamiltonian(const QremOperator& op,
                                                      double eps) {
  auto set = large_deviation_set(op.field(), eps);
  auto remainder = build_remainder(set);
  return HamiltonianDecomposition{std::move(set), std::move(remainder)};
}

/// Dense 0/1 matrix of the remainder (verification oracle, N <= 14).
inline Eigen::MatrixXd dense_remainder(const RemainderOperator& a) {
  if (a.num_spins > kMaxDenseSpins) {
    throw capacity_error("dense_remainder: N > " + std::to_string(kMaxDenseSpins));
  }
  const auto dim = Eigen::Index{1} << a.num_spins;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [u, v] : a.edges) {
    m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
    m(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1.0;
  }
  return m;
}

/// Dense U_L (+) H_{L^c}: diagonal everywhere, hopping only between
/// complement vertices (verification oracle, N <= 14).
inline Eigen::MatrixXd dense_block_hamiltonian(const QremOperator& op,
                                               const LargeDeviationSet& set) {
  const int n = op.num_spins();
  if (n > kMaxDenseSpins) {
    throw capacity_error("dense_block_hamiltonian: N > " +
                         std::to_string(kMaxDenseSpins));
  }
  const auto dim = static_cast<Eigen::Index>(op.dimension());
  std::vector<char> in_set(static_cast<std::size_t>(dim), 0);
  for (const std::uint64_t m : set.members) in_set[m] = 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const auto u = op.field().values();
  for (Eigen::Index i = 0; i < dim; ++i) {
    h(i, i) = u[static_cast<std::size_t>(i)];
    if (in_set[static_cast<std::size_t>(i)]) continue;
    for (int j = 0; j < n; ++j) {
      const Eigen::Index k = i ^ (Eigen::Index{1} << j);
      if (!in_set[static_cast<std::size_t>(k)]) h(i, k) = -op.gamma();
    }
  }
  return h;
}

/// Both Gibbs-variational lower bounds on p_N, exact at every finite N:
/// the classical trial state gives the Gamma = 0 pressure, the transverse
/// trial state gives p_par(beta Gamma) - (beta/N) mean(U).
struct GibbsLowerBounds {
  double classical = 0.0;
  double paramagnetic = 0.0;
};

inline GibbsLowerBounds gibbs_lower_bounds(const QremOperator& op, double beta) {
  if (beta < 0.0) throw domain_error("gibbs_lower_bounds: beta must be >= 0");
  const double classical = pressure_exact_classical(op.field(), beta).value;
  const double para = p_par(beta * op.gamma()) -
                      beta / op.num_spins() * op.field().mean();
  return GibbsLowerBounds{classical, para};
}

/// Everything derived from one field at one eps, cached so that sweeps
/// over (beta, Gamma) do not repeat the decomposition.
struct EpsilonGeometry {
  LargeDeviationSet set;
  ClusterDecomposition clusters;
  RemainderOperator remainder;
  double norm_exact = 0.0;
  double norm_bound = 0.0;
};

inline EpsilonGeometry analyze_geometry(const DisorderField& field, double eps) {
  EpsilonGeometry g;
  g.set = large_deviation_set(field, eps);
  g.clusters = cluster_decomposition(g.set);
  g.remainder = build_remainder(g.set);
  g.norm_exact = remainder_norm_exact(g.remainder);
  g.norm_bound = remainder_norm_bound(g.clusters, field.num_spins());
  return g;
}

/// Golden-Thompson upper bound on p_N for one realization:
///   max{p_N(beta, 0), beta eps + p_par(beta Gamma)} + (beta ||A|| + ln 2)/N
/// with ||A|| the exact remainder norm (the closed-form bound is looser).
inline double golden_thompson_upper(const QremOperator& op, double beta,
                                    const EpsilonGeometry& geometry,
                                    double classical_pressure) {
  if (beta < 0.0) throw domain_error("golden_thompson_upper: beta must be >= 0");
  const double envelope = std::max(
      classical_pressure, beta * geometry.set.eps + p_par(beta * op.gamma()));
  return envelope +
         (beta * geometry.norm_exact + std::numbers::ln2) / op.num_spins();
}

inline double golden_thompson_upper(const QremOperator& op, double beta,
                                    double eps) {
  if (eps <= 0.0) throw domain_error("golden_thompson_upper: eps must be > 0");
  const auto geometry = analyze_geometry(op.field(), eps);
  const double classical = pressure_exact_classical(op.field(), beta).value;
  return golden_thompson_upper(op, beta, geometry, classical);
}

/// True when every component stays strictly below K_eps — the good event
/// of the cluster lemma.
inline bool omega_event(const DisorderField& field, double eps) {
  const auto decomp = cluster_decomposition(large_deviation_set(field, eps));
  return decomp.max_size < static_cast<std::size_t>(decomp.k_eps);
}

/// One realization's pressure sandwich at (beta, Gamma, eps). Slacks are
/// nonnegative up to roundoff whenever the inequalities hold.
struct BoundReport {
  double beta = 0.0;
  double gamma = 0.0;
  double eps = 0.0;
  double exact_pressure = 0.0;
  double classical_lower = 0.0;
  double para_lower = 0.0;
  double gt_upper = 0.0;
  double a_norm_exact = 0.0;
  double a_norm_bound = 0.0;
  double slack_classical = 0.0;
  double slack_para = 0.0;
  double slack_gt = 0.0;
};

inline BoundReport make_bound_report(const QremOperator& op, double beta,
                                     const EpsilonGeometry& geometry,
                                     double exact_pressure) {
  const auto lower = gibbs_lower_bounds(op, beta);
  BoundReport report;
  report.beta = beta;
  report.gamma = op.gamma();
  report.eps = geometry.set.eps;
  report.exact_pressure = exact_pressure;
  report.classical_lower = lower.classical;
  report.para_lower = lower.paramagnetic;
  report.gt_upper = golden_thompson_upper(op, beta, geometry, lower.classical);
  report.a_norm_exact = geometry.norm_exact;
  report.a_norm_bound = geometry.norm_bound;
  report.slack_classical = exact_pressure - lower.classical;
  report.slack_para = exact_pressure - lower.paramagnetic;
  report.slack_gt = report.gt_upper - exact_pressure;
  return report;
}

inline BoundReport make_bound_report(const QremOperator& op, double beta,
                                     double eps, double exact_pressure) {
  return make_bound_report(op, beta, analyze_geometry(op.field(), eps),
                           exact_pressure);
}

}  // namespace qrem
