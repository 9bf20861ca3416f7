#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qrem/analytics.hpp"
#include "qrem/geometry.hpp"
#include "qrem/model.hpp"
#include "qrem/spectral.hpp"

using namespace qrem;

namespace {

// Field with chosen deep sites; everything else sits at zero energy.
DisorderField planted_field(int n, const std::vector<std::uint64_t>& deep,
                            double depth) {
  std::vector<double> values(std::size_t{1} << n, 0.0);
  for (const auto idx : deep) values[idx] = depth;
  return DisorderField(n, InteractionOrder::infinite(), 0, std::move(values));
}

int set_distance(const std::vector<std::uint64_t>& a,
                 const std::vector<std::uint64_t>& b) {
  int best = 1 << 30;
  for (auto u : a) {
    for (auto v : b) {
      best = std::min(best, std::popcount(u ^ v));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("large deviation set") {
  SECTION("zero field is empty") {
    const auto field = DisorderField::constant(8, 0.0);
    REQUIRE(large_deviation_set(field, 0.5).members.empty());
    REQUIRE_THROWS_AS(large_deviation_set(field, 0.0), domain_error);
  }

  SECTION("threshold is exact and inclusive") {
    const int n = 4;
    auto field = planted_field(n, {3, 9}, -4.0);  // exactly -eps N at eps = 1
    const auto set = large_deviation_set(field, 1.0);
    REQUIRE(set.members == std::vector<std::uint64_t>{3, 9});
  }

  SECTION("eps -> 0 captures about half of a REM sample") {
    const auto field = sample_rem_field(12, 4);
    const auto set = large_deviation_set(field, 1e-9);
    const double fraction =
        static_cast<double>(set.members.size()) / field.dimension();
    REQUIRE(fraction > 0.4);
    REQUIRE(fraction < 0.6);
  }

  SECTION("Gaussian tail bound e^{-eps^2 N / 2} holds empirically") {
    const int n = 16;
    const double eps = 0.5;
    const double bound = std::exp(-eps * eps * n / 2.0);
    std::uint64_t members = 0;
    const int reals = 50;
    for (int r = 0; r < reals; ++r) {
      members += large_deviation_set(sample_rem_field(n, 700 + r), eps)
                     .members.size();
    }
    const double total = static_cast<double>(reals) * (1 << n);
    const double fraction = static_cast<double>(members) / total;
    const double se = std::sqrt(fraction / total);
    REQUIRE(fraction <= bound * (1.0 + 3.0 * se));
  }

  SECTION("typical member count at eps = 1, N = 16") {
    double total = 0.0;
    const int reals = 50;
    for (int r = 0; r < reals; ++r) {
      total += static_cast<double>(
          large_deviation_set(sample_rem_field(16, 1300 + r), 1.0)
              .members.size());
    }
    const double mean = total / reals;  // Phi(-4) * 2^16 is about 2.1
    REQUIRE(mean > 0.5);
    REQUIRE(mean < 5.0);
  }
}

TEST_CASE("cluster decomposition") {
  SECTION("empty set") {
    const auto field = DisorderField::constant(6, 0.0);
    const auto decomp = cluster_decomposition(large_deviation_set(field, 1.0));
    REQUIRE(decomp.components.empty());
    REQUIRE(decomp.max_size == 0);
    REQUIRE(decomp.k_eps == k_epsilon(1.0));
  }

  SECTION("distance-2 pair joins, distance-3 pair does not") {
    const int n = 6;
    auto near = planted_field(n, {0, 0b11}, -10.0);
    auto d2 = cluster_decomposition(large_deviation_set(near, 1.0));
    REQUIRE(d2.components.size() == 1);
    REQUIRE(d2.max_size == 2);

    auto far = planted_field(n, {0, 0b111}, -10.0);
    auto d3 = cluster_decomposition(large_deviation_set(far, 1.0));
    REQUIRE(d3.components.size() == 2);
    REQUIRE(d3.max_size == 1);
  }

  SECTION("chain of distance-2 links forms one component") {
    const int n = 8;
    auto field = planted_field(n, {0, 0b11, 0b1111, 0b111111}, -20.0);
    auto decomp = cluster_decomposition(large_deviation_set(field, 1.0));
    REQUIRE(decomp.components.size() == 1);
    REQUIRE(decomp.max_size == 4);
  }

  SECTION("separation > 2 on REM samples") {
    for (int r = 0; r < 5; ++r) {
      const auto field = sample_rem_field(12, 2200 + r);
      const auto decomp =
          cluster_decomposition(large_deviation_set(field, 0.4));
      for (std::size_t a = 0; a < decomp.components.size(); ++a) {
        for (std::size_t b = a + 1; b < decomp.components.size(); ++b) {
          REQUIRE(set_distance(decomp.components[a], decomp.components[b]) > 2);
        }
      }
      // components partition the member set
      std::size_t total = 0;
      for (const auto& c : decomp.components) total += c.size();
      REQUIRE(total == large_deviation_set(field, 0.4).members.size());
    }
  }
}

TEST_CASE("remainder operator") {
  SECTION("empty set gives the zero operator") {
    const auto field = DisorderField::constant(6, 0.0);
    const auto a = build_remainder(large_deviation_set(field, 1.0));
    REQUIRE(a.edges.empty());
    REQUIRE(remainder_norm_exact(a) == 0.0);
  }

  SECTION("singleton member spans a star of N edges with norm sqrt(N)") {
    const int n = 16;
    auto field = planted_field(n, {5}, -20.0);
    const auto set = large_deviation_set(field, 1.0);
    const auto a = build_remainder(set);
    REQUIRE(a.edges.size() == static_cast<std::size_t>(n));
    REQUIRE(remainder_norm_exact(a) == Catch::Approx(4.0).margin(1e-8));
    // closed-form bound sqrt(2 N max|C|) = sqrt(32) dominates
    const auto decomp = cluster_decomposition(set);
    REQUIRE(remainder_norm_bound(decomp, n) ==
            Catch::Approx(std::sqrt(32.0)).margin(1e-12));
    REQUIRE(remainder_norm_exact(a) <= remainder_norm_bound(decomp, n));
  }

  SECTION("two adjacent members share one edge") {
    const int n = 7;
    auto field = planted_field(n, {0, 1}, -10.0);
    const auto a = build_remainder(large_deviation_set(field, 1.0));
    REQUIRE(a.edges.size() == static_cast<std::size_t>(2 * n - 1));
  }

  SECTION("single edge has norm 1") {
    auto field = planted_field(1, {0}, -10.0);
    const auto a = build_remainder(large_deviation_set(field, 1.0));
    REQUIRE(a.edges.size() == 1);
    REQUIRE(remainder_norm_exact(a) == Catch::Approx(1.0).margin(1e-9));
  }

  SECTION("norm bound formula") {
    ClusterDecomposition decomp;
    decomp.max_size = 3;
    REQUIRE(remainder_norm_bound(decomp, 12) ==
            Catch::Approx(std::sqrt(72.0)).margin(1e-12));
    decomp.max_size = 0;
    REQUIRE(remainder_norm_bound(decomp, 12) == 0.0);
  }

  SECTION("exact norm never exceeds the bound on REM samples") {
    for (int r = 0; r < 10; ++r) {
      const auto field = sample_rem_field(10, 3100 + r);
      for (double eps : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        const auto geo = analyze_geometry(field, eps);
        REQUIRE(geo.norm_exact <= geo.norm_bound + 1e-9);
      }
    }
  }

  SECTION("block norm equality across components") {
    // full remainder norm equals the max over per-component stars
    const int n = 10;
    auto field = planted_field(n, {0, 0b11, 0b111100000}, -30.0);
    const auto set = large_deviation_set(field, 1.0);
    const auto decomp = cluster_decomposition(set);
    REQUIRE(decomp.components.size() >= 2);
    const double whole = remainder_norm_exact(build_remainder(set));
    double max_component = 0.0;
    for (const auto& comp : decomp.components) {
      LargeDeviationSet sub{set.eps, set.num_spins, comp};
      max_component =
          std::max(max_component, remainder_norm_exact(build_remainder(sub)));
    }
    REQUIRE(whole == Catch::Approx(max_component).margin(1e-9));

    // and on sampled disorder
    for (int r = 0; r < 10; ++r) {
      const auto rem_field = sample_rem_field(10, 7300 + r);
      const auto rem_set = large_deviation_set(rem_field, 0.5);
      const auto rem_decomp = cluster_decomposition(rem_set);
      if (rem_decomp.components.size() < 2) continue;
      const double full = remainder_norm_exact(build_remainder(rem_set));
      double per_comp = 0.0;
      for (const auto& comp : rem_decomp.components) {
        LargeDeviationSet sub{rem_set.eps, rem_set.num_spins, comp};
        per_comp =
            std::max(per_comp, remainder_norm_exact(build_remainder(sub)));
      }
      REQUIRE(full == Catch::Approx(per_comp).margin(1e-9));
    }
  }
}

TEST_CASE("Hamiltonian decomposition reconstructs H") {
  SECTION("REM sample at N = 10") {
    const auto field = sample_rem_field(10, 12);
    const QremOperator op(0.9, field);
    const auto decomp = decompose_hamiltonian(op, 0.5);
    REQUIRE_FALSE(decomp.set.members.empty());
    const Eigen::MatrixXd h = dense_hamiltonian(op);
    const Eigen::MatrixXd blocks = dense_block_hamiltonian(op, decomp.set);
    const Eigen::MatrixXd a = dense_remainder(decomp.remainder);
    const Eigen::MatrixXd rebuilt = blocks - op.gamma() * a;
    REQUIRE((h - rebuilt).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("empty set: H_{L^c} is all of H and A = 0") {
    const auto field = DisorderField::constant(6, 0.0);
    const QremOperator op(1.2, field);
    const auto decomp = decompose_hamiltonian(op, 1.0);
    REQUIRE(decomp.set.members.empty());
    REQUIRE(decomp.remainder.edges.empty());
    const Eigen::MatrixXd blocks = dense_block_hamiltonian(op, decomp.set);
    REQUIRE((dense_hamiltonian(op) - blocks).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("degenerate split: everything in L") {
    const int n = 5;
    const auto field = DisorderField::constant(n, -10.0);
    const QremOperator op(0.7, field);
    const auto decomp = decompose_hamiltonian(op, 1.0);
    REQUIRE(decomp.set.members.size() == field.dimension());
    // A holds every hypercube edge
    REQUIRE(decomp.remainder.edges.size() ==
            static_cast<std::size_t>(n) * (1u << (n - 1)));
    const Eigen::MatrixXd blocks = dense_block_hamiltonian(op, decomp.set);
    const Eigen::MatrixXd a = dense_remainder(decomp.remainder);
    const Eigen::MatrixXd rebuilt = blocks - op.gamma() * a;
    REQUIRE((dense_hamiltonian(op) - rebuilt).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("Gibbs lower bounds") {
  SECTION("classical bound is tight at Gamma = 0") {
    const auto field = sample_rem_field(8, 41);
    const QremOperator op(0.0, field);
    const auto bounds = gibbs_lower_bounds(op, 1.1);
    const double exact = pressure_exact_dense(op, 1.1).value;
    REQUIRE(bounds.classical == Catch::Approx(exact).margin(1e-10));
  }

  SECTION("paramagnetic bound is tight at U = 0") {
    const auto field = DisorderField::constant(8, 0.0);
    const QremOperator op(1.3, field);
    const auto bounds = gibbs_lower_bounds(op, 0.9);
    REQUIRE(bounds.paramagnetic ==
            Catch::Approx(std::log(std::cosh(0.9 * 1.3))).margin(1e-12));
  }

  SECTION("both lower-bound p_N on REM realizations") {
    for (int r = 0; r < 100; ++r) {
      const auto field = sample_rem_field(8, 5100 + r);
      const QremOperator op(1.0, field);
      const double exact = pressure_exact_dense(op, 1.0).value;
      const auto bounds = gibbs_lower_bounds(op, 1.0);
      REQUIRE(exact - bounds.classical >= -1e-10);
      REQUIRE(exact - bounds.paramagnetic >= -1e-10);
    }
  }
}

TEST_CASE("Golden-Thompson upper bound") {
  SECTION("U = 0: slack is exactly beta eps + ln2 / N") {
    const int n = 8;
    const auto field = DisorderField::constant(n, 0.0);
    const QremOperator op(1.5, field);
    const double beta = 0.8;
    const double eps = 0.3;
    const double bound = golden_thompson_upper(op, beta, eps);
    const double p = std::log(std::cosh(beta * 1.5));
    REQUIRE(bound - p ==
            Catch::Approx(beta * eps + std::numbers::ln2 / n).margin(1e-12));
  }

  SECTION("Gamma = 0: bound dominates the classical pressure") {
    const auto field = sample_rem_field(8, 61);
    const QremOperator op(0.0, field);
    const double p = pressure_exact_dense(op, 1.0).value;
    REQUIRE(golden_thompson_upper(op, 1.0, 0.5) >= p - 1e-9);
  }

  SECTION("dominates p_N across REM realizations and grids") {
    for (int r = 0; r < 30; ++r) {
      const auto field = sample_rem_field(8, 6200 + r);
      for (double eps : {0.4, 0.8}) {
        const auto geo = analyze_geometry(field, eps);
        for (double gamma : {0.5, 1.0}) {
          const QremOperator op(gamma, field);
          const auto spectrum = dense_spectrum(op);
          for (double beta : {0.5, 1.0}) {
            const double exact = pressure_from_levels(spectrum, beta, 8);
            const auto report = make_bound_report(op, beta, geo, exact);
            REQUIRE(report.slack_gt >= -1e-9);
            REQUIRE(report.slack_classical >= -1e-10);
            REQUIRE(report.slack_para >= -1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("omega event") {
  SECTION("empty set is good") {
    REQUIRE(omega_event(DisorderField::constant(8, 0.0), 1.0));
  }

  SECTION("planted cluster of size K_eps fails") {
    REQUIRE(k_epsilon(1.0) == 3);
    auto field = planted_field(8, {0, 1, 0b11}, -20.0);
    REQUIRE_FALSE(omega_event(field, 1.0));
    // one member fewer stays below the cutoff
    auto smaller = planted_field(8, {0, 1}, -20.0);
    REQUIRE(omega_event(smaller, 1.0));
  }

  SECTION("overwhelmingly true at eps = 1, N = 12") {
    int good = 0;
    const int reals = 100;
    for (int r = 0; r < reals; ++r) {
      if (omega_event(sample_rem_field(12, 8400 + r), 1.0)) ++good;
    }
    REQUIRE(good >= 90);
  }
}

TEST_CASE("bound report fields") {
  const auto field = sample_rem_field(6, 99);
  const QremOperator op(1.0, field);
  const double exact = pressure_exact_dense(op, 1.0).value;
  const auto report = make_bound_report(op, 1.0, 0.6, exact);
  REQUIRE(report.beta == 1.0);
  REQUIRE(report.gamma == 1.0);
  REQUIRE(report.eps == 0.6);
  REQUIRE(report.exact_pressure == exact);
  REQUIRE(report.slack_classical ==
          Catch::Approx(exact - report.classical_lower).margin(1e-15));
  REQUIRE(report.slack_gt ==
          Catch::Approx(report.gt_upper - exact).margin(1e-15));
  REQUIRE(report.a_norm_exact <= report.a_norm_bound + 1e-9);
}
