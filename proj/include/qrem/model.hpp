#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qrem/errors.hpp"
#include "qrem/rng.hpp"

namespace qrem {

/// Largest spin count for which a 2^N value table is representable here.
inline constexpr int kMaxSpins = 30;

/// Spin count cap for dense 2^N x 2^N matrices.
inline constexpr int kMaxDenseSpins = 14;

/// Interaction order of a Gaussian spin model: a finite integer p >= 1,
/// or infinite for the uncorrelated (REM) limit.
class InteractionOrder {
 public:
  constexpr explicit InteractionOrder(int p) : p_(p) {
    if (p < 1) throw domain_error("interaction order must be >= 1");
  }

  static constexpr InteractionOrder infinite() noexcept {
    InteractionOrder o;
    return o;
  }

  constexpr bool is_finite() const noexcept { return p_ > 0; }

  constexpr int value() const {
    if (!is_finite()) throw domain_error("interaction order is infinite");
    return p_;
  }

  friend constexpr bool operator==(InteractionOrder, InteractionOrder) = default;

 private:
  constexpr InteractionOrder() noexcept : p_(0) {}
  int p_;  // 0 encodes infinity
};

inline std::string to_string(InteractionOrder p) {
  return p.is_finite() ? std::to_string(p.value()) : std::string("inf");
}

inline InteractionOrder parse_order(const std::string& text) {
  if (text == "inf" || text == "INF" || text == "Inf") {
    return InteractionOrder::infinite();
  }
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(text, &pos);
  } catch (const std::exception&) {
    throw domain_error("cannot parse interaction order '" + text + "'");
  }
  if (pos != text.size()) {
    throw domain_error("cannot parse interaction order '" + text + "'");
  }
  return InteractionOrder(value);
}

/// One vertex of the N-hypercube. Bit j of `index` encodes the spin as
/// sigma_j = (-1)^bit, so index 0 is the all-(+1) configuration and
/// flipping spin j is an XOR with (1 << j).
struct SpinConfiguration {
  std::uint64_t index = 0;
  int num_spins = 0;

  constexpr SpinConfiguration(std::uint64_t idx, int n) : index(idx), num_spins(n) {
    if (n < 1 || n > kMaxSpins) throw domain_error("spin count out of range");
    if (idx >> n) throw domain_error("configuration index exceeds 2^N");
  }

  constexpr double spin(int j) const noexcept {
    return (index >> j) & 1u ? -1.0 : 1.0;
  }
};

/// Hamming distance: the number of spins the two configurations disagree on.
inline int hamming_distance(const SpinConfiguration& a, const SpinConfiguration& b) {
  if (a.num_spins != b.num_spins) {
    throw dimension_error("hamming_distance: spin counts differ");
  }
  return std::popcount(a.index ^ b.index);
}

/// Normalized overlap (1/N) sum_j sigma_j sigma'_j, in [-1, 1].
inline double overlap(const SpinConfiguration& a, const SpinConfiguration& b) {
  const int d = hamming_distance(a, b);
  return static_cast<double>(a.num_spins - 2 * d) / a.num_spins;
}

/// The realized random energies U(sigma) over all 2^N configurations,
/// together with the generation metadata (p, seed) they are reproducible
/// from. Immutable after construction.
class DisorderField {
 public:
  DisorderField(int num_spins, InteractionOrder order, std::uint64_t seed,
                std::vector<double> values)
      : num_spins_(num_spins),
        order_(order),
        seed_(seed),
        values_(std::move(values)) {
    if (num_spins < 1 || num_spins > kMaxSpins) {
      throw capacity_error("DisorderField: spin count out of range");
    }
    if (values_.size() != dimension()) {
      throw dimension_error("DisorderField: expected 2^N values");
    }
  }

  /// Synthetic field with every energy equal to `value` (test fixture).
  static DisorderField constant(int num_spins, double value) {
    if (num_spins < 1 || num_spins > kMaxSpins) {
      throw capacity_error("DisorderField: spin count out of range");
    }
    return DisorderField(num_spins, InteractionOrder::infinite(), 0,
                         std::vector<double>(std::size_t{1} << num_spins, value));
  }

  int num_spins() const noexcept { return num_spins_; }
  InteractionOrder order() const noexcept { return order_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t dimension() const noexcept { return std::size_t{1} << num_spins_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::uint64_t index) const noexcept { return values_[index]; }

  /// Arithmetic mean 2^{-N} sum_sigma U(sigma).
  double mean() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  double min_value() const noexcept {
    double m = values_[0];
    for (double v : values_) m = std::min(m, v);
    return m;
  }

  /// FNV-1a over the IEEE-754 bit patterns; detects any drift in the
  /// generated values.
  std::uint64_t checksum() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : values_) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 0x100000001b3ULL;
      }
    }
    return h;
  }

 private:
  int num_spins_;
  InteractionOrder order_;
  std::uint64_t seed_;
  std::vector<double> values_;
};

/// REM disorder: 2^N i.i.d. draws of sqrt(N) * standard normal.
/// Deterministic in (N, seed).
inline DisorderField sample_rem_field(int num_spins, std::uint64_t seed) {
  if (num_spins < 1 || num_spins > kMaxSpins) {
    throw capacity_error("sample_rem_field: need 1 <= N <= " +
                         std::to_string(kMaxSpins));
  }
  const std::size_t dim = std::size_t{1} << num_spins;
  const rng::CounterRng gen(rng::derive_key(seed, rng::Stream::kRemField,
                                            static_cast<std::uint64_t>(num_spins)));
  const double scale = std::sqrt(static_cast<double>(num_spins));
  std::vector<double> values(dim);
  for (std::size_t i = 0; i < dim; ++i) values[i] = scale * gen.gaussian(i);
  return DisorderField(num_spins, InteractionOrder::infinite(), seed,
                       std::move(values));
}

/// p-spin disorder: U(sigma) = N^{(1-p)/2} sum over ordered p-tuples of
/// i.i.d. Gaussian couplings times the spin product. Repeated indices
/// square away, so each tuple contributes through the XOR of its bit
/// masks; accumulating couplings per mask and applying a Walsh-Hadamard
/// transform evaluates the whole field in O(N 2^N) after the O(N^p)
/// tuple pass. The covariance N * overlap^p holds exactly by construction.
inline DisorderField sample_pspin_field(int num_spins, int p, std::uint64_t seed) {
  if (p < 1) throw domain_error("sample_pspin_field: p must be >= 1");
  if (num_spins < 1 || num_spins > kMaxSpins) {
    throw capacity_error("sample_pspin_field: need 1 <= N <= " +
                         std::to_string(kMaxSpins));
  }
  double tuple_count = std::pow(static_cast<double>(num_spins), p);
  if (tuple_count > 1e8) {
    throw capacity_error("sample_pspin_field: N^p exceeds enumeration limit");
  }
  const std::size_t dim = std::size_t{1} << num_spins;
  const std::uint64_t meta =
      (static_cast<std::uint64_t>(num_spins) << 16) | static_cast<std::uint64_t>(p);
  const rng::CounterRng gen(
      rng::derive_key(seed, rng::Stream::kPspinCoupling, meta));

  std::vector<double> coeff(dim, 0.0);
  std::vector<int> digits(p, 0);
  const std::uint64_t tuples = static_cast<std::uint64_t>(tuple_count + 0.5);
  for (std::uint64_t t = 0; t < tuples; ++t) {
    std::uint64_t mask = 0;
    for (int i = 0; i < p; ++i) mask ^= std::uint64_t{1} << digits[i];
    coeff[mask] += gen.gaussian(t);
    for (int i = 0; i < p; ++i) {  // mixed-radix increment
      if (++digits[i] < num_spins) break;
      digits[i] = 0;
    }
  }

  // In-place Walsh-Hadamard transform: U(sigma) = sum_m c_m (-1)^{<sigma,m>}.
  for (std::size_t half = 1; half < dim; half <<= 1) {
    for (std::size_t base = 0; base < dim; base += 2 * half) {
      for (std::size_t k = base; k < base + half; ++k) {
        const double a = coeff[k];
        const double b = coeff[k + half];
        coeff[k] = a + b;
        coeff[k + half] = a - b;
      }
    }
  }
  const double scale =
      std::pow(static_cast<double>(num_spins), 0.5 * (1.0 - p));
  for (double& v : coeff) v *= scale;
  return DisorderField(num_spins, InteractionOrder(p), seed, std::move(coeff));
}

/// Exact covariance E[U(sigma) U(sigma')] = N * overlap^p (N * delta for
/// the infinite-order limit).
inline double covariance_oracle(InteractionOrder p, const SpinConfiguration& a,
                                const SpinConfiguration& b) {
  if (a.num_spins != b.num_spins) {
    throw dimension_error("covariance_oracle: spin counts differ");
  }
  const double n = a.num_spins;
  if (!p.is_finite()) return a.index == b.index ? n : 0.0;
  double q = overlap(a, b);
  double power = 1.0;
  for (int i = 0; i < p.value(); ++i) power *= q;
  return n * power;
}

/// H = Gamma * T + U acting on l^2 of the N-hypercube, where
/// (T psi)(sigma) = -sum_j psi(F_j sigma) and U multiplies pointwise.
/// Non-owning view over the field; matrix-free apply costs O(N 2^N).
class QremOperator {
 public:
  QremOperator(double gamma, const DisorderField& field)
      : gamma_(gamma), field_(&field) {
    if (gamma < 0.0) throw domain_error("QremOperator: gamma must be >= 0");
  }

  double gamma() const noexcept { return gamma_; }
  const DisorderField& field() const noexcept { return *field_; }
  int num_spins() const noexcept { return field_->num_spins(); }
  std::size_t dimension() const noexcept { return field_->dimension(); }

  /// out = H * in. Lengths must equal 2^N.
  void apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t dim = dimension();
    if (in.size() != dim || out.size() != dim) {
      throw dimension_error("QremOperator::apply: vector length != 2^N");
    }
    const auto u = field_->values();
    for (std::size_t i = 0; i < dim; ++i) out[i] = u[i] * in[i];
    if (gamma_ == 0.0) return;
    for (std::size_t bit = 1; bit < dim; bit <<= 1) {
      for (std::size_t base = 0; base < dim; base += 2 * bit) {
        for (std::size_t k = base; k < base + bit; ++k) {
          out[k] -= gamma_ * in[k + bit];
          out[k + bit] -= gamma_ * in[k];
        }
      }
    }
  }

 private:
  double gamma_;
  const DisorderField* field_;
};

/// Free-function spelling of the matrix-free product.
inline std::vector<double> apply_hamiltonian(const QremOperator& op,
                                             std::span<const double> v) {
  std::vector<double> out(op.dimension());
  op.apply(v, out);
  return out;
}

/// Materializes H as a dense symmetric matrix; oracle for small N.
inline Eigen::MatrixXd dense_hamiltonian(const QremOperator& op) {
  const int n = op.num_spins();
  if (n > kMaxDenseSpins) {
    throw capacity_error("dense_hamiltonian: N > " +
                         std::to_string(kMaxDenseSpins));
  }
  const auto dim = static_cast<Eigen::Index>(op.dimension());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const auto u = op.field().values();
  for (Eigen::Index i = 0; i < dim; ++i) {
    h(i, i) = u[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const Eigen::Index k = i ^ (Eigen::Index{1} << j);
      h(i, k) = -op.gamma();
    }
  }
  return h;
}

/// 2^{-N} sum_sigma U(sigma); the paramagnetic bound's correction term.
inline double field_mean(const DisorderField& field) { return field.mean(); }

}  // namespace qrem
