#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "qsmpc/angles.hpp"
#include "qsmpc/error.hpp"
#include "qsmpc/random.hpp"

namespace qsmpc {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kReadoutTolerance = 1e-9;

/// Pure single-qubit state amp0|0> + amp1|1>.
struct QubitState {
  Complex amp0{1.0, 0.0};
  Complex amp1{0.0, 0.0};

  double prob_one() const { return std::norm(amp1); }
  double norm_squared() const { return std::norm(amp0) + std::norm(amp1); }
  bool is_normalized(double tol = kNormTolerance) const { return std::abs(norm_squared() - 1.0) <= tol; }

  friend bool operator==(const QubitState&, const QubitState&) = default;
};

inline QubitState zero_state() { return {}; }
inline QubitState one_state() { return {Complex{0.0}, Complex{1.0}}; }

inline QubitState apply_ry(const QubitState& s, const RyGate& g) {
  const RealMat2 m = g.matrix();
  return {m.m00 * s.amp0 + m.m01 * s.amp1, m.m10 * s.amp0 + m.m11 * s.amp1};
}

inline QubitState apply_gates(QubitState s, std::span<const RyGate> gates) {
  for (const auto& g : gates) s = apply_ry(s, g);
  return s;
}

/// Born-rule sample: 1 with probability |amp1|^2.
inline Bit measure(const QubitState& s, Rng& rng) { return rng.uniform() < s.prob_one() ? 1 : 0; }

/// The computational-basis value the state occupies to within `tol`, if any.
inline std::optional<Bit> deterministic_readout(const QubitState& s, double tol = kReadoutTolerance) {
  require(tol > 0.0 && tol < 0.5, "deterministic_readout: tol must lie in (0, 0.5)");
  if (std::norm(s.amp0) > 1.0 - tol) return Bit{0};
  if (std::norm(s.amp1) > 1.0 - tol) return Bit{1};
  return std::nullopt;
}

inline Complex inner_product(const QubitState& a, const QubitState& b) {
  return std::conj(a.amp0) * b.amp0 + std::conj(a.amp1) * b.amp1;
}

inline bool states_equal_up_to_phase(const QubitState& a, const QubitState& b, double tol = 1e-10) {
  return std::abs(inner_product(a, b)) > 1.0 - tol;
}

// Pauli errors for trajectory sampling.
enum class Pauli : std::uint8_t { I, X, Y, Z };

inline QubitState apply_pauli(const QubitState& s, Pauli p) {
  constexpr Complex i{0.0, 1.0};
  switch (p) {
    case Pauli::I: return s;
    case Pauli::X: return {s.amp1, s.amp0};
    case Pauli::Y: return {-i * s.amp1, i * s.amp0};
    case Pauli::Z: return {s.amp0, -s.amp1};
  }
  return s;
}

/// Row-major 2x2 complex matrix describing a mixed single-qubit state.
struct DensityMatrix {
  std::array<Complex, 4> e{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{0.0}};

  static DensityMatrix from_state(const QubitState& s) {
    return {{s.amp0 * std::conj(s.amp0), s.amp0 * std::conj(s.amp1), s.amp1 * std::conj(s.amp0),
             s.amp1 * std::conj(s.amp1)}};
  }
  static DensityMatrix maximally_mixed() { return {{Complex{0.5}, Complex{0.0}, Complex{0.0}, Complex{0.5}}}; }
  static DensityMatrix zero_matrix() { return {{Complex{}, Complex{}, Complex{}, Complex{}}}; }

  const Complex& operator()(int row, int col) const { return e[static_cast<std::size_t>(2 * row + col)]; }
  Complex& operator()(int row, int col) { return e[static_cast<std::size_t>(2 * row + col)]; }

  Complex trace() const { return e[0] + e[3]; }
  double prob_one() const { return e[3].real(); }

  /// Largest entrywise |a - b|.
  double max_abs_diff(const DensityMatrix& other) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(e[i] - other.e[i]));
    return worst;
  }

  /// Hermitian, unit trace, eigenvalues >= -tol.
  bool is_valid(double tol = kNormTolerance) const {
    if (std::abs(e[1] - std::conj(e[2])) > tol) return false;
    if (std::abs(e[0].imag()) > tol || std::abs(e[3].imag()) > tol) return false;
    if (std::abs(trace() - Complex{1.0}) > tol) return false;
    const double a = e[0].real();
    const double d = e[3].real();
    const double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) / 4.0 + std::norm(e[1])));
    return (a + d) / 2.0 - disc >= -tol;
  }

  DensityMatrix& operator+=(const DensityMatrix& other) {
    for (std::size_t i = 0; i < 4; ++i) e[i] += other.e[i];
    return *this;
  }
  friend DensityMatrix operator*(double w, DensityMatrix m) {
    for (auto& v : m.e) v *= w;
    return m;
  }
};

/// R rho R^T for the (real) gate matrix R.
inline DensityMatrix apply_ry(const DensityMatrix& rho, const RyGate& g) {
  const RealMat2 m = g.matrix();
  const double r[2][2] = {{m.m00, m.m01}, {m.m10, m.m11}};
  DensityMatrix out = DensityMatrix::zero_matrix();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Complex acc{};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) acc += r[i][a] * rho(a, b) * r[j][b];
      out(i, j) = acc;
    }
  return out;
}

inline void require_probability(double p, const char* what) {
  require(p >= 0.0 && p <= 1.0, std::string(what) + " must lie in [0, 1]");
}

/// (1 - p) rho + p I/2.
inline DensityMatrix depolarize(const DensityMatrix& rho, double p) {
  require_probability(p, "depolarizing probability");
  DensityMatrix out = (1.0 - p) * rho;
  out += p * DensityMatrix::maximally_mixed();
  return out;
}

struct WeightedState {
  QubitState state;
  double weight = 0.0;
};

/// Sum of weight * |s><s|. Weights must be nonnegative and sum to one.
inline DensityMatrix ensemble_average(std::span<const WeightedState> states) {
  double total = 0.0;
  DensityMatrix acc = DensityMatrix::zero_matrix();
  for (const auto& [s, w] : states) {
    require(w >= 0.0, "ensemble_average: negative weight");
    total += w;
    acc += w * DensityMatrix::from_state(s);
  }
  require(std::abs(total - 1.0) <= kNormTolerance, "ensemble_average: weights must sum to 1");
  return acc;
}

struct NoiseModel {
  double depolarizing_per_gate = 0.0;
  double measurement_flip = 0.0;

  void validate() const {
    require_probability(depolarizing_per_gate, "depolarizing_per_gate");
    require_probability(measurement_flip, "measurement_flip");
  }
  bool noiseless() const { return depolarizing_per_gate == 0.0 && measurement_flip == 0.0; }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// One Monte Carlo step of the depolarizing channel: with probability p the
/// state receives a uniformly random Pauli from {I, X, Y, Z}, which averages
/// to (1 - p) rho + p I/2.
inline QubitState depolarize_sample(const QubitState& s, double p, Rng& rng) {
  if (p <= 0.0 || !rng.bernoulli(p)) return s;
  return apply_pauli(s, static_cast<Pauli>(rng.below(4)));
}

/// Apply `g` followed by one draw of the gate noise.
inline QubitState apply_noisy(const QubitState& s, const RyGate& g, const NoiseModel& noise, Rng& rng) {
  return depolarize_sample(apply_ry(s, g), noise.depolarizing_per_gate, rng);
}

/// Measure then flip the reported bit with probability measurement_flip.
inline Bit noisy_measure(const QubitState& s, const NoiseModel& noise, Rng& rng) {
  Bit b = measure(s, rng);
  if (noise.measurement_flip > 0.0 && rng.bernoulli(noise.measurement_flip)) b ^= 1;
  return b;
}

/// One trajectory from |0>: every gate followed by sampled noise, then a
/// noisy readout.
inline Bit sample_trajectory(std::span<const RyGate> gates, const NoiseModel& noise, Rng& rng) {
  QubitState s = zero_state();
  for (const auto& g : gates) s = apply_noisy(s, g, noise, rng);
  return noisy_measure(s, noise, rng);
}

/// Exact channel evolution from |0><0|: each gate followed by depolarization.
inline DensityMatrix evolve_density(std::span<const RyGate> gates, const NoiseModel& noise) {
  noise.validate();
  DensityMatrix rho = DensityMatrix::from_state(zero_state());
  for (const auto& g : gates) rho = depolarize(apply_ry(rho, g), noise.depolarizing_per_gate);
  return rho;
}

/// Probability of reading 1 from `rho` through the flip channel.
inline double readout_prob_one(const DensityMatrix& rho, const NoiseModel& noise) {
  const double p1 = rho.prob_one();
  return (1.0 - noise.measurement_flip) * p1 + noise.measurement_flip * (1.0 - p1);
}

}  // namespace qsmpc
