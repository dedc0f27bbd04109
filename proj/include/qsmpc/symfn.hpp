#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsmpc/angles.hpp"
#include "qsmpc/error.hpp"
#include "qsmpc/gf2.hpp"
#include "qsmpc/qubit.hpp"

namespace qsmpc {

using BitVector = std::vector<Bit>;

inline constexpr int kMaxTruthTableArity = 16;

inline int weight(std::span<const Bit> x) {
  int w = 0;
  for (Bit b : x) w += b & 1;
  return w;
}

inline void require_bits(std::span<const Bit> v, const char* what) {
  for (Bit b : v) require(b <= 1, std::string(what) + ": entries must be 0 or 1");
}

/// An n-variable symmetric Boolean function stored as its value at each
/// input weight 0..n.
struct SymmetricFunction {
  int n = 1;
  BitVector values = BitVector(2, 0);

  SymmetricFunction() = default;
  SymmetricFunction(int arity, BitVector by_weight) : n(arity), values(std::move(by_weight)) {
    require(n >= 1, "SymmetricFunction: arity must be positive");
    require(values.size() == static_cast<std::size_t>(n) + 1, "SymmetricFunction: need n+1 values");
    require_bits(values, "SymmetricFunction");
  }

  /// Bit w of `mask` is the value at weight w.
  static SymmetricFunction from_mask(int arity, std::uint64_t mask) {
    BitVector v(static_cast<std::size_t>(arity) + 1);
    for (int w = 0; w <= arity; ++w) v[static_cast<std::size_t>(w)] = (mask >> w) & 1u;
    return {arity, std::move(v)};
  }

  Bit at_weight(int w) const {
    require(w >= 0 && w <= n, "SymmetricFunction::at_weight: weight out of range");
    return values[static_cast<std::size_t>(w)];
  }

  Bit operator()(std::span<const Bit> x) const {
    require(x.size() == static_cast<std::size_t>(n), "SymmetricFunction: arity mismatch");
    return at_weight(weight(x));
  }

  friend SymmetricFunction operator^(const SymmetricFunction& a, const SymmetricFunction& b) {
    require(a.n == b.n, "SymmetricFunction xor: arity mismatch");
    BitVector v(a.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] ^ b.values[i];
    return {a.n, std::move(v)};
  }

  friend bool operator==(const SymmetricFunction&, const SymmetricFunction&) = default;
};

/// Coefficients a_0..a_n of a function over the basis {f_n^0, ..., f_n^n}.
struct BasisCoefficients {
  int n = 1;
  BitVector a;

  friend bool operator==(const BasisCoefficients&, const BasisCoefficients&) = default;
};

/// ANF of a symmetric function as the set of complete degree layers it
/// contains. An empty set is the zero function.
struct AnfDegreeSet {
  int n = 1;
  std::vector<int> degrees;  // ascending

  bool contains(int d) const { return std::binary_search(degrees.begin(), degrees.end(), d); }
  std::optional<int> degree() const {
    if (degrees.empty()) return std::nullopt;
    return degrees.back();
  }

  friend bool operator==(const AnfDegreeSet&, const AnfDegreeSet&) = default;
};

// ---------------------------------------------------------------------------
// The f_n^k family

/// Value at weight w is floor(w / k) mod 2.
inline SymmetricFunction f_nk(int n, int k) {
  require(n >= 1, "f_nk: n must be positive");
  require(k >= 1 && k <= n, "f_nk: k must lie in 1..n");
  BitVector v(static_cast<std::size_t>(n) + 1);
  for (int w = 0; w <= n; ++w) v[static_cast<std::size_t>(w)] = static_cast<Bit>((w / k) % 2);
  return {n, std::move(v)};
}

/// Basis member for k = 0, taken to be the constant-one function.
inline SymmetricFunction f_n0(int n) {
  require(n >= 1, "f_n0: n must be positive");
  return {n, BitVector(static_cast<std::size_t>(n) + 1, 1)};
}

inline SymmetricFunction basis_function(int n, int k) { return k == 0 ? f_n0(n) : f_nk(n, k); }

/// M[w][k] = f_n^k at weight w, including the constant column k = 0.
inline gf2::Matrix basis_matrix(int n) {
  require(n >= 1, "basis_matrix: n must be positive");
  gf2::Matrix m(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const auto f = basis_function(n, k);
    for (int w = 0; w <= n; ++w) m.set(static_cast<std::size_t>(w), static_cast<std::size_t>(k), f.at_weight(w));
  }
  return m;
}

inline BasisCoefficients decompose(const SymmetricFunction& f) {
  return {f.n, gf2::solve_unit_lower(basis_matrix(f.n), f.values)};
}

inline SymmetricFunction recompose(const BasisCoefficients& c) {
  require(c.a.size() == static_cast<std::size_t>(c.n) + 1, "recompose: need n+1 coefficients");
  SymmetricFunction acc{c.n, BitVector(c.a.size(), 0)};
  for (int k = 0; k <= c.n; ++k)
    if (c.a[static_cast<std::size_t>(k)]) acc = acc ^ basis_function(c.n, k);
  return acc;
}

// ---------------------------------------------------------------------------
// Circuits

enum class GateRole : std::uint8_t {
  constant,    // the extra V realizing a_0 = 1
  input,       // U_k^{x_i}
  mask,        // V^{r_i}
  correction,  // (U_k^dagger)^{(sum x) mod k}
};

/// gate^power, tagged with who applies it and which f_n^k block it belongs to.
struct CircuitStep {
  RyGate gate;
  int power = 1;
  GateRole role = GateRole::input;
  int client = 0;  // 1-based; 0 when not tied to a client
  int block = 0;
  int k = 0;
};

/// An ordered gate list; steps[0] acts first on |0>.
struct CircuitSpec {
  int n = 0;
  std::vector<CircuitStep> steps;

  std::vector<RyGate> expanded() const {
    std::vector<RyGate> out;
    for (const auto& s : steps)
      for (int i = 0; i < s.power; ++i) out.push_back(s.gate);
    return out;
  }

  std::size_t gate_count() const {
    std::size_t c = 0;
    for (const auto& s : steps) c += static_cast<std::size_t>(s.power);
    return c;
  }

  RationalAngle net_angle() const {
    RationalAngle total;
    for (const auto& s : steps) total = compose(total, scale(s.gate.angle, s.power));
    return total;
  }

  int block_count() const { return steps.empty() ? 0 : steps.back().block + 1; }

  /// Appends `other`'s steps, renumbering its blocks after ours.
  void append(const CircuitSpec& other) {
    const int offset = block_count();
    for (auto s : other.steps) {
      s.block += offset;
      steps.push_back(s);
    }
  }
};

namespace detail {

inline void check_circuit_args(int n, int k, std::span<const Bit> x) {
  require(n >= 1, "circuit: n must be positive");
  require(k >= 1 && k <= n, "circuit: k must lie in 1..n");
  require(x.size() == static_cast<std::size_t>(n), "circuit: input arity mismatch");
  require_bits(x, "circuit input");
}

}  // namespace detail

/// (U_k^dagger)^{(sum x) mod k} U_k^{x_n} ... U_k^{x_1}
inline CircuitSpec build_circuit_U(int n, int k, std::span<const Bit> x) {
  detail::check_circuit_args(n, k, x);
  CircuitSpec c{n, {}};
  for (int i = 1; i <= n; ++i)
    c.steps.push_back({RyGate::u(k), x[static_cast<std::size_t>(i - 1)], GateRole::input, i, 0, k});
  c.steps.push_back({RyGate::u_dagger(k), weight(x) % k, GateRole::correction, 0, 0, k});
  return c;
}

/// (U_k^dagger)^{(sum x) mod k} V^{r_n} U_k^{x_n} ... V^{r_1} U_k^{x_1}
inline CircuitSpec build_circuit_VU(int n, int k, std::span<const Bit> x, std::span<const Bit> r) {
  detail::check_circuit_args(n, k, x);
  require(r.size() == static_cast<std::size_t>(n), "circuit: mask arity mismatch");
  require_bits(r, "circuit mask");
  CircuitSpec c{n, {}};
  for (int i = 1; i <= n; ++i) {
    const auto idx = static_cast<std::size_t>(i - 1);
    c.steps.push_back({RyGate::u(k), x[idx], GateRole::input, i, 0, k});
    c.steps.push_back({RyGate::v(), r[idx], GateRole::mask, i, 0, k});
  }
  c.steps.push_back({RyGate::u_dagger(k), weight(x) % k, GateRole::correction, 0, 0, k});
  return c;
}

/// U(n,k,x) U(n,h,x): the h circuit acts first.
inline CircuitSpec xor_compose_circuit(int n, int k, int h, std::span<const Bit> x) {
  CircuitSpec c = build_circuit_U(n, h, x);
  c.append(build_circuit_U(n, k, x));
  return c;
}

/// prod_k U(n,k,x)^{a_k} |0>, with a single V standing in for the constant
/// term a_0.
inline CircuitSpec synthesize_circuit(const SymmetricFunction& f, std::span<const Bit> x) {
  require(x.size() == static_cast<std::size_t>(f.n), "synthesize_circuit: input arity mismatch");
  require_bits(x, "synthesize_circuit input");
  const auto coeffs = decompose(f);
  CircuitSpec c{f.n, {}};
  if (coeffs.a[0]) c.steps.push_back({RyGate::v(), 1, GateRole::constant, 0, 0, 0});
  for (int k = 1; k <= f.n; ++k)
    if (coeffs.a[static_cast<std::size_t>(k)]) c.append(build_circuit_U(f.n, k, x));
  return c;
}

inline QubitState simulate(const CircuitSpec& c) { return apply_gates(zero_state(), c.expanded()); }

inline std::optional<Bit> readout(const CircuitSpec& c, double tol = kReadoutTolerance) {
  return deterministic_readout(simulate(c), tol);
}

// ---------------------------------------------------------------------------
// ANF analysis

/// ANF layers via Lucas' theorem: C(w, d) is odd iff d's bits are a subset
/// of w's, which makes values[w] = XOR_{d in D} [d subset w] a unit
/// triangular system in the unknown indicator of D.
inline AnfDegreeSet anf_degrees(const SymmetricFunction& f) {
  const auto size = static_cast<std::size_t>(f.n) + 1;
  gf2::Matrix m(size);
  for (std::size_t w = 0; w < size; ++w)
    for (std::size_t d = 0; d <= w; ++d) m.set(w, d, (d & ~w) == 0);
  const auto indicator = gf2::solve_unit_lower(m, f.values);
  AnfDegreeSet out{f.n, {}};
  for (std::size_t d = 0; d < size; ++d)
    if (indicator[d]) out.degrees.push_back(static_cast<int>(d));
  return out;
}

/// Entry x is values[wt(x)], with bit i of x holding variable x_{i+1}.
inline BitVector truth_table_oracle(const SymmetricFunction& f) {
  require(f.n <= kMaxTruthTableArity, "truth_table_oracle: arity exceeds " + std::to_string(kMaxTruthTableArity));
  BitVector table(std::size_t{1} << f.n);
  for (std::size_t x = 0; x < table.size(); ++x)
    table[x] = f.values[static_cast<std::size_t>(std::popcount(x))];
  return table;
}

/// Binary Moebius transform: truth table -> ANF coefficient per monomial mask.
inline BitVector mobius_transform(BitVector table) {
  require(std::has_single_bit(table.size()), "mobius_transform: size must be a power of two");
  for (std::size_t step = 1; step < table.size(); step <<= 1)
    for (std::size_t i = 0; i < table.size(); ++i)
      if (i & step) table[i] ^= table[i ^ step];
  return table;
}

/// Number of degree-d monomials present in an ANF coefficient vector, per d.
inline std::vector<std::size_t> monomials_per_degree(const BitVector& anf, int n) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t mask = 0; mask < anf.size(); ++mask)
    if (anf[mask]) ++counts[static_cast<std::size_t>(std::popcount(mask))];
  return counts;
}

/// Same result as anf_degrees, obtained from the full truth table. Throws if
/// some degree layer is only partially present (impossible for a genuinely
/// symmetric function).
inline AnfDegreeSet anf_degrees_mobius(const SymmetricFunction& f) {
  const auto counts = monomials_per_degree(mobius_transform(truth_table_oracle(f)), f.n);
  AnfDegreeSet out{f.n, {}};
  std::uint64_t layer = 1;  // C(n, d)
  for (int d = 0; d <= f.n; ++d) {
    const auto c = counts[static_cast<std::size_t>(d)];
    if (c != 0 && c != layer) throw ConsistencyFault("anf_degrees_mobius: incomplete degree layer");
    if (c != 0) out.degrees.push_back(d);
    layer = layer * static_cast<std::uint64_t>(f.n - d) / static_cast<std::uint64_t>(d + 1);
  }
  return out;
}

}  // namespace qsmpc
