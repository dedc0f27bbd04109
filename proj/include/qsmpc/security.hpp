#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsmpc/angles.hpp"
#include "qsmpc/error.hpp"
#include "qsmpc/protocol.hpp"
#include "qsmpc/qubit.hpp"
#include "qsmpc/random.hpp"
#include "qsmpc/symfn.hpp"

namespace qsmpc {

// ---------------------------------------------------------------------------
// Eavesdropping on the qubit channel

inline constexpr int kMaxMarginalAuditArity = 6;
inline constexpr int kMaxCollusionAuditArity = 5;

/// Angle of the travelling qubit after clients 1..tap have acted, i.e. the
/// state carried by hop `tap` (hop 0 is server -> C_1, hop n is C_n ->
/// server and includes C_n's correction).
inline RationalAngle hop_angle(int tap, std::span<const Bit> x, std::span<const Bit> r, int k) {
  const int n = static_cast<int>(x.size());
  int x_prefix = 0;
  int r_prefix = 0;
  for (int i = 0; i < tap; ++i) {
    x_prefix += x[static_cast<std::size_t>(i)];
    r_prefix += r[static_cast<std::size_t>(i)];
  }
  RationalAngle a = scale(RationalAngle::pi_over(k), x_prefix) + scale(RationalAngle::pi(), r_prefix);
  if (tap == n) a = a + scale(invert(RationalAngle::pi_over(k)), weight(x) % k);
  return a;
}

/// The intercepted state at hop `tap`, averaged over all 2^n mask vectors.
inline DensityMatrix eavesdrop_marginal(int tap, std::span<const Bit> x, int k) {
  const int n = static_cast<int>(x.size());
  require(n >= 1 && n <= 20, "eavesdrop_marginal: arity out of range");
  require(k >= 1 && k <= n, "eavesdrop_marginal: k must lie in 1..n");
  require(tap >= 0 && tap <= n, "eavesdrop_marginal: tap must lie in 0..n");
  require_bits(x, "eavesdrop_marginal input");
  const std::uint64_t count = std::uint64_t{1} << n;
  const double w = 1.0 / static_cast<double>(count);
  DensityMatrix acc = DensityMatrix::zero_matrix();
  BitVector r(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    acc += w * DensityMatrix::from_state(apply_ry(zero_state(), RyGate{hop_angle(tap, x, r, k)}));
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Collusion analysis

/// Inputs and Step 1 randomness of the colluding clients. Entries belonging
/// to honest clients are ignored. Colluders know all of this, so the view
/// distribution is computed conditioned on it.
struct ColluderSetting {
  BitVector x;
  BitVector r;
  std::vector<std::vector<int>> x_shares;  // row i-1: client i's split
  std::vector<BitVector> r_shares;

  /// Shares for every client drawn from `seed`, with the given inputs.
  static ColluderSetting draw(int n, int k, BitVector x, BitVector r, std::uint64_t seed) {
    require(x.size() == static_cast<std::size_t>(n) && r.size() == static_cast<std::size_t>(n),
            "ColluderSetting: inputs must have n entries");
    ColluderSetting s{std::move(x), std::move(r), {}, {}};
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
      s.x_shares.push_back(split_mod_k(s.x[static_cast<std::size_t>(i)], k, n, rng));
      s.r_shares.push_back(split_xor(s.r[static_cast<std::size_t>(i)], n, rng));
    }
    return s;
  }
};

/// A partition of the honest clients' input tuples. Tuple t assigns bit j of
/// t to the j-th honest client (ascending client index). Class ids are
/// numbered by first appearance, so equal partitions have equal vectors.
struct InputPartition {
  std::vector<int> honest;
  std::vector<int> class_of;

  std::size_t class_count() const {
    return class_of.empty() ? 0 : static_cast<std::size_t>(*std::max_element(class_of.begin(), class_of.end()) + 1);
  }
  bool all_singletons() const { return class_count() == class_of.size(); }

  friend bool operator==(const InputPartition&, const InputPartition&) = default;
};

/// Colluders' view distribution for one honest input tuple, factored into
/// the independent x-share part (purely classical) and the mask part
/// (classical bits plus the qubit at every colluder-held hop).
struct ViewDistribution {
  std::map<std::vector<int>, std::uint64_t> x_part;

  struct MaskCell {
    std::uint64_t count = 0;
    std::vector<DensityMatrix> hops;  // unnormalized: sum over randomness of |psi><psi|
  };
  std::map<std::vector<int>, MaskCell> mask_part;
  std::uint64_t mask_total = 0;

  bool equivalent(const ViewDistribution& other, double tol = 1e-12) const {
    if (x_part != other.x_part || mask_total != other.mask_total) return false;
    if (mask_part.size() != other.mask_part.size()) return false;
    const double scale = 1.0 / static_cast<double>(mask_total);
    for (auto a = mask_part.begin(), b = other.mask_part.begin(); a != mask_part.end(); ++a, ++b) {
      if (a->first != b->first || a->second.count != b->second.count) return false;
      for (std::size_t h = 0; h < a->second.hops.size(); ++h)
        if ((scale * a->second.hops[h]).max_abs_diff(scale * b->second.hops[h]) > tol) return false;
    }
    return true;
  }
};

/// Honest set, validated. Colluders are every other client plus the server;
/// honest must either exclude C_n or contain every client (server alone).
struct CollusionScenario {
  int n = 0;
  int k = 2;
  std::vector<int> honest;
  std::vector<int> colluding_clients;

  CollusionScenario(int n_, int k_, std::vector<int> honest_) : n(n_), k(k_), honest(std::move(honest_)) {
    require(n >= 2 && n <= kMaxCollusionAuditArity, "collusion: n must lie in 2..5");
    require(k >= 2 && k <= n, "collusion: k must lie in 2..n");
    require(!honest.empty(), "collusion: honest set must be nonempty");
    std::sort(honest.begin(), honest.end());
    require(std::adjacent_find(honest.begin(), honest.end()) == honest.end(), "collusion: duplicate honest client");
    for (int h : honest) require(h >= 1 && h <= n, "collusion: honest client out of range");
    for (int i = 1; i <= n; ++i)
      if (!is_honest(i)) colluding_clients.push_back(i);
    require(server_only() || !is_honest(n), "collusion: C_n must collude unless only the server does");
  }

  bool is_honest(int id) const { return std::binary_search(honest.begin(), honest.end(), id); }
  bool server_only() const { return colluding_clients.empty(); }
  std::size_t tuple_count() const { return std::size_t{1} << honest.size(); }

  /// Full input vector for honest tuple t over the colluders' inputs.
  BitVector full_input(std::size_t t, const BitVector& colluder_x) const {
    BitVector x = colluder_x;
    for (std::size_t j = 0; j < honest.size(); ++j) x[static_cast<std::size_t>(honest[j] - 1)] = (t >> j) & 1u;
    return x;
  }

  /// Hops whose receiver colludes: hop j (j < n) goes to C_{j+1}, hop n to S.
  std::vector<int> held_hops() const {
    std::vector<int> hops;
    for (int j = 0; j < n; ++j)
      if (!is_honest(j + 1)) hops.push_back(j);
    hops.push_back(n);
    return hops;
  }
};

namespace detail {

// Every share vector in Z_k^n with sum == value (mod k).
inline std::vector<std::vector<int>> share_vectors_mod_k(int value, int k, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> v(static_cast<std::size_t>(n), 0);
  const auto total = static_cast<std::uint64_t>(std::pow(k, n - 1));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    int sum = 0;
    for (int j = 0; j + 1 < n; ++j) {
      v[static_cast<std::size_t>(j)] = static_cast<int>(c % static_cast<std::uint64_t>(k));
      c /= static_cast<std::uint64_t>(k);
      sum += v[static_cast<std::size_t>(j)];
    }
    v.back() = ((value - sum) % k + k) % k;
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

/// Exact distribution of everything the colluders observe, for honest tuple
/// `t`, by dynamic programming over the honest clients' randomness.
///
/// x-part key: shares honest clients send to colluders, then x~_h of every
/// honest client (reported to C_n). Mask-part key: r-shares honest clients
/// send to colluders, r~_h of every honest client (broadcast), and the
/// announcement. Each mask-part cell also carries the qubit state at every
/// colluder-held hop, summed over the randomness consistent with the key.
inline ViewDistribution colluder_view(const CollusionScenario& sc, const ColluderSetting& setting, std::size_t t) {
  const int n = sc.n;
  const int k = sc.k;
  const auto H = sc.honest.size();
  const BitVector x = sc.full_input(t, setting.x);
  ViewDistribution out;

  if (!sc.server_only()) {
    // State: observed shares so far ++ running sum of shares into each honest client.
    std::map<std::vector<int>, std::uint64_t> states{{std::vector<int>(H, 0), 1}};
    for (std::size_t p = 0; p < H; ++p) {
      const int h = sc.honest[p];
      const auto vectors = detail::share_vectors_mod_k(x[static_cast<std::size_t>(h - 1)], k, n);
      std::map<std::vector<int>, std::uint64_t> next;
      for (const auto& [key, count] : states) {
        for (const auto& s : vectors) {
          std::vector<int> nk(key.begin(), key.end() - static_cast<std::ptrdiff_t>(H));
          for (int c : sc.colluding_clients) nk.push_back(s[static_cast<std::size_t>(c - 1)]);
          for (std::size_t q = 0; q < H; ++q)
            nk.push_back((key[key.size() - H + q] + s[static_cast<std::size_t>(sc.honest[q] - 1)]) % k);
          next[nk] += count;
        }
      }
      states = std::move(next);
    }
    for (const auto& [key, count] : states) {
      std::vector<int> view = key;
      for (std::size_t q = 0; q < H; ++q) {
        int& acc = view[view.size() - H + q];
        for (int c : sc.colluding_clients)
          acc += setting.x_shares[static_cast<std::size_t>(c - 1)][static_cast<std::size_t>(sc.honest[q] - 1)];
        acc %= k;
      }
      out.x_part[view] += count;
    }
  }

  // Mask part. State: observed r-shares ++ running r~ of each honest client
  // ++ parity of honest r_h with h <= j for every held hop j.
  const auto hops = sc.held_hops();
  const std::size_t tail = H + hops.size();
  std::map<std::vector<int>, std::uint64_t> states{{std::vector<int>(tail, 0), 1}};
  for (std::size_t p = 0; p < H; ++p) {
    const int h = sc.honest[p];
    std::map<std::vector<int>, std::uint64_t> next;
    for (const auto& [key, count] : states) {
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
        // Any n-bit vector is a valid split of its own parity, and r_h is uniform.
        Bit r_h = 0;
        for (int j = 0; j < n; ++j) r_h ^= (code >> j) & 1u;
        std::vector<int> nk(key.begin(), key.end() - static_cast<std::ptrdiff_t>(tail));
        for (int c : sc.colluding_clients) nk.push_back(static_cast<int>((code >> (c - 1)) & 1u));
        for (std::size_t q = 0; q < H; ++q)
          nk.push_back(key[key.size() - tail + q] ^ static_cast<int>((code >> (sc.honest[q] - 1)) & 1u));
        for (std::size_t j = 0; j < hops.size(); ++j)
          nk.push_back(key[key.size() - hops.size() + j] ^ (h <= hops[j] ? r_h : 0));
        next[nk] += count;
      }
    }
    states = std::move(next);
  }
  const bool clients_see_masks = !sc.server_only();
  const Bit f = f_nk(n, k).at_weight(weight(x));
  for (const auto& [key, count] : states) {
    const std::size_t observed = key.size() - tail;
    std::vector<int> view(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(observed));
    if (clients_see_masks) {
      for (std::size_t q = 0; q < H; ++q) {
        int r_tilde = key[observed + q];
        for (int c : sc.colluding_clients)
          r_tilde ^= setting.r_shares[static_cast<std::size_t>(c - 1)][static_cast<std::size_t>(sc.honest[q] - 1)];
        view.push_back(r_tilde);
      }
    }
    // Realize one mask vector consistent with the hop parities: honest masks
    // only enter the qubit through these prefix parities.
    BitVector r = setting.r;
    for (int h : sc.honest) r[static_cast<std::size_t>(h - 1)] = 0;
    Bit honest_parity_total = static_cast<Bit>(key.back());
    Bit colluder_parity = 0;
    for (int c : sc.colluding_clients) colluder_parity ^= setting.r[static_cast<std::size_t>(c - 1)];
    view.push_back(f ^ honest_parity_total ^ colluder_parity);  // announcement

    auto& cell = out.mask_part[view];
    cell.count += count;
    if (cell.hops.empty()) cell.hops.assign(hops.size(), DensityMatrix::zero_matrix());
    for (std::size_t j = 0; j < hops.size(); ++j) {
      const Bit honest_prefix = static_cast<Bit>(key[key.size() - hops.size() + j]);
      // Put the honest prefix parity on the first honest client's mask.
      BitVector rj = r;
      if (!sc.honest.empty() && sc.honest.front() <= hops[j])
        rj[static_cast<std::size_t>(sc.honest.front() - 1)] = honest_prefix;
      const QubitState psi = apply_ry(zero_state(), RyGate{hop_angle(hops[j], x, rj, k)});
      cell.hops[j] += static_cast<double>(count) * DensityMatrix::from_state(psi);
    }
    out.mask_total += count;
  }
  return out;
}

namespace detail {

inline InputPartition canonical_partition(std::vector<int> honest, const std::vector<std::vector<int>>& keys) {
  InputPartition p{std::move(honest), {}};
  std::map<std::vector<int>, int> ids;
  for (const auto& key : keys) {
    const auto [it, inserted] = ids.emplace(key, static_cast<int>(ids.size()));
    p.class_of.push_back(it->second);
  }
  return p;
}

}  // namespace detail

/// Groups honest input tuples by the colluders' view distribution.
inline InputPartition collusion_partition(const CollusionScenario& sc, const ColluderSetting& setting) {
  std::vector<ViewDistribution> reps;
  std::vector<std::vector<int>> keys;
  for (std::size_t t = 0; t < sc.tuple_count(); ++t) {
    const auto view = colluder_view(sc, setting, t);
    int id = -1;
    for (std::size_t c = 0; c < reps.size(); ++c)
      if (reps[c].equivalent(view)) {
        id = static_cast<int>(c);
        break;
      }
    if (id < 0) {
      id = static_cast<int>(reps.size());
      reps.push_back(view);
    }
    keys.push_back({id});
  }
  return detail::canonical_partition(sc.honest, keys);
}

/// All-zero colluder inputs with shares drawn from seed 0.
inline InputPartition collusion_partition(std::vector<int> honest, int k, int n) {
  const CollusionScenario sc(n, k, std::move(honest));
  return collusion_partition(sc, ColluderSetting::draw(n, k, BitVector(static_cast<std::size_t>(n), 0),
                                                       BitVector(static_cast<std::size_t>(n), 0), 0));
}

/// Tuples grouped by the sum of honest inputs mod k (one class when only the
/// server colludes, since it never sees the aggregate).
inline InputPartition sum_mod_k_partition(const CollusionScenario& sc) {
  std::vector<std::vector<int>> keys;
  for (std::size_t t = 0; t < sc.tuple_count(); ++t)
    keys.push_back({sc.server_only() ? 0 : std::popcount(t) % sc.k});
  return detail::canonical_partition(sc.honest, keys);
}

/// Tuples grouped by what any correct execution must reveal to colluding
/// clients: the honest sum mod k together with the function output itself.
inline InputPartition output_aware_partition(const CollusionScenario& sc, const ColluderSetting& setting) {
  std::vector<std::vector<int>> keys;
  const auto f = f_nk(sc.n, sc.k);
  for (std::size_t t = 0; t < sc.tuple_count(); ++t) {
    if (sc.server_only()) {
      keys.push_back({0});
    } else {
      keys.push_back({std::popcount(t) % sc.k, f(sc.full_input(t, setting.x))});
    }
  }
  return detail::canonical_partition(sc.honest, keys);
}

}  // namespace qsmpc
