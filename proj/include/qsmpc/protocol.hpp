#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "qsmpc/angles.hpp"
#include "qsmpc/error.hpp"
#include "qsmpc/qubit.hpp"
#include "qsmpc/random.hpp"
#include "qsmpc/symfn.hpp"

namespace qsmpc {

// Participants: 0 is the server, 1..n the clients.
using PartyId = int;
inline constexpr PartyId kServer = 0;
inline constexpr PartyId kAllParties = -1;

// ---------------------------------------------------------------------------
// Secret sharing

/// n shares over Z_k summing to x mod k; the first n-1 are uniform.
inline std::vector<int> split_mod_k(int x, int k, int n, Rng& rng) {
  require(k >= 2, "split_mod_k: modulus must be at least 2");
  require(n >= 1, "split_mod_k: need at least one share");
  std::vector<int> shares(static_cast<std::size_t>(n));
  int sum = 0;
  for (int j = 0; j + 1 < n; ++j) {
    shares[static_cast<std::size_t>(j)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    sum += shares[static_cast<std::size_t>(j)];
  }
  shares.back() = (((x - sum) % k) + k) % k;
  return shares;
}

/// n bits whose XOR is r; the first n-1 are uniform.
inline BitVector split_xor(Bit r, int n, Rng& rng) {
  require(r <= 1, "split_xor: r must be a bit");
  require(n >= 1, "split_xor: need at least one share");
  BitVector shares(static_cast<std::size_t>(n));
  Bit acc = 0;
  for (int j = 0; j + 1 < n; ++j) {
    shares[static_cast<std::size_t>(j)] = rng.bit();
    acc ^= shares[static_cast<std::size_t>(j)];
  }
  shares.back() = acc ^ r;
  return shares;
}

// ---------------------------------------------------------------------------
// Messages

struct ClassicalShare {
  PartyId from = 0;
  PartyId to = 0;
  int x_share = 0;
  Bit r_share = 0;
  friend bool operator==(const ClassicalShare&, const ClassicalShare&) = default;
};

struct QubitHop {
  PartyId from = 0;
  PartyId to = 0;
  QubitState state;
};

struct AggregateReport {
  PartyId from = 0;
  PartyId to = 0;
  int x_tilde = 0;
  friend bool operator==(const AggregateReport&, const AggregateReport&) = default;
};

/// Server to every client.
struct Announcement {
  Bit value = 0;
  friend bool operator==(const Announcement&, const Announcement&) = default;
};

/// Client to every other client.
struct MaskBroadcast {
  PartyId from = 0;
  Bit r_tilde = 0;
  friend bool operator==(const MaskBroadcast&, const MaskBroadcast&) = default;
};

using Message = std::variant<ClassicalShare, QubitHop, AggregateReport, Announcement, MaskBroadcast>;

inline PartyId sender(const Message& m) {
  return std::visit(
      [](const auto& v) -> PartyId {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Announcement>) {
          return kServer;
        } else {
          return v.from;
        }
      },
      m);
}

inline PartyId recipient(const Message& m) {
  return std::visit(
      [](const auto& v) -> PartyId {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Announcement> || std::is_same_v<T, MaskBroadcast>) {
          return kAllParties;
        } else {
          return v.to;
        }
      },
      m);
}

inline bool hop_states_match(const QubitState& a, const QubitState& b, double tol = 1e-12) {
  return std::abs(a.amp0 - b.amp0) <= tol && std::abs(a.amp1 - b.amp1) <= tol;
}

/// Equality with qubit amplitudes compared to within `tol`.
inline bool messages_match(const Message& a, const Message& b, double tol = 1e-12) {
  if (a.index() != b.index()) return false;
  if (const auto* ha = std::get_if<QubitHop>(&a)) {
    const auto& hb = std::get<QubitHop>(b);
    return ha->from == hb.from && ha->to == hb.to && hop_states_match(ha->state, hb.state, tol);
  }
  return std::visit(
      [&b](const auto& va) {
        using T = std::decay_t<decltype(va)>;
        if constexpr (std::is_same_v<T, QubitHop>) {
          return false;
        } else {
          return va == std::get<T>(b);
        }
      },
      a);
}

// ---------------------------------------------------------------------------
// Participants

struct ProtocolSetup {
  int n = 0;
  int k = 2;
  BitVector x;
  BitVector r;
  std::uint64_t seed = 0;
  NoiseModel noise;

  void validate() const {
    require(n >= 2, "protocol: need at least two clients");
    require(k >= 2 && k <= n, "protocol: modulus k must satisfy 2 <= k <= n");
    require(x.size() == static_cast<std::size_t>(n), "protocol: x must have n entries");
    require(r.size() == static_cast<std::size_t>(n), "protocol: r must have n entries");
    require_bits(x, "protocol input x");
    require_bits(r, "protocol mask r");
    noise.validate();
  }
};

/// Pre-drawn share vectors, row i being client i's split (0-based rows).
/// Lets analyses enumerate every randomness assignment exactly.
struct PresetShares {
  std::vector<std::vector<int>> x_shares;
  std::vector<BitVector> r_shares;
};

struct ClientState {
  int id = 0;
  Bit x = 0;
  Bit r = 0;
  int k = 2;
  std::vector<int> outgoing_x_shares;
  BitVector outgoing_r_shares;
  int aggregated_x = 0;
  Bit aggregated_r = 0;
  std::optional<Bit> received_announcement;
  std::optional<Bit> output;
};

struct ServerState {
  bool prepared = false;
  std::optional<Bit> announcement;
};

namespace detail {

enum class Stream : std::uint64_t { shares = 1, gate_noise = 2, readout = 3 };

inline Rng stream(std::uint64_t seed, Stream s, std::uint64_t party) {
  return Rng::derive(seed, {static_cast<std::uint64_t>(s), party});
}

}  // namespace detail

/// Client C_i as a phase-driven state machine. All randomness comes from
/// its own seed-derived streams, so a client's behaviour depends only on its
/// setup and the messages it is handed.
class Client {
 public:
  Client(const ProtocolSetup& setup, int id, const PresetShares* preset = nullptr)
      : n_(setup.n),
        noise_(setup.noise),
        share_rng_(detail::stream(setup.seed, detail::Stream::shares, static_cast<std::uint64_t>(id))),
        noise_rng_(detail::stream(setup.seed, detail::Stream::gate_noise, static_cast<std::uint64_t>(id))) {
    state_.id = id;
    state_.k = setup.k;
    state_.x = setup.x[static_cast<std::size_t>(id - 1)];
    state_.r = setup.r[static_cast<std::size_t>(id - 1)];
    if (preset != nullptr) {
      state_.outgoing_x_shares = preset->x_shares.at(static_cast<std::size_t>(id - 1));
      state_.outgoing_r_shares = preset->r_shares.at(static_cast<std::size_t>(id - 1));
      check_preset();
    }
  }

  const ClientState& state() const { return state_; }
  int unitary_ops() const { return unitary_ops_; }
  bool is_last() const { return state_.id == n_; }

  /// Step 1: split x_i and r_i; one share pair to every other client.
  std::vector<Message> share() {
    if (state_.outgoing_x_shares.empty()) {
      state_.outgoing_x_shares = split_mod_k(state_.x, state_.k, n_, share_rng_);
      state_.outgoing_r_shares = split_xor(state_.r, n_, share_rng_);
    }
    std::vector<Message> out;
    for (int j = 1; j <= n_; ++j) {
      if (j == state_.id) continue;
      const auto idx = static_cast<std::size_t>(j - 1);
      out.emplace_back(ClassicalShare{state_.id, j, state_.outgoing_x_shares[idx], state_.outgoing_r_shares[idx]});
    }
    return out;
  }

  /// Step 1: fold the received shares and the retained self share.
  void aggregate(std::span<const ClassicalShare> incoming) {
    require(incoming.size() == static_cast<std::size_t>(n_ - 1), "client: expected n-1 incoming shares");
    std::vector<bool> seen(static_cast<std::size_t>(n_ + 1), false);
    const auto self = static_cast<std::size_t>(state_.id - 1);
    int x_sum = state_.outgoing_x_shares.at(self);
    Bit r_sum = state_.outgoing_r_shares.at(self);
    for (const auto& m : incoming) {
      if (m.to != state_.id || m.from < 1 || m.from > n_ || m.from == state_.id || seen[static_cast<std::size_t>(m.from)])
        throw ConsistencyFault("client " + std::to_string(state_.id) + ": unexpected share message");
      if (m.x_share < 0 || m.x_share >= state_.k || m.r_share > 1)
        throw ConsistencyFault("client " + std::to_string(state_.id) + ": share out of range");
      seen[static_cast<std::size_t>(m.from)] = true;
      x_sum += m.x_share;
      r_sum ^= m.r_share;
    }
    state_.aggregated_x = x_sum % state_.k;
    state_.aggregated_r = r_sum;
  }

  /// Step 2: apply V^{r_i} U_k^{x_i}. Returns the forwarded hop, except for
  /// C_n who keeps the particle for the correction.
  std::optional<QubitHop> receive_qubit(const QubitHop& in) {
    if (in.to != state_.id) throw ConsistencyFault("client: qubit routed to wrong party");
    QubitState s = in.state;
    if (state_.x) s = apply_gate(s, RyGate::u(state_.k));
    if (state_.r) s = apply_gate(s, RyGate::v());
    if (is_last()) {
      held_ = s;
      return std::nullopt;
    }
    return QubitHop{state_.id, state_.id + 1, s};
  }

  /// Step 3: every client but C_n reports x~_i to C_n.
  std::optional<AggregateReport> report() const {
    if (is_last()) return std::nullopt;
    return AggregateReport{state_.id, n_, state_.aggregated_x};
  }

  /// Step 3, C_n only: apply (U_k^dagger)^{(sum x~) mod k} and return the
  /// particle to the server.
  QubitHop correct_and_return(std::span<const AggregateReport> reports) {
    if (!is_last() || !held_) throw ConsistencyFault("client: correction requested from wrong party");
    require(reports.size() == static_cast<std::size_t>(n_ - 1), "client: expected n-1 aggregate reports");
    int total = state_.aggregated_x;
    for (const auto& rep : reports) {
      if (rep.to != state_.id || rep.x_tilde < 0 || rep.x_tilde >= state_.k)
        throw ConsistencyFault("client: malformed aggregate report");
      total += rep.x_tilde;
    }
    QubitState s = *held_;
    for (int i = 0; i < total % state_.k; ++i) s = apply_gate(s, RyGate::u_dagger(state_.k));
    held_.reset();
    return {state_.id, kServer, s};
  }

  /// Step 4.
  MaskBroadcast broadcast_mask() const { return {state_.id, state_.aggregated_r}; }

  void receive_announcement(const Announcement& a) { state_.received_announcement = a.value; }

  /// Step 4: output = announcement XOR (XOR of all r~_j).
  Bit finish(std::span<const MaskBroadcast> others) {
    if (!state_.received_announcement) throw ConsistencyFault("client: no announcement received");
    require(others.size() == static_cast<std::size_t>(n_ - 1), "client: expected n-1 mask broadcasts");
    Bit r_bar = state_.aggregated_r;
    for (const auto& m : others) {
      if (m.from == state_.id) throw ConsistencyFault("client: own mask echoed back");
      r_bar ^= m.r_tilde;
    }
    state_.output = *state_.received_announcement ^ r_bar;
    return *state_.output;
  }

 private:
  QubitState apply_gate(const QubitState& s, const RyGate& g) {
    ++unitary_ops_;
    return apply_noisy(s, g, noise_, noise_rng_);
  }

  void check_preset() const {
    const auto& xs = state_.outgoing_x_shares;
    const auto& rs = state_.outgoing_r_shares;
    require(xs.size() == static_cast<std::size_t>(n_) && rs.size() == static_cast<std::size_t>(n_),
            "client: preset shares must have n entries");
    int sum = 0;
    Bit parity = 0;
    for (int v : xs) {
      require(v >= 0 && v < state_.k, "client: preset x share outside Z_k");
      sum += v;
    }
    for (Bit b : rs) parity ^= b;
    require(sum % state_.k == state_.x && parity == state_.r, "client: preset shares do not reconstruct the input");
  }

  int n_;
  NoiseModel noise_;
  Rng share_rng_;
  Rng noise_rng_;
  ClientState state_;
  std::optional<QubitState> held_;
  int unitary_ops_ = 0;
};

class Server {
 public:
  explicit Server(const ProtocolSetup& setup)
      : noise_(setup.noise), rng_(detail::stream(setup.seed, detail::Stream::readout, 0)) {}

  const ServerState& state() const { return state_; }

  /// Step 2: |0> to C_1.
  QubitHop prepare() {
    state_.prepared = true;
    return {kServer, 1, zero_state()};
  }

  /// Step 3: measure the returned particle and announce the result.
  Announcement measure_and_announce(const QubitHop& in) {
    if (!state_.prepared || in.to != kServer) throw ConsistencyFault("server: unexpected qubit");
    state_.announcement = noisy_measure(in.state, noise_, rng_);
    return {*state_.announcement};
  }

 private:
  NoiseModel noise_;
  Rng rng_;
  ServerState state_;
};

// ---------------------------------------------------------------------------
// Transcript

struct ResourceCounters {
  int qubits_used = 0;
  int unitary_ops = 0;
  int classical_messages = 0;
  int share_messages = 0;
  int qubit_hops = 0;
  friend bool operator==(const ResourceCounters&, const ResourceCounters&) = default;
};

/// Everything needed to audit and replay one run. The setup (including the
/// private inputs and the master seed) is part of the record so that each
/// participant can be re-instantiated.
struct ProtocolTranscript {
  ProtocolSetup setup;
  std::vector<Message> log;
  BitVector outputs;  // per client, index i-1
  ResourceCounters counters;

  template <typename T>
  std::vector<T> messages_of() const {
    std::vector<T> out;
    for (const auto& m : log)
      if (const auto* v = std::get_if<T>(&m)) out.push_back(*v);
    return out;
  }

  /// Qubit states in hop order: server->C_1, C_1->C_2, ..., C_n->server.
  std::vector<QubitState> hop_states() const {
    std::vector<QubitState> out;
    for (const auto& h : messages_of<QubitHop>()) out.push_back(h.state);
    return out;
  }

  std::optional<Bit> announcement() const {
    for (const auto& m : log)
      if (const auto* a = std::get_if<Announcement>(&m)) return a->value;
    return std::nullopt;
  }
};

/// A finished run together with the participants' final private states.
struct ProtocolRun {
  ProtocolTranscript transcript;
  std::vector<ClientState> clients;
  ServerState server;
};

/// How the scheduler activates participants within a phase. The log is
/// canonicalized per phase, so every schedule yields the same transcript.
struct Schedule {
  std::vector<int> activation_order;  // permutation of 1..n; empty = ascending
  bool threaded = false;
};

namespace detail {

inline bool canonical_less(const Message& a, const Message& b) {
  return std::pair(sender(a), recipient(a)) < std::pair(sender(b), recipient(b));
}

template <typename F>
void for_each_client(const Schedule& schedule, int n, F&& body) {
  std::vector<int> order = schedule.activation_order;
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
  }
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(static_cast<std::size_t>(n));
  std::iota(expected.begin(), expected.end(), 1);
  require(sorted == expected, "schedule: activation order must be a permutation of 1..n");
  if (schedule.threaded) {
    std::vector<std::exception_ptr> errors(order.size());
    {
      std::vector<std::jthread> workers;
      workers.reserve(order.size());
      for (std::size_t slot = 0; slot < order.size(); ++slot)
        workers.emplace_back([&body, &errors, slot, id = order[slot]] {
          try {
            body(id);
          } catch (...) {
            errors[slot] = std::current_exception();
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (int id : order) body(id);
  }
}

inline ResourceCounters count_resources(const std::vector<Message>& log, int unitary_ops) {
  ResourceCounters c;
  c.qubits_used = 1;
  c.unitary_ops = unitary_ops;
  for (const auto& m : log) {
    if (std::holds_alternative<QubitHop>(m)) {
      ++c.qubit_hops;
    } else {
      ++c.classical_messages;
      if (std::holds_alternative<ClassicalShare>(m)) ++c.share_messages;
    }
  }
  return c;
}

}  // namespace detail

/// Message-count shape every well-formed transcript has.
inline void check_transcript_shape(const ProtocolTranscript& t) {
  const int n = t.setup.n;
  int shares = 0, hops = 0, reports = 0, announcements = 0, masks = 0;
  for (const auto& m : t.log) {
    switch (m.index()) {
      case 0: ++shares; break;
      case 1: ++hops; break;
      case 2: ++reports; break;
      case 3: ++announcements; break;
      case 4: ++masks; break;
    }
  }
  if (shares != n * (n - 1) || hops != n + 1 || reports != n - 1 || announcements != 1 || masks != n)
    throw ConsistencyFault("transcript: message counts do not match the protocol shape");
}

/// Runs Steps 1-4 with every participant driven by the scheduler.
inline ProtocolRun execute(const ProtocolSetup& setup, const Schedule& schedule = {},
                           const PresetShares* preset = nullptr) {
  setup.validate();
  const int n = setup.n;
  std::vector<Client> clients;
  clients.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) clients.emplace_back(setup, i, preset);
  Server server(setup);
  auto client = [&clients](int id) -> Client& { return clients[static_cast<std::size_t>(id - 1)]; };

  std::vector<Message> log;
  auto append_phase = [&log](std::vector<Message> phase) {
    std::stable_sort(phase.begin(), phase.end(), detail::canonical_less);
    for (auto& m : phase) log.push_back(std::move(m));
  };

  // Step 1: shares out, aggregates in.
  std::vector<std::vector<Message>> outboxes(static_cast<std::size_t>(n));
  detail::for_each_client(schedule, n, [&](int id) { outboxes[static_cast<std::size_t>(id - 1)] = client(id).share(); });
  std::vector<Message> phase;
  std::vector<std::vector<ClassicalShare>> inboxes(static_cast<std::size_t>(n));
  for (auto& box : outboxes)
    for (auto& m : box) {
      const auto& s = std::get<ClassicalShare>(m);
      inboxes[static_cast<std::size_t>(s.to - 1)].push_back(s);
      phase.push_back(std::move(m));
    }
  append_phase(std::move(phase));
  detail::for_each_client(schedule, n, [&](int id) { client(id).aggregate(inboxes[static_cast<std::size_t>(id - 1)]); });

  // Step 2: the particle travels S -> C_1 -> ... -> C_n.
  QubitHop hop = server.prepare();
  log.emplace_back(hop);
  for (int id = 1; id <= n; ++id) {
    auto next = client(id).receive_qubit(hop);
    if (next) {
      hop = *next;
      log.emplace_back(hop);
    }
  }

  // Step 3: reports to C_n, correction, measurement.
  std::vector<AggregateReport> reports;
  phase.clear();
  for (int id = 1; id < n; ++id) {
    reports.push_back(*client(id).report());
    phase.emplace_back(reports.back());
  }
  append_phase(std::move(phase));
  const QubitHop back = client(n).correct_and_return(reports);
  log.emplace_back(back);
  const Announcement announcement = server.measure_and_announce(back);
  log.emplace_back(announcement);

  // Step 4: mask broadcasts and unmasking.
  std::vector<MaskBroadcast> masks;
  for (int id = 1; id <= n; ++id) masks.push_back(client(id).broadcast_mask());
  for (const auto& m : masks) log.emplace_back(m);
  BitVector outputs(static_cast<std::size_t>(n));
  detail::for_each_client(schedule, n, [&](int id) {
    Client& c = client(id);
    c.receive_announcement(announcement);
    std::vector<MaskBroadcast> others;
    for (const auto& m : masks)
      if (m.from != id) others.push_back(m);
    outputs[static_cast<std::size_t>(id - 1)] = c.finish(others);
  });

  ProtocolRun run;
  int ops = 0;
  for (const auto& c : clients) {
    run.clients.push_back(c.state());
    ops += c.unitary_ops();
  }
  run.server = server.state();
  run.transcript = {setup, std::move(log), std::move(outputs), {}};
  run.transcript.counters = detail::count_resources(run.transcript.log, ops);

  // Bookkeeping identities that every run must satisfy.
  int x_total = 0, x_tilde_total = 0;
  Bit r_bar = 0, r_tilde_bar = 0;
  for (const auto& c : run.clients) {
    x_total += c.x;
    x_tilde_total += c.aggregated_x;
    r_bar ^= c.r;
    r_tilde_bar ^= c.aggregated_r;
  }
  if (x_total % setup.k != x_tilde_total % setup.k) throw ConsistencyFault("protocol: aggregate identity violated");
  if (r_bar != r_tilde_bar) throw ConsistencyFault("protocol: mask identity violated");
  for (const auto& c : run.clients)
    if (c.output != (announcement.value ^ r_bar))
      throw ConsistencyFault("protocol: client output differs from announcement xor r_bar");
  check_transcript_shape(run.transcript);
  return run;
}

inline ProtocolTranscript run_protocol(const ProtocolSetup& setup) { return execute(setup).transcript; }

namespace detail {

template <typename T, typename Pred>
std::vector<T> logged(const ProtocolTranscript& t, Pred&& pred) {
  std::vector<T> out;
  for (const auto& m : t.log)
    if (const auto* v = std::get_if<T>(&m); v != nullptr && pred(*v)) out.push_back(*v);
  return out;
}

inline void expect_same(const Message& produced, const Message& recorded, const std::string& where) {
  if (!messages_match(produced, recorded)) throw ReplayDivergence("replay diverged at " + where);
}

template <typename T>
T single(const std::vector<T>& v, const std::string& what) {
  if (v.size() != 1) throw ReplayDivergence("replay: expected exactly one " + what);
  return v.front();
}

}  // namespace detail

/// Re-instantiates every participant from the recorded setup, feeds each one
/// the messages the log says it received, and checks that everything it
/// sends matches the log. Returns the per-client outputs.
inline BitVector replay(const ProtocolTranscript& t) {
  t.setup.validate();
  check_transcript_shape(t);
  const int n = t.setup.n;
  std::vector<Client> clients;
  clients.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) clients.emplace_back(t.setup, i);
  Server server(t.setup);
  auto client = [&clients](int id) -> Client& { return clients[static_cast<std::size_t>(id - 1)]; };

  for (int id = 1; id <= n; ++id) {
    const auto produced = client(id).share();
    const auto recorded = detail::logged<ClassicalShare>(t, [id](const auto& m) { return m.from == id; });
    if (produced.size() != recorded.size()) throw ReplayDivergence("replay: share count differs for C" + std::to_string(id));
    for (std::size_t j = 0; j < produced.size(); ++j)
      detail::expect_same(produced[j], recorded[j], "share from C" + std::to_string(id));
  }
  for (int id = 1; id <= n; ++id)
    client(id).aggregate(detail::logged<ClassicalShare>(t, [id](const auto& m) { return m.to == id; }));

  detail::expect_same(server.prepare(),
                      detail::single(detail::logged<QubitHop>(t, [](const auto& h) { return h.from == kServer; }), "server hop"),
                      "server preparation");
  for (int id = 1; id <= n; ++id) {
    const auto in = detail::single(detail::logged<QubitHop>(t, [id](const auto& h) { return h.to == id; }),
                                    "hop into C" + std::to_string(id));
    const auto out = client(id).receive_qubit(in);
    if (out) {
      detail::expect_same(*out,
                          detail::single(detail::logged<QubitHop>(t, [id](const auto& h) { return h.from == id; }),
                                         "hop from C" + std::to_string(id)),
                          "qubit hop from C" + std::to_string(id));
    }
  }

  for (int id = 1; id < n; ++id) {
    detail::expect_same(*client(id).report(),
                        detail::single(detail::logged<AggregateReport>(t, [id](const auto& m) { return m.from == id; }),
                                       "report from C" + std::to_string(id)),
                        "aggregate report from C" + std::to_string(id));
  }
  const auto reports = detail::logged<AggregateReport>(t, [n](const auto& m) { return m.to == n; });
  const QubitHop back = client(n).correct_and_return(reports);
  const auto recorded_back =
      detail::single(detail::logged<QubitHop>(t, [n](const auto& h) { return h.from == n; }), "hop from C_n");
  detail::expect_same(back, recorded_back, "qubit hop from C" + std::to_string(n));
  const auto recorded_announcement = detail::single(t.messages_of<Announcement>(), "announcement");
  detail::expect_same(server.measure_and_announce(recorded_back), recorded_announcement, "announcement");

  const auto masks = t.messages_of<MaskBroadcast>();
  for (int id = 1; id <= n; ++id) {
    detail::expect_same(client(id).broadcast_mask(),
                        detail::single(detail::logged<MaskBroadcast>(t, [id](const auto& m) { return m.from == id; }),
                                       "mask from C" + std::to_string(id)),
                        "mask broadcast from C" + std::to_string(id));
  }
  BitVector outputs(static_cast<std::size_t>(n));
  int ops = 0;
  for (int id = 1; id <= n; ++id) {
    client(id).receive_announcement(recorded_announcement);
    std::vector<MaskBroadcast> others;
    for (const auto& m : masks)
      if (m.from != id) others.push_back(m);
    outputs[static_cast<std::size_t>(id - 1)] = client(id).finish(others);
    ops += client(id).unitary_ops();
  }
  if (!t.outputs.empty() && t.outputs != outputs) throw ReplayDivergence("replay: outputs differ from the record");
  if (detail::count_resources(t.log, ops) != t.counters) throw ReplayDivergence("replay: resource counters differ");
  return outputs;
}

}  // namespace qsmpc
