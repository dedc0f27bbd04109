#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qsmpc/circuit_io.hpp"
#include "qsmpc/error.hpp"
#include "qsmpc/protocol.hpp"
#include "qsmpc/random.hpp"
#include "qsmpc/security.hpp"
#include "qsmpc/symfn.hpp"

namespace qsmpc {

inline constexpr int kDefaultShots = 1024;

struct ExperimentCase {
  std::string name = "custom";
  int n = 0;
  BitVector x;
  BitVector r;
  std::vector<int> ks;
  int shots = kDefaultShots;
  NoiseModel noise;
  std::uint64_t seed = 0;

  void validate() const {
    require(shots > 0, "experiment: shots must be positive");
    require(!ks.empty(), "experiment: empty k list");
    for (int k : ks) ProtocolSetup{n, k, x, r, seed, noise}.validate();
  }
};

inline ExperimentCase builtin_case(const std::string& name) {
  ExperimentCase c;
  c.name = name;
  if (name == "n5") {
    c.n = 5;
    c.x = {1, 1, 0, 0, 1};
    c.r = {1, 0, 0, 1, 0};
    c.ks = {2, 3, 4};
  } else if (name == "n8") {
    c.n = 8;
    c.x = {1, 0, 1, 1, 1, 0, 1, 0};
    c.r = {1, 1, 1, 0, 0, 1, 0, 0};
    c.ks = {2, 3, 4, 5, 6};
  } else if (name == "n10") {
    c.n = 10;
    c.x = {1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
    c.r = {1, 0, 1, 1, 0, 0, 1, 0, 1, 0};
    c.ks = {2, 3, 4, 5, 6};
  } else {
    throw DomainError("unknown case '" + name + "' (expected n5, n8 or n10)");
  }
  return c;
}

inline std::string function_label(int n, int k) { return "f_" + std::to_string(n) + "^" + std::to_string(k); }

struct ResultRow {
  std::string label;
  int k = 0;
  Bit correct = 0;
  int count = 0;
  int shots = 0;
  double frequency() const { return static_cast<double>(count) / static_cast<double>(shots); }
};

struct ResultTable {
  std::vector<ResultRow> rows;  // ascending k
};

struct ReproduceResult {
  ResultTable table;
  std::map<std::string, std::uint64_t> histogram;      // unmasked output tuples, largest k first
  std::map<std::string, std::uint64_t> announcements;  // masked announcement tuples, same order
  Bit mask_parity = 0;
};

/// Seed of one protocol run inside an experiment.
inline std::uint64_t shot_seed(std::uint64_t master, int k, int shot) {
  auto rng = Rng::derive(master, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(shot)});
  return rng();
}

namespace detail {

struct ShotOutcome {
  Bit output = 0;
  Bit announcement = 0;
};

// outcomes[shot][j] for ks[j]. Shots are sharded across threads; every run
// has its own seed, so the result does not depend on the thread count.
inline std::vector<std::vector<ShotOutcome>> run_shots(const ExperimentCase& c, unsigned threads) {
  std::vector<std::vector<ShotOutcome>> out(static_cast<std::size_t>(c.shots),
                                            std::vector<ShotOutcome>(c.ks.size()));
  auto work = [&](int begin, int end) {
    for (int s = begin; s < end; ++s)
      for (std::size_t j = 0; j < c.ks.size(); ++j) {
        const ProtocolSetup setup{c.n, c.ks[j], c.x, c.r, shot_seed(c.seed, c.ks[j], s), c.noise};
        const auto t = run_protocol(setup);
        out[static_cast<std::size_t>(s)][j] = {t.outputs.front(), *t.announcement()};
      }
  };
  threads = std::clamp(threads, 1u, static_cast<unsigned>(c.shots));
  if (threads == 1) {
    work(0, c.shots);
    return out;
  }
  std::vector<std::jthread> pool;
  const int chunk = (c.shots + static_cast<int>(threads) - 1) / static_cast<int>(threads);
  for (int begin = 0; begin < c.shots; begin += chunk) pool.emplace_back(work, begin, std::min(c.shots, begin + chunk));
  return out;
}

inline unsigned default_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

}  // namespace detail

inline ReproduceResult reproduce(const ExperimentCase& c, unsigned threads = detail::default_threads()) {
  c.validate();
  ReproduceResult res;
  for (Bit b : c.r) res.mask_parity ^= b;
  std::vector<int> order(c.ks.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return c.ks[static_cast<std::size_t>(a)] < c.ks[static_cast<std::size_t>(b)]; });
  for (int j : order) {
    const int k = c.ks[static_cast<std::size_t>(j)];
    res.table.rows.push_back({function_label(c.n, k), k, f_nk(c.n, k)(c.x), 0, c.shots});
  }
  const auto outcomes = detail::run_shots(c, threads);
  for (const auto& shot : outcomes) {
    std::string outputs;
    std::string announced;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      outputs += static_cast<char>('0' + shot[static_cast<std::size_t>(*it)].output);
      announced += static_cast<char>('0' + shot[static_cast<std::size_t>(*it)].announcement);
    }
    ++res.histogram[outputs];
    ++res.announcements[announced];
    for (std::size_t row = 0; row < order.size(); ++row)
      if (shot[static_cast<std::size_t>(order[row])].output == res.table.rows[row].correct) ++res.table.rows[row].count;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Text and data rendering

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

/// Hardware probabilities keyed by function label, as read from a CSV with
/// header `function,k,count,shots,probability`.
using ReferenceColumn = std::map<std::string, double>;

inline ReferenceColumn parse_reference_csv(const std::string& text) {
  ReferenceColumn out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cols.push_back(cell);
    if (cols.size() != 5) throw ParseError("reference: expected 5 columns in '" + line + "'");
    try {
      out[cols[0]] = std::stod(cols[4]);
    } catch (const std::logic_error&) {
      throw ParseError("reference: bad probability in '" + line + "'");
    }
  }
  return out;
}

inline std::string table_csv(const ResultTable& t) {
  std::string out = "function,k,correct_value,correct_count,shots,frequency\n";
  for (const auto& r : t.rows)
    out += r.label + "," + std::to_string(r.k) + "," + std::to_string(int{r.correct}) + "," +
           std::to_string(r.count) + "," + std::to_string(r.shots) + "," + detail::fixed(r.frequency(), 6) + "\n";
  return out;
}

inline std::string table_text(const ResultTable& t, const ReferenceColumn* reference = nullptr) {
  std::ostringstream os;
  os << "function  correct  count/shots  frequency";
  if (reference) os << "  hardware";
  os << '\n';
  for (const auto& r : t.rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%-8s  %7d  %5d/%-5d  %9s", r.label.c_str(), int{r.correct}, r.count, r.shots,
                  detail::fixed(r.frequency(), 4).c_str());
    os << line;
    if (reference) {
      const auto it = reference->find(r.label);
      os << "  " << (it == reference->end() ? std::string("-") : detail::fixed(it->second, 4));
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Noise sweep

struct SweepPoint {
  int k = 0;
  double p = 0.0;
  ResultRow row;
  double sigma() const {
    const double f = row.frequency();
    return std::sqrt(f * (1.0 - f) / static_cast<double>(row.shots));
  }
};

struct MonotonicityViolation {
  int k = 0;
  double p_low = 0.0;
  double p_high = 0.0;
  double excess = 0.0;  // f(p_high) - f(p_low), positive
  double bound = 0.0;   // 3 * combined sigma
};

struct SweepResult {
  std::vector<SweepPoint> points;  // grouped by ascending k, then p in grid order
  std::vector<MonotonicityViolation> violations;
  bool monotone() const { return violations.empty(); }
};

inline constexpr double kMonotonicitySigmas = 3.0;

/// Adjacent-p pairs (sorted by p) of a single k where the frequency rises by
/// more than 3 combined standard errors.
inline std::vector<MonotonicityViolation> monotonicity_violations(std::vector<SweepPoint> pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.p < b.p; });
  std::vector<MonotonicityViolation> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& lo = pts[i];
    const auto& hi = pts[i + 1];
    const double bound = kMonotonicitySigmas * std::sqrt(lo.sigma() * lo.sigma() + hi.sigma() * hi.sigma());
    const double excess = hi.row.frequency() - lo.row.frequency();
    if (excess > bound) out.push_back({lo.k, lo.p, hi.p, excess, bound});
  }
  return out;
}

/// Correct-output frequency for every (k, p). Gate depolarizing strength is
/// taken from the grid; the readout flip stays at the case's value. Every
/// grid point reuses the same per-shot seed schedule.
inline SweepResult noise_sweep(ExperimentCase c, const std::vector<double>& grid,
                               unsigned threads = detail::default_threads()) {
  require(!grid.empty(), "noise-sweep: empty probability grid");
  for (double p : grid) require_probability(p, "noise-sweep probability");
  SweepResult res;
  std::map<int, std::vector<SweepPoint>> by_k;
  for (double p : grid) {
    c.noise.depolarizing_per_gate = p;
    const auto rep = reproduce(c, threads);
    for (const auto& row : rep.table.rows) by_k[row.k].push_back({row.k, p, row});
  }
  for (auto& [k, pts] : by_k) {
    for (const auto& v : monotonicity_violations(pts)) res.violations.push_back(v);
    res.points.insert(res.points.end(), pts.begin(), pts.end());
  }
  return res;
}

inline std::string sweep_csv(const SweepResult& s) {
  std::string out = "function,k,p,correct_value,correct_count,shots,frequency,sigma\n";
  for (const auto& pt : s.points)
    out += pt.row.label + "," + std::to_string(pt.k) + "," + detail::fixed(pt.p, 6) + "," +
           std::to_string(int{pt.row.correct}) + "," + std::to_string(pt.row.count) + "," +
           std::to_string(pt.row.shots) + "," + detail::fixed(pt.row.frequency(), 6) + "," +
           detail::fixed(pt.sigma(), 6) + "\n";
  return out;
}

inline std::string sweep_report(const SweepResult& s) {
  if (s.monotone()) return "monotonicity: OK (non-increasing in p within 3 sigma for every k)\n";
  std::string out = "monotonicity: VIOLATED\n";
  for (const auto& v : s.violations)
    out += "  k=" + std::to_string(v.k) + " p " + detail::fixed(v.p_low, 4) + " -> " + detail::fixed(v.p_high, 4) +
           ": frequency rose by " + detail::fixed(v.excess, 4) + " > " + detail::fixed(v.bound, 4) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Security audit

inline constexpr double kMarginalTolerance = 1e-12;

struct MarginalAudit {
  int n = 0;
  int k = 0;
  double max_deviation = 0.0;  // from I/2 over taps 1..n and all inputs
  double tap0_deviation = 0.0;  // from |0><0| at the server's outgoing hop
  bool passed() const { return max_deviation < kMarginalTolerance && tap0_deviation < kMarginalTolerance; }
};

inline MarginalAudit audit_marginal(int n, int k) {
  require(n >= 2 && n <= kMaxMarginalAuditArity, "security-audit: marginal audit needs 2 <= n <= 6");
  require(k >= 2 && k <= n, "security-audit: k must lie in 2..n");
  MarginalAudit a{n, k, 0.0, 0.0};
  const auto zero = DensityMatrix::from_state(zero_state());
  BitVector x(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    a.tap0_deviation = std::max(a.tap0_deviation, eavesdrop_marginal(0, x, k).max_abs_diff(zero));
    for (int tap = 1; tap <= n; ++tap)
      a.max_deviation =
          std::max(a.max_deviation, eavesdrop_marginal(tap, x, k).max_abs_diff(DensityMatrix::maximally_mixed()));
  }
  return a;
}

struct CollusionCase {
  std::vector<int> honest;
  BitVector colluder_x;
  InputPartition observed;
  bool matches_sum_mod_k = false;
  bool matches_output_aware = false;
  bool leaked = false;  // a single honest client, so the partition is its input
};

/// Every admissible honest set: subsets of C_1..C_{n-1} plus the full set
/// (only the server colludes), in increasing bitmask order.
inline std::vector<std::vector<int>> admissible_honest_sets(int n) {
  std::vector<std::vector<int>> out;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << (n - 1)); ++m) {
    std::vector<int> h;
    for (int i = 0; i < n - 1; ++i)
      if ((m >> i) & 1u) h.push_back(i + 1);
    out.push_back(h);
  }
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i + 1;
  out.push_back(all);
  return out;
}

/// Audits one honest set over every assignment of the colluders' inputs.
/// Colluder masks are fixed at zero: they only flip the announcement for
/// every honest tuple alike, so they cannot change the partition.
inline std::vector<CollusionCase> audit_collusion(int n, int k, const std::vector<int>& honest,
                                                  std::uint64_t share_seed = 0) {
  const CollusionScenario sc(n, k, honest);
  std::vector<CollusionCase> out;
  const auto& colluders = sc.colluding_clients;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << colluders.size()); ++m) {
    BitVector x(static_cast<std::size_t>(n), 0);
    for (std::size_t j = 0; j < colluders.size(); ++j)
      x[static_cast<std::size_t>(colluders[j] - 1)] = (m >> j) & 1u;
    const auto setting = ColluderSetting::draw(n, k, x, BitVector(static_cast<std::size_t>(n), 0), share_seed);
    CollusionCase cc;
    cc.honest = sc.honest;
    cc.colluder_x = x;
    cc.observed = collusion_partition(sc, setting);
    cc.matches_sum_mod_k = cc.observed == sum_mod_k_partition(sc);
    cc.matches_output_aware = cc.observed == output_aware_partition(sc, setting);
    cc.leaked = sc.honest.size() == 1 && cc.observed.all_singletons();
    out.push_back(std::move(cc));
  }
  return out;
}

struct SecurityAudit {
  MarginalAudit marginal;
  std::vector<CollusionCase> collusion;  // empty when n exceeds the collusion cap
  bool collusion_audited = false;

  /// Leakage beyond what the output itself reveals.
  bool passed() const {
    if (!marginal.passed()) return false;
    return std::all_of(collusion.begin(), collusion.end(), [](const auto& c) { return c.matches_output_aware; });
  }
  bool sum_mod_k_holds() const {
    return std::all_of(collusion.begin(), collusion.end(),
                       [](const auto& c) { return c.honest.size() < 2 || c.matches_sum_mod_k; });
  }
};

inline SecurityAudit security_audit(int n, int k) {
  SecurityAudit a;
  a.marginal = audit_marginal(n, k);
  if (n <= kMaxCollusionAuditArity) {
    a.collusion_audited = true;
    for (const auto& h : admissible_honest_sets(n)) {
      auto cases = audit_collusion(n, k, h);
      a.collusion.insert(a.collusion.end(), cases.begin(), cases.end());
    }
  }
  return a;
}

namespace detail {

inline std::string join_ids(const std::vector<int>& ids, const char* prefix) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + std::string(prefix) + std::to_string(ids[i]);
  return out;
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

inline std::string security_report(const SecurityAudit& a) {
  std::ostringstream os;
  const auto& m = a.marginal;
  os << "security audit n=" << m.n << " k=" << m.k << "\n";
  os << "eavesdropper marginal: max deviation from I/2 over taps 1.." << m.n << " = " << detail::sci(m.max_deviation)
     << ", tap 0 deviation from |0><0| = " << detail::sci(m.tap0_deviation) << "  "
     << (m.passed() ? "PASS" : "FAIL") << "\n";
  if (!a.collusion_audited) {
    os << "collusion: skipped (exact view enumeration is capped at n=" << kMaxCollusionAuditArity << ")\n";
  } else {
    // One line per honest set, aggregated over colluder inputs.
    std::map<std::vector<int>, std::vector<const CollusionCase*>> by_set;
    std::vector<std::vector<int>> order;
    for (const auto& c : a.collusion) {
      if (!by_set.contains(c.honest)) order.push_back(c.honest);
      by_set[c.honest].push_back(&c);
    }
    for (const auto& h : order) {
      const auto& cases = by_set[h];
      const auto count_if = [&](auto pred) { return std::count_if(cases.begin(), cases.end(), pred); };
      const auto lit = count_if([](const auto* c) { return c->matches_sum_mod_k; });
      const auto aware = count_if([](const auto* c) { return c->matches_output_aware; });
      const bool leaked = std::all_of(cases.begin(), cases.end(), [](const auto* c) { return c->leaked; });
      std::size_t classes = 0;
      for (const auto* c : cases) classes = std::max(classes, c->observed.class_count());
      os << "collusion honest={" << detail::join_ids(h, "C") << "}"
         << (static_cast<int>(h.size()) == m.n ? " (server only)" : "") << ": classes<=" << classes
         << " sum-mod-k " << lit << "/" << cases.size() << " output-aware " << aware << "/" << cases.size();
      if (leaked) os << "  input leaked";
      os << "\n";
    }
    os << "sum-mod-k partition: " << (a.sum_mod_k_holds() ? "holds" : "differs")
       << " for honest sets of size >= 2 (colluding clients also learn the output)\n";
  }
  os << "result: " << (a.passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Circuit emission

enum class CircuitFormat { gate_notation, qasm };

inline CircuitFormat parse_circuit_format(const std::string& s) {
  if (s == "paper-notation") return CircuitFormat::gate_notation;
  if (s == "qasm") return CircuitFormat::qasm;
  throw DomainError("unknown format '" + s + "' (expected paper-notation or qasm)");
}

/// One masked circuit per k; gate notation prints one line per k, QASM
/// places each k on its own qubit.
inline std::string emit_circuits(int n, const std::vector<int>& ks, const BitVector& x, const BitVector& r,
                                 CircuitFormat format) {
  require(!ks.empty(), "emit-circuit: empty k list");
  std::vector<CircuitSpec> circuits;
  for (int k : ks) circuits.push_back(build_circuit_VU(n, k, x, r));
  if (format == CircuitFormat::qasm) return to_qasm(circuits);
  std::string out;
  for (const auto& c : circuits) out += to_gate_notation(c) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Single run report

inline std::string compute_report(const ProtocolTranscript& t) {
  std::ostringstream os;
  const auto& s = t.setup;
  os << "n=" << s.n << " k=" << s.k << " seed=" << s.seed << "\n";
  os << "messages: ClassicalShare=" << t.messages_of<ClassicalShare>().size()
     << " QubitHop=" << t.messages_of<QubitHop>().size()
     << " AggregateReport=" << t.messages_of<AggregateReport>().size()
     << " Announcement=" << t.messages_of<Announcement>().size()
     << " MaskBroadcast=" << t.messages_of<MaskBroadcast>().size() << "\n";
  os << "announcement: " << int{*t.announcement()} << "\n";
  os << "output: " << int{t.outputs.front()} << "\n";
  const auto& c = t.counters;
  os << "resources: qubits_used=" << c.qubits_used << " unitary_ops=" << c.unitary_ops
     << " classical_messages=" << c.classical_messages << " share_messages=" << c.share_messages
     << " qubit_hops=" << c.qubit_hops << "\n";
  return os.str();
}

}  // namespace qsmpc
