#pragma once

#include <cstdio>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qsmpc/error.hpp"
#include "qsmpc/protocol.hpp"

// Line-delimited transcript format, version 1. See docs/transcript-format.md.
//
//   #qsmpc-transcript <TAB> v1
//   <type> <TAB> <from> <TAB> <to> <TAB> key=value ...
//
// Parties are "S", "C1".."Cn", "*" (everyone) and "-" (not applicable).

namespace qsmpc {

inline constexpr std::string_view kTranscriptMagic = "#qsmpc-transcript";
inline constexpr std::string_view kTranscriptVersion = "v1";

namespace detail {

inline std::string party_name(PartyId p) {
  if (p == kServer) return "S";
  if (p == kAllParties) return "*";
  return "C" + std::to_string(p);
}

inline PartyId parse_party(std::string_view s) {
  if (s == "S") return kServer;
  if (s == "*") return kAllParties;
  if (s.size() >= 2 && s[0] == 'C') {
    const auto v = parse_int(s.substr(1), s);
    if (v >= 1 && v <= 1'000'000) return static_cast<PartyId>(v);
  }
  throw ParseError("bad party '" + std::string(s) + "'");
}

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string complex_field(const Complex& c) { return g17(c.real()) + "," + g17(c.imag()); }

inline double parse_double(std::string_view s) {
  const std::string str(trim(s));
  if (str.empty()) throw ParseError("empty number");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    throw ParseError("bad number '" + str + "'");
  }
  if (used != str.size()) throw ParseError("bad number '" + str + "'");
  return v;
}

inline Complex parse_complex(std::string_view s) {
  const auto comma = s.find(',');
  if (comma == std::string_view::npos) throw ParseError("bad complex '" + std::string(s) + "'");
  return {parse_double(s.substr(0, comma)), parse_double(s.substr(comma + 1))};
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return out;
}

class Fields {
 public:
  explicit Fields(std::span<const std::string_view> kv) {
    for (auto f : kv) {
      const auto eq = f.find('=');
      if (eq == std::string_view::npos) throw ParseError("field without '=': '" + std::string(f) + "'");
      values_[std::string(f.substr(0, eq))] = std::string(f.substr(eq + 1));
    }
  }
  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ParseError("missing field '" + key + "'");
    return it->second;
  }
  std::int64_t integer(const std::string& key) const { return parse_int(get(key), key); }
  Bit bit(const std::string& key) const {
    const auto v = integer(key);
    if (v != 0 && v != 1) throw ParseError("field '" + key + "' must be 0 or 1");
    return static_cast<Bit>(v);
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace detail

inline std::string serialize(const ProtocolTranscript& t) {
  using detail::party_name;
  std::ostringstream os;
  os << kTranscriptMagic << '\t' << kTranscriptVersion << '\n';
  const auto& s = t.setup;
  os << "Setup\t-\t-\tn=" << s.n << "\tk=" << s.k << "\tseed=" << s.seed
     << "\tdepolarizing=" << detail::g17(s.noise.depolarizing_per_gate)
     << "\tmeasurement_flip=" << detail::g17(s.noise.measurement_flip) << '\n';
  for (int i = 1; i <= s.n; ++i)
    os << "Input\t" << party_name(i) << "\t-\tx=" << int{s.x[static_cast<std::size_t>(i - 1)]}
       << "\tr=" << int{s.r[static_cast<std::size_t>(i - 1)]} << '\n';
  for (const auto& m : t.log) {
    std::visit(
        [&os](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, ClassicalShare>) {
            os << "ClassicalShare\t" << party_name(v.from) << '\t' << party_name(v.to) << "\tx_share=" << v.x_share
               << "\tr_share=" << int{v.r_share};
          } else if constexpr (std::is_same_v<T, QubitHop>) {
            os << "QubitHop\t" << party_name(v.from) << '\t' << party_name(v.to)
               << "\tamp0=" << detail::complex_field(v.state.amp0) << "\tamp1=" << detail::complex_field(v.state.amp1);
          } else if constexpr (std::is_same_v<T, AggregateReport>) {
            os << "AggregateReport\t" << party_name(v.from) << '\t' << party_name(v.to) << "\tx_tilde=" << v.x_tilde;
          } else if constexpr (std::is_same_v<T, Announcement>) {
            os << "Announcement\tS\t*\tvalue=" << int{v.value};
          } else {
            os << "MaskBroadcast\t" << party_name(v.from) << "\t*\tr_tilde=" << int{v.r_tilde};
          }
        },
        m);
    os << '\n';
  }
  for (std::size_t i = 0; i < t.outputs.size(); ++i)
    os << "Output\t" << party_name(static_cast<PartyId>(i + 1)) << "\t-\tvalue=" << int{t.outputs[i]} << '\n';
  const auto& c = t.counters;
  os << "Counters\t-\t-\tqubits_used=" << c.qubits_used << "\tunitary_ops=" << c.unitary_ops
     << "\tclassical_messages=" << c.classical_messages << "\tshare_messages=" << c.share_messages
     << "\tqubit_hops=" << c.qubit_hops << '\n';
  return os.str();
}

inline ProtocolTranscript parse_transcript(std::string_view text) {
  ProtocolTranscript t;
  bool saw_magic = false, saw_setup = false, saw_counters = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cols = detail::split_tabs(line);
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (!saw_magic) {
      if (cols.size() != 2 || cols[0] != kTranscriptMagic) throw ParseError("missing transcript header" + where);
      if (cols[1] != kTranscriptVersion) throw ParseError("unsupported transcript version '" + std::string(cols[1]) + "'");
      saw_magic = true;
      continue;
    }
    if (cols.size() < 3) throw ParseError("expected type, from, to" + where);
    const std::string_view type = cols[0];
    const detail::Fields f(std::span<const std::string_view>(cols).subspan(3));
    try {
      if (type == "Setup") {
        t.setup.n = static_cast<int>(f.integer("n"));
        t.setup.k = static_cast<int>(f.integer("k"));
        t.setup.seed = std::stoull(f.get("seed"));
        t.setup.noise.depolarizing_per_gate = detail::parse_double(f.get("depolarizing"));
        t.setup.noise.measurement_flip = detail::parse_double(f.get("measurement_flip"));
        require(t.setup.n >= 2 && t.setup.n <= 4096, "transcript: n out of range");
        t.setup.x.assign(static_cast<std::size_t>(t.setup.n), 0);
        t.setup.r.assign(static_cast<std::size_t>(t.setup.n), 0);
        saw_setup = true;
      } else if (!saw_setup) {
        throw ParseError("record before Setup");
      } else if (type == "Input") {
        const auto id = detail::parse_party(cols[1]);
        require(id >= 1 && id <= t.setup.n, "transcript: input for unknown client");
        t.setup.x[static_cast<std::size_t>(id - 1)] = f.bit("x");
        t.setup.r[static_cast<std::size_t>(id - 1)] = f.bit("r");
      } else if (type == "ClassicalShare") {
        t.log.emplace_back(ClassicalShare{detail::parse_party(cols[1]), detail::parse_party(cols[2]),
                                          static_cast<int>(f.integer("x_share")), f.bit("r_share")});
      } else if (type == "QubitHop") {
        t.log.emplace_back(QubitHop{detail::parse_party(cols[1]), detail::parse_party(cols[2]),
                                    {detail::parse_complex(f.get("amp0")), detail::parse_complex(f.get("amp1"))}});
      } else if (type == "AggregateReport") {
        t.log.emplace_back(AggregateReport{detail::parse_party(cols[1]), detail::parse_party(cols[2]),
                                           static_cast<int>(f.integer("x_tilde"))});
      } else if (type == "Announcement") {
        t.log.emplace_back(Announcement{f.bit("value")});
      } else if (type == "MaskBroadcast") {
        t.log.emplace_back(MaskBroadcast{detail::parse_party(cols[1]), f.bit("r_tilde")});
      } else if (type == "Output") {
        const auto id = detail::parse_party(cols[1]);
        require(id == static_cast<PartyId>(t.outputs.size()) + 1, "transcript: outputs out of order");
        t.outputs.push_back(f.bit("value"));
      } else if (type == "Counters") {
        t.counters = {static_cast<int>(f.integer("qubits_used")), static_cast<int>(f.integer("unitary_ops")),
                      static_cast<int>(f.integer("classical_messages")), static_cast<int>(f.integer("share_messages")),
                      static_cast<int>(f.integer("qubit_hops"))};
        saw_counters = true;
      } else {
        throw ParseError("unknown record type '" + std::string(type) + "'");
      }
    } catch (const DomainError& e) {
      throw ParseError(e.what() + where);
    } catch (const std::logic_error&) {
      throw ParseError(std::string("bad field value") + where);
    }
  }
  if (!saw_magic || !saw_setup || !saw_counters) throw ParseError("incomplete transcript");
  return t;
}

}  // namespace qsmpc
