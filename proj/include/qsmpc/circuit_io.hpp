#pragma once

#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qsmpc/angles.hpp"
#include "qsmpc/error.hpp"
#include "qsmpc/symfn.hpp"

namespace qsmpc {

namespace detail {

inline std::string u_token(int k) { return "U_" + std::to_string(k); }

inline std::string correction_token(int k, int power) {
  if (power == 1) return u_token(k) + "†";
  return "(" + u_token(k) + "†)^" + std::to_string(power);
}

}  // namespace detail

/// Operator-order rendering: the last gate applied is leftmost, one token per
/// client ("VU_2", "IU_2", "VI", "II"), blocks separated by " · ".
/// VU(5,2,(1,1,0,0,1),(1,0,0,1,0)) renders as "U_2† IU_2 VI II IU_2 VU_2".
inline std::string to_gate_notation(const CircuitSpec& c) {
  std::vector<std::string> blocks;
  for (int b = c.block_count() - 1; b >= 0; --b) {
    std::string correction;
    std::string constant;
    std::map<int, std::string, std::greater<>> per_client;
    for (const auto& s : c.steps) {
      if (s.block != b) continue;
      switch (s.role) {
        case GateRole::constant: constant = s.power ? "V" : "I"; break;
        case GateRole::correction: correction = detail::correction_token(s.k, s.power); break;
        case GateRole::mask: per_client[s.client].insert(0, s.power ? "V" : "I"); break;
        case GateRole::input: per_client[s.client] += s.power ? detail::u_token(s.k) : "I"; break;
      }
    }
    std::string joined = correction + constant;
    for (const auto& [client, tok] : per_client) joined += (joined.empty() ? "" : " ") + tok;
    blocks.push_back(joined);
  }
  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) out += (i ? " · " : "") + blocks[i];
  return out;
}

/// Angle in QASM expression syntax: "0", "pi", "-pi/4", "3*pi/4".
inline std::string qasm_angle(const RationalAngle& a) {
  if (a.is_zero()) return "0";
  std::string out;
  const auto num = a.numerator();
  if (num == -1) {
    out = "-pi";
  } else if (num == 1) {
    out = "pi";
  } else {
    out = std::to_string(num) + "*pi";
  }
  if (a.denominator() != 1) out += "/" + std::to_string(a.denominator());
  return out;
}

/// OpenQASM 2.0 with one qubit per circuit. Each R_y application becomes
/// `u3(theta,0,0)`; a step with power zero becomes `id`.
inline std::string to_qasm(std::span<const CircuitSpec> circuits) {
  std::ostringstream os;
  os << "OPENQASM 2.0;\n";
  os << "include \"qelib1.inc\";\n";
  os << "qreg q[" << circuits.size() << "];\n";
  os << "creg c[" << circuits.size() << "];\n";
  for (std::size_t q = 0; q < circuits.size(); ++q) {
    for (const auto& s : circuits[q].steps) {
      if (s.power == 0) {
        os << "id q[" << q << "];\n";
        continue;
      }
      for (int i = 0; i < s.power; ++i) os << "u3(" << qasm_angle(s.gate.angle) << ",0,0) q[" << q << "];\n";
    }
  }
  for (std::size_t q = 0; q < circuits.size(); ++q) os << "measure q[" << q << "] -> c[" << q << "];\n";
  return os.str();
}

inline std::string to_qasm(const CircuitSpec& c) { return to_qasm(std::span<const CircuitSpec>(&c, 1)); }

/// Gate lists recovered from QASM text, one per qubit, plus the measured map.
struct QasmProgram {
  std::vector<std::vector<RyGate>> qubits;
  std::vector<int> measured_into;  // classical bit index per qubit, -1 if unmeasured
};

namespace detail {

inline std::size_t parse_index(std::string_view operand, std::string_view reg, std::size_t limit) {
  operand = trim(operand);
  if (operand.substr(0, reg.size()) != reg || operand.size() < reg.size() + 3 || operand[reg.size()] != '[' ||
      operand.back() != ']')
    throw ParseError("bad register operand '" + std::string(operand) + "'");
  const auto idx = parse_int(operand.substr(reg.size() + 1, operand.size() - reg.size() - 2), operand);
  if (idx < 0 || static_cast<std::size_t>(idx) >= limit)
    throw ParseError("register index out of range in '" + std::string(operand) + "'");
  return static_cast<std::size_t>(idx);
}

// "q[5]" -> 5
inline std::size_t parse_decl(std::string_view rest, std::string_view reg) {
  return parse_index(rest, reg, std::size_t{1} << 20);
}

}  // namespace detail

/// Parses the subset of OpenQASM 2.0 produced by to_qasm (single-qubit
/// u3(theta,0,0), ry, id, barrier, measure).
inline QasmProgram parse_qasm(std::string_view text) {
  std::string cleaned;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 2, "//") == 0) {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    cleaned += text[i] == '\n' || text[i] == '\r' || text[i] == '\t' ? ' ' : text[i];
  }
  QasmProgram prog;
  bool header = false;
  std::size_t cbits = 0;
  std::string_view rest(cleaned);
  while (true) {
    const auto semi = rest.find(';');
    if (semi == std::string_view::npos) {
      if (!detail::trim(rest).empty()) throw ParseError("trailing text without ';'");
      break;
    }
    const std::string_view stmt = detail::trim(rest.substr(0, semi));
    rest.remove_prefix(semi + 1);
    if (stmt.empty()) continue;
    if (!header) {
      if (stmt != "OPENQASM 2.0") throw ParseError("missing 'OPENQASM 2.0;' header");
      header = true;
      continue;
    }
    if (stmt.starts_with("include")) continue;
    if (stmt.starts_with("qreg ")) {
      prog.qubits.assign(detail::parse_decl(stmt.substr(5), "q"), {});
      prog.measured_into.assign(prog.qubits.size(), -1);
      continue;
    }
    if (stmt.starts_with("creg ")) {
      cbits = detail::parse_decl(stmt.substr(5), "c");
      continue;
    }
    if (stmt.starts_with("barrier")) continue;
    if (stmt.starts_with("measure ")) {
      const auto arrow = stmt.find("->");
      if (arrow == std::string_view::npos) throw ParseError("measure without '->'");
      const auto q = detail::parse_index(stmt.substr(8, arrow - 8), "q", prog.qubits.size());
      const auto c = detail::parse_index(stmt.substr(arrow + 2), "c", cbits);
      prog.measured_into[q] = static_cast<int>(c);
      continue;
    }
    if (stmt.starts_with("id ")) {
      detail::parse_index(stmt.substr(3), "q", prog.qubits.size());
      continue;
    }
    const bool is_u3 = stmt.starts_with("u3(");
    const bool is_ry = stmt.starts_with("ry(");
    if (is_u3 || is_ry) {
      const auto close = stmt.find(')');
      if (close == std::string_view::npos) throw ParseError("unclosed parameter list");
      std::string_view params = stmt.substr(3, close - 3);
      std::vector<std::string_view> args;
      while (true) {
        const auto comma = params.find(',');
        args.push_back(params.substr(0, comma));
        if (comma == std::string_view::npos) break;
        params.remove_prefix(comma + 1);
      }
      if (args.size() != (is_u3 ? 3u : 1u)) throw ParseError("wrong parameter count in '" + std::string(stmt) + "'");
      if (is_u3 && (!parse_angle(args[1]).is_zero() || !parse_angle(args[2]).is_zero()))
        throw ParseError("only u3(theta,0,0) is supported: '" + std::string(stmt) + "'");
      const auto q = detail::parse_index(stmt.substr(close + 1), "q", prog.qubits.size());
      prog.qubits[q].push_back(RyGate{parse_angle(args[0])});
      continue;
    }
    throw ParseError("unsupported statement '" + std::string(stmt) + "'");
  }
  if (!header) throw ParseError("missing 'OPENQASM 2.0;' header");
  return prog;
}

}  // namespace qsmpc
