#include <gtest/gtest.h>

#include "qsmpc/circuit_io.hpp"

using namespace qsmpc;

namespace {

BitVector bits_of(std::uint64_t mask, int n) {
  BitVector x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
  return x;
}

std::optional<Bit> readout_gates(const std::vector<RyGate>& gates) {
  return deterministic_readout(apply_gates(zero_state(), gates));
}

}  // namespace

TEST(GateNotation, BuiltinN5KTwo) {
  const auto c = build_circuit_VU(5, 2, BitVector{1, 1, 0, 0, 1}, BitVector{1, 0, 0, 1, 0});
  EXPECT_EQ(to_gate_notation(c), "U_2† IU_2 VI II IU_2 VU_2");
}

TEST(GateNotation, BuiltinN8KFive) {
  const auto c = build_circuit_VU(8, 5, BitVector{1, 0, 1, 1, 1, 0, 1, 0}, BitVector{1, 1, 1, 0, 0, 1, 0, 0});
  EXPECT_EQ(to_gate_notation(c), "(U_5†)^0 II IU_5 VI IU_5 IU_5 VU_5 VI VU_5");
}

TEST(GateNotation, AllZeroIsIdentityOnly) {
  const auto text = to_gate_notation(build_circuit_VU(4, 2, BitVector(4, 0), BitVector(4, 0)));
  EXPECT_EQ(text, "(U_2†)^0 II II II II");
  EXPECT_EQ(text.find('V'), std::string::npos);
  EXPECT_EQ(text.find("IU"), std::string::npos);
}

TEST(GateNotation, CorrectionExponent) {
  // weight 5, k = 3: correction power 2.
  const auto c = build_circuit_U(5, 3, BitVector{1, 1, 1, 1, 1});
  EXPECT_EQ(to_gate_notation(c), "(U_3†)^2 U_3 U_3 U_3 U_3 U_3");
}

TEST(GateNotation, ComposedBlocksAndConstant) {
  const auto c = synthesize_circuit(SymmetricFunction(2, {1, 0, 1}), BitVector{1, 0});
  // f = 1 xor parity: a_0 = 1, a_1 = 1.
  EXPECT_EQ(to_gate_notation(c), "(U_1†)^0 I U_1 · V");
}

TEST(QasmAngle, Forms) {
  EXPECT_EQ(qasm_angle(RationalAngle::zero()), "0");
  EXPECT_EQ(qasm_angle(RationalAngle::pi()), "pi");
  EXPECT_EQ(qasm_angle(RationalAngle(-1, 1)), "-pi");
  EXPECT_EQ(qasm_angle(RationalAngle(3, 4)), "3*pi/4");
  EXPECT_EQ(qasm_angle(RationalAngle(-1, 4)), "-pi/4");
  EXPECT_EQ(qasm_angle(RationalAngle(1, 5)), "pi/5");
}

TEST(Qasm, EmitsExpectedText) {
  const auto c = build_circuit_VU(2, 2, BitVector{1, 0}, BitVector{0, 1});
  EXPECT_EQ(to_qasm(c),
            "OPENQASM 2.0;\n"
            "include \"qelib1.inc\";\n"
            "qreg q[1];\n"
            "creg c[1];\n"
            "u3(pi/2,0,0) q[0];\n"
            "id q[0];\n"
            "id q[0];\n"
            "u3(pi,0,0) q[0];\n"
            "u3(-pi/2,0,0) q[0];\n"
            "measure q[0] -> c[0];\n");
}

TEST(Qasm, RoundTripMatchesNativeReadout) {
  for (int n = 1; n <= 5; ++n)
    for (int k = 1; k <= n; ++k)
      for (std::uint64_t xm = 0; xm < (std::uint64_t{1} << n); ++xm)
        for (std::uint64_t rm = 0; rm < (std::uint64_t{1} << n); rm += 3) {
          const auto c = build_circuit_VU(n, k, bits_of(xm, n), bits_of(rm, n));
          const auto prog = parse_qasm(to_qasm(c));
          ASSERT_EQ(prog.qubits.size(), 1u);
          ASSERT_EQ(prog.measured_into, std::vector<int>{0});
          ASSERT_EQ(prog.qubits[0].size(), c.gate_count());
          ASSERT_EQ(readout_gates(prog.qubits[0]), readout(c));
        }
}

TEST(Qasm, OneQubitPerCircuit) {
  std::vector<CircuitSpec> cs;
  const BitVector x{1, 1, 0, 0, 1}, r{1, 0, 0, 1, 0};
  for (int k = 2; k <= 4; ++k) cs.push_back(build_circuit_VU(5, k, x, r));
  const auto prog = parse_qasm(to_qasm(cs));
  ASSERT_EQ(prog.qubits.size(), 3u);
  for (std::size_t q = 0; q < 3; ++q) {
    EXPECT_EQ(prog.measured_into[q], static_cast<int>(q));
    EXPECT_EQ(readout_gates(prog.qubits[q]), readout(cs[q]));
  }
}

TEST(Qasm, ParserAcceptsCommentsAndRy) {
  const auto prog = parse_qasm(
      "// comment\nOPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\n"
      "ry(pi/3) q[1];\nbarrier q;\nu3(2*pi/3, 0, 0) q[1]; // trailing\nmeasure q[1] -> c[0];\n");
  ASSERT_EQ(prog.qubits.size(), 2u);
  EXPECT_TRUE(prog.qubits[0].empty());
  ASSERT_EQ(prog.qubits[1].size(), 2u);
  EXPECT_EQ(prog.qubits[1][1].angle, RationalAngle(2, 3));
  EXPECT_EQ(prog.measured_into, (std::vector<int>{-1, 0}));
  EXPECT_EQ(readout_gates(prog.qubits[1]), Bit{1});
}

TEST(Qasm, ParserRejectsMalformedInput) {
  const std::string head = "OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\n";
  EXPECT_THROW(parse_qasm("qreg q[1];"), ParseError);
  EXPECT_THROW(parse_qasm(head + "u3(pi,0,0) q[1];"), ParseError);
  EXPECT_THROW(parse_qasm(head + "u3(pi,pi,0) q[0];"), ParseError);
  EXPECT_THROW(parse_qasm(head + "u3(pi,0) q[0];"), ParseError);
  EXPECT_THROW(parse_qasm(head + "cx q[0],q[0];"), ParseError);
  EXPECT_THROW(parse_qasm(head + "measure q[0] c[0];"), ParseError);
  EXPECT_THROW(parse_qasm(head + "u3(0.5,0,0) q[0];"), ParseError);
  EXPECT_THROW(parse_qasm(head + "id q[0]"), ParseError);
  EXPECT_THROW(parse_qasm(""), ParseError);
}
