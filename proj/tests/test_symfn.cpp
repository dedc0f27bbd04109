#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "qsmpc/symfn.hpp"

using namespace qsmpc;

namespace {

BitVector bits_of(std::uint64_t mask, int n) {
  BitVector x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
  return x;
}

// Independent oracle for f_n^k on a packed input.
Bit weight_formula(std::uint64_t mask, int k) { return static_cast<Bit>((std::popcount(mask) / k) % 2); }

std::uint64_t binomial(int n, int k) {
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) c = c * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  return c;
}

}  // namespace

TEST(SymmetricFunction, Validation) {
  EXPECT_THROW(SymmetricFunction(0, {1}), DomainError);
  EXPECT_THROW(SymmetricFunction(2, {0, 1}), DomainError);
  EXPECT_THROW(SymmetricFunction(1, {0, 2}), DomainError);
  const SymmetricFunction f(2, {0, 1, 0});
  EXPECT_THROW(f(BitVector{1, 0, 0}), DomainError);
  EXPECT_EQ(f(BitVector{1, 0}), 1);
}

TEST(FNK, Examples) {
  EXPECT_EQ(f_nk(5, 2).at_weight(3), 1);
  for (int n = 1; n <= 10; ++n)
    for (int k = 1; k <= n; ++k) EXPECT_EQ(f_nk(n, k).at_weight(0), 0);
  EXPECT_EQ(f_nk(8, 4).at_weight(5), 1);
  EXPECT_THROW(f_nk(3, 0), DomainError);
  EXPECT_THROW(f_nk(3, 4), DomainError);
}

TEST(FNK, ClosedForm) {
  for (int n = 1; n <= 12; ++n)
    for (int k = 1; k <= n; ++k)
      for (int w = 0; w <= n; ++w) EXPECT_EQ(f_nk(n, k).at_weight(w), (w / k) % 2);
}

TEST(FN0, ConstantOne) {
  EXPECT_EQ(f_n0(3).values, (BitVector{1, 1, 1, 1}));
  const auto a = decompose(SymmetricFunction(4, {1, 1, 1, 1, 1}));
  EXPECT_EQ(a.a, (BitVector{1, 0, 0, 0, 0}));
}

TEST(BasisMatrix, UnitLowerTriangular) {
  for (int n = 1; n <= 20; ++n) {
    const auto m = basis_matrix(n);
    EXPECT_TRUE(m.is_unit_lower_triangular());
    for (int w = 0; w <= n; ++w) {
      EXPECT_TRUE(m.get(static_cast<std::size_t>(w), 0));
      for (int k = 1; k <= n; ++k) EXPECT_EQ(m.get(static_cast<std::size_t>(w), static_cast<std::size_t>(k)), (w / k) % 2 == 1);
    }
  }
}

TEST(Decompose, Examples) {
  for (int n = 1; n <= 8; ++n) {
    BitVector parity(static_cast<std::size_t>(n) + 1);
    for (int w = 0; w <= n; ++w) parity[static_cast<std::size_t>(w)] = w % 2;
    BitVector expected(static_cast<std::size_t>(n) + 1, 0);
    expected[1] = 1;
    EXPECT_EQ(decompose(SymmetricFunction(n, parity)).a, expected);

    BitVector all_and(static_cast<std::size_t>(n) + 1, 0);
    all_and.back() = 1;
    BitVector last(static_cast<std::size_t>(n) + 1, 0);
    last.back() = 1;
    EXPECT_EQ(decompose(SymmetricFunction(n, all_and)).a, last);
  }
  EXPECT_EQ(decompose(SymmetricFunction(3, {0, 0, 1, 1})).a, (BitVector{0, 0, 1, 0}));
}

TEST(Decompose, RoundTripAllFunctions) {
  for (int n = 1; n <= 8; ++n)
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n + 1)); ++mask) {
      const auto f = SymmetricFunction::from_mask(n, mask);
      ASSERT_EQ(recompose(decompose(f)), f);
    }
}

TEST(Decompose, MatchesBruteForceSearch) {
  // Independent oracle: try every coefficient vector.
  for (int n = 1; n <= 5; ++n)
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n + 1)); ++mask) {
      const auto f = SymmetricFunction::from_mask(n, mask);
      int found = 0;
      for (std::uint64_t coeff = 0; coeff < (std::uint64_t{1} << (n + 1)); ++coeff) {
        SymmetricFunction acc(n, BitVector(static_cast<std::size_t>(n) + 1, 0));
        for (int k = 0; k <= n; ++k)
          if ((coeff >> k) & 1u) acc = acc ^ basis_function(n, k);
        if (acc == f) {
          ++found;
          EXPECT_EQ(decompose(f).a, bits_of(coeff, n + 1));
        }
      }
      EXPECT_EQ(found, 1);
    }
}

TEST(CircuitU, Examples) {
  const BitVector x{1, 1, 0, 0, 1};
  const auto c = build_circuit_U(5, 2, x);
  EXPECT_EQ(c.net_angle(), RationalAngle::pi());
  EXPECT_EQ(readout(c), Bit{1});
  const auto zero = build_circuit_U(4, 3, BitVector(4, 0));
  EXPECT_TRUE(zero.net_angle().is_zero());
  EXPECT_EQ(zero.gate_count(), 0u);
  EXPECT_EQ(readout(zero), Bit{0});
  EXPECT_THROW(build_circuit_U(5, 2, BitVector(4, 0)), DomainError);
  EXPECT_THROW(build_circuit_U(5, 6, BitVector(5, 0)), DomainError);
}

TEST(CircuitU, GateListStructure) {
  const BitVector x{1, 0, 1, 1};
  const auto c = build_circuit_U(4, 2, x);
  ASSERT_EQ(c.steps.size(), 5u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(c.steps[static_cast<std::size_t>(i)].role, GateRole::input);
    EXPECT_EQ(c.steps[static_cast<std::size_t>(i)].client, i + 1);
    EXPECT_EQ(c.steps[static_cast<std::size_t>(i)].power, x[static_cast<std::size_t>(i)]);
    EXPECT_EQ(c.steps[static_cast<std::size_t>(i)].gate, RyGate::u(2));
  }
  EXPECT_EQ(c.steps.back().role, GateRole::correction);
  EXPECT_EQ(c.steps.back().power, 1);
  EXPECT_EQ(c.steps.back().gate, RyGate::u_dagger(2));
}

TEST(CircuitU, NetAngleIsFloorOfWeightOverK) {
  for (int n = 1; n <= 8; ++n)
    for (int k = 1; k <= n; ++k)
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        const auto c = build_circuit_U(n, k, bits_of(m, n));
        ASSERT_TRUE(c.net_angle() == scale(RationalAngle::pi(), std::popcount(m) / k));
        ASSERT_EQ(classify_pole(c.net_angle()), weight_formula(m, k));
      }
}

TEST(CircuitU, ReadoutMatchesWeightFormulaExhaustively) {
  int mismatches = 0;
  for (int n = 1; n <= 10; ++n)
    for (int k = 1; k <= n; ++k)
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        const auto r = readout(build_circuit_U(n, k, bits_of(m, n)));
        if (!r || *r != weight_formula(m, k)) ++mismatches;
      }
  EXPECT_EQ(mismatches, 0);
}

TEST(CircuitVU, Examples) {
  EXPECT_EQ(readout(build_circuit_VU(5, 2, BitVector{1, 1, 0, 0, 1}, BitVector{1, 0, 0, 1, 0})), Bit{1});
  const BitVector x10{1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  const BitVector r10{1, 0, 1, 1, 0, 0, 1, 0, 1, 0};
  EXPECT_EQ(f_nk(10, 2)(x10), 0);
  EXPECT_EQ(readout(build_circuit_VU(10, 2, x10, r10)), Bit{1});
  for (std::uint64_t m = 0; m < 32; ++m)
    EXPECT_EQ(readout(build_circuit_VU(5, 3, bits_of(m, 5), BitVector(5, 0))),
              readout(build_circuit_U(5, 3, bits_of(m, 5))));
}

TEST(CircuitVU, MaskingIdentityExhaustive) {
  for (int n = 1; n <= 6; ++n)
    for (int k = 1; k <= n; ++k)
      for (std::uint64_t xm = 0; xm < (std::uint64_t{1} << n); ++xm)
        for (std::uint64_t rm = 0; rm < (std::uint64_t{1} << n); ++rm) {
          const auto r = readout(build_circuit_VU(n, k, bits_of(xm, n), bits_of(rm, n)));
          ASSERT_EQ(r, Bit(weight_formula(xm, k) ^ (std::popcount(rm) % 2)));
        }
}

TEST(CircuitVU, MaskFollowsInputPerClient) {
  const auto c = build_circuit_VU(3, 2, BitVector{1, 0, 1}, BitVector{0, 1, 1});
  ASSERT_EQ(c.steps.size(), 7u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(c.steps[static_cast<std::size_t>(2 * i)].role, GateRole::input);
    EXPECT_EQ(c.steps[static_cast<std::size_t>(2 * i + 1)].role, GateRole::mask);
    EXPECT_EQ(c.steps[static_cast<std::size_t>(2 * i + 1)].client, i + 1);
    EXPECT_EQ(c.steps[static_cast<std::size_t>(2 * i + 1)].gate, RyGate::v());
  }
}

TEST(XorCompose, Examples) {
  for (std::uint64_t m = 0; m < 32; ++m) EXPECT_EQ(readout(xor_compose_circuit(5, 3, 3, bits_of(m, 5))), Bit{0});
  EXPECT_EQ(readout(xor_compose_circuit(5, 2, 3, BitVector{1, 1, 0, 0, 1})), Bit{0});
}

TEST(XorCompose, ReadoutIsXorExhaustive) {
  for (int n = 1; n <= 8; ++n)
    for (int k = 1; k <= n; ++k)
      for (int h = 1; h <= n; ++h)
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
          ASSERT_EQ(readout(xor_compose_circuit(n, k, h, bits_of(m, n))), Bit(weight_formula(m, k) ^ weight_formula(m, h)));
}

TEST(XorCompose, StateUpToPhase) {
  for (int n = 1; n <= 6; ++n)
    for (int k = 1; k <= n; ++k)
      for (int h = 1; h <= n; ++h)
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
          const auto s = simulate(xor_compose_circuit(n, k, h, bits_of(m, n)));
          const auto target = (weight_formula(m, k) ^ weight_formula(m, h)) ? one_state() : zero_state();
          ASSERT_GT(std::abs(inner_product(s, target)), 1.0 - 1e-10);
        }
}

TEST(Synthesize, Examples) {
  const BitVector x{1, 0, 1, 1, 0};
  const auto direct = build_circuit_U(5, 3, x);
  const auto synth = synthesize_circuit(f_nk(5, 3), x);
  ASSERT_EQ(synth.steps.size(), direct.steps.size());
  for (std::size_t i = 0; i < synth.steps.size(); ++i) {
    EXPECT_EQ(synth.steps[i].gate, direct.steps[i].gate);
    EXPECT_EQ(synth.steps[i].power, direct.steps[i].power);
  }
  const SymmetricFunction maj(3, {0, 0, 1, 1});
  for (std::uint64_t m = 0; m < 8; ++m)
    EXPECT_EQ(readout(synthesize_circuit(maj, bits_of(m, 3))), Bit(std::popcount(m) >= 2));
  // Constant one needs the extra V.
  const auto one = synthesize_circuit(f_n0(3), BitVector(3, 0));
  EXPECT_EQ(one.steps.front().role, GateRole::constant);
  EXPECT_EQ(readout(one), Bit{1});
}

TEST(Synthesize, AllFunctionsAllInputs) {
  for (int n = 1; n <= 8; ++n)
    for (std::uint64_t fm = 0; fm < (std::uint64_t{1} << (n + 1)); ++fm) {
      const auto f = SymmetricFunction::from_mask(n, fm);
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
        ASSERT_EQ(readout(synthesize_circuit(f, bits_of(m, n))), f.at_weight(std::popcount(m)));
    }
}

TEST(TruthTable, Examples) {
  EXPECT_EQ(truth_table_oracle(f_nk(1, 1)), (BitVector{0, 1}));
  EXPECT_EQ(truth_table_oracle(f_nk(2, 2)), (BitVector{0, 0, 0, 1}));
  // x=(1,1,0,0,1): bit i holds x_{i+1}.
  EXPECT_EQ(truth_table_oracle(f_nk(5, 3))[0b10011], 1);
  EXPECT_THROW(truth_table_oracle(SymmetricFunction(17, BitVector(18, 0))), DomainError);
}

TEST(Anf, Examples) {
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(anf_degrees(f_nk(n, 1)).degrees, std::vector<int>{1});
  EXPECT_EQ(anf_degrees(f_nk(5, 2)).degrees, std::vector<int>{2});
  EXPECT_EQ(anf_degrees_mobius(f_nk(5, 2)).degrees, std::vector<int>{2});
  const auto zero = anf_degrees(SymmetricFunction(4, BitVector(5, 0)));
  EXPECT_TRUE(zero.degrees.empty());
  EXPECT_FALSE(zero.degree().has_value());
  EXPECT_EQ(anf_degrees(f_n0(4)).degree(), 0);
}

TEST(Anf, FnkMinimumDegreeAndCompleteLayer) {
  for (int n = 1; n <= 10; ++n)
    for (int k = 1; k <= n; ++k) {
      const auto f = f_nk(n, k);
      const auto lucas = anf_degrees(f);
      ASSERT_FALSE(lucas.degrees.empty());
      EXPECT_EQ(lucas.degrees.front(), k);
      EXPECT_GE(*lucas.degree(), k);
      const auto counts = monomials_per_degree(mobius_transform(truth_table_oracle(f)), n);
      EXPECT_EQ(counts[static_cast<std::size_t>(k)], binomial(n, k));
      for (int d = 0; d < k; ++d) EXPECT_EQ(counts[static_cast<std::size_t>(d)], 0u);
    }
}

TEST(Anf, LucasAgreesWithMobiusForAllFunctions) {
  for (int n = 1; n <= 9; ++n)
    for (std::uint64_t fm = 0; fm < (std::uint64_t{1} << (n + 1)); ++fm) {
      const auto f = SymmetricFunction::from_mask(n, fm);
      ASSERT_EQ(anf_degrees(f), anf_degrees_mobius(f));
    }
}

TEST(Anf, MobiusIsAnInvolution) {
  std::mt19937 gen(9);
  std::bernoulli_distribution coin(0.5);
  BitVector t(256);
  for (auto& b : t) b = coin(gen);
  EXPECT_EQ(mobius_transform(mobius_transform(t)), t);
  EXPECT_THROW(mobius_transform(BitVector(6)), DomainError);
}

TEST(Anf, MonomialCountsPerDegree) {
  BitVector anf(8, 0);
  anf[0b001] = 1;
  anf[0b110] = 1;
  anf[0b111] = 1;
  EXPECT_EQ(monomials_per_degree(anf, 3), (std::vector<std::size_t>{0, 1, 1, 1}));
}

TEST(CircuitSpec, AppendRenumbersBlocks) {
  auto a = build_circuit_U(3, 2, BitVector{1, 1, 0});
  const auto b = build_circuit_U(3, 3, BitVector{1, 1, 0});
  a.append(b);
  EXPECT_EQ(a.block_count(), 2);
  EXPECT_EQ(a.steps.back().block, 1);
  EXPECT_EQ(a.steps.front().block, 0);
}
