#include <gtest/gtest.h>

#include <random>

#include "qsmpc/gf2.hpp"

using namespace qsmpc;

namespace {

gf2::Matrix random_unit_lower(std::size_t size, std::mt19937& gen) {
  gf2::Matrix m(size);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < size; ++r) {
    m.set(r, r, true);
    for (std::size_t c = 0; c < r; ++c) m.set(r, c, coin(gen));
  }
  return m;
}

}  // namespace

TEST(Gf2Matrix, SetGetAcrossWordBoundaries) {
  gf2::Matrix m(130);
  m.set(5, 0, true);
  m.set(5, 63, true);
  m.set(5, 64, true);
  m.set(129, 129, true);
  EXPECT_TRUE(m.get(5, 0));
  EXPECT_TRUE(m.get(5, 63));
  EXPECT_TRUE(m.get(5, 64));
  EXPECT_FALSE(m.get(5, 65));
  EXPECT_TRUE(m.get(129, 129));
  m.set(5, 64, false);
  EXPECT_FALSE(m.get(5, 64));
}

TEST(Gf2Matrix, UnitLowerTriangularCheck) {
  gf2::Matrix m(3);
  m.set(0, 0, true);
  m.set(1, 1, true);
  m.set(2, 2, true);
  m.set(2, 0, true);
  EXPECT_TRUE(m.is_unit_lower_triangular());
  m.set(0, 2, true);
  EXPECT_FALSE(m.is_unit_lower_triangular());
  m.set(0, 2, false);
  m.set(1, 1, false);
  EXPECT_FALSE(m.is_unit_lower_triangular());
}

TEST(Gf2Solve, RecoversRandomSolutions) {
  std::mt19937 gen(1);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t size : {1u, 2u, 7u, 64u, 65u, 200u}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto m = random_unit_lower(size, gen);
      std::vector<std::uint8_t> a(size);
      for (auto& v : a) v = coin(gen);
      EXPECT_EQ(gf2::solve_unit_lower(m, m.multiply(a)), a);
    }
  }
}

TEST(Gf2Solve, RejectsNonTriangularAndSizeMismatch) {
  gf2::Matrix m(2);
  m.set(0, 0, true);
  m.set(1, 1, true);
  m.set(0, 1, true);
  EXPECT_THROW(gf2::solve_unit_lower(m, {1, 0}), DomainError);
  gf2::Matrix ok(2);
  ok.set(0, 0, true);
  ok.set(1, 1, true);
  EXPECT_THROW(gf2::solve_unit_lower(ok, {1}), DomainError);
}
