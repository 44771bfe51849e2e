#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "scatmaxp/pooling.hpp"

using namespace scatmaxp;

namespace {

SignalGrid random_nonneg(oracle::Gen& g, const Plate& p) {
  std::vector<cplx> v(p.sample_count());
  for (auto& x : v) x = g.uniform();
  return SignalGrid(p, std::move(v));
}

}  // namespace

TEST(PartitionPlate, WorkedExamples) {
  const Plate p = Plate::unit_square(4, 4);
  const PlatePartition part = partition_plate(p, {2, 2});
  EXPECT_EQ(part.count(), 4u);
  EXPECT_EQ(part.block_extent(), (Extents{2, 2}));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(part.sub_plate(i).samples(), (Extents{2, 2}));

  const PlatePartition whole = partition_plate(p, {1, 1});
  EXPECT_EQ(whole.count(), 1u);
  EXPECT_TRUE(whole.sub_plate(0).approx_equal(p));

  EXPECT_THROW(partition_plate(Plate::line(0.0, 1.0, 6), {4, 1}), Error);
}

TEST(PartitionPlate, CoversPlateWithCongruentTranslates) {
  const Plate p = Plate::rect({-1.0, 2.0}, {3.0, 1.5}, {12, 6});
  const PlatePartition part = partition_plate(p, {4, 3});
  double total = 0.0;
  const Plate first = part.sub_plate(0);
  for (std::size_t i = 0; i < part.count(); ++i) {
    const Plate s = part.sub_plate(i);
    total += s.measure();
    EXPECT_NEAR(s.measure(), p.measure() / 12.0, 1e-12);
    EXPECT_NEAR(s.side_lengths()[0], first.side_lengths()[0], 1e-12);
    EXPECT_NEAR(s.side_lengths()[1], first.side_lengths()[1], 1e-12);
    EXPECT_GE(s.origin()[0], p.origin()[0] - 1e-12);
    EXPECT_LE(s.origin()[0] + s.side_lengths()[0], p.origin()[0] + p.side_lengths()[0] + 1e-12);
  }
  EXPECT_NEAR(total, p.measure(), 1e-12);
  EXPECT_THROW(part.sub_plate(12), Error);
}

TEST(MinAdmissibleFactor, WorkedExamples) {
  const SignalGrid ones(Plate::unit_square(8, 8), std::vector<cplx>(64, 1.0));
  EXPECT_NEAR(min_admissible_factor(ones), 1.0, 1e-15);

  std::vector<cplx> half(16, 0.0);
  for (std::size_t i = 0; i < 8; ++i) half[i] = 1.0;
  EXPECT_NEAR(min_admissible_factor(SignalGrid(Plate::line(0.0, 1.0, 16), half)), std::sqrt(2.0), 1e-14);

  oracle::Gen g(1);
  for (int t = 0; t < 20; ++t) {
    const SignalGrid f = random_nonneg(g, Plate::rect({0, 0}, {2.0, 0.5}, {6, 10}));
    const double alpha = g.uniform(0.01, 100.0);
    std::vector<cplx> scaled(f.values().begin(), f.values().end());
    for (auto& x : scaled) x *= alpha;
    EXPECT_NEAR(min_admissible_factor(SignalGrid(f.plate(), scaled)), min_admissible_factor(f),
                1e-13 * min_admissible_factor(f));
  }
  EXPECT_THROW(min_admissible_factor(SignalGrid(Plate::unit_square(2, 2))), Error);
}

TEST(MaxPool, BlockPattern) {
  const double pattern[2][2] = {{1, 2}, {3, 4}};
  std::vector<cplx> v(16);
  for (std::size_t i0 = 0; i0 < 4; ++i0)
    for (std::size_t i1 = 0; i1 < 4; ++i1) v[i0 * 4 + i1] = pattern[i0 / 2][i1 / 2];
  const Plate p = Plate::rect({-1.0, -1.0}, {2.0, 2.0}, {4, 4});
  const SignalGrid out = max_pool(SignalGrid(p, v), partition_plate(p, {2, 2}), 2.0);
  ASSERT_EQ(out.plate().samples(), (Extents{2, 2}));
  EXPECT_EQ(out(0, 0), 1.0);
  EXPECT_EQ(out(0, 1), 2.0);
  EXPECT_EQ(out(1, 0), 3.0);
  EXPECT_EQ(out(1, 1), 4.0);
  EXPECT_DOUBLE_EQ(out.plate().origin()[0], -0.5);
  EXPECT_DOUBLE_EQ(out.plate().side_lengths()[1], 1.0);
}

TEST(MaxPool, ConstantStaysConstantOnHalfPlate) {
  const Plate p = Plate::rect({-0.5, -0.5}, {1.0, 1.0}, {8, 8});
  const SignalGrid c(p, std::vector<cplx>(64, 0.75));
  for (Extents blocks : {Extents{2, 2}, Extents{4, 2}, Extents{8, 8}, Extents{1, 1}}) {
    const SignalGrid out = max_pool(c, partition_plate(p, blocks), 2.0);
    for (const cplx& x : out.values()) EXPECT_EQ(x, 0.75);
    EXPECT_DOUBLE_EQ(out.plate().measure(), p.measure() / 4.0);
  }
  // Constant: ||P f|| = S^{-d/2} ||f|| with one sample per sub-plate image.
  const SignalGrid pooled = max_pool(c, partition_by_window(p, 2), 2.0);
  EXPECT_NEAR(l2_norm(pooled) / l2_norm(c), 0.5, 1e-15);
}

TEST(MaxPool, MatchesNestedLoopOracleBitExactly) {
  oracle::Gen g(2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t b0 = std::size_t(g.integer(1, 4)), b1 = std::size_t(g.integer(1, 4));
    const std::size_t n0 = b0 * std::size_t(g.integer(1, 5)), n1 = b1 * std::size_t(g.integer(1, 5));
    const Plate p = Plate::rect({g.uniform(-2, 0), g.uniform(-2, 0)}, {g.uniform(1, 3), g.uniform(1, 3)}, {n0, n1});
    const SignalGrid f(p, g.complex_vector(p.sample_count()));
    const SignalGrid out = max_pool(f, partition_plate(p, {n0 / b0, n1 / b1}), g.uniform(1.0, 4.0), Admissibility::off);
    const std::vector<cplx> expect = oracle::block_max(f, b0, b1);
    ASSERT_EQ(out.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(out.values()[i], expect[i]);
  }
}

TEST(MaxPool, PiecewiseConstantAndMonotone) {
  oracle::Gen g(3);
  const Plate p = Plate::unit_square(8, 8);
  const PlatePartition part = partition_by_window(p, 2);
  for (int t = 0; t < 50; ++t) {
    const SignalGrid f = random_nonneg(g, p);
    std::vector<cplx> bigger(f.values().begin(), f.values().end());
    for (auto& x : bigger) x += g.uniform();
    const SignalGrid a = max_pool(f, part, 2.0, Admissibility::off);
    const SignalGrid b = max_pool(SignalGrid(p, bigger), part, 2.0, Admissibility::off);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(a.values()[i].real(), b.values()[i].real());
  }
  // One output cell per block for any S: spacing block*h/S.
  const SignalGrid f = random_nonneg(g, p);
  const SignalGrid out = max_pool(f, part, 1.5, Admissibility::off);
  EXPECT_NEAR(out.plate().spacing(0), 2.0 * p.spacing(0) / 1.5, 1e-15);
}

TEST(MaxPool, ContractionForAdmissibleFactors) {
  oracle::Gen g(4);
  const Plate p = Plate::rect({-0.5, -0.5}, {1.0, 1.0}, {16, 16});
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    std::vector<cplx> v(256);
    const double density = g.uniform(0.05, 1.0);
    for (auto& x : v)
      if (g.uniform() < density) x = g.uniform();
    v[0] = 1.0;
    const SignalGrid f(p, v);
    if (!(2.0 > min_admissible_factor(f))) continue;
    ++checked;
    EXPECT_LE(l2_norm(max_pool(f, partition_by_window(p, 2), 2.0, Admissibility::strict)), l2_norm(f) * (1 + 1e-12));
  }
  EXPECT_GT(checked, 100);
}

TEST(MaxPool, AdmissibilityModes) {
  const Plate p = Plate::unit_square(4, 4);
  std::vector<cplx> spike(16, 0.0);
  spike[5] = 1.0;  // threshold = (1 * 1 / 0.25)^{1/2} = 2
  const SignalGrid f(p, spike);
  const PlatePartition part = partition_by_window(p, 2);
  EXPECT_NEAR(min_admissible_factor(f), 2.0, 1e-15);

  const PoolOutcome warn = max_pool_checked(f, part, 2.0, Admissibility::warn);
  EXPECT_FALSE(warn.admissible);
  EXPECT_NEAR(warn.threshold, 2.0, 1e-15);
  try {
    max_pool(f, part, 2.0, Admissibility::strict);
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_NEAR(e.threshold(), 2.0, 1e-15);
    EXPECT_EQ(e.factor(), 2.0);
    EXPECT_NE(std::string(e.what()).find("S > 2"), std::string::npos);
  }
  EXPECT_TRUE(max_pool_checked(f, part, 2.5, Admissibility::strict).admissible);
  EXPECT_TRUE(max_pool_checked(SignalGrid(p), part, 1.0, Admissibility::strict).admissible);
}

TEST(MaxPool, Errors) {
  const Plate p = Plate::unit_square(4, 4);
  const SignalGrid f(p);
  EXPECT_THROW(max_pool(f, partition_by_window(Plate::unit_square(8, 8), 2), 2.0), Error);
  EXPECT_THROW(max_pool(f, partition_by_window(p, 2), 0.5), Error);
  EXPECT_THROW(partition_by_window(p, 3), Error);
}

TEST(MaxPool, CommutesWithPlateTranslation) {
  oracle::Gen g(5);
  const Plate p = Plate::rect({-0.5, -0.5}, {1.0, 1.0}, {8, 8});
  const double block = 2 * p.spacing(0);
  for (int t = 0; t < 100; ++t) {
    const SignalGrid f(p, g.complex_vector(64));
    const Vec c{double(g.integer(-2, 2)) * block, double(g.integer(-2, 2)) * block};
    const SignalGrid shifted = translate_with_plate(f, c);
    const SignalGrid lhs = max_pool(shifted, partition_by_window(shifted.plate(), 2), 2.0, Admissibility::off);
    const SignalGrid rhs =
        translate_with_plate(max_pool(f, partition_by_window(p, 2), 2.0, Admissibility::off), {c[0] / 2, c[1] / 2});
    EXPECT_TRUE(lhs.same_values(rhs));
    EXPECT_TRUE(lhs.plate().approx_equal(rhs.plate()));
  }
}

TEST(MaxPoolTruncating, DropsRemainders) {
  std::vector<cplx> v(49);
  for (std::size_t i = 0; i < 49; ++i) v[i] = double(i);
  const SignalGrid f(Plate::unit_square(7, 7), v);
  const SignalGrid out = max_pool_truncating(f, 3);
  ASSERT_EQ(out.plate().samples(), (Extents{2, 2}));
  EXPECT_EQ(out(0, 0), 16.0);  // row 2, col 2
  EXPECT_EQ(out(1, 1), 40.0);  // row 5, col 5; row/col 6 dropped
  EXPECT_THROW(max_pool_truncating(SignalGrid(Plate::unit_square(2, 2)), 3), Error);
}
