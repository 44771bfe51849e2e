#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <tuple>
#include <numbers>

#include "oracles.hpp"
#include "scatmaxp/filterbank.hpp"

using namespace scatmaxp;

namespace {

const GridGeometry kSquare64{2, {64, 64}, {1.0 / 64, 1.0 / 64}};
const GridGeometry kSquare128{2, {128, 128}, {1.0, 1.0}};

bool bit_identical(const Spectrum& a, const Spectrum& b) {
  if (a.shape != b.shape || a.data.size() != b.data.size()) return false;
  return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(cplx)) == 0;
}

}  // namespace

TEST(MorletBank, WaveletCountAndIndices) {
  const FilterBank bank = build_morlet_bank(2, 2, kSquare64);
  ASSERT_EQ(bank.size(), 4u);
  EXPECT_EQ(bank.base().psi.size(), 4u);
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const FilterIndex idx = bank.indices()[i];
    EXPECT_EQ(bank.index_of(idx), i);
    EXPECT_GE(idx.j, 0);
    EXPECT_LT(idx.j, 2);
    EXPECT_GT(idx.dilation_exponent(), -bank.J());  // the j > -J convention
    EXPECT_EQ(bank.base().psi[i].shape, kSquare64.shape);
  }
  EXPECT_EQ(bank.base().phi.shape, kSquare64.shape);
  EXPECT_THROW(bank.index_of({2, 0}), Error);
}

TEST(MorletBank, ZeroMeanWavelets) {
  for (auto [J, L, n] : {std::tuple{2, 2, 64}, {3, 8, 128}, {1, 1, 16}, {4, 6, 32}}) {
    const FilterBank bank =
        build_morlet_bank(J, L, GridGeometry{2, {std::size_t(n), std::size_t(n)}, {0.5, 0.5}});
    for (const Spectrum& psi : bank.base().psi) EXPECT_LE(std::abs(psi.data[0]), 1e-12);
  }
  const FilterBank line = build_morlet_bank(3, 1, GridGeometry{1, {64, 1}, {1.0, 1.0}});
  for (const Spectrum& psi : line.base().psi) EXPECT_LE(std::abs(psi.data[0]), 1e-12);
}

TEST(MorletBank, LowpassIsRealPositiveAndMatchesSpatialIntegral) {
  const FilterBank bank = build_morlet_bank(3, 4, kSquare64);
  const cplx dc = bank.base().phi.data[0];
  EXPECT_GT(dc.real(), 0.0);
  EXPECT_EQ(dc.imag(), 0.0);
  // Sum of spatial taps (via the test-side inverse DFT) equals phi_hat(0).
  const std::vector<cplx> taps = oracle::dft(bank.base().phi.data, 64, 64, true);
  cplx sum = 0.0;
  for (const cplx& t : taps) sum += t;
  EXPECT_NEAR(sum.real(), dc.real(), 1e-12);
  EXPECT_NEAR(sum.imag(), 0.0, 1e-12);
}

TEST(MorletBank, FiniteGains) {
  const FilterBank bank = build_morlet_bank(3, 8, kSquare128);
  EXPECT_TRUE(std::isfinite(max_wavelet_gain(bank.base())));
  for (const cplx& v : bank.base().phi.data) EXPECT_TRUE(std::isfinite(std::abs(v)));
}

TEST(MorletBank, Deterministic) {
  const FilterBank a = build_morlet_bank(3, 8, kSquare128);
  const FilterBank b = build_morlet_bank(3, 8, kSquare128);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(bit_identical(a.base().psi[i], b.base().psi[i]));
  EXPECT_TRUE(bit_identical(a.base().phi, b.base().phi));
}

TEST(MorletBank, RejectsBadArguments) {
  try {
    build_morlet_bank(3, 2, GridGeometry{2, {60, 64}, {1, 1}});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("2^J"), std::string::npos);
  }
  EXPECT_THROW(build_morlet_bank(0, 2, kSquare64), Error);
  EXPECT_THROW(build_morlet_bank(2, 0, kSquare64), Error);
  EXPECT_THROW(build_morlet_bank(2, 2, GridGeometry{1, {64, 1}, {1, 1}}), Error);
}

TEST(MorletBank, RealizationOnPooledGridSamplesTheSameResponse) {
  // Half the samples at the same spacing: bin k of the small grid is bin 2k
  // of the base grid.
  const FilterBank bank = build_morlet_bank(2, 4, kSquare64);
  const FilterSet half = bank.realize(GridGeometry{2, {32, 32}, kSquare64.spacing});
  ASSERT_EQ(half.psi.size(), bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i)
    for (std::size_t k0 = 0; k0 < 32; ++k0)
      for (std::size_t k1 = 0; k1 < 32; ++k1)
        EXPECT_NEAR(std::abs(half.psi[i](k0, k1) - bank.base().psi[i](2 * k0, 2 * k1)), 0.0, 1e-14);
  EXPECT_TRUE(bit_identical(bank.realize(kSquare64).phi, bank.base().phi));
}

TEST(FrameDefect, ExactPartitionIsZero) {
  for (auto [J, L, n] : {std::tuple{2, 2, 64}, {3, 8, 128}, {1, 1, 8}, {4, 3, 48}}) {
    const FilterBank bank = build_exact_partition_bank(J, L, GridGeometry{2, {std::size_t(n), std::size_t(n)}, {1, 1}});
    EXPECT_LE(frame_defect(bank), 1e-12) << J << ' ' << L << ' ' << n;
  }
  const FilterBank line = build_exact_partition_bank(3, 1, GridGeometry{1, {64, 1}, {1, 1}});
  EXPECT_LE(frame_defect(line), 1e-12);
  const FilterBank odd = build_exact_partition_bank(2, 2, GridGeometry{2, {12, 20}, {0.3, 0.7}});
  EXPECT_LE(frame_defect(odd), 1e-12);
}

TEST(FrameDefect, BoundedBelowByDcTerm) {
  for (const FilterBank& bank : {build_morlet_bank(2, 2, kSquare64), build_morlet_bank(3, 8, kSquare128),
                                 build_exact_partition_bank(3, 8, kSquare128)}) {
    const double dc = std::abs(1.0 - std::norm(bank.base().phi.data[0]));
    EXPECT_GE(frame_defect(bank), dc);
  }
}

TEST(FrameDefect, DefaultMorletGolden) {
  // Measured value for the default bank; see the acceptance suite for the
  // comparison against the 0.2 target.
  const FilterBank bank = build_morlet_bank(3, 8, kSquare128);
  const FrameBounds b = littlewood_paley_bounds(bank.base());
  EXPECT_NEAR(b.defect, 0.87701869647758313, 1e-9);
  EXPECT_GT(b.defect, 0.0);
  EXPECT_LE(b.lower, b.upper);
  EXPECT_NEAR(b.defect, std::max(1.0 - b.lower, b.upper - 1.0), 1e-15);
}

TEST(TheoremConstantB, GaussianMatchesClosedForm) {
  // phi_hat(w) = exp(-sigma^2 w^2 / 2) peaks in |w| phi_hat(w) at w = 1/sigma.
  const std::size_t n = std::size_t{1} << 16;
  const double h = 1.0;
  const FilterBank bank = build_morlet_bank(1, 1, GridGeometry{1, {n, 1}, {h, 1.0}});
  const double sigma = 0.8 * 2.0 * h;
  const double analytic = std::exp(-0.5) / sigma;
  EXPECT_NEAR(theorem_constant_B(bank), analytic, 1e-6 * analytic);

  // Same check on a Gaussian built here, independent of the bank.
  Spectrum g{1, {n, 1}, std::vector<cplx>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 2.0 * std::numbers::pi * (k <= n / 2 ? double(k) : double(k) - double(n)) / (double(n) * h);
    g.data[k] = std::exp(-0.5 * sigma * sigma * w * w);
  }
  EXPECT_NEAR(theorem_constant_B(g, {h, 1.0}), analytic, 1e-6 * analytic);
}

TEST(TheoremConstantB, ZeroAndSymmetries) {
  EXPECT_EQ(theorem_constant_B(Spectrum{2, {8, 8}, std::vector<cplx>(64)}, {1.0, 1.0}), 0.0);
  oracle::Gen g(3);
  Spectrum s{2, {8, 8}, g.complex_vector(64)};
  const double b = theorem_constant_B(s, {0.5, 0.25});
  Spectrum conj = s, refl = s;
  for (std::size_t k0 = 0; k0 < 8; ++k0)
    for (std::size_t k1 = 0; k1 < 8; ++k1) {
      conj.data[k0 * 8 + k1] = std::conj(s(k0, k1));
      refl.data[k0 * 8 + k1] = s((8 - k0) % 8, (8 - k1) % 8);
    }
  EXPECT_EQ(theorem_constant_B(conj, {0.5, 0.25}), b);
  // Reflection maps each bin frequency to its negative except the Nyquist
  // bin, whose frequency magnitude is unchanged.
  EXPECT_EQ(theorem_constant_B(refl, {0.5, 0.25}), b);
}

TEST(TheoremConstantB, TracksAnalyticValueOnBankGrids) {
  const FilterBank coarse = build_morlet_bank(2, 2, GridGeometry{2, {64, 64}, {1.0 / 64, 1.0 / 64}});
  const FilterBank fine = build_morlet_bank(2, 2, GridGeometry{2, {128, 128}, {1.0 / 128, 1.0 / 128}});
  EXPECT_NEAR(theorem_constant_B(coarse), std::exp(-0.5) / coarse.lowpass_sigma(), 0.02 * theorem_constant_B(coarse));
  EXPECT_NEAR(theorem_constant_B(fine), std::exp(-0.5) / fine.lowpass_sigma(), 0.02 * theorem_constant_B(fine));
}
