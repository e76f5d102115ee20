#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tomoforge/error.hpp"
#include "tomoforge/random.hpp"
#include "tomoforge/states.hpp"

using namespace tomoforge;

TEST(Hermite, MatchesHighPrecisionValues) {
  EXPECT_NEAR(hermite(5, 0.7), 34.49824, 1e-10);
  EXPECT_NEAR(hermite(10, 1.3), -66123.413033062409, 1e-7);
  EXPECT_DOUBLE_EQ(hermite(0, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(hermite(1, 3.0), 6.0);
}

TEST(Laguerre, MatchesHighPrecisionValue) {
  EXPECT_NEAR(laguerre(3, 1.0, 0.7), 0.72283333333333349, 1e-13);
  EXPECT_DOUBLE_EQ(laguerre(0, 2.0, 5.0), 1.0);
}

TEST(FockWavefunction, MatchesHighPrecisionValues) {
  EXPECT_NEAR(fock_wavefunction(3, 0.4), -0.42914408535388809, 1e-14);
  EXPECT_NEAR(fock_wavefunction(40, 2.5), -0.26498308850855747, 1e-12);
}

TEST(FockWavefunction, RecurrenceAgreesWithSingleEvaluation) {
  std::vector<double> out(30);
  for (double x : {-3.1, -0.2, 0.0, 1.7, 4.4}) {
    fock_wavefunctions(x, out);
    for (int n = 0; n < 30; ++n) EXPECT_NEAR(out[n], fock_wavefunction(n, x), 1e-13) << n << " " << x;
  }
}

TEST(FockWavefunction, OrthonormalOnFineGrid) {
  const int n_pts = 4001;
  const double lo = -12, hi = 12, dx = (hi - lo) / (n_pts - 1);
  for (int m = 0; m < 12; m += 3) {
    for (int n = 0; n < 12; n += 2) {
      double s = 0;
      for (int i = 0; i < n_pts; ++i) {
        const double x = lo + i * dx;
        s += fock_wavefunction(m, x) * fock_wavefunction(n, x) * dx;
      }
      EXPECT_NEAR(s, m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
    }
  }
}

TEST(QuantumState, ParseRoundTrip) {
  for (const auto& s : {QuantumState::fock(3), QuantumState::coherent(0.5), QuantumState::photon_added(1.5, 2),
                        QuantumState::amplified(2.0), QuantumState::optimal(0.25)}) {
    EXPECT_EQ(QuantumState::parse(s.to_string()), s);
  }
  EXPECT_NEAR(QuantumState::parse("cs:sqrt(0.1)").alpha, std::sqrt(0.1), 1e-15);
}

TEST(QuantumState, RejectsMalformedText) {
  EXPECT_THROW(QuantumState::parse("squeezed:1"), Error);
  EXPECT_THROW(QuantumState::parse("fock:-1"), Error);
  EXPECT_THROW(QuantumState::parse("cs:abc"), Error);
}

TEST(QuantumState, FockAboveCutoffIsRejected) {
  EXPECT_THROW(fock_coefficients(QuantumState::fock(80)), Error);
}

TEST(Pacs, CoefficientsNormalizedAndShifted) {
  for (double a : {0.0, 0.3, 1.0, 2.0}) {
    const auto c = pacs_coefficients(a, 1);
    double norm = 0;
    for (const auto& x : c) norm += std::norm(x);
    EXPECT_NEAR(norm, 1.0, 1e-12);
    EXPECT_EQ(std::abs(c[0]), 0.0);
  }
}

TEST(Pacs, LadderMomentsMatchOracle) {
  const double a2[] = {0, 0.1, 0.3, 0.5, 1};
  const double n[] = {1.0, 1.19090909090909, 1.53076923076923, 1.83333333333333, 2.5};
  const double vx[] = {1.5, 1.24380165289256, 0.914201183431953, 0.722222222222222, 0.5};
  const double vp[] = {1.5, 1.40909090909091, 1.26923076923077, 1.16666666666667, 1.0};
  for (int i = 0; i < 5; ++i) {
    const auto s = QuantumState::photon_added(std::sqrt(a2[i]), 1);
    EXPECT_NEAR(ladder_moments(s).mean_n, n[i], 1e-12);
    EXPECT_NEAR(theory_quadrature_variance(s, 0.0), vx[i], 1e-12);
    EXPECT_NEAR(theory_quadrature_variance(s, std::numbers::pi / 2), vp[i], 1e-12);
  }
}

TEST(Gain, AmplifiedAndOptimalAmplitudes) {
  const double alphas[] = {0.5, 1.0, 1.5, 2.0};
  const double amp2[] = {0.81, 2.25, 3.84763313609467, 5.76};
  const double opt2[] = {1.64038820320221, 2.61803398874989, 4.0, 5.82842712474619};
  for (int i = 0; i < 4; ++i) {
    const double g = gain(alphas[i], 1);
    EXPECT_NEAR(std::pow(g * alphas[i], 2), amp2[i], 1e-12);
    EXPECT_NEAR(std::pow(beta_opt(alphas[i], 1), 2), opt2[i], 1e-12);
  }
  EXPECT_THROW(gain(0.0, 1), DomainError);
}

TEST(Fidelity, OptimalCsOracle) {
  const double alphas[] = {0.5, 1.0, 1.5, 2.0};
  const double fid[] = {0.713321944784282, 0.89342798920711, 0.958524040703268, 0.981902155428073};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(fidelity(QuantumState::photon_added(alphas[i]), QuantumState::optimal(alphas[i])), fid[i], 1e-12);
  }
}

TEST(Fidelity, OptimalBeatsNeighbouringAmplitudes) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.uniform(0.2, 2.5);
    const auto pacs = QuantumState::photon_added(a);
    const double best = fidelity(pacs, QuantumState::optimal(a));
    const double b = beta_opt(a, 1);
    EXPECT_GE(best, fidelity(pacs, QuantumState::coherent(b * 1.01)));
    EXPECT_GE(best, fidelity(pacs, QuantumState::coherent(b * 0.99)));
  }
}

TEST(Coherent, MinimumUncertainty) {
  for (double a : {0.0, 0.4, 1.3}) {
    const auto s = QuantumState::coherent(a);
    EXPECT_NEAR(ladder_moments(s).mean_n, a * a, 1e-12);
    for (double th : {0.0, 0.7, 2.0}) EXPECT_NEAR(theory_quadrature_variance(s, th), 0.5, 1e-12);
    EXPECT_NEAR(theory_quadrature_mean(s, 0.0), std::sqrt(2.0) * a, 1e-12);
  }
}

TEST(Fock, QuadratureVarianceIsNPlusHalf) {
  for (int n = 0; n < 6; ++n) {
    EXPECT_NEAR(theory_quadrature_variance(QuantumState::fock(n), 1.1), n + 0.5, 1e-12);
  }
}
