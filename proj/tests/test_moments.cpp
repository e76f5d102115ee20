#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "tomoforge/error.hpp"
#include "tomoforge/moments.hpp"
#include "tomoforge/random.hpp"

using namespace tomoforge;

namespace {

constexpr double kPi = std::numbers::pi;

TomogramGrid wide() { return TomogramGrid::square(128, 7.0); }

// Rows centred on multiples of 3 degrees, so k*pi/(m+n+1) and the standard angles need no interpolation.
TomogramGrid aligned() {
  TomogramGrid g = wide();
  g.n_theta = 120;
  g.theta_min = -kPi - kPi / 120;
  g.theta_max = kPi - kPi / 120;
  return g;
}

}  // namespace

TEST(QuadMoment, VacuumSliceMoments) {
  const auto t = synthesize(QuantumState::fock(0), wide());
  const auto pdf = normalize_pdf(t.slice(0.0));
  EXPECT_NEAR(quad_moment(pdf, 0), 1.0, 1e-12);
  EXPECT_NEAR(quad_mean(pdf), 0.0, 1e-12);
  EXPECT_NEAR(quad_variance(pdf), 0.5, 1e-9);
  EXPECT_NEAR(quad_moment(pdf, 4), 0.75, 1e-8);
}

TEST(QuadMoment, RequiresNormalizedPdf) {
  const auto t = synthesize(QuantumState::fock(0), wide());
  EXPECT_THROW(quad_moment(t.slice(0.0), 2), ContractError);
}

TEST(QuadMoment, NormalizeRejectsZeroDensity) {
  QuadraturePdf pdf{0.0, {0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}, false};
  EXPECT_THROW(normalize_pdf(pdf), DegenerateError);
}

TEST(Wunsche, CoherentLadderMoments) {
  const double a = 0.8;
  const auto t = synthesize(QuantumState::coherent(a), aligned());
  EXPECT_NEAR(wunsche_moment(t, 0, 1).real(), a, 1e-6);
  EXPECT_NEAR(wunsche_moment(t, 0, 2).real(), a * a, 1e-6);
  EXPECT_NEAR(wunsche_moment(t, 1, 1).real(), a * a, 1e-6);
  EXPECT_NEAR(wunsche_moment(t, 2, 2).real(), std::pow(a, 4), 1e-6);
  EXPECT_NEAR(wunsche_moment(t, 1, 1).imag(), 0.0, 1e-9);
}

TEST(Wunsche, CoherentOnInterpolatedRows) {
  const double a = 0.8;
  const auto t = synthesize(QuantumState::coherent(a), wide());
  EXPECT_NEAR(wunsche_moment(t, 0, 1).real(), a, 1e-3);
  EXPECT_NEAR(wunsche_moment(t, 1, 1).real(), a * a, 1e-3);
  EXPECT_NEAR(wunsche_moment(t, 2, 2).real(), std::pow(a, 4), 1e-3);
}

TEST(Wunsche, FockFactorialMoments) {
  for (int n = 0; n < 6; ++n) {
    const auto t = synthesize(QuantumState::fock(n), wide());
    EXPECT_NEAR(mean_photon_number(t), n, 1e-6) << n;
    EXPECT_NEAR(wunsche_moment(t, 2, 2).real(), n * (n - 1.0), 1e-5) << n;
    EXPECT_NEAR(std::abs(wunsche_moment(t, 0, 1)), 0.0, 1e-9) << n;
  }
}

TEST(Wunsche, RejectsExcessiveOrder) {
  const auto t = synthesize(QuantumState::fock(0), TomogramGrid::square(16));
  EXPECT_THROW(wunsche_moment(t, 13, 12), RangeError);
  EXPECT_THROW(wunsche_moment(t, -1, 1), ArgumentError);
}

TEST(Wunsche, RandomCoherentMeanPhotonNumber) {
  Rng rng(21);
  for (int trial = 0; trial < 8; ++trial) {
    const double a = rng.uniform(0.0, 1.5);
    const auto t = synthesize(QuantumState::coherent(a), wide());
    EXPECT_NEAR(mean_photon_number(t), a * a, 1e-3) << a;
  }
}

TEST(RelativeError, ZeroReferenceUsesScale) {
  EXPECT_DOUBLE_EQ(relative_error(1.04, 1.0), 0.04000000000000004);
  EXPECT_DOUBLE_EQ(relative_error(0.01, 0.0), 0.02);
  EXPECT_DOUBLE_EQ(relative_error(0.01, 0.0, 1.0), 0.01);
  EXPECT_DOUBLE_EQ(relative_error(-2.0, -1.0), 1.0);
}

TEST(Report, VariancesAtStandardAngles) {
  const auto s = QuantumState::photon_added(1.0);
  const auto r = report(synthesize(s, aligned()));
  ASSERT_EQ(r.quad_var.size(), 6u);
  for (double th : standard_thetas()) {
    ASSERT_TRUE(r.variance_at(th).has_value());
    EXPECT_NEAR(*r.variance_at(th), theory_quadrature_variance(s, th), 1e-6) << th;
  }
  const auto coarse = report(synthesize(s, wide()));
  for (double th : standard_thetas()) {
    EXPECT_NEAR(*coarse.variance_at(th), theory_quadrature_variance(s, th), 5e-3) << th;
  }
  EXPECT_TRUE(r.flags.empty());
  EXPECT_EQ(r.higher.size(), 24u);
}

TEST(Report, SpuriousFlagAgainstGlossaryMeans) {
  const auto t = synthesize(QuantumState::fock(2), wide());
  ReportOptions opts;
  opts.glossary_means = {1.0, 3.0};
  EXPECT_TRUE(report(t, opts).has_flag(QualityFlag::SpuriousSample));
  opts.glossary_means = {2.05};
  EXPECT_FALSE(report(t, opts).has_flag(QualityFlag::SpuriousSample));
}

TEST(Report, JsonRoundTrip) {
  ReportOptions opts;
  opts.glossary_means = {10.0};
  const auto r = report(synthesize(QuantumState::coherent(0.6), TomogramGrid::square(64)), opts);
  const auto back = moment_report_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(back.mean_n, r.mean_n);
  EXPECT_EQ(back.quad_var, r.quad_var);
  EXPECT_EQ(back.quad_mean, r.quad_mean);
  EXPECT_EQ(back.higher, r.higher);
  EXPECT_EQ(back.flags, r.flags);
}

TEST(Report, CsvColumns) {
  std::ostringstream out;
  const std::vector<double> thetas = {0.0, kPi / 2};
  write_report_csv_header(out, thetas);
  MomentReport r;
  r.mean_n = 1.5;
  r.quad_var = {{0.0, 0.25}, {kPi / 2, 0.75}};
  r.add_flag(QualityFlag::SpuriousSample);
  r.add_flag(QualityFlag::ForeignPixel);
  write_report_csv_row(out, "s1", r, thetas);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("sample_id,mean_n,var_", 0), 0u);
  EXPECT_EQ(row, "s1,1.5,0.25,0.75,spurious-sample;foreign-pixel");
}

TEST(QualityFlags, StringRoundTrip) {
  for (auto f : {QualityFlag::SpuriousSample, QualityFlag::ForeignPixel, QualityFlag::Cutoff,
                 QualityFlag::NegativeMeanN, QualityFlag::ImaginaryResidual}) {
    EXPECT_EQ(quality_flag_from_string(to_string(f)), f);
  }
  EXPECT_THROW(quality_flag_from_string("bogus"), FormatError);
}
