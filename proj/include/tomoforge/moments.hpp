#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomoforge/colormap.hpp"
#include "tomoforge/moment_report.hpp"
#include "tomoforge/quadrature_pdf.hpp"
#include "tomoforge/tomogram.hpp"

namespace tomoforge {

/// Trapezoid estimate of the k-th raw moment. Throws ContractError on an
/// unnormalized pdf.
double quad_moment(const QuadraturePdf& pdf, int k);
double quad_mean(const QuadraturePdf& pdf);
/// <X^2> - <X>^2, clamped at zero.
double quad_variance(const QuadraturePdf& pdf);

/// Largest m + n accepted by wunsche_moment.
inline constexpr int kMaxWunscheOrder = 24;

/// <a^dagger^m a^n> from the m + n + 1 slices theta_k = k pi / (m + n + 1),
/// each weighted by H_{m+n}. Slices are normalized (after the optional
/// regulator) before integration. Throws RangeError for m + n > kMaxWunscheOrder.
std::complex<double> wunsche_moment(const Tomogram& t, int m, int n,
                                    const std::optional<Regulator>& regulator = std::nullopt);

/// Re wunsche_moment(t, 1, 1).
double mean_photon_number(const Tomogram& t, const std::optional<Regulator>& regulator = std::nullopt);

/// 0, pi/4, pi/3, pi/2, 2pi/3, 3pi/4.
std::vector<double> standard_thetas();

/// |measured - reference| / |reference|; a zero reference is measured against `zero_scale`.
double relative_error(double measured, double reference, double zero_scale = 0.5);

struct ReportOptions {
  std::vector<double> thetas = standard_thetas();
  std::optional<Regulator> regulator;
  int max_power = 4;                  // higher[(theta, k)] for k = 1..max_power
  std::vector<double> glossary_means;  // empty: no spurious check
  double spurious_tol = 0.04;
};

MomentReport report(const Tomogram& t, const ReportOptions& options = {});

nlohmann::json to_json(const MomentReport& r);
MomentReport moment_report_from_json(const nlohmann::json& j);

/// Batch CSV: sample_id, mean_n, var_<theta>..., flags (';'-joined).
void write_report_csv_header(std::ostream& out, const std::vector<double>& thetas);
void write_report_csv_row(std::ostream& out, const std::string& sample_id, const MomentReport& r,
                          const std::vector<double>& thetas);

}  // namespace tomoforge
