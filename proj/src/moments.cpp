#include "tomoforge/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "tomoforge/error.hpp"
#include "tomoforge/states.hpp"
#include "tomoforge/text.hpp"

namespace tomoforge {

namespace {

constexpr double kPi = std::numbers::pi;

QuadraturePdf prepared_slice(const Tomogram& t, double theta, const std::optional<Regulator>& reg) {
  QuadraturePdf pdf = t.slice(theta);
  if (reg) return apply_regulator(pdf, *reg);
  return normalize_pdf(std::move(pdf));
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

const std::pair<QualityFlag, const char*> kFlagNames[] = {
    {QualityFlag::SpuriousSample, "spurious-sample"},
    {QualityFlag::ForeignPixel, "foreign-pixel"},
    {QualityFlag::Cutoff, "cutoff"},
    {QualityFlag::NegativeMeanN, "negative-mean-n"},
    {QualityFlag::ImaginaryResidual, "imaginary-residual"},
};

}  // namespace

std::string to_string(QualityFlag flag) {
  for (const auto& [f, name] : kFlagNames) {
    if (f == flag) return name;
  }
  return {};
}

QualityFlag quality_flag_from_string(const std::string& text) {
  for (const auto& [f, name] : kFlagNames) {
    if (text == name) return f;
  }
  throw FormatError("unknown quality flag '" + text + "'");
}

std::optional<double> MomentReport::variance_at(double theta, double tol) const {
  for (const auto& [t, v] : quad_var) {
    if (std::abs(t - theta) <= tol) return v;
  }
  return std::nullopt;
}

bool MomentReport::has_flag(QualityFlag flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

void MomentReport::add_flag(QualityFlag flag) {
  if (!has_flag(flag)) flags.push_back(flag);
}

double quad_moment(const QuadraturePdf& pdf, int k) {
  if (!pdf.normalized) throw ContractError("quadrature moments need a normalized pdf");
  if (k < 0) throw ArgumentError("moment order must be nonnegative");
  std::vector<double> y(pdf.p.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = pdf.p[j] * std::pow(pdf.x[j], k);
  return trapezoid(pdf.x, y);
}

double quad_mean(const QuadraturePdf& pdf) { return quad_moment(pdf, 1); }

double quad_variance(const QuadraturePdf& pdf) {
  const double m1 = quad_moment(pdf, 1);
  return std::max(0.0, quad_moment(pdf, 2) - m1 * m1);
}

std::complex<double> wunsche_moment(const Tomogram& t, int m, int n,
                                    const std::optional<Regulator>& regulator) {
  if (m < 0 || n < 0) throw ArgumentError("moment indices must be nonnegative");
  const int order = m + n;
  if (order > kMaxWunscheOrder) {
    throw RangeError("m + n = " + std::to_string(order) + " exceeds the supported order " +
                     std::to_string(kMaxWunscheOrder));
  }
  const double c_mn =
      factorial(m) * factorial(n) / (factorial(order + 1) * std::pow(2.0, 0.5 * order));
  const auto xs = t.grid().x_values();
  std::vector<double> h(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) h[j] = hermite(order, xs[j]);

  std::complex<double> sum = 0.0;
  std::vector<double> y(xs.size());
  for (int k = 0; k <= order; ++k) {
    const double theta = k * kPi / (order + 1);
    const QuadraturePdf pdf = prepared_slice(t, theta, regulator);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = pdf.p[j] * h[j];
    sum += std::polar(trapezoid(pdf.x, y), -k * (m - n) * kPi / (order + 1));
  }
  return c_mn * sum;
}

double mean_photon_number(const Tomogram& t, const std::optional<Regulator>& regulator) {
  return wunsche_moment(t, 1, 1, regulator).real();
}

std::vector<double> standard_thetas() {
  return {0.0, kPi / 4, kPi / 3, kPi / 2, 2 * kPi / 3, 3 * kPi / 4};
}

double relative_error(double measured, double reference, double zero_scale) {
  const double scale = reference == 0.0 ? zero_scale : std::abs(reference);
  return std::abs(measured - reference) / scale;
}

MomentReport report(const Tomogram& t, const ReportOptions& options) {
  MomentReport r;
  const auto n_moment = wunsche_moment(t, 1, 1, options.regulator);
  r.mean_n = n_moment.real();
  if (std::abs(n_moment.imag()) > 1e-6) r.add_flag(QualityFlag::ImaginaryResidual);
  if (r.mean_n < 0.0) r.add_flag(QualityFlag::NegativeMeanN);

  for (const double theta : options.thetas) {
    const QuadraturePdf pdf = prepared_slice(t, theta, options.regulator);
    const double mean = quad_moment(pdf, 1);
    r.quad_mean[theta] = mean;
    r.quad_var[theta] = std::max(0.0, quad_moment(pdf, 2) - mean * mean);
    for (int k = 1; k <= options.max_power; ++k) r.higher[{theta, k}] = quad_moment(pdf, k);
  }

  if (!options.glossary_means.empty()) {
    const bool near_any = std::any_of(options.glossary_means.begin(), options.glossary_means.end(),
                                      [&](double g) { return relative_error(r.mean_n, g) <= options.spurious_tol; });
    if (!near_any) r.add_flag(QualityFlag::SpuriousSample);
  }
  return r;
}

nlohmann::json to_json(const MomentReport& r) {
  nlohmann::json j;
  j["mean_n"] = r.mean_n;
  j["quad_mean"] = nlohmann::json::array();
  for (const auto& [theta, v] : r.quad_mean) j["quad_mean"].push_back({{"theta", theta}, {"value", v}});
  j["quad_var"] = nlohmann::json::array();
  for (const auto& [theta, v] : r.quad_var) j["quad_var"].push_back({{"theta", theta}, {"value", v}});
  j["higher"] = nlohmann::json::array();
  for (const auto& [key, v] : r.higher) {
    j["higher"].push_back({{"theta", key.first}, {"k", key.second}, {"value", v}});
  }
  j["flags"] = nlohmann::json::array();
  for (const auto f : r.flags) j["flags"].push_back(to_string(f));
  return j;
}

MomentReport moment_report_from_json(const nlohmann::json& j) {
  try {
    MomentReport r;
    r.mean_n = j.at("mean_n").get<double>();
    for (const auto& e : j.value("quad_mean", nlohmann::json::array())) {
      r.quad_mean[e.at("theta").get<double>()] = e.at("value").get<double>();
    }
    for (const auto& e : j.value("quad_var", nlohmann::json::array())) {
      r.quad_var[e.at("theta").get<double>()] = e.at("value").get<double>();
    }
    for (const auto& e : j.value("higher", nlohmann::json::array())) {
      r.higher[{e.at("theta").get<double>(), e.at("k").get<int>()}] = e.at("value").get<double>();
    }
    for (const auto& f : j.value("flags", nlohmann::json::array())) {
      r.flags.push_back(quality_flag_from_string(f.get<std::string>()));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed moment report: ") + e.what());
  }
}

void write_report_csv_header(std::ostream& out, const std::vector<double>& thetas) {
  out << "sample_id,mean_n";
  for (const double theta : thetas) out << ",var_" << format_double(theta);
  out << ",flags\n";
}

void write_report_csv_row(std::ostream& out, const std::string& sample_id, const MomentReport& r,
                          const std::vector<double>& thetas) {
  out << sample_id << ',' << format_double(r.mean_n);
  for (const double theta : thetas) {
    const auto v = r.variance_at(theta);
    out << ',' << (v ? format_double(*v) : "");
  }
  out << ',';
  for (std::size_t i = 0; i < r.flags.size(); ++i) out << (i ? ";" : "") << to_string(r.flags[i]);
  out << '\n';
}

}  // namespace tomoforge
