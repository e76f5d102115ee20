#include "tomoforge/quadrature_pdf.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "tomoforge/error.hpp"
#include "tomoforge/text.hpp"

namespace tomoforge {

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("trapezoid: size mismatch");
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return total;
}

QuadraturePdf normalize_pdf(QuadraturePdf pdf) {
  const double area = trapezoid(pdf.x, pdf.p);
  if (!(area > 0.0) || !std::isfinite(area)) {
    throw DegenerateError("cannot normalize a density with integral " + std::to_string(area));
  }
  for (auto& v : pdf.p) v /= area;
  pdf.normalized = true;
  return pdf;
}

QuadraturePdf quadrature_pdf(const QuantumState& state, double theta,
                             std::span<const double> x_grid, const FockBasisCutoff& cutoff) {
  if (!(theta >= -std::numbers::pi - 1e-12 && theta <= std::numbers::pi + 1e-12)) {
    throw ArgumentError("theta must lie in [-pi, pi]");
  }
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) throw ArgumentError("x grid must be strictly increasing");
  }
  const auto c = fock_coefficients(state, cutoff);
  std::vector<std::complex<double>> rotated(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    rotated[k] = c[k] * std::polar(1.0, -static_cast<double>(k) * theta);
  }
  QuadraturePdf pdf;
  pdf.theta = theta;
  pdf.x.assign(x_grid.begin(), x_grid.end());
  pdf.p.resize(x_grid.size());
  std::vector<double> psi(c.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    fock_wavefunctions(x_grid[j], psi);
    std::complex<double> amp = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) amp += rotated[k] * psi[k];
    pdf.p[j] = std::norm(amp);
  }
  return pdf;
}

void write_pdf_csv(std::ostream& out, const QuadraturePdf& pdf) {
  if (pdf.x.size() != pdf.p.size()) throw ArgumentError("pdf x and p lengths differ");
  out << "# pdf theta=" << format_double(pdf.theta) << " normalized=" << (pdf.normalized ? 1 : 0) << "\nx,p\n";
  for (std::size_t j = 0; j < pdf.x.size(); ++j) out << format_double(pdf.x[j]) << ',' << format_double(pdf.p[j]) << '\n';
}

QuadraturePdf read_pdf_csv(std::istream& in) {
  QuadraturePdf pdf;
  std::string line;
  if (!std::getline(in, line) || !trim(line).starts_with("# pdf")) throw FormatError("missing '# pdf' header");
  for (const auto field : split(trim(line).substr(5), ' ')) {
    if (field.starts_with("theta=")) pdf.theta = parse_double(field.substr(6));
    if (field.starts_with("normalized=")) pdf.normalized = parse_int(field.substr(11)) != 0;
  }
  if (!std::getline(in, line) || trim(line) != "x,p") throw FormatError("missing 'x,p' column line");
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 2) throw FormatError("pdf rows need two fields");
    pdf.x.push_back(parse_double(f[0]));
    pdf.p.push_back(parse_double(f[1]));
  }
  if (pdf.x.size() < 2) throw FormatError("pdf needs at least two samples");
  return pdf;
}

void save_pdf_csv(const std::string& path, const QuadraturePdf& pdf) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write_pdf_csv(out, pdf);
}

QuadraturePdf load_pdf_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return read_pdf_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace tomoforge
