#include "tomoforge/tomogram.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tomoforge/error.hpp"
#include "tomoforge/random.hpp"
#include "tomoforge/text.hpp"

namespace tomoforge {

TomogramGrid TomogramGrid::square(int n, double half_width) {
  TomogramGrid g;
  g.x_min = -half_width;
  g.x_max = half_width;
  g.n_x = n;
  g.n_theta = n;
  g.validate();
  return g;
}

void TomogramGrid::validate() const {
  if (n_x < 2 || n_theta < 1) throw ArgumentError("grid needs n_x >= 2 and n_theta >= 1");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw ArgumentError("grid needs finite x_min < x_max");
  }
  if (!(theta_max > theta_min)) throw ArgumentError("grid needs theta_min < theta_max");
}

std::vector<double> TomogramGrid::x_values() const {
  std::vector<double> xs(static_cast<std::size_t>(n_x));
  for (int j = 0; j < n_x; ++j) xs[static_cast<std::size_t>(j)] = x(j);
  return xs;
}

bool TomogramGrid::periodic() const {
  return std::abs((theta_max - theta_min) - 2.0 * std::numbers::pi) < 1e-9;
}

Tomogram::Tomogram(TomogramGrid grid, std::optional<QuantumState> label)
    : grid_(grid), label_(std::move(label)) {
  grid_.validate();
  values_.assign(static_cast<std::size_t>(grid_.n_x) * static_cast<std::size_t>(grid_.n_theta), 0.0);
}

Tomogram::Tomogram(TomogramGrid grid, std::vector<double> values, std::optional<QuantumState> label)
    : grid_(grid), values_(std::move(values)), label_(std::move(label)) {
  grid_.validate();
  if (values_.size() != static_cast<std::size_t>(grid_.n_x) * static_cast<std::size_t>(grid_.n_theta)) {
    throw ArgumentError("tomogram values do not match the grid size");
  }
}

std::span<const double> Tomogram::row(int i) const {
  return std::span<const double>(values_).subspan(index(i, 0), static_cast<std::size_t>(grid_.n_x));
}

std::span<double> Tomogram::row(int i) {
  return std::span<double>(values_).subspan(index(i, 0), static_cast<std::size_t>(grid_.n_x));
}

double Tomogram::max_value() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

QuadraturePdf Tomogram::slice(double theta) const {
  const int rows = grid_.n_theta;
  const double f = (theta - grid_.theta_min) / grid_.dtheta() - 0.5;
  const double nearest = std::round(f);
  QuadraturePdf pdf;
  pdf.theta = theta;
  pdf.x = grid_.x_values();
  pdf.p.resize(static_cast<std::size_t>(grid_.n_x));

  auto wrap = [&](long i) -> int {
    if (grid_.periodic()) return static_cast<int>(((i % rows) + rows) % rows);
    if (i < 0 || i >= rows) throw ArgumentError("theta outside the tomogram grid");
    return static_cast<int>(i);
  };

  if (std::abs(f - nearest) < 1e-9) {
    const auto r = row(wrap(static_cast<long>(nearest)));
    std::copy(r.begin(), r.end(), pdf.p.begin());
    return pdf;
  }
  const long lower = static_cast<long>(std::floor(f));
  const double u = f - static_cast<double>(lower);
  const auto a = row(wrap(lower));
  const auto b = row(wrap(lower + 1));
  for (std::size_t j = 0; j < pdf.p.size(); ++j) pdf.p[j] = (1.0 - u) * a[j] + u * b[j];
  return pdf;
}

std::vector<double> Tomogram::row_integrals() const {
  const auto xs = grid_.x_values();
  std::vector<double> out(static_cast<std::size_t>(grid_.n_theta));
  for (int i = 0; i < grid_.n_theta; ++i) out[static_cast<std::size_t>(i)] = trapezoid(xs, row(i));
  return out;
}

Tomogram synthesize(const QuantumState& state, const TomogramGrid& grid,
                    const FockBasisCutoff& cutoff) {
  grid.validate();
  const auto c = fock_coefficients(state, cutoff);
  const std::size_t nf = c.size();
  const auto nx = static_cast<std::size_t>(grid.n_x);

  // psi_k(x_j), k-major so the inner sum over k is contiguous per x.
  std::vector<double> psi(nx * nf);
  for (std::size_t j = 0; j < nx; ++j) {
    fock_wavefunctions(grid.x(static_cast<int>(j)), std::span<double>(psi).subspan(j * nf, nf));
  }

  Tomogram t(grid, state);
  std::vector<std::complex<double>> rotated(nf);
  for (int i = 0; i < grid.n_theta; ++i) {
    const double theta = grid.theta(i);
    for (std::size_t k = 0; k < nf; ++k) {
      rotated[k] = c[k] * std::polar(1.0, -static_cast<double>(k) * theta);
    }
    auto out = t.row(i);
    for (std::size_t j = 0; j < nx; ++j) {
      const double* pj = psi.data() + j * nf;
      std::complex<double> amp = 0.0;
      for (std::size_t k = 0; k < nf; ++k) amp += rotated[k] * pj[k];
      out[j] = std::norm(amp);
    }
  }
  return t;
}

std::string to_string(NoiseModel model) {
  return model == NoiseModel::UniformA ? "a" : "b";
}

NoiseModel noise_model_from_string(const std::string& text) {
  if (text == "a" || text == "uniform") return NoiseModel::UniformA;
  if (text == "b" || text == "gaussian") return NoiseModel::GaussianB;
  throw ArgumentError("unknown noise model '" + text + "' (expected a or b)");
}

void NoiseSpec::validate() const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ArgumentError("noise fraction must lie in [0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("noise epsilon must lie in (0, 1)");
}

std::size_t NoiseSpec::affected_points(std::size_t total) const {
  // 1e-9 guards against fraction * total landing a hair below an integer.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 1e-9));
}

Tomogram apply_noise(const Tomogram& t, const NoiseSpec& spec, std::vector<std::size_t>* touched) {
  spec.validate();
  Tomogram out = t;
  auto values = out.values();
  const std::size_t total = values.size();
  const std::size_t count = spec.affected_points(total);
  if (touched) touched->clear();
  if (count == 0) return out;

  Rng rng(spec.seed);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(order[i], order[j]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double delta = spec.model == NoiseModel::UniformA ? rng.uniform(-spec.epsilon, spec.epsilon)
                                                            : rng.normal(0.0, spec.epsilon);
    double& v = values[order[i]];
    v = std::max(0.0, v * (1.0 + delta));
  }
  if (touched) touched->assign(order.begin(), order.begin() + static_cast<long>(count));
  return out;
}

void write_tomogram_csv(std::ostream& out, const Tomogram& t) {
  const auto& g = t.grid();
  out << "# tomogram x_min=" << format_double(g.x_min) << " x_max=" << format_double(g.x_max)
      << " theta_min=" << format_double(g.theta_min) << " theta_max=" << format_double(g.theta_max)
      << " n_x=" << g.n_x << " n_theta=" << g.n_theta
      << " label=" << (t.label() ? t.label()->to_string() : std::string("none")) << '\n';
  for (int i = 0; i < g.n_theta; ++i) {
    const auto r = t.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out << ',';
      out << format_double(r[j]);
    }
    out << '\n';
  }
}

Tomogram read_tomogram_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || !header.starts_with("# tomogram ")) {
    throw FormatError("missing '# tomogram' header line");
  }
  TomogramGrid g;
  std::optional<QuantumState> label;
  int seen = 0;
  for (auto field : split(std::string_view(header).substr(11), ' ')) {
    field = trim(field);
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw FormatError("bad header field");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "x_min") g.x_min = parse_double(value);
    else if (key == "x_max") g.x_max = parse_double(value);
    else if (key == "theta_min") g.theta_min = parse_double(value);
    else if (key == "theta_max") g.theta_max = parse_double(value);
    else if (key == "n_x") g.n_x = static_cast<int>(parse_int(value));
    else if (key == "n_theta") g.n_theta = static_cast<int>(parse_int(value));
    else if (key == "label") {
      if (value != "none") label = QuantumState::parse(value);
    } else {
      throw FormatError("unknown header field '" + std::string(key) + "'");
    }
    ++seen;
  }
  if (seen < 6) throw FormatError("incomplete tomogram header");
  g.validate();

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(g.n_x) * static_cast<std::size_t>(g.n_theta));
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != static_cast<std::size_t>(g.n_x)) {
      throw FormatError("row " + std::to_string(rows) + " has " + std::to_string(cells.size()) +
                        " values, expected " + std::to_string(g.n_x));
    }
    for (auto c : cells) values.push_back(parse_double(c));
    ++rows;
  }
  if (rows != g.n_theta) throw FormatError("expected " + std::to_string(g.n_theta) + " rows");
  return Tomogram(g, std::move(values), label);
}

void save_tomogram_csv(const std::string& path, const Tomogram& t) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  write_tomogram_csv(out, t);
}

Tomogram load_tomogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  try {
    return read_tomogram_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace tomoforge
