#pragma once

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tomoforge/quadrature_pdf.hpp"
#include "tomoforge/states.hpp"

namespace tomoforge {

/// Equispaced (X_theta, theta) partition. Samples sit at bin centers:
/// x_j = x_min + (j + 1/2) dx and theta_i = theta_min + (i + 1/2) dtheta.
struct TomogramGrid {
  double x_min = -5.0;
  double x_max = 5.0;
  double theta_min = -std::numbers::pi;
  double theta_max = std::numbers::pi;
  int n_x = 128;
  int n_theta = 128;

  static TomogramGrid canonical() { return {}; }
  /// n x n grid on [-half_width, half_width] x [-pi, pi].
  static TomogramGrid square(int n, double half_width = 5.0);

  void validate() const;
  double dx() const { return (x_max - x_min) / n_x; }
  double dtheta() const { return (theta_max - theta_min) / n_theta; }
  double x(int j) const { return x_min + (j + 0.5) * dx(); }
  double theta(int i) const { return theta_min + (i + 0.5) * dtheta(); }
  std::vector<double> x_values() const;
  /// True when the theta range covers a full period, so rows wrap around.
  bool periodic() const;

  bool operator==(const TomogramGrid&) const = default;
};

/// w(X_theta, theta) sampled on a grid; row i holds theta_i.
class Tomogram {
 public:
  Tomogram() = default;
  explicit Tomogram(TomogramGrid grid, std::optional<QuantumState> label = std::nullopt);
  Tomogram(TomogramGrid grid, std::vector<double> values,
           std::optional<QuantumState> label = std::nullopt);

  const TomogramGrid& grid() const { return grid_; }
  const std::optional<QuantumState>& label() const { return label_; }
  void set_label(std::optional<QuantumState> label) { label_ = std::move(label); }

  double& at(int i, int j) { return values_[index(i, j)]; }
  double at(int i, int j) const { return values_[index(i, j)]; }
  std::span<const double> row(int i) const;
  std::span<double> row(int i);
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double max_value() const;

  /// Density at an arbitrary theta. Rows are taken verbatim when theta sits on
  /// a row center, otherwise the two neighbouring rows are linearly
  /// interpolated (wrapping around for periodic grids). The result is not
  /// normalized.
  QuadraturePdf slice(double theta) const;

  /// Trapezoid integral of every row.
  std::vector<double> row_integrals() const;

  bool operator==(const Tomogram&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_.n_x) +
           static_cast<std::size_t>(j);
  }

  TomogramGrid grid_;
  std::vector<double> values_;
  std::optional<QuantumState> label_;
};

/// values[i][j] = w(x_j, theta_i) for the given state.
Tomogram synthesize(const QuantumState& state, const TomogramGrid& grid = TomogramGrid::canonical(),
                    const FockBasisCutoff& cutoff = {});

enum class NoiseModel { UniformA, GaussianB };

std::string to_string(NoiseModel model);
NoiseModel noise_model_from_string(const std::string& text);

/// Multiplicative measurement-error model applied to a random subset of grid
/// points: (a) 1 + U(-eps, eps), (b) 1 + N(0, eps^2).
struct NoiseSpec {
  NoiseModel model = NoiseModel::GaussianB;
  double epsilon = 0.25;
  double fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  /// floor(fraction * total) points are perturbed.
  std::size_t affected_points(std::size_t total) const;
  bool operator==(const NoiseSpec&) const = default;
};

/// Perturbs exactly spec.affected_points() distinct grid points chosen with
/// the seed. Negative results are clipped to zero; rows are not renormalized.
/// `touched`, when given, receives the flat indices of the perturbed points.
Tomogram apply_noise(const Tomogram& t, const NoiseSpec& spec,
                     std::vector<std::size_t>* touched = nullptr);

/// CSV: one header line with the grid metadata, then n_theta rows of n_x values.
void write_tomogram_csv(std::ostream& out, const Tomogram& t);
Tomogram read_tomogram_csv(std::istream& in);
void save_tomogram_csv(const std::string& path, const Tomogram& t);
Tomogram load_tomogram_csv(const std::string& path);

}  // namespace tomoforge
