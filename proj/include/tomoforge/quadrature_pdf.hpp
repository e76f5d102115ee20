#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tomoforge/states.hpp"

namespace tomoforge {

/// One tomographic slice: a density sampled on a sorted x grid at fixed theta.
struct QuadraturePdf {
  double theta = 0.0;
  std::vector<double> x;
  std::vector<double> p;
  bool normalized = false;
};

/// Trapezoid integral of y over the sample points x.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Scales the density to unit trapezoid integral. Throws DegenerateError on a
/// zero (or non-finite) integral.
QuadraturePdf normalize_pdf(QuadraturePdf pdf);

/// w(X_theta, theta) = |sum_n c_n exp(-i n theta) psi_n(X)|^2 on `x_grid`.
/// Throws CutoffError when the truncated Fock expansion cannot hold the state
/// and ArgumentError when the grid is not strictly increasing.
QuadraturePdf quadrature_pdf(const QuantumState& state, double theta,
                             std::span<const double> x_grid, const FockBasisCutoff& cutoff = {});

/// CSV with a "# pdf theta=<theta>" header line, an "x,p" line, then one row per sample.
void write_pdf_csv(std::ostream& out, const QuadraturePdf& pdf);
QuadraturePdf read_pdf_csv(std::istream& in);
void save_pdf_csv(const std::string& path, const QuadraturePdf& pdf);
QuadraturePdf load_pdf_csv(const std::string& path);

}  // namespace tomoforge
