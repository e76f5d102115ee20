#include "tomoforge/metrics.hpp"

#include <cmath>
#include <numeric>

#include "tomoforge/error.hpp"

namespace tomoforge {

std::string to_string(EstimateKind kind) {
  return kind == EstimateKind::PdfW1 ? "pdf-w1" : "critic-duality";
}

std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("x and y lengths differ");
  std::vector<double> c(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) c[i] = c[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return c;
}

double w1_pdf(const QuadraturePdf& f, const QuadraturePdf& g) {
  if (!f.normalized || !g.normalized) throw ContractError("W1 needs normalized pdfs");
  if (f.x.size() != g.x.size() || f.p.size() != f.x.size() || g.p.size() != g.x.size()) {
    throw ArgumentError("W1 needs both pdfs on the same grid");
  }
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    if (std::abs(f.x[i] - g.x[i]) > 1e-12 * std::max(1.0, std::abs(f.x[i]))) {
      throw ArgumentError("W1 needs both pdfs on the same grid");
    }
  }
  const auto F = cumulative_trapezoid(f.x, f.p);
  const auto G = cumulative_trapezoid(g.x, g.p);
  std::vector<double> d(F.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(F[i] - G[i]);
  return trapezoid(f.x, d);
}

double critic_duality_gap(std::span<const double> real_scores, std::span<const double> fake_scores) {
  if (real_scores.empty() || fake_scores.empty()) throw ArgumentError("duality gap needs nonempty batches");
  const double r = std::accumulate(real_scores.begin(), real_scores.end(), 0.0) / real_scores.size();
  const double f = std::accumulate(fake_scores.begin(), fake_scores.end(), 0.0) / fake_scores.size();
  return r - f;
}

}  // namespace tomoforge
