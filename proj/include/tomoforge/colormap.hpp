#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tomoforge/quadrature_pdf.hpp"
#include "tomoforge/tomogram.hpp"

namespace tomoforge {

enum class ColormapId { SequentialLinear, Nonlinear, NonlinearSequential };

std::string to_string(ColormapId id);
ColormapId colormap_from_string(const std::string& text);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

double rgb_distance(Rgb a, Rgb b);

struct LutEntry {
  double breakpoint = 0.0;  // value (relative to v_max) this color stands for
  Rgb rgb;
};

/// Ordered value -> color table. Encoding rounds a value to the nearest
/// breakpoint; decoding returns that breakpoint, so black decodes to exactly 0.
class ColorLut {
 public:
  explicit ColorLut(std::vector<LutEntry> entries);

  std::size_t size() const { return entries_.size(); }
  const LutEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<LutEntry>& entries() const { return entries_; }

  /// Index of the breakpoint nearest to u in [0, 1]; ties go to the lower entry.
  std::size_t quantize(double u) const;
  /// Nearest entry in Euclidean RGB distance; ties go to the lower entry.
  std::size_t nearest(Rgb c, double* distance = nullptr) const;

  /// Largest gap between consecutive breakpoints.
  double widest_bin() const;
  double min_color_distance() const { return min_color_distance_; }
  /// Pixels further than this from every entry are foreign.
  double foreign_threshold() const { return 0.5 * min_color_distance_; }

 private:
  std::vector<LutEntry> entries_;
  double min_color_distance_ = 0.0;
};

ColorLut build_lut(ColormapId id);
/// Process-wide immutable instance of build_lut(id).
const ColorLut& lut(ColormapId id);

/// Writes "breakpoint,R,G,B" rows.
void write_lut_csv(std::ostream& out, const ColorLut& table);

/// RGB raster of a tomogram; row 0 holds theta_min.
struct TomogramImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // height x width, row-major
  ColormapId colormap = ColormapId::SequentialLinear;
  double v_max = 1.0;

  Rgb& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  Rgb at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  bool operator==(const TomogramImage&) const = default;
};

/// Maps every value v to the entry nearest v / v_max. Throws DegenerateError
/// on an all-zero tomogram.
TomogramImage encode(const Tomogram& t, ColormapId id);

enum class DecodeMode {
  Strict,   // foreign pixels raise ForeignPixelError
  Nearest,  // every pixel snaps to its nearest entry; foreign pixels are counted
};

struct DecodeResult {
  Tomogram tomogram;
  std::size_t foreign_pixels = 0;
};

/// Inverse of encode: each pixel becomes its entry's breakpoint times v_max.
DecodeResult decode(const TomogramImage& img, const TomogramGrid& grid,
                    DecodeMode mode = DecodeMode::Strict);
/// Uses the default ranges with the image dimensions.
Tomogram decode(const TomogramImage& img);

/// Windowing function f(x) = exp(-((x - x0)/L)^(2s)).
struct Regulator {
  double x0 = 0.0;
  double L = 2.3;
  int s = 5;

  double operator()(double x) const;
  void validate() const;
};

/// Multiplies by the regulator and renormalizes.
QuadraturePdf apply_regulator(const QuadraturePdf& pdf, const Regulator& r);

}  // namespace tomoforge
