#include "tomoforge/colormap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "tomoforge/error.hpp"
#include "tomoforge/text.hpp"

namespace tomoforge {

namespace {

std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Black -> red -> yellow -> white in 256 steps of 3 levels per channel.
Rgb hot_color(int k) {
  return Rgb{clamp_byte(3.0 * k), clamp_byte(3.0 * k - 255.0), clamp_byte(3.0 * k - 510.0)};
}

std::vector<LutEntry> sequential_entries() {
  std::vector<LutEntry> e(256);
  for (int k = 0; k < 256; ++k) e[k] = {k / 255.0, hot_color(k)};
  return e;
}

// 30 disparate colors over [0, 0.28] with strictly increasing RGB code (black
// at 0, pink at 0.28), then 15 ramp colors pink -> yellow -> white over (0.28, 1].
std::vector<LutEntry> nonlinear_entries() {
  constexpr double kSplit = 0.28;
  std::vector<LutEntry> e;
  e.reserve(45);
  e.push_back({0.0, Rgb{0, 0, 0}});
  for (int k = 1; k < 29; ++k) {
    const Rgb c{clamp_byte(255.0 * k / 29.0), static_cast<std::uint8_t>((k * 89 + 31) % 224 + 16),
                static_cast<std::uint8_t>((k * 151 + 67) % 224 + 16)};
    e.push_back({kSplit * k / 29.0, c});
  }
  e.push_back({kSplit, Rgb{255, 192, 203}});
  for (int k = 1; k <= 15; ++k) {
    const double t = k / 15.0;
    Rgb c{255, 255, 0};
    if (t <= 0.5) {
      c.g = clamp_byte(192.0 + 126.0 * t);
      c.b = clamp_byte(203.0 - 406.0 * t);
    } else {
      c.b = clamp_byte(510.0 * (t - 0.5));
    }
    e.push_back({kSplit + (1.0 - kSplit) * t, c});
  }
  return e;
}

// The sequential ramp with half of its entries packed into [0, 0.28].
std::vector<LutEntry> nonlinear_sequential_entries() {
  constexpr double kSplit = 0.28;
  std::vector<LutEntry> e(256);
  for (int k = 0; k < 128; ++k) e[k] = {kSplit * k / 127.0, hot_color(k)};
  for (int k = 128; k < 256; ++k) e[k] = {kSplit + (1.0 - kSplit) * (k - 127) / 128.0, hot_color(k)};
  return e;
}

}  // namespace

std::string to_string(ColormapId id) {
  switch (id) {
    case ColormapId::SequentialLinear:
      return "seqlin";
    case ColormapId::Nonlinear:
      return "nonlinear";
    case ColormapId::NonlinearSequential:
      return "nonlinear-seq";
  }
  return {};
}

ColormapId colormap_from_string(const std::string& text) {
  if (text == "seqlin" || text == "sequential-linear") return ColormapId::SequentialLinear;
  if (text == "nonlinear" || text == "nlin") return ColormapId::Nonlinear;
  if (text == "nonlinear-seq" || text == "nonlinear-sequential") {
    return ColormapId::NonlinearSequential;
  }
  throw ArgumentError("unknown colormap '" + text + "' (expected seqlin, nonlinear or nonlinear-seq)");
}

double rgb_distance(Rgb a, Rgb b) {
  const double dr = double(a.r) - b.r, dg = double(a.g) - b.g, db = double(a.b) - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

ColorLut::ColorLut(std::vector<LutEntry> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) throw ArgumentError("a colormap needs at least two entries");
  if (entries_.front().breakpoint != 0.0 || entries_.back().breakpoint != 1.0) {
    throw ArgumentError("colormap breakpoints must run from 0 to 1");
  }
  min_color_distance_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && !(entries_[i].breakpoint > entries_[i - 1].breakpoint)) {
      throw ArgumentError("colormap breakpoints must be strictly increasing");
    }
    for (std::size_t j = 0; j < i; ++j) {
      min_color_distance_ = std::min(min_color_distance_, rgb_distance(entries_[i].rgb, entries_[j].rgb));
    }
  }
  if (min_color_distance_ == 0.0) throw ArgumentError("colormap colors must be distinct");
}

std::size_t ColorLut::quantize(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  const auto it = std::upper_bound(entries_.begin(), entries_.end(), u,
                                   [](double v, const LutEntry& e) { return v < e.breakpoint; });
  if (it == entries_.end()) return entries_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - entries_.begin());
  const std::size_t lo = hi - 1;
  return (entries_[hi].breakpoint - u < u - entries_[lo].breakpoint) ? hi : lo;
}

std::size_t ColorLut::nearest(Rgb c, double* distance) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double d = rgb_distance(c, entries_[i].rgb);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (distance) *distance = best_d;
  return best;
}

double ColorLut::widest_bin() const {
  double widest = 0.0;
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    widest = std::max(widest, entries_[i].breakpoint - entries_[i - 1].breakpoint);
  }
  return widest;
}

ColorLut build_lut(ColormapId id) {
  switch (id) {
    case ColormapId::SequentialLinear:
      return ColorLut(sequential_entries());
    case ColormapId::Nonlinear:
      return ColorLut(nonlinear_entries());
    case ColormapId::NonlinearSequential:
      return ColorLut(nonlinear_sequential_entries());
  }
  throw ArgumentError("unknown colormap id");
}

const ColorLut& lut(ColormapId id) {
  static const ColorLut seq = build_lut(ColormapId::SequentialLinear);
  static const ColorLut nonlinear = build_lut(ColormapId::Nonlinear);
  static const ColorLut nonlinear_seq = build_lut(ColormapId::NonlinearSequential);
  switch (id) {
    case ColormapId::SequentialLinear:
      return seq;
    case ColormapId::Nonlinear:
      return nonlinear;
    case ColormapId::NonlinearSequential:
      return nonlinear_seq;
  }
  throw ArgumentError("unknown colormap id");
}

void write_lut_csv(std::ostream& out, const ColorLut& table) {
  out << "breakpoint,R,G,B\n";
  for (const auto& e : table.entries()) {
    out << format_double(e.breakpoint) << ',' << int(e.rgb.r) << ',' << int(e.rgb.g) << ','
        << int(e.rgb.b) << '\n';
  }
}

TomogramImage encode(const Tomogram& t, ColormapId id) {
  const double v_max = t.max_value();
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw DegenerateError("cannot encode a tomogram without positive values");
  }
  const auto& table = lut(id);
  TomogramImage img;
  img.width = t.grid().n_x;
  img.height = t.grid().n_theta;
  img.colormap = id;
  img.v_max = v_max;
  img.pixels.resize(t.values().size());
  const auto values = t.values();
  for (std::size_t k = 0; k < values.size(); ++k) {
    img.pixels[k] = table[table.quantize(values[k] / v_max)].rgb;
  }
  return img;
}

DecodeResult decode(const TomogramImage& img, const TomogramGrid& grid, DecodeMode mode) {
  if (grid.n_x != img.width || grid.n_theta != img.height) {
    throw ArgumentError("image size does not match the decode grid");
  }
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw ArgumentError("image pixel buffer does not match its dimensions");
  }
  const auto& table = lut(img.colormap);
  const double threshold = table.foreign_threshold();
  DecodeResult result{Tomogram(grid), 0};
  auto values = result.tomogram.values();

  std::unordered_map<std::uint32_t, std::pair<std::size_t, double>> cache;
  for (std::size_t k = 0; k < img.pixels.size(); ++k) {
    const Rgb c = img.pixels[k];
    const std::uint32_t key = (std::uint32_t(c.r) << 16) | (std::uint32_t(c.g) << 8) | c.b;
    auto it = cache.find(key);
    if (it == cache.end()) {
      double d = 0.0;
      const std::size_t idx = table.nearest(c, &d);
      it = cache.emplace(key, std::make_pair(idx, d)).first;
    }
    const auto [idx, d] = it->second;
    if (d > threshold) {
      if (mode == DecodeMode::Strict) {
        throw ForeignPixelError("pixel (" + std::to_string(k / img.width) + ", " +
                                std::to_string(k % img.width) + ") is not a " +
                                to_string(img.colormap) + " color");
      }
      ++result.foreign_pixels;
    }
    values[k] = table[idx].breakpoint * img.v_max;
  }
  return result;
}

Tomogram decode(const TomogramImage& img) {
  TomogramGrid grid;
  grid.n_x = img.width;
  grid.n_theta = img.height;
  return decode(img, grid, DecodeMode::Strict).tomogram;
}

double Regulator::operator()(double x) const {
  const double z = (x - x0) / L;
  return std::exp(-std::pow(z * z, s));
}

void Regulator::validate() const {
  if (!(L > 0.0)) throw ArgumentError("regulator cut-off L must be positive");
  if (s < 1) throw ArgumentError("regulator exponent s must be a positive integer");
}

QuadraturePdf apply_regulator(const QuadraturePdf& pdf, const Regulator& r) {
  r.validate();
  QuadraturePdf out = pdf;
  for (std::size_t j = 0; j < out.p.size(); ++j) out.p[j] *= r(out.x[j]);
  out.normalized = false;
  return normalize_pdf(std::move(out));
}

}  // namespace tomoforge
