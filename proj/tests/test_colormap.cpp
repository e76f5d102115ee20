#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tomoforge/colormap.hpp"
#include "tomoforge/error.hpp"
#include "tomoforge/image_io.hpp"
#include "tomoforge/random.hpp"
#include "tomoforge/tomogram.hpp"

using namespace tomoforge;
namespace fs = std::filesystem;

namespace {

const ColormapId kAll[] = {ColormapId::SequentialLinear, ColormapId::Nonlinear, ColormapId::NonlinearSequential};

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("tomoforge_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Lut, SizesAndOrdering) {
  EXPECT_EQ(lut(ColormapId::SequentialLinear).size(), 256u);
  EXPECT_EQ(lut(ColormapId::Nonlinear).size(), 45u);
  EXPECT_EQ(lut(ColormapId::NonlinearSequential).size(), 256u);
  for (auto id : kAll) {
    const auto& t = lut(id);
    EXPECT_EQ(t[0].breakpoint, 0.0);
    EXPECT_EQ(t[0].rgb, (Rgb{0, 0, 0}));
    EXPECT_EQ(t[t.size() - 1].breakpoint, 1.0);
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GT(t[i].breakpoint, t[i - 1].breakpoint);
    EXPECT_GT(t.min_color_distance(), 0.0);
  }
}

TEST(Lut, NonlinearConcentratesEntriesAtLowValues) {
  auto below = [](const ColorLut& t) {
    int n = 0;
    for (const auto& e : t.entries()) n += e.breakpoint <= 0.28 ? 1 : 0;
    return n;
  };
  EXPECT_EQ(below(lut(ColormapId::Nonlinear)), 30);
  EXPECT_EQ(below(lut(ColormapId::NonlinearSequential)), 128);
  EXPECT_LT(below(lut(ColormapId::SequentialLinear)), 80);
}

TEST(Lut, QuantizeSnapsToNearestWithLowerTies) {
  const auto& t = lut(ColormapId::SequentialLinear);
  EXPECT_EQ(t.quantize(0.0), 0u);
  EXPECT_EQ(t.quantize(1.0), 255u);
  EXPECT_EQ(t.quantize(2.0), 255u);
  EXPECT_EQ(t.quantize(-1.0), 0u);
  EXPECT_EQ(t.quantize(0.5 / 255.0), 0u);
  EXPECT_EQ(t.quantize(0.5000001 / 255.0), 1u);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double u = rng.uniform();
    const auto k = t.quantize(u);
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_LE(std::abs(t[k].breakpoint - u), std::abs(t[i].breakpoint - u) + 1e-15);
    }
  }
}

TEST(Lut, RejectsInvalidTables) {
  EXPECT_THROW(ColorLut(std::vector<LutEntry>{{0.0, Rgb{}}}), ArgumentError);
  EXPECT_THROW(ColorLut({{0.0, {0, 0, 0}}, {0.5, {1, 1, 1}}}), ArgumentError);
  EXPECT_THROW(ColorLut({{0.0, {0, 0, 0}}, {1.0, {0, 0, 0}}}), ArgumentError);
  EXPECT_THROW(ColorLut({{0.0, {0, 0, 0}}, {0.0, {1, 0, 0}}, {1.0, {2, 0, 0}}}), ArgumentError);
  EXPECT_THROW(colormap_from_string("viridis"), ArgumentError);
}

TEST(Encode, DecodeErrorBoundedByHalfWidestBin) {
  const auto t = synthesize(QuantumState::photon_added(1.0), TomogramGrid::square(48));
  for (auto id : kAll) {
    const auto img = encode(t, id);
    const auto back = decode(img, t.grid()).tomogram;
    const double bound = 0.5 * lut(id).widest_bin() * img.v_max + 1e-12;
    for (std::size_t k = 0; k < t.values().size(); ++k) {
      EXPECT_LE(std::abs(back.values()[k] - t.values()[k]), bound);
    }
    EXPECT_EQ(encode(back, id).pixels, img.pixels);
  }
}

TEST(Encode, ZeroMapsToBlackAndMaxToTop) {
  Tomogram t(TomogramGrid::square(4));
  t.at(1, 2) = 3.0;
  const auto img = encode(t, ColormapId::SequentialLinear);
  EXPECT_EQ(img.v_max, 3.0);
  EXPECT_EQ(img.at(0, 0), (Rgb{0, 0, 0}));
  EXPECT_EQ(img.at(1, 2), lut(ColormapId::SequentialLinear)[255].rgb);
  EXPECT_THROW(encode(Tomogram(TomogramGrid::square(4)), ColormapId::Nonlinear), DegenerateError);
}

TEST(Decode, ForeignPixelStrictThrowsNearestCounts) {
  const auto t = synthesize(QuantumState::fock(1), TomogramGrid::square(16));
  auto img = encode(t, ColormapId::Nonlinear);
  img.at(3, 4) = Rgb{1, 254, 2};
  EXPECT_THROW(decode(img, t.grid(), DecodeMode::Strict), ForeignPixelError);
  const auto res = decode(img, t.grid(), DecodeMode::Nearest);
  EXPECT_EQ(res.foreign_pixels, 1u);
}

TEST(Decode, WrongColormapIsForeign) {
  const auto t = synthesize(QuantumState::fock(1), TomogramGrid::square(16));
  auto img = encode(t, ColormapId::SequentialLinear);
  img.colormap = ColormapId::Nonlinear;
  EXPECT_THROW(decode(img, t.grid()), ForeignPixelError);
}

TEST(Decode, GridMustMatchImage) {
  const auto t = synthesize(QuantumState::fock(1), TomogramGrid::square(16));
  const auto img = encode(t, ColormapId::SequentialLinear);
  EXPECT_THROW(decode(img, TomogramGrid::square(8)), ArgumentError);
}

TEST(Regulator, WindowShapeAndRenormalization) {
  Regulator r;
  EXPECT_DOUBLE_EQ(r(0.0), 1.0);
  EXPECT_NEAR(r(2.3), std::exp(-1.0), 1e-15);
  EXPECT_LT(r(4.0), 1e-10);
  const auto g = TomogramGrid::square(128, 7.0);
  const auto t = synthesize(QuantumState::fock(0), g);
  const auto pdf = apply_regulator(t.slice(0.0), r);
  EXPECT_TRUE(pdf.normalized);
  EXPECT_NEAR(trapezoid(pdf.x, pdf.p), 1.0, 1e-12);
  Regulator bad;
  bad.L = 0;
  EXPECT_THROW(bad.validate(), ArgumentError);
}

TEST(ImageIo, PngAndPpmRoundTrip) {
  const auto dir = temp_dir("imageio");
  const auto t = synthesize(QuantumState::coherent(0.7), TomogramGrid::square(20));
  for (auto id : kAll) {
    const auto img = encode(t, id);
    for (const char* ext : {".png", ".ppm"}) {
      const auto path = (dir / (to_string(id) + ext)).string();
      save_image(path, img);
      EXPECT_EQ(load_image(path), img) << path;
    }
  }
}

TEST(ImageIo, MissingMetadataAndGarbageAreFormatErrors) {
  const auto dir = temp_dir("imageio_bad");
  const auto garbage = (dir / "x.png").string();
  {
    std::ofstream out(garbage);
    out << "not an image";
  }
  EXPECT_THROW(load_image(garbage), FormatError);
  const auto bare = (dir / "bare.ppm").string();
  {
    std::ofstream out(bare, std::ios::binary);
    out << "P6\n1 1\n255\n" << char(0) << char(0) << char(0);
  }
  EXPECT_THROW(load_image(bare), FormatError);
  EXPECT_THROW(load_image((dir / "missing.png").string()), FormatError);
}
