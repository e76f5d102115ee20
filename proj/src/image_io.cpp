#include "tomoforge/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "tomoforge/error.hpp"
#include "tomoforge/text.hpp"

namespace tomoforge {

namespace {

constexpr const char* kColormapKey = "tomoforge-colormap";
constexpr const char* kVmaxKey = "tomoforge-vmax";

bool ends_with(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[s.size() - suffix.size() + i])) != suffix[i]) {
      return false;
    }
  }
  return true;
}

void check_image(const TomogramImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw ArgumentError("image dimensions do not match its pixel buffer");
  }
}

// Reads one whitespace-delimited PPM header token, collecting comments.
std::string ppm_token(std::istream& in, std::vector<std::string>& comments) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      comments.emplace_back(trim(line));
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

struct PngFile {
  FILE* f = nullptr;
  ~PngFile() {
    if (f) std::fclose(f);
  }
};

}  // namespace

void save_ppm(const std::string& path, const TomogramImage& img) {
  check_image(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << "P6\n# " << kColormapKey << '=' << to_string(img.colormap) << '\n'
      << "# " << kVmaxKey << '=' << format_double(img.v_max) << '\n'
      << img.width << ' ' << img.height << "\n255\n";
  for (const Rgb& p : img.pixels) {
    const char bytes[3] = {char(p.r), char(p.g), char(p.b)};
    out.write(bytes, 3);
  }
  if (!out) throw FormatError("failed writing '" + path + "'");
}

TomogramImage load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<std::string> comments;
  if (ppm_token(in, comments) != "P6") throw FormatError("'" + path + "' is not a binary PPM");
  TomogramImage img;
  img.width = parse_int(ppm_token(in, comments));
  img.height = parse_int(ppm_token(in, comments));
  if (parse_int(ppm_token(in, comments)) != 255) throw FormatError("only 8-bit PPM is supported");
  if (img.width <= 0 || img.height <= 0) throw FormatError("bad PPM dimensions");

  bool have_cmap = false, have_vmax = false;
  for (const auto& c : comments) {
    const auto eq = c.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = c.substr(0, eq), value = c.substr(eq + 1);
    if (key == kColormapKey) {
      img.colormap = colormap_from_string(value);
      have_cmap = true;
    } else if (key == kVmaxKey) {
      img.v_max = parse_double(value);
      have_vmax = true;
    }
  }
  if (!have_cmap || !have_vmax) throw FormatError("'" + path + "' lacks colormap metadata");

  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  std::vector<char> raw(img.pixels.size() * 3);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw FormatError("'" + path + "' is truncated");
  }
  for (std::size_t k = 0; k < img.pixels.size(); ++k) {
    img.pixels[k] = Rgb{std::uint8_t(raw[3 * k]), std::uint8_t(raw[3 * k + 1]), std::uint8_t(raw[3 * k + 2])};
  }
  return img;
}

void save_png(const std::string& path, const TomogramImage& img) {
  check_image(img);
  PngFile file;
  file.f = std::fopen(path.c_str(), "wb");
  if (!file.f) throw FormatError("cannot open '" + path + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw FormatError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("failed writing '" + path + "'");
  }
  png_init_io(png, file.f);
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

  std::string cmap = to_string(img.colormap);
  std::string vmax = format_double(img.v_max);
  png_text text[2]{};
  text[0].compression = PNG_TEXT_COMPRESSION_NONE;
  text[0].key = const_cast<char*>(kColormapKey);
  text[0].text = cmap.data();
  text[1].compression = PNG_TEXT_COMPRESSION_NONE;
  text[1].key = const_cast<char*>(kVmaxKey);
  text[1].text = vmax.data();
  png_set_text(png, info, text, 2);

  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(img.width) * 3);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const Rgb p = img.at(r, c);
      row[3 * c] = p.r;
      row[3 * c + 1] = p.g;
      row[3 * c + 2] = p.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

TomogramImage load_png(const std::string& path) {
  PngFile file;
  file.f = std::fopen(path.c_str(), "rb");
  if (!file.f) throw FormatError("cannot open '" + path + "'");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.f) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("'" + path + "' is not a PNG file");
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError("libpng initialization failed");
  }
  // Everything with a destructor lives above the setjmp.
  TomogramImage img;
  std::vector<png_byte> row;
  std::string cmap, vmax;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("failed reading '" + path + "'");
  }
  png_init_io(png, file.f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  row.resize(png_get_rowbytes(png, info));
  for (int r = 0; r < img.height; ++r) {
    png_read_row(png, row.data(), nullptr);
    for (int c = 0; c < img.width; ++c) {
      img.at(r, c) = Rgb{row[3 * c], row[3 * c + 1], row[3 * c + 2]};
    }
  }
  png_read_end(png, info);

  png_textp text = nullptr;
  int n_text = 0;
  png_get_text(png, info, &text, &n_text);
  for (int i = 0; i < n_text; ++i) {
    const std::string_view key = text[i].key;
    if (key == kColormapKey) {
      cmap = text[i].text;
    } else if (key == kVmaxKey) {
      vmax = text[i].text;
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (cmap.empty() || vmax.empty()) throw FormatError("'" + path + "' lacks colormap metadata");
  img.colormap = colormap_from_string(cmap);
  img.v_max = parse_double(vmax);
  return img;
}

void save_image(const std::string& path, const TomogramImage& img) {
  if (ends_with(path, ".png")) return save_png(path, img);
  if (ends_with(path, ".ppm")) return save_ppm(path, img);
  throw ArgumentError("unsupported image extension in '" + path + "' (use .png or .ppm)");
}

TomogramImage load_image(const std::string& path) {
  if (ends_with(path, ".png")) return load_png(path);
  if (ends_with(path, ".ppm")) return load_ppm(path);
  throw ArgumentError("unsupported image extension in '" + path + "' (use .png or .ppm)");
}

}  // namespace tomoforge
