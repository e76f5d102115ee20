#pragma once

#include <string>

#include "tomoforge/colormap.hpp"

namespace tomoforge {

// Both formats carry the colormap name and v_max as metadata (a PPM comment
// and PNG tEXt chunks), so a written image can be decoded without side files.
void save_ppm(const std::string& path, const TomogramImage& img);
TomogramImage load_ppm(const std::string& path);

void save_png(const std::string& path, const TomogramImage& img);
TomogramImage load_png(const std::string& path);

/// Dispatches on the extension (.png or .ppm).
void save_image(const std::string& path, const TomogramImage& img);
TomogramImage load_image(const std::string& path);

}  // namespace tomoforge
