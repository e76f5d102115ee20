#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomoforge/colormap.hpp"
#include "tomoforge/states.hpp"
#include "tomoforge/tomogram.hpp"

namespace tomoforge {

inline constexpr int kCopiesPerState = 16;
inline constexpr int kCopiesPerSet = 4;
inline constexpr double kNoiseFractions[] = {0.025, 0.05, 0.075};

struct DatasetItem {
  TomogramImage image;
  QuantumState state;
  std::optional<NoiseSpec> noise;  // absent for clean copies
  int copy = 0;                    // 0..15 within the state
  std::string file;                // relative path once saved
};

struct TrainingDataset {
  std::vector<DatasetItem> items;
  ColormapId colormap = ColormapId::SequentialLinear;
  TomogramGrid grid;
};

/// 16 images per state. Without a noise template all copies are clean;
/// with one, copies 0-3 are clean and copies 4-15 form three sets of four
/// identical images at the fractions 2.5%, 5% and 7.5%. The template's
/// fraction is ignored and each set draws its own seed from the template seed.
TrainingDataset assemble_dataset(const std::vector<QuantumState>& states,
                                 const std::optional<NoiseSpec>& noise_template, ColormapId colormap,
                                 const TomogramGrid& grid = TomogramGrid::canonical(),
                                 const FockBasisCutoff& cutoff = {});

/// JSON array of item records (file, state, noise, copy, colormap).
nlohmann::json manifest_json(const TrainingDataset& ds);

/// Writes item_NNNN.png files and manifest.json into `dir` (created if missing).
void save_dataset(const std::string& dir, TrainingDataset& ds);
TrainingDataset load_dataset(const std::string& dir);

}  // namespace tomoforge
