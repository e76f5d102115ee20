#include "tomoforge/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tomoforge/error.hpp"
#include "tomoforge/image_io.hpp"
#include "tomoforge/random.hpp"

namespace tomoforge {

namespace {

nlohmann::json noise_json(const std::optional<NoiseSpec>& spec) {
  if (!spec) return nullptr;
  return {{"model", to_string(spec->model)},
          {"epsilon", spec->epsilon},
          {"fraction", spec->fraction},
          {"seed", spec->seed}};
}

std::optional<NoiseSpec> noise_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  NoiseSpec s;
  s.model = noise_model_from_string(j.at("model").get<std::string>());
  s.epsilon = j.at("epsilon").get<double>();
  s.fraction = j.at("fraction").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

TrainingDataset assemble_dataset(const std::vector<QuantumState>& states,
                                 const std::optional<NoiseSpec>& noise_template, ColormapId colormap,
                                 const TomogramGrid& grid, const FockBasisCutoff& cutoff) {
  if (states.empty()) throw ArgumentError("a dataset needs at least one state");
  TrainingDataset ds;
  ds.colormap = colormap;
  ds.grid = grid;
  ds.items.reserve(states.size() * kCopiesPerState);

  for (std::size_t s = 0; s < states.size(); ++s) {
    const Tomogram clean = synthesize(states[s], grid, cutoff);
    const TomogramImage clean_image = encode(clean, colormap);
    const int clean_copies = noise_template ? kCopiesPerSet : kCopiesPerState;
    int copy = 0;
    for (; copy < clean_copies; ++copy) {
      ds.items.push_back({clean_image, states[s], std::nullopt, copy, {}});
    }
    if (!noise_template) continue;
    for (std::size_t set = 0; set < std::size(kNoiseFractions); ++set) {
      NoiseSpec spec = *noise_template;
      spec.fraction = kNoiseFractions[set];
      spec.seed = mix_seed(noise_template->seed, s * std::size(kNoiseFractions) + set);
      const TomogramImage noisy = encode(apply_noise(clean, spec), colormap);
      for (int c = 0; c < kCopiesPerSet; ++c, ++copy) {
        ds.items.push_back({noisy, states[s], spec, copy, {}});
      }
    }
  }
  return ds;
}

nlohmann::json manifest_json(const TrainingDataset& ds) {
  auto items = nlohmann::json::array();
  for (const auto& item : ds.items) {
    items.push_back({{"file", item.file},
                     {"state", item.state.to_string()},
                     {"noise", noise_json(item.noise)},
                     {"copy", item.copy},
                     {"colormap", to_string(ds.colormap)}});
  }
  return items;
}

void save_dataset(const std::string& dir, TrainingDataset& ds) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "item_%04zu.png", i);
    ds.items[i].file = name;
    save_png((std::filesystem::path(dir) / name).string(), ds.items[i].image);
  }
  std::ofstream out(std::filesystem::path(dir) / "manifest.json");
  if (!out) throw FormatError("cannot write manifest in '" + dir + "'");
  out << manifest_json(ds).dump(2) << '\n';
}

TrainingDataset load_dataset(const std::string& dir) {
  const auto manifest_path = std::filesystem::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw FormatError("no manifest.json in '" + dir + "'");
  TrainingDataset ds;
  try {
    const auto j = nlohmann::json::parse(in);
    if (!j.is_array() || j.empty()) throw FormatError("dataset manifest must be a nonempty array");
    for (const auto& rec : j) {
      DatasetItem item;
      item.file = rec.at("file").get<std::string>();
      item.state = QuantumState::parse(rec.at("state").get<std::string>());
      item.noise = noise_from_json(rec.at("noise"));
      item.copy = rec.at("copy").get<int>();
      ds.colormap = colormap_from_string(rec.at("colormap").get<std::string>());
      item.image = load_image((std::filesystem::path(dir) / item.file).string());
      ds.items.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed dataset manifest: " + std::string(e.what()));
  }
  ds.grid = TomogramGrid::canonical();
  ds.grid.n_x = ds.items.front().image.width;
  ds.grid.n_theta = ds.items.front().image.height;
  return ds;
}

}  // namespace tomoforge
