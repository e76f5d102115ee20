#pragma once

#include <iosfwd>
#include <string>

#include "tomoforge/nn/wgan.hpp"

namespace tomoforge::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Little-endian binary: magic, version, colormap, epochs, then for each of
/// generator and critic its config (scale, input shape, layer specs) followed
/// by parameter arrays and normalization buffers as 64-bit reals.
void write_checkpoint(std::ostream& out, const TrainedModel& model);
TrainedModel read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const TrainedModel& model);
TrainedModel load_checkpoint(const std::string& path);

}  // namespace tomoforge::nn
