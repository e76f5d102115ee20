#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tomoforge/colormap.hpp"
#include "tomoforge/dataset.hpp"
#include "tomoforge/nn/adam.hpp"
#include "tomoforge/nn/network.hpp"

namespace tomoforge::nn {

enum class Lipschitz { WeightClip, GradientPenalty };

std::string to_string(Lipschitz l);
Lipschitz lipschitz_from_string(const std::string& text);

struct TrainConfig {
  int critic_steps_per_gen = 5;
  int batch_size = 64;
  AdamConfig adam;
  long epochs = 0;
  Lipschitz lipschitz = Lipschitz::WeightClip;
  double clip = 0.01;     // WeightClip bound c
  double lambda = 10.0;   // GradientPenalty weight
  double fd_step = 1e-4;  // finite-difference step of the penalty's weight gradient
  std::uint64_t seed = 0;

  /// Desk-scale defaults: batch 16, everything else as above.
  static TrainConfig desk();
  void validate() const;
};

struct TrainLogRow {
  long epoch = 0;
  double critic_loss = 0.0;
  double gen_loss = 0.0;
  double duality_gap = 0.0;
  double lipschitz_diag = 0.0;  // mean |grad_x D| at interpolates
  double wallclock_s = 0.0;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;

  void write_csv(std::ostream& out) const;
  static TrainLog read_csv(std::istream& in);
  /// Equality of every column except wallclock_s.
  bool same_trajectory(const TrainLog& other) const;
};

struct TrainedModel {
  Network generator;
  Network critic;
  ColormapId colormap = ColormapId::SequentialLinear;
  long epochs_trained = 0;
};

/// Fresh networks initialized from seeds derived from `seed`.
TrainedModel init_model(const NetworkConfig& gen_cfg, const NetworkConfig& critic_cfg, std::uint64_t seed,
                        ColormapId colormap = ColormapId::SequentialLinear);

/// Pixels mapped to [-1, 1] as p / 127.5 - 1, channels in RGB order.
Tensor4 images_to_tensor(const std::vector<const TomogramImage*>& images);
/// Sample n of a (N, 3, H, W) tensor mapped back to 8-bit RGB.
TomogramImage tensor_to_image(const Tensor4& t, int n, ColormapId colormap);

/// Mean over the batch of |grad_x D(x)|. Clobbers the critic's parameter gradients.
double input_gradient_norm(Network& critic, const Tensor4& x);

using TrainObserver = std::function<void(const TrainLogRow&)>;

struct TrainResult {
  TrainedModel model;
  TrainLog log;
};

/// Adversarial training: each epoch runs critic_steps_per_gen critic updates
/// followed by one generator update. Throws DivergenceError on non-finite losses.
TrainResult train(const TrainingDataset& dataset, const NetworkConfig& gen_cfg, const NetworkConfig& critic_cfg,
                  const TrainConfig& tc, const TrainObserver& observer = {});

/// `count` generator outputs (Eval mode) from standard Gaussian latents.
std::vector<TomogramImage> sample(TrainedModel& model, int count, std::uint64_t seed);

}  // namespace tomoforge::nn
