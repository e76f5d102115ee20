#pragma once

#include <vector>

#include "tomoforge/nn/layers.hpp"

namespace tomoforge::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double eps = 1e-8;
};

/// First and second moment estimates for a fixed list of parameters.
class Adam {
 public:
  Adam(std::vector<Param*> params, AdamConfig cfg = {});

  /// One bias-corrected update from the gradients currently held in the params.
  void step();
  long steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Param*> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
};

}  // namespace tomoforge::nn
