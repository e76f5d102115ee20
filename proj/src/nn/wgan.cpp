#include "tomoforge/nn/wgan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "tomoforge/error.hpp"
#include "tomoforge/metrics.hpp"
#include "tomoforge/random.hpp"
#include "tomoforge/text.hpp"

namespace tomoforge::nn {

namespace {

enum Stream : std::uint64_t { kGenInit = 1, kCriticInit, kData, kLatent, kInterp };

Tensor4 gaussian_latents(Rng& rng, int batch, int dim) {
  Tensor4 z({batch, dim, 1, 1});
  for (auto& v : z.values()) v = rng.normal();
  return z;
}

std::vector<double> scores(const Tensor4& out) { return out.values(); }

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

void require_finite(double v, const char* what, long epoch) {
  if (!std::isfinite(v)) {
    throw DivergenceError(std::string(what) + " became non-finite at epoch " + std::to_string(epoch), epoch);
  }
}

// Per-sample gradients of D at x: forward + backward with unit seeds.
Tensor4 input_gradients(Network& critic, const Tensor4& x) {
  const Tensor4 out = critic.forward(x, Mode::Train);
  return critic.backward(Tensor4(out.shape(), 1.0));
}

std::vector<double> per_sample_norms(const Tensor4& g) {
  const int batch = g.shape().n;
  const std::size_t per = g.size() / static_cast<std::size_t>(batch);
  std::vector<double> norms(static_cast<std::size_t>(batch));
  for (int n = 0; n < batch; ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i < per; ++i) s += g[n * per + i] * g[n * per + i];
    norms[static_cast<std::size_t>(n)] = std::sqrt(s);
  }
  return norms;
}

Tensor4 interpolates(const Tensor4& real, const Tensor4& fake, Rng& rng) {
  Tensor4 mix(real.shape());
  const int batch = real.shape().n;
  const std::size_t per = real.size() / static_cast<std::size_t>(batch);
  for (int n = 0; n < batch; ++n) {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < per; ++i) {
      const std::size_t k = n * per + i;
      mix[k] = u * real[k] + (1.0 - u) * fake[k];
    }
  }
  return mix;
}

}  // namespace

std::string to_string(Lipschitz l) { return l == Lipschitz::WeightClip ? "weight-clip" : "gradient-penalty"; }

Lipschitz lipschitz_from_string(const std::string& text) {
  if (text == "weight-clip" || text == "clip") return Lipschitz::WeightClip;
  if (text == "gradient-penalty" || text == "gp") return Lipschitz::GradientPenalty;
  throw ArgumentError("unknown Lipschitz mode '" + text + "' (expected weight-clip or gradient-penalty)");
}

TrainConfig TrainConfig::desk() {
  TrainConfig tc;
  tc.batch_size = 16;
  return tc;
}

void TrainConfig::validate() const {
  if (critic_steps_per_gen < 1) throw ArgumentError("critic_steps_per_gen must be at least 1");
  if (batch_size < 2) throw ArgumentError("batch_size must be at least 2");
  if (epochs < 0) throw ArgumentError("epochs must be nonnegative");
  if (!(clip > 0.0)) throw ArgumentError("clip must be positive");
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be nonnegative");
  if (!(fd_step > 0.0)) throw ArgumentError("fd_step must be positive");
}

void TrainLog::write_csv(std::ostream& out) const {
  out << "epoch,critic_loss,gen_loss,duality_gap,lipschitz_diag,wallclock_s\n";
  for (const auto& r : rows) {
    out << r.epoch << ',' << format_double(r.critic_loss) << ',' << format_double(r.gen_loss) << ','
        << format_double(r.duality_gap) << ',' << format_double(r.lipschitz_diag) << ','
        << format_double(r.wallclock_s) << '\n';
  }
}

TrainLog TrainLog::read_csv(std::istream& in) {
  TrainLog log;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "epoch,critic_loss,gen_loss,duality_gap,lipschitz_diag,wallclock_s") {
    throw FormatError("not a training log CSV");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 6) throw FormatError("training log row needs 6 fields");
    log.rows.push_back({static_cast<long>(parse_int(f[0])), parse_double(f[1]), parse_double(f[2]),
                        parse_double(f[3]), parse_double(f[4]), parse_double(f[5])});
  }
  return log;
}

bool TrainLog::same_trajectory(const TrainLog& other) const {
  if (rows.size() != other.rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = other.rows[i];
    if (a.epoch != b.epoch || a.critic_loss != b.critic_loss || a.gen_loss != b.gen_loss ||
        a.duality_gap != b.duality_gap || a.lipschitz_diag != b.lipschitz_diag) {
      return false;
    }
  }
  return true;
}

TrainedModel init_model(const NetworkConfig& gen_cfg, const NetworkConfig& critic_cfg, std::uint64_t seed,
                        ColormapId colormap) {
  Network g = build_generator(gen_cfg, mix_seed(seed, kGenInit));
  Network d = build_critic(critic_cfg, mix_seed(seed, kCriticInit));
  const Shape4 out = gen_cfg.layer_shapes().back();
  if (out.c != critic_cfg.in_c || out.h != critic_cfg.in_h || out.w != critic_cfg.in_w) {
    throw ArgumentError("generator output " + out.to_string() + " does not fit the critic input");
  }
  return TrainedModel{std::move(g), std::move(d), colormap, 0};
}

Tensor4 images_to_tensor(const std::vector<const TomogramImage*>& images) {
  if (images.empty()) throw ArgumentError("no images to convert");
  const int h = images.front()->height, w = images.front()->width;
  Tensor4 t({static_cast<int>(images.size()), 3, h, w});
  for (std::size_t n = 0; n < images.size(); ++n) {
    const TomogramImage& img = *images[n];
    if (img.height != h || img.width != w) throw ArgumentError("images in a batch must share one size");
    const int ni = static_cast<int>(n);
    double* r = t.plane(ni, 0);
    double* g = t.plane(ni, 1);
    double* b = t.plane(ni, 2);
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
      r[k] = img.pixels[k].r / 127.5 - 1.0;
      g[k] = img.pixels[k].g / 127.5 - 1.0;
      b[k] = img.pixels[k].b / 127.5 - 1.0;
    }
  }
  return t;
}

TomogramImage tensor_to_image(const Tensor4& t, int n, ColormapId colormap) {
  if (t.shape().c != 3) throw ArgumentError("image tensors need 3 channels");
  TomogramImage img;
  img.width = t.shape().w;
  img.height = t.shape().h;
  img.colormap = colormap;
  img.v_max = 1.0;
  img.pixels.resize(t.shape().plane());
  auto to_byte = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround((v + 1.0) * 127.5), 0L, 255L));
  };
  const double* r = t.plane(n, 0);
  const double* g = t.plane(n, 1);
  const double* b = t.plane(n, 2);
  for (std::size_t k = 0; k < img.pixels.size(); ++k) img.pixels[k] = Rgb{to_byte(r[k]), to_byte(g[k]), to_byte(b[k])};
  return img;
}

double input_gradient_norm(Network& critic, const Tensor4& x) {
  const auto norms = per_sample_norms(input_gradients(critic, x));
  critic.zero_grad();
  return mean(norms);
}

TrainResult train(const TrainingDataset& dataset, const NetworkConfig& gen_cfg, const NetworkConfig& critic_cfg,
                  const TrainConfig& tc, const TrainObserver& observer) {
  tc.validate();
  if (dataset.items.empty()) throw ArgumentError("training needs a nonempty dataset");
  for (const auto& item : dataset.items) {
    if (item.image.height != critic_cfg.in_h || item.image.width != critic_cfg.in_w) {
      throw ArgumentError("dataset images are " + std::to_string(item.image.height) + "x" +
                          std::to_string(item.image.width) + " but the critic expects " +
                          std::to_string(critic_cfg.in_h) + "x" + std::to_string(critic_cfg.in_w));
    }
  }

  TrainResult result{init_model(gen_cfg, critic_cfg, tc.seed, dataset.colormap), {}};
  Network& G = result.model.generator;
  Network& D = result.model.critic;
  Adam opt_g(G.params(), tc.adam);
  Adam opt_d(D.params(), tc.adam);

  Rng data_rng(mix_seed(tc.seed, kData));
  Rng latent_rng(mix_seed(tc.seed, kLatent));
  Rng interp_rng(mix_seed(tc.seed, kInterp));
  const int batch = tc.batch_size;
  const int latent = gen_cfg.in_c;
  const double inv_b = 1.0 / batch;
  const auto start = std::chrono::steady_clock::now();

  for (long epoch = 1; epoch <= tc.epochs; ++epoch) {
    TrainLogRow row;
    row.epoch = epoch;

    for (int step = 0; step < tc.critic_steps_per_gen; ++step) {
      std::vector<const TomogramImage*> picks(static_cast<std::size_t>(batch));
      for (auto& p : picks) p = &dataset.items[data_rng.below(dataset.items.size())].image;
      const Tensor4 real = images_to_tensor(picks);
      const Tensor4 fake = G.forward(gaussian_latents(latent_rng, batch, latent), Mode::Train);
      const Tensor4 mix = interpolates(real, fake, interp_rng);

      // Input gradients at the interpolates feed the diagnostic and the penalty.
      const Tensor4 gx = input_gradients(D, mix);
      const auto norms = per_sample_norms(gx);
      D.zero_grad();

      const auto s_real = scores(D.forward(real, Mode::Train));
      D.backward(Tensor4({batch, 1, 1, 1}, -inv_b));
      const auto s_fake = scores(D.forward(fake, Mode::Train));
      D.backward(Tensor4({batch, 1, 1, 1}, inv_b));

      const double gap = critic_duality_gap(s_real, s_fake);
      double penalty = 0.0;
      if (tc.lipschitz == Lipschitz::GradientPenalty) {
        // d/dw of lambda (|g| - 1)^2 via a central difference of D along g / |g|.
        const std::size_t per = gx.size() / static_cast<std::size_t>(batch);
        Tensor4 plus = mix, minus = mix;
        Tensor4 seed_plus({batch, 1, 1, 1}), seed_minus({batch, 1, 1, 1});
        for (int n = 0; n < batch; ++n) {
          const double norm = norms[static_cast<std::size_t>(n)];
          penalty += tc.lambda * (norm - 1.0) * (norm - 1.0) * inv_b;
          if (norm == 0.0) continue;
          for (std::size_t i = 0; i < per; ++i) {
            const double u = gx[n * per + i] / norm;
            plus[n * per + i] += tc.fd_step * u;
            minus[n * per + i] -= tc.fd_step * u;
          }
          const double coef = 2.0 * tc.lambda * (norm - 1.0) * inv_b / (2.0 * tc.fd_step);
          seed_plus[static_cast<std::size_t>(n)] = coef;
          seed_minus[static_cast<std::size_t>(n)] = -coef;
        }
        D.forward(plus, Mode::Train);
        D.backward(seed_plus);
        D.forward(minus, Mode::Train);
        D.backward(seed_minus);
      }

      row.duality_gap = gap;
      row.critic_loss = -gap + penalty;
      row.lipschitz_diag = mean(norms);
      require_finite(row.critic_loss, "critic loss", epoch);
      require_finite(row.lipschitz_diag, "Lipschitz diagnostic", epoch);

      opt_d.step();
      if (tc.lipschitz == Lipschitz::WeightClip) {
        for (Param* p : D.params()) {
          for (double& v : p->value) v = std::clamp(v, -tc.clip, tc.clip);
        }
      }
    }

    G.zero_grad();
    D.zero_grad();
    const Tensor4 fake = G.forward(gaussian_latents(latent_rng, batch, latent), Mode::Train);
    const auto s_fake = scores(D.forward(fake, Mode::Train));
    row.gen_loss = -mean(s_fake);
    require_finite(row.gen_loss, "generator loss", epoch);
    G.backward(D.backward(Tensor4({batch, 1, 1, 1}, -inv_b)));
    opt_g.step();
    D.zero_grad();

    row.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.rows.push_back(row);
    result.model.epochs_trained = epoch;
    if (observer) observer(row);
  }
  return result;
}

std::vector<TomogramImage> sample(TrainedModel& model, int count, std::uint64_t seed) {
  if (count < 1) throw ArgumentError("sample count must be positive");
  Rng rng(seed);
  const int latent = model.generator.config().in_c;
  std::vector<TomogramImage> out;
  out.reserve(static_cast<std::size_t>(count));
  constexpr int kChunk = 16;
  for (int first = 0; first < count; first += kChunk) {
    const int n = std::min(kChunk, count - first);
    const Tensor4 images = model.generator.forward(gaussian_latents(rng, n, latent), Mode::Eval);
    for (int i = 0; i < n; ++i) out.push_back(tensor_to_image(images, i, model.colormap));
  }
  return out;
}

}  // namespace tomoforge::nn
