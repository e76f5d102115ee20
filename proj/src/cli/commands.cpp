#include "tomoforge/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "tomoforge/classify.hpp"
#include "tomoforge/cli/json_config.hpp"
#include "tomoforge/colormap.hpp"
#include "tomoforge/dataset.hpp"
#include "tomoforge/error.hpp"
#include "tomoforge/image_io.hpp"
#include "tomoforge/metrics.hpp"
#include "tomoforge/moments.hpp"
#include "tomoforge/nn/checkpoint.hpp"
#include "tomoforge/nn/wgan.hpp"
#include "tomoforge/text.hpp"
#include "tomoforge/tomogram.hpp"

namespace tomoforge::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSeedEnv = "TOMOFORGE_SEED";

struct GridOptions {
  int n = 128;
  double half_width = 5.0;

  TomogramGrid grid() const { return TomogramGrid::square(n, half_width); }
  TomogramGrid grid_for(int width, int height) const {
    TomogramGrid g = TomogramGrid::canonical();
    g.x_min = -half_width;
    g.x_max = half_width;
    g.n_x = width;
    g.n_theta = height;
    g.validate();
    return g;
  }
};

struct RegulatorOptions {
  bool enabled = false;
  Regulator r;

  std::optional<Regulator> get() const {
    if (!enabled) return std::nullopt;
    r.validate();
    return r;
  }
};

void add_grid_options(CLI::App* app, GridOptions& g) {
  app->add_option("--grid-n", g.n, "Bins along x and theta")->capture_default_str()->check(CLI::Range(2, 4096));
  app->add_option("--half-width", g.half_width, "x range is [-w, w]")->capture_default_str();
}

void add_regulator_options(CLI::App* app, RegulatorOptions& r) {
  app->add_flag("--regulator", r.enabled, "Window slices with exp(-((x - x0)/L)^(2s))");
  app->add_option("--reg-x0", r.r.x0, "Regulator center")->capture_default_str();
  app->add_option("--reg-L", r.r.L, "Regulator cut-off length")->capture_default_str();
  app->add_option("--reg-s", r.r.s, "Regulator exponent")->capture_default_str();
}

bool has_extension(const std::string& path, const std::string& ext) {
  std::string e = fs::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

bool is_image(const std::string& path) { return has_extension(path, ".png") || has_extension(path, ".ppm"); }

// Re-raises library errors with the offending file named.
template <typename F>
auto with_context(const std::string& path, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ForeignPixelError& e) {
    throw ForeignPixelError(path + ": " + e.what());
  } catch (const DegenerateError& e) {
    throw DegenerateError(path + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(path + ": " + e.what());
  }
}

struct LoadedTomogram {
  Tomogram tomogram;
  std::size_t foreign_pixels = 0;
  bool from_image = false;
};

LoadedTomogram load_any(const std::string& path, const GridOptions& grid, const std::string& colormap_override,
                        DecodeMode mode) {
  return with_context(path, [&] {
    LoadedTomogram out;
    if (is_image(path)) {
      TomogramImage img = load_image(path);
      if (!colormap_override.empty()) img.colormap = colormap_from_string(colormap_override);
      auto decoded = decode(img, grid.grid_for(img.width, img.height), mode);
      out.tomogram = std::move(decoded.tomogram);
      out.foreign_pixels = decoded.foreign_pixels;
      out.from_image = true;
    } else {
      out.tomogram = load_tomogram_csv(path);
    }
    return out;
  });
}

std::vector<std::string> files_in(const std::string& dir) {
  if (!fs::is_directory(dir)) throw FormatError("'" + dir + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string p = e.path().string();
    if (e.is_regular_file() && (is_image(p) || has_extension(p, ".csv"))) files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw FormatError("no tomogram files in '" + dir + "'");
  return files;
}

std::vector<std::string> split_specs(const std::string& text) {
  std::vector<std::string> out;
  for (const auto part : split(text, ',')) {
    if (!trim(part).empty()) out.emplace_back(trim(part));
  }
  return out;
}

std::vector<QuantumState> resolve_states(const std::vector<std::string>& specs) {
  std::vector<QuantumState> out;
  for (const auto& s : specs) {
    std::vector<QuantumState> add;
    if (s == "fock") {
      add = fock_states();
    } else if (s == "cs") {
      add = coherent_states();
    } else if (s == "pacs") {
      add = pacs_states();
    } else if (s == "combined") {
      add = combined_states();
    } else if (s.starts_with("trio:")) {
      add = trio_states(parse_real_expr(std::string_view(s).substr(5)));
    } else {
      add = {QuantumState::parse(s)};
    }
    out.insert(out.end(), add.begin(), add.end());
  }
  if (out.empty()) throw ArgumentError("no states given");
  return out;
}

std::vector<GlossaryEntry> resolve_glossary(const std::string& spec) {
  if (has_extension(spec, ".json")) {
    std::ifstream in(spec);
    if (!in) throw FormatError("cannot open glossary '" + spec + "'");
    return with_context(spec, [&] {
      try {
        return glossary_from_json(nlohmann::json::parse(in));
      } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(e.what());
      }
    });
  }
  return build_glossary(resolve_states(split_specs(spec)));
}

void ensure_parent(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
}

void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw FormatError("failed writing '" + path + "'");
}

std::vector<double> resolve_thetas(const std::vector<std::string>& specs) {
  if (specs.empty()) return standard_thetas();
  std::vector<double> out;
  for (const auto& s : specs) {
    // Accepts plain radians or fractions of pi such as "pi/3" and "2pi/3".
    const auto pos = s.find("pi");
    if (pos == std::string::npos) {
      out.push_back(parse_double(s));
      continue;
    }
    const std::string num = s.substr(0, pos);
    const std::string rest = s.substr(pos + 2);
    double v = std::numbers::pi * (num.empty() ? 1.0 : parse_double(num));
    if (!rest.empty()) {
      if (rest.front() != '/') throw ArgumentError("bad angle '" + s + "'");
      v /= parse_double(rest.substr(1));
    }
    out.push_back(v);
  }
  return out;
}

// Per-command options, bound to CLI11.

struct SynthCmd {
  std::string state;
  GridOptions grid;
  std::string out, png, ppm, colormap = "seqlin";
  std::string noise_model;
  double epsilon = 0.25, fraction = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> pdf_theta;
  std::string pdf_out;
  std::string manifest;
};

struct DatasetCmd {
  std::vector<std::string> states;
  GridOptions grid;
  std::string out_dir, colormap = "seqlin";
  bool noisy = false;
  std::string noise_model = "b";
  double epsilon = 0.25;
  std::uint64_t seed = 0;
  std::string manifest;
};

struct MomentsCmd {
  std::vector<std::string> inputs;
  std::string input_dir, colormap, glossary, out, csv, manifest;
  std::vector<std::string> thetas;
  GridOptions grid;
  RegulatorOptions reg;
  double tol = 0.04;
  bool nearest = false;
};

struct TrainCmd {
  std::string dataset, scale = "desk32", lipschitz = "weight-clip", out, log, manifest;
  long epochs = 500;
  int batch = 0;
  double clip = 0.01, lambda = 10.0;
  std::uint64_t seed = 0;
  bool quiet = false;
};

struct SampleCmd {
  std::string checkpoint, out_dir, format = "png", manifest;
  int count = 500;
  std::uint64_t seed = 0;
};

struct EvalCmd {
  std::string input_dir, glossary = "combined", out, summary, colormap, manifest;
  GridOptions grid;
  RegulatorOptions reg;
  double tol = 0.04;
};

struct GlossaryCmd {
  std::string family = "combined", out, manifest;
};

struct WdistCmd {
  std::string pdf_a, pdf_b, tomo_a, tomo_b, colormap, manifest;
  double theta_a = 0.0, theta_b = 0.0;
  GridOptions grid;
  RegulatorOptions reg;
};

struct LutCmd {
  std::string colormap = "seqlin", out, manifest;
};

void write_manifest(const CLI::App& app, const std::string& path) {
  if (path.empty()) return;
  write_text(path, JsonConfig::to_json(&app, true).dump(2) + "\n");
}

std::string default_manifest(const std::string& explicit_path, const std::string& primary) {
  if (!explicit_path.empty()) return explicit_path;
  if (primary.empty()) return {};
  return primary + ".run.json";
}

int run_synth(const SynthCmd& c, std::ostream& out) {
  if (c.out.empty() && c.png.empty() && c.ppm.empty() && c.pdf_out.empty()) {
    throw ArgumentError("synth needs at least one of --out, --png, --ppm, --pdf-out");
  }
  const QuantumState state = QuantumState::parse(c.state);
  Tomogram t = synthesize(state, c.grid.grid());
  if (!c.noise_model.empty() || c.fraction > 0.0) {
    NoiseSpec spec;
    spec.model = noise_model_from_string(c.noise_model.empty() ? "b" : c.noise_model);
    spec.epsilon = c.epsilon;
    spec.fraction = c.fraction;
    spec.seed = c.seed;
    t = apply_noise(t, spec);
  }
  for (const auto* p : {&c.out, &c.png, &c.ppm, &c.pdf_out}) {
    if (!p->empty()) ensure_parent(*p);
  }
  if (!c.out.empty()) save_tomogram_csv(c.out, t);
  if (!c.png.empty() || !c.ppm.empty()) {
    const TomogramImage img = encode(t, colormap_from_string(c.colormap));
    if (!c.png.empty()) save_png(c.png, img);
    if (!c.ppm.empty()) save_ppm(c.ppm, img);
  }
  if (!c.pdf_out.empty()) save_pdf_csv(c.pdf_out, normalize_pdf(t.slice(c.pdf_theta.value_or(0.0))));
  out << "synthesized " << state.to_string() << '\n';
  return kExitOk;
}

int run_dataset(const DatasetCmd& c, std::ostream& out) {
  std::optional<NoiseSpec> noise;
  if (c.noisy) {
    NoiseSpec spec;
    spec.model = noise_model_from_string(c.noise_model);
    spec.epsilon = c.epsilon;
    spec.seed = c.seed;
    spec.validate();
    noise = spec;
  }
  TrainingDataset ds = assemble_dataset(resolve_states(c.states), noise, colormap_from_string(c.colormap), c.grid.grid());
  save_dataset(c.out_dir, ds);
  out << "wrote " << ds.items.size() << " images to " << c.out_dir << '\n';
  return kExitOk;
}

MomentReport moments_of(const std::string& path, const MomentsCmd& c, const ReportOptions& opts) {
  const auto loaded = load_any(path, c.grid, c.colormap, c.nearest ? DecodeMode::Nearest : DecodeMode::Strict);
  MomentReport r = with_context(path, [&] { return report(loaded.tomogram, opts); });
  if (loaded.foreign_pixels > 0) r.add_flag(QualityFlag::ForeignPixel);
  return r;
}

int run_moments(const MomentsCmd& c, std::ostream& out) {
  std::vector<std::string> inputs = c.inputs;
  if (!c.input_dir.empty()) {
    const auto more = files_in(c.input_dir);
    inputs.insert(inputs.end(), more.begin(), more.end());
  }
  if (inputs.empty()) throw ArgumentError("moments needs --input or --input-dir");
  ReportOptions opts;
  opts.thetas = resolve_thetas(c.thetas);
  opts.regulator = c.reg.get();
  opts.spurious_tol = c.tol;
  if (!c.glossary.empty()) {
    for (const auto& g : resolve_glossary(c.glossary)) opts.glossary_means.push_back(g.mean_n);
  }

  if (inputs.size() == 1 && c.csv.empty()) {
    const std::string json = to_json(moments_of(inputs.front(), c, opts)).dump(2) + "\n";
    if (c.out.empty()) {
      out << json;
    } else {
      write_text(c.out, json);
    }
    return kExitOk;
  }
  std::ostringstream csv;
  write_report_csv_header(csv, opts.thetas);
  for (const auto& path : inputs) {
    write_report_csv_row(csv, fs::path(path).filename().string(), moments_of(path, c, opts), opts.thetas);
  }
  const std::string target = c.csv.empty() ? c.out : c.csv;
  if (target.empty()) {
    out << csv.str();
  } else {
    write_text(target, csv.str());
  }
  return kExitOk;
}

int run_train(const TrainCmd& c, std::ostream& out) {
  const TrainingDataset ds = load_dataset(c.dataset);
  const nn::Scale scale = nn::scale_from_string(c.scale);
  nn::TrainConfig tc = scale == nn::Scale::Desk32 ? nn::TrainConfig::desk() : nn::TrainConfig{};
  if (c.batch > 0) tc.batch_size = c.batch;
  tc.epochs = c.epochs;
  tc.lipschitz = nn::lipschitz_from_string(c.lipschitz);
  tc.clip = c.clip;
  tc.lambda = c.lambda;
  tc.seed = c.seed;
  const auto every = std::max(1L, c.epochs / 10);
  auto result = nn::train(ds, nn::NetworkConfig::generator(scale), nn::NetworkConfig::critic(scale), tc,
                          [&](const nn::TrainLogRow& r) {
                            if (!c.quiet && (r.epoch % every == 0 || r.epoch == c.epochs)) {
                              out << "epoch " << r.epoch << " gap " << format_double(r.duality_gap) << '\n';
                            }
                          });
  ensure_parent(c.out);
  nn::save_checkpoint(c.out, result.model);
  if (!c.log.empty()) {
    std::ostringstream log;
    result.log.write_csv(log);
    write_text(c.log, log.str());
  }
  out << "trained " << result.model.epochs_trained << " epochs -> " << c.out << '\n';
  return kExitOk;
}

int run_sample(const SampleCmd& c, std::ostream& out) {
  if (c.format != "png" && c.format != "ppm") throw ArgumentError("--format must be png or ppm");
  nn::TrainedModel model = nn::load_checkpoint(c.checkpoint);
  const auto images = nn::sample(model, c.count, c.seed);
  fs::create_directories(c.out_dir);
  for (std::size_t i = 0; i < images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "sample_%04zu.%s", i, c.format.c_str());
    save_image((fs::path(c.out_dir) / name).string(), images[i]);
  }
  out << "wrote " << images.size() << " samples to " << c.out_dir << '\n';
  return kExitOk;
}

int run_eval(const EvalCmd& c, std::ostream& out) {
  const auto glossary = resolve_glossary(c.glossary);
  ReportOptions opts;
  opts.regulator = c.reg.get();
  opts.spurious_tol = c.tol;
  for (const auto& g : glossary) opts.glossary_means.push_back(g.mean_n);

  std::ostringstream rows;
  write_classification_csv_header(rows);
  std::map<std::string, std::size_t> per_class;
  std::size_t total = 0, matched = 0;
  for (const auto& path : files_in(c.input_dir)) {
    const auto loaded = load_any(path, c.grid, c.colormap, DecodeMode::Nearest);
    MomentReport r = with_context(path, [&] { return report(loaded.tomogram, opts); });
    if (loaded.foreign_pixels > 0) r.add_flag(QualityFlag::ForeignPixel);
    const Classification cls = classify(r, glossary, c.tol);
    write_classification_csv_row(rows, fs::path(path).filename().string(), r, cls);
    ++total;
    if (cls.verdict == Verdict::Match) {
      ++matched;
      ++per_class[cls.best.state.to_string()];
    } else {
      ++per_class["spurious"];
    }
  }

  std::ostringstream summary;
  summary << "metric,value\n"
          << "samples," << total << '\n'
          << "match," << matched << '\n'
          << "spurious," << total - matched << '\n'
          << "match_fraction," << format_double(double(matched) / total) << '\n'
          << "spurious_fraction," << format_double(double(total - matched) / total) << '\n';
  for (const auto& [name, count] : per_class) summary << "class:" << name << ',' << count << '\n';

  if (!c.out.empty()) write_text(c.out, rows.str());
  if (!c.summary.empty()) {
    write_text(c.summary, summary.str());
  } else {
    out << summary.str();
  }
  return kExitOk;
}

int run_glossary(const GlossaryCmd& c, std::ostream& out) {
  const std::string json = glossary_to_json(resolve_glossary(c.family)).dump(2) + "\n";
  if (c.out.empty()) {
    out << json;
  } else {
    write_text(c.out, json);
  }
  return kExitOk;
}

QuadraturePdf wdist_operand(const std::string& pdf_path, const std::string& tomo_path, double theta,
                            const WdistCmd& c) {
  QuadraturePdf pdf;
  if (!pdf_path.empty()) {
    pdf = load_pdf_csv(pdf_path);
  } else {
    const auto loaded = load_any(tomo_path, c.grid, c.colormap, DecodeMode::Strict);
    pdf = loaded.tomogram.slice(theta);
  }
  const auto reg = c.reg.get();
  const std::string& name = pdf_path.empty() ? tomo_path : pdf_path;
  return with_context(name, [&] { return reg ? apply_regulator(pdf, *reg) : normalize_pdf(std::move(pdf)); });
}

int run_wdist(const WdistCmd& c, std::ostream& out) {
  if ((c.pdf_a.empty() == c.tomo_a.empty()) || (c.pdf_b.empty() == c.tomo_b.empty())) {
    throw ArgumentError("wdist needs exactly one of --pdf-a/--tomo-a and one of --pdf-b/--tomo-b");
  }
  const QuadraturePdf a = wdist_operand(c.pdf_a, c.tomo_a, c.theta_a, c);
  const QuadraturePdf b = wdist_operand(c.pdf_b, c.tomo_b, c.theta_b, c);
  char text[64];
  std::snprintf(text, sizeof text, "%.6g\n", w1_pdf(a, b));
  out << text;
  return kExitOk;
}

int run_lut(const LutCmd& c, std::ostream& out) {
  std::ostringstream csv;
  write_lut_csv(csv, lut(colormap_from_string(c.colormap)));
  if (c.out.empty()) {
    out << csv.str();
  } else {
    write_text(c.out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optical tomogram synthesis, moment extraction and WGAN training"};
  app.name("tomoforge");
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON run configuration (a previous run manifest works)");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.require_subcommand(1);

  SynthCmd synth;
  auto* s = app.add_subcommand("synth", "Synthesize a tomogram from an analytic state")->configurable();
  s->add_option("--state", synth.state, "fock:N, cs:A, pacs:A[:M], amp:A[:M] or opt:A[:M]")->required();
  add_grid_options(s, synth.grid);
  s->add_option("--out", synth.out, "Tomogram CSV");
  s->add_option("--png", synth.png, "PNG image");
  s->add_option("--ppm", synth.ppm, "PPM image");
  s->add_option("--colormap", synth.colormap, "seqlin, nonlinear or nonlinear-seq")->capture_default_str();
  s->add_option("--noise-model", synth.noise_model, "a (uniform) or b (Gaussian)");
  s->add_option("--epsilon", synth.epsilon, "Noise scale")->capture_default_str();
  s->add_option("--fraction", synth.fraction, "Fraction of perturbed grid points")->capture_default_str();
  s->add_option("--seed", synth.seed, "Noise seed")->capture_default_str()->envname(kSeedEnv);
  s->add_option("--pdf-theta", synth.pdf_theta, "Angle of the slice written by --pdf-out");
  s->add_option("--pdf-out", synth.pdf_out, "Normalized slice CSV");
  s->add_option("--manifest", synth.manifest, "Run manifest path");

  DatasetCmd dataset;
  auto* d = app.add_subcommand("dataset", "Assemble a training dataset of encoded tomograms")->configurable();
  d->add_option("--states", dataset.states, "States or families (fock, cs, pacs, combined, trio:A)")
      ->required()
      ->delimiter(',');
  add_grid_options(d, dataset.grid);
  d->add_option("--out-dir", dataset.out_dir, "Output directory")->required();
  d->add_option("--colormap", dataset.colormap, "Colormap")->capture_default_str();
  d->add_flag("--noisy", dataset.noisy, "4 clean copies plus noisy sets at 2.5%, 5%, 7.5%");
  d->add_option("--noise-model", dataset.noise_model, "a or b")->capture_default_str();
  d->add_option("--epsilon", dataset.epsilon, "Noise scale")->capture_default_str();
  d->add_option("--seed", dataset.seed, "Noise seed")->capture_default_str()->envname(kSeedEnv);
  d->add_option("--manifest", dataset.manifest, "Run manifest path");

  MomentsCmd moments;
  auto* m = app.add_subcommand("moments", "Extract moments from tomogram CSVs or images")->configurable();
  m->add_option("--input", moments.inputs, "Tomogram CSV or image (repeatable)");
  m->add_option("--input-dir", moments.input_dir, "Directory of tomograms");
  m->add_option("--colormap", moments.colormap, "Override the colormap stored in images");
  m->add_option("--glossary", moments.glossary, "Family list or glossary JSON for the spurious flag");
  m->add_option("--tol", moments.tol, "Spurious tolerance")->capture_default_str();
  m->add_option("--thetas", moments.thetas, "Angles (radians or k*pi/q forms such as 2pi/3)")->delimiter(',');
  m->add_flag("--nearest", moments.nearest, "Snap off-palette pixels instead of failing");
  m->add_option("--out", moments.out, "Report JSON (single input) or CSV");
  m->add_option("--csv", moments.csv, "Batch CSV");
  add_grid_options(m, moments.grid);
  add_regulator_options(m, moments.reg);
  m->add_option("--manifest", moments.manifest, "Run manifest path");

  TrainCmd train;
  auto* t = app.add_subcommand("train", "Train the WGAN on a dataset directory")->configurable();
  t->add_option("--dataset", train.dataset, "Dataset directory")->required();
  t->add_option("--scale", train.scale, "desk32 or full128")->capture_default_str();
  t->add_option("--epochs", train.epochs, "Epochs (5 critic steps + 1 generator step each)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  t->add_option("--batch", train.batch, "Batch size (default 16 desk32, 64 full128)");
  t->add_option("--lipschitz", train.lipschitz, "weight-clip or gradient-penalty")->capture_default_str();
  t->add_option("--clip", train.clip, "Weight clipping bound")->capture_default_str();
  t->add_option("--lambda", train.lambda, "Gradient penalty weight")->capture_default_str();
  t->add_option("--seed", train.seed, "Training seed")->capture_default_str()->envname(kSeedEnv);
  t->add_option("--out", train.out, "Checkpoint path")->required();
  t->add_option("--log", train.log, "Training log CSV");
  t->add_flag("--quiet", train.quiet, "No progress lines");
  t->add_option("--manifest", train.manifest, "Run manifest path");

  SampleCmd sample;
  auto* sa = app.add_subcommand("sample", "Generate tomogram images from a checkpoint")->configurable();
  sa->add_option("--checkpoint", sample.checkpoint, "Checkpoint path")->required();
  sa->add_option("--count", sample.count, "Number of samples")->capture_default_str()->check(CLI::PositiveNumber);
  sa->add_option("--seed", sample.seed, "Latent seed")->capture_default_str()->envname(kSeedEnv);
  sa->add_option("--out-dir", sample.out_dir, "Output directory")->required();
  sa->add_option("--format", sample.format, "png or ppm")->capture_default_str();
  sa->add_option("--manifest", sample.manifest, "Run manifest path");

  EvalCmd eval;
  auto* e = app.add_subcommand("eval", "Decode, measure and classify a directory of tomograms")->configurable();
  e->add_option("--input-dir", eval.input_dir, "Directory of images or tomogram CSVs")->required();
  e->add_option("--glossary", eval.glossary, "Family list or glossary JSON")->capture_default_str();
  e->add_option("--tol", eval.tol, "Relative tolerance")->capture_default_str();
  e->add_option("--colormap", eval.colormap, "Override the colormap stored in images");
  e->add_option("--out", eval.out, "Per-sample CSV");
  e->add_option("--summary", eval.summary, "Summary CSV");
  add_grid_options(e, eval.grid);
  add_regulator_options(e, eval.reg);
  e->add_option("--manifest", eval.manifest, "Run manifest path");

  GlossaryCmd gloss;
  auto* g = app.add_subcommand("glossary", "Export a theory glossary")->configurable();
  g->add_option("--family", gloss.family, "Families or states, comma separated")->capture_default_str();
  g->add_option("--out", gloss.out, "Glossary JSON");
  g->add_option("--manifest", gloss.manifest, "Run manifest path");

  WdistCmd wdist;
  auto* w = app.add_subcommand("wdist", "1-Wasserstein distance between two slices")->configurable();
  w->add_option("--pdf-a", wdist.pdf_a, "First pdf CSV");
  w->add_option("--pdf-b", wdist.pdf_b, "Second pdf CSV");
  w->add_option("--tomo-a", wdist.tomo_a, "First tomogram (CSV or image)");
  w->add_option("--tomo-b", wdist.tomo_b, "Second tomogram (CSV or image)");
  w->add_option("--theta-a", wdist.theta_a, "Slice angle of the first tomogram")->capture_default_str();
  w->add_option("--theta-b", wdist.theta_b, "Slice angle of the second tomogram")->capture_default_str();
  w->add_option("--colormap", wdist.colormap, "Override the colormap stored in images");
  add_grid_options(w, wdist.grid);
  add_regulator_options(w, wdist.reg);
  w->add_option("--manifest", wdist.manifest, "Run manifest path");

  LutCmd lut_cmd;
  auto* l = app.add_subcommand("lut", "Export a colormap lookup table")->configurable();
  l->add_option("--colormap", lut_cmd.colormap, "Colormap")->capture_default_str();
  l->add_option("--out", lut_cmd.out, "CSV path");
  l->add_option("--manifest", lut_cmd.manifest, "Run manifest path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    // The environment seed outranks a config file; CLI11 applies them the other way round.
    const bool seed_on_cli = std::any_of(args.begin(), args.end(), [](const std::string& a) {
      return a == "--seed" || a.rfind("--seed=", 0) == 0;
    });
    const char* env_seed = std::getenv(kSeedEnv);
    if (!seed_on_cli && env_seed != nullptr && *env_seed != '\0') {
      for (auto* sub : {s, d, t, sa}) {
        if (!sub->parsed()) continue;
        auto* opt = sub->get_option("--seed");
        opt->clear();
        opt->add_result(std::string(env_seed));
        opt->run_callback();
      }
    }
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    int code = kExitOk;
    std::string manifest;
    if (s->parsed()) {
      code = run_synth(synth, out);
      manifest = default_manifest(synth.manifest, !synth.out.empty() ? synth.out : !synth.png.empty() ? synth.png : !synth.ppm.empty() ? synth.ppm : synth.pdf_out);
    } else if (d->parsed()) {
      code = run_dataset(dataset, out);
      manifest = dataset.manifest.empty() ? (fs::path(dataset.out_dir) / "run.json").string() : dataset.manifest;
    } else if (m->parsed()) {
      code = run_moments(moments, out);
      manifest = default_manifest(moments.manifest, !moments.csv.empty() ? moments.csv : moments.out);
    } else if (t->parsed()) {
      code = run_train(train, out);
      manifest = default_manifest(train.manifest, train.out);
    } else if (sa->parsed()) {
      code = run_sample(sample, out);
      manifest = sample.manifest.empty() ? (fs::path(sample.out_dir) / "run.json").string() : sample.manifest;
    } else if (e->parsed()) {
      code = run_eval(eval, out);
      manifest = default_manifest(eval.manifest, !eval.summary.empty() ? eval.summary : eval.out);
    } else if (g->parsed()) {
      code = run_glossary(gloss, out);
      manifest = default_manifest(gloss.manifest, gloss.out);
    } else if (w->parsed()) {
      code = run_wdist(wdist, out);
      manifest = wdist.manifest;
    } else if (l->parsed()) {
      code = run_lut(lut_cmd, out);
      manifest = default_manifest(lut_cmd.manifest, lut_cmd.out);
    }
    write_manifest(app, manifest);
    return code;
  } catch (const DivergenceError& ex) {
    err << "error: training diverged at epoch " << ex.epoch() << ": " << ex.what() << '\n';
    return kExitDivergence;
  } catch (const ArgumentError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const RangeError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitData;
  }
}

}  // namespace tomoforge::cli
