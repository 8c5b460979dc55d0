// Copyright 2026 The Frontline Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch front end: synth, distmap, train, predict, extract, evaluate.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frontline/config.hpp"
#include "frontline/dataset.hpp"
#include "frontline/distmap.hpp"
#include "frontline/error.hpp"
#include "frontline/io.hpp"
#include "frontline/metrics.hpp"
#include "frontline/morphology.hpp"
#include "frontline/nn/checkpoint.hpp"
#include "frontline/pipeline.hpp"
#include "frontline/postprocess.hpp"

namespace fs = std::filesystem;
using namespace frontline;

namespace {

constexpr int kExitSampleErrors = 1;
constexpr int kExitUsage = 2;

// Prints one line per failed sample and returns the exit code.
int report_errors(const std::vector<std::string>& ids,
                  const std::vector<std::string>& errors) {
  int failed = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].empty()) continue;
    std::fprintf(stderr, "error: %s: %s\n", ids[i].c_str(), errors[i].c_str());
    ++failed;
  }
  if (failed > 0) {
    std::fprintf(stderr, "%d of %zu samples failed\n", failed, errors.size());
    return kExitSampleErrors;
  }
  return 0;
}

std::vector<std::string> record_ids(const Manifest& m) {
  std::vector<std::string> ids;
  for (const auto& r : m.records) ids.push_back(r.id);
  return ids;
}

PipelineConfig base_config(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_pipeline_config(path);
}

fs::path raster_path(const fs::path& dir, const std::string& id) {
  return dir / (id + ".f32");
}

// Sorted ids of every "<id>.f32" raster in dir.
std::vector<std::string> raster_ids(const fs::path& dir) {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".f32") {
      ids.push_back(e.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

const ManifestRecord* find_record(const Manifest& m, const std::string& id) {
  for (const auto& r : m.records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  SynthOptions options;
};

int run_synth(const SynthArgs& a) {
  const auto samples = synth_generate(a.options);
  write_samples(a.out, samples);
  std::fprintf(stderr, "wrote %zu samples to %s\n", samples.size(), a.out.c_str());
  return 0;
}

// ---- distmap --------------------------------------------------------------

struct DistmapArgs {
  std::string manifest;
  std::string config;
  std::optional<double> gamma;
  std::string out;
};

int run_distmap(const DistmapArgs& a) {
  PipelineConfig cfg = base_config(a.config);
  if (a.gamma) cfg.gamma = *a.gamma;
  const DecayParam gamma(cfg.gamma);
  const Manifest m = load_manifest(a.manifest);
  fs::create_directories(a.out);
  const auto errors = parallel_for(m.size(), [&](std::size_t i) {
    const Sample s = load_sample(m, m.records[i]);
    io::write_float_raster(raster_path(a.out, s.id),
                           front_to_distance_target(s.front_line, gamma));
  });
  return report_errors(record_ids(m), errors);
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  int stage = 1;
  std::string manifest;
  std::string val_manifest;
  std::string config;
  std::string inputs;
  std::string out;
  std::string history;
  double val_fraction = 0.2;
  int max_quality = 5;
  bool augment = false;
  std::optional<double> lr;
  std::optional<int> epochs;
  std::optional<int> patience;
  std::optional<int> batch;
  std::optional<std::uint64_t> seed;
  std::optional<int> size;
  std::optional<int> depth;
  std::optional<int> base_filters;
};

std::vector<nn::Example<float>> build_examples(const Manifest& m,
                                               const PipelineConfig& cfg,
                                               const TrainArgs& a, bool augment) {
  std::vector<std::vector<nn::Example<float>>> per(m.size());
  const auto errors = parallel_for(m.size(), [&](std::size_t i) {
    const Sample base = load_sample(m, m.records[i]);
    std::vector<Sample> variants{base};
    if (augment) variants = augment_eightfold(base);
    const int w = cfg.input_width;
    const int h = cfg.input_height;
    std::optional<Raster> dmap;
    if (a.stage == 2) dmap = io::read_float_raster(raster_path(a.inputs, base.id));
    for (int k = 0; k < static_cast<int>(variants.size()); ++k) {
      const Sample& s = variants[k];
      if (a.stage == 1) {
        per[i].push_back(make_example(
            prepare_input(s.sar, w, h),
            stage1_target(s.front_line, DecayParam(cfg.gamma), w, h)));
      } else {
        const Raster in = augment ? orient(*dmap, k) : *dmap;
        per[i].push_back(make_example(
            prepare_input(in, w, h),
            stage2_target(s.front_line, cfg.stage2_dilation, w, h)));
      }
    }
  });
  if (report_errors(record_ids(m), errors) != 0) {
    throw DatasetError("could not build training examples");
  }
  std::vector<nn::Example<float>> out;
  for (auto& v : per) {
    for (auto& e : v) out.push_back(std::move(e));
  }
  return out;
}

int run_train(const TrainArgs& a) {
  PipelineConfig cfg = base_config(a.config);
  nn::TrainConfig& tc = a.stage == 1 ? cfg.stage1 : cfg.stage2;
  if (a.lr) tc.learning_rate = *a.lr;
  if (a.epochs) tc.max_epochs = *a.epochs;
  if (a.patience) tc.patience = *a.patience;
  if (a.batch) tc.batch_size = *a.batch;
  if (a.seed) tc.seed = *a.seed;
  if (a.size) cfg.input_width = cfg.input_height = *a.size;
  if (a.depth) cfg.model.depth = *a.depth;
  if (a.base_filters) cfg.model.base_filters = *a.base_filters;
  cfg.validate();
  if (a.stage == 2 && a.inputs.empty()) {
    throw ParameterError("stage 2 needs --inputs with predicted distance maps");
  }

  Manifest all = filter_by_quality(load_manifest(a.manifest), a.max_quality);
  Manifest train_m;
  Manifest val_m;
  if (!a.val_manifest.empty()) {
    train_m = all;
    val_m = filter_by_quality(load_manifest(a.val_manifest), a.max_quality);
  } else {
    const auto n_val = static_cast<std::size_t>(a.val_fraction * all.size() + 0.5);
    const auto parts = split(all, {all.size() - n_val, n_val, 0}, tc.seed);
    train_m = parts.train;
    val_m = parts.val;
  }
  const auto train_set = build_examples(train_m, cfg, a, a.augment);
  const auto val_set = build_examples(val_m, cfg, a, false);
  std::fprintf(stderr, "stage %d: %zu training / %zu validation examples\n",
               a.stage, train_set.size(), val_set.size());

  const auto result = nn::train<float>(
      cfg.model, train_set, val_set, tc, [](const nn::EpochRecord& r) {
        std::fprintf(stderr, "epoch %d train %.6g val %.6g\n", r.epoch,
                     r.train_loss, r.val_loss);
        return true;
      });

  std::string history = "epoch,train_loss,val_loss\n";
  char line[96];
  for (const auto& r : result.history) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", r.epoch, r.train_loss,
                  r.val_loss);
    history += line;
  }
  const fs::path history_path =
      a.history.empty() ? fs::path(a.out + ".history.csv") : fs::path(a.history);
  io::atomic_write(history_path, history);
  nlohmann::json meta = {{"stage", a.stage},
                         {"input_size", {cfg.input_width, cfg.input_height}},
                         {"gamma", cfg.gamma},
                         {"best_epoch", result.best_epoch},
                         {"best_val_loss", result.best_val_loss}};
  nn::save_checkpoint(a.out, result.model, meta);
  std::fprintf(stderr, "best epoch %d, validation loss %.6g\n", result.best_epoch,
               result.best_val_loss);
  return 0;
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string manifest;
  std::string inputs;
  std::string out;
  bool resize_back = false;
};

int run_predict(const PredictArgs& a) {
  const nn::LoadedModel loaded = nn::load_checkpoint(a.model);
  const auto size = loaded.metadata.value("input_size", std::vector<int>{});
  const int stage = loaded.metadata.value("stage", 1);
  const ValueDomain domain =
      stage == 1 ? ValueDomain::kDistance01 : ValueDomain::kProbability01;
  const Manifest m = load_manifest(a.manifest);
  fs::create_directories(a.out);
  const auto errors = parallel_for(m.size(), [&](std::size_t i) {
    const ManifestRecord& r = m.records[i];
    const Raster source = a.inputs.empty() ? load_sample(m, r).sar
                                           : io::read_float_raster(raster_path(a.inputs, r.id));
    const int w = size.size() == 2 ? size[0] : source.width();
    const int h = size.size() == 2 ? size[1] : source.height();
    Raster pred = nn::predict(loaded.model, prepare_input(source, w, h), domain);
    if (a.resize_back && (w != source.width() || h != source.height())) {
      pred = resize(pred, source.width(), source.height(), Interpolation::kBicubic);
    }
    io::write_float_raster(raster_path(a.out, r.id), pred);
  });
  return report_errors(record_ids(m), errors);
}

// ---- extract --------------------------------------------------------------

struct ExtractArgs {
  std::string method;
  std::string in;
  std::string out;
  std::string manifest;
  std::string model;
  std::string config;
  std::optional<double> keep_fraction;
  std::optional<double> threshold;
  std::optional<double> sigma_alpha;
  std::optional<double> sigma_beta;
  std::optional<double> sigma_gamma;
  std::optional<double> w1;
  std::optional<double> w2;
  std::optional<int> iterations;
  std::string normalization;
  bool overlays = false;
};

int run_extract(const ExtractArgs& a) {
  PipelineConfig cfg = base_config(a.config);
  if (a.keep_fraction) cfg.keep_fraction = *a.keep_fraction;
  if (a.threshold) cfg.binarize_threshold = *a.threshold;
  if (a.sigma_alpha) cfg.crf.sigma_alpha = *a.sigma_alpha;
  if (a.sigma_beta) cfg.crf.sigma_beta = *a.sigma_beta;
  if (a.sigma_gamma) cfg.crf.sigma_gamma = *a.sigma_gamma;
  if (a.w1) cfg.crf.w1 = *a.w1;
  if (a.w2) cfg.crf.w2 = *a.w2;
  if (a.iterations) cfg.crf.iterations = *a.iterations;
  if (!a.normalization.empty()) {
    cfg.crf.normalization = crf_normalization_from_string(a.normalization);
  }
  cfg.validate();
  const ExtractionMethod method = extraction_method_from_string(a.method);
  if ((method == ExtractionMethod::kCrf || a.overlays) && a.manifest.empty()) {
    throw ParameterError("--manifest is required for crf and overlays");
  }
  std::optional<Manifest> manifest;
  if (!a.manifest.empty()) manifest = load_manifest(a.manifest);
  std::optional<nn::LoadedModel> model;
  if (method == ExtractionMethod::kSecondUnet) {
    if (a.model.empty() || !fs::exists(a.model)) {
      throw ModelError("second-stage model not found: " + a.model);
    }
    model = nn::load_checkpoint(a.model);
  }
  const auto ids = raster_ids(a.in);
  fs::create_directories(a.out);
  const auto errors = parallel_for(ids.size(), [&](std::size_t i) {
    const Raster pred = io::read_float_raster(raster_path(a.in, ids[i]));
    std::optional<Sample> sample;
    if (manifest) {
      const ManifestRecord* r = find_record(*manifest, ids[i]);
      if (!r) throw DatasetError("not listed in the manifest");
      sample = load_sample(*manifest, *r);
    }
    BinaryMask mask;
    switch (method) {
      case ExtractionMethod::kThreshold:
        mask = threshold_extract(pred, cfg.keep_fraction);
        break;
      case ExtractionMethod::kCrf:
        mask = crf_extract(pred, prepare_input(sample->sar, pred.width(), pred.height()),
                           cfg.crf);
        break;
      case ExtractionMethod::kSecondUnet:
        mask = second_unet_extract(pred, model->model, cfg.binarize_threshold);
        break;
      case ExtractionMethod::kBaselineZone:
        mask = baseline_zone_extract(pred, cfg.binarize_threshold);
        break;
      case ExtractionMethod::kBaselineLine:
        mask = baseline_line_extract(pred, cfg.binarize_threshold);
        break;
    }
    io::write_mask_pgm(a.out / fs::path(ids[i] + ".pgm"), mask);
    if (a.overlays) {
      BinaryMask truth = sample->front_line;
      if (!truth.same_shape(mask)) truth = resize_mask(truth, mask.width(), mask.height());
      io::write_png(a.out / fs::path(ids[i] + "_overlay.png"), mask.width(),
                    mask.height(), io::overlay_pixels(mask, truth));
    }
  });
  return report_errors(ids, errors);
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string pred;
  std::string manifest;
  std::string tolerances;
  std::string adjust_width;
  std::string method = "prediction";
  std::string out;
};

std::vector<double> parse_tolerances(const std::string& text) {
  if (text.empty()) return kDefaultTolerances;
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError("bad tolerance '" + item + "'");
    }
    pos = comma + 1;
  }
  return out;
}

int run_evaluate(const EvaluateArgs& a) {
  const auto tolerances = parse_tolerances(a.tolerances);
  std::optional<std::size_t> fixed_target;
  const bool adjust = !a.adjust_width.empty();
  if (adjust && a.adjust_width != "gt") {
    const long v = std::stol(a.adjust_width);
    if (v <= 0) throw ParameterError("--adjust-width must be positive or 'gt'");
    fixed_target = static_cast<std::size_t>(v);
  }
  const Manifest m = load_manifest(a.manifest);
  std::vector<std::optional<BinaryMask>> preds(m.size());
  std::vector<EvaluationInput> inputs(m.size());
  const auto errors = parallel_for(m.size(), [&](std::size_t i) {
    const Sample s = load_sample(m, m.records[i]);
    inputs[i] = {s.id, s.front_line, s.resolution_m};
    const fs::path p = fs::path(a.pred) / (s.id + ".pgm");
    if (!fs::exists(p)) throw DatasetError("missing prediction " + p.string());
    BinaryMask mask = io::read_mask_pgm(p, s.sar.resolution());
    if (!mask.same_shape(s.front_line)) {
      mask = resize_mask(mask, s.front_line.width(), s.front_line.height());
    }
    if (adjust && mask.any()) {
      mask = adjust_width(mask, fixed_target.value_or(s.front_line.count()));
    }
    preds[i] = std::move(mask);
  });
  std::vector<EvaluationInput> present;
  std::map<std::string, BinaryMask> by_id;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!errors[i].empty()) continue;
    present.push_back(inputs[i]);
    by_id.emplace(inputs[i].sample_id, *preds[i]);
  }
  int code = report_errors(record_ids(m), errors);
  const EvaluationReport report = evaluate_set(present, by_id, tolerances, a.method);
  io::atomic_write(a.out, report.to_csv());
  fs::path json_path = a.out;
  json_path.replace_extension(".json");
  io::atomic_write(json_path, report.to_json());
  for (std::size_t t = 0; t < tolerances.size(); ++t) {
    std::printf("tolerance %g m: dice %.4f iou %.4f\n", tolerances[t],
                report.mean_dice[t], report.mean_iou[t]);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glacier calving front detection pipeline"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--n", synth.options.count, "Number of samples")->check(CLI::NonNegativeNumber);
  s->add_option("--size", synth.options.size, "Image size in pixels")
      ->check(CLI::Range(32, 1 << 14));
  s->add_option("--seed", synth.options.seed, "Random seed");
  s->add_option("--noise", synth.options.noise, "Speckle coefficient of variation")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--resolution", synth.options.resolution_m, "Meters per pixel")
      ->check(CLI::PositiveNumber);

  DistmapArgs dist;
  auto* d = app.add_subcommand("distmap", "Distance-map targets from front lines");
  d->add_option("--manifest", dist.manifest, "Manifest CSV")->required();
  d->add_option("--config", dist.config, "Pipeline config JSON");
  d->add_option("--gamma", dist.gamma, "Decay parameter (default 7)");
  d->add_option("--out", dist.out, "Output directory")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a stage-1 or stage-2 U-Net");
  t->add_option("--stage", tr.stage, "1: distance regression, 2: front segmentation")
      ->check(CLI::IsMember({1, 2}));
  t->add_option("--manifest", tr.manifest, "Training manifest")->required();
  t->add_option("--val-manifest", tr.val_manifest, "Validation manifest");
  t->add_option("--val-fraction", tr.val_fraction,
                "Held-out fraction when no validation manifest is given")
      ->check(CLI::Range(0.0, 1.0));
  t->add_option("--config", tr.config, "Pipeline config JSON");
  t->add_option("--inputs", tr.inputs, "Stage 2: directory of predicted distance maps");
  t->add_option("--out", tr.out, "Checkpoint path")->required();
  t->add_option("--history", tr.history, "History CSV (default <out>.history.csv)");
  t->add_option("--max-quality", tr.max_quality, "Drop samples above this quality factor")
      ->check(CLI::Range(1, 6));
  t->add_flag("--augment", tr.augment, "Eightfold flip/rotation augmentation");
  t->add_option("--lr", tr.lr, "Learning rate");
  t->add_option("--epochs", tr.epochs, "Maximum epochs");
  t->add_option("--patience", tr.patience, "Early-stopping patience");
  t->add_option("--batch", tr.batch, "Batch size");
  t->add_option("--seed", tr.seed, "Seed for initialization and shuffling");
  t->add_option("--size", tr.size, "Square network input size");
  t->add_option("--depth", tr.depth, "U-Net depth");
  t->add_option("--base-filters", tr.base_filters, "Filters of the first level");

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Run a trained model");
  p->add_option("--model", pr.model, "Checkpoint")->required();
  p->add_option("--manifest", pr.manifest, "Manifest CSV")->required();
  p->add_option("--inputs", pr.inputs, "Use <id>.f32 rasters instead of SAR images");
  p->add_option("--out", pr.out, "Output directory")->required();
  p->add_flag("--resize-back", pr.resize_back, "Bicubic upsampling to the original size");

  ExtractArgs ex;
  auto* e = app.add_subcommand("extract", "Extract front masks from predictions");
  e->add_option("--method", ex.method, "Extraction method")
      ->required()
      ->check(CLI::IsMember(
          {"threshold", "crf", "second-unet", "baseline-zone", "baseline-line"}));
  e->add_option("--in", ex.in, "Directory of <id>.f32 predictions")->required();
  e->add_option("--out", ex.out, "Output directory")->required();
  e->add_option("--manifest", ex.manifest, "Manifest (images for crf, truth for overlays)");
  e->add_option("--model", ex.model, "Second-stage checkpoint");
  e->add_option("--config", ex.config, "Pipeline config JSON");
  e->add_option("--keep-fraction", ex.keep_fraction, "Threshold quantile (default 0.95)");
  e->add_option("--threshold", ex.threshold, "Binarization threshold (default 0.5)");
  e->add_option("--sigma-alpha", ex.sigma_alpha, "CRF appearance spatial scale (default 512)");
  e->add_option("--sigma-beta", ex.sigma_beta, "CRF appearance intensity scale");
  e->add_option("--sigma-gamma", ex.sigma_gamma, "CRF smoothness spatial scale");
  e->add_option("--w1", ex.w1, "CRF appearance kernel weight");
  e->add_option("--w2", ex.w2, "CRF smoothness kernel weight (default 0)");
  e->add_option("--iterations", ex.iterations, "Mean-field iterations");
  e->add_option("--crf-normalization", ex.normalization,
                "CRF kernel normalization: symmetric (default) or none");
  e->add_flag("--overlays", ex.overlays, "Write RGB overlay PNGs");

  EvaluateArgs ev;
  auto* v = app.add_subcommand("evaluate", "Tolerance dice and IoU");
  v->add_option("--pred", ev.pred, "Directory of <id>.pgm masks")->required();
  v->add_option("--manifest", ev.manifest, "Manifest with ground truth")->required();
  v->add_option("--tolerances", ev.tolerances, "Comma-separated meters (default 0,50,...,250)");
  v->add_option("--adjust-width", ev.adjust_width,
                "Target pixel count, or 'gt' for each ground truth's count");
  v->add_option("--method", ev.method, "Method label for the report");
  v->add_option("--out", ev.out, "Report CSV; a JSON summary is written alongside")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    // Help and version requests exit 0; real parse errors are usage errors.
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*s) return run_synth(synth);
    if (*d) return run_distmap(dist);
    if (*t) return run_train(tr);
    if (*p) return run_predict(pr);
    if (*e) return run_extract(ex);
    if (*v) return run_evaluate(ev);
  } catch (const ParameterError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitUsage;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitSampleErrors;
  }
  return kExitUsage;
}
