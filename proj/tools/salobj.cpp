#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "salobj/config.hpp"
#include "salobj/dataset.hpp"
#include "salobj/error.hpp"
#include "salobj/fixproc.hpp"
#include "salobj/forest.hpp"
#include "salobj/image_io.hpp"
#include "salobj/metrics.hpp"
#include "salobj/pipeline.hpp"
#include "salobj/random.hpp"
#include "salobj/report.hpp"
#include "salobj/stats.hpp"
#include "salobj/synth.hpp"

namespace fs = std::filesystem;
using namespace salobj;

namespace {

struct Common {
  std::string root;
  std::string out;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> settings;

  ExperimentConfig experiment() const {
    ExperimentConfig cfg;
    if (!config.empty()) cfg = load_config(config);
    for (const auto& kv : settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    return cfg;
  }

  fs::path out_or(const fs::path& fallback) const { return out.empty() ? fallback : fs::path(out); }
};

void add_common(CLI::App* cmd, Common& c, bool needs_root) {
  auto* root = cmd->add_option("--root", c.root, "dataset root directory");
  if (needs_root) root->required();
  cmd->add_option("--out", c.out, "output file or directory");
  cmd->add_option("--config", c.config, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--set", c.settings, "override one configuration key (key=value), repeatable");
}

std::string dataset_label(const fs::path& root) {
  const fs::path p = root.has_filename() ? root : root.parent_path();
  return p.filename().string();
}

// Blurred human fixation map with center bias, as scored against other maps.
GrayMap human_saliency_map(const ImageRecord& rec, const ExperimentConfig& cfg, double sigma_frac) {
  const auto sets = rec.fixations(cfg.fixation);
  return add_center_bias(render_fixation_map(sets, rec.width(), rec.height(), sigma_frac), cfg.center_bias_sigma);
}

std::vector<BinaryMask> ground_truths(const Dataset& data) {
  std::vector<BinaryMask> out;
  for (const auto& rec : data.images) out.push_back(rec.ground_truth().combined);
  return out;
}

std::vector<GrayMap> algorithm_maps(const Dataset& data, const std::string& algorithm) {
  std::vector<GrayMap> out;
  for (const auto& rec : data.images) {
    const auto it = rec.maps.find(algorithm);
    if (it == rec.maps.end()) throw InvalidArgument("no map '" + algorithm + "' for image " + rec.id);
    out.push_back(it->second);
  }
  return out;
}

int cmd_synth(const Common& c, const SynthParams& params) {
  if (c.out.empty()) throw InvalidArgument("synth: --out is required");
  const Dataset data = synth_dataset(params, c.seed.value_or(1));
  write_dataset(data, c.out);
  std::printf("wrote %zu images to %s\n", data.images.size(), c.out.c_str());
  return 0;
}

int cmd_fixmap(const Common& c, double sigma_frac, bool center_bias) {
  const ExperimentConfig cfg = c.experiment();
  const Dataset data = load_dataset(c.root, {.pools = false, .gaze = true, .maps = false});
  const fs::path dir = c.out_or(fs::path(c.root) / "maps" / "human");
  fs::create_directories(dir);
  for (const auto& rec : data.images) {
    if (rec.gaze.empty()) throw InvalidArgument("no gaze logs for image " + rec.id);
    const auto sets = rec.fixations(cfg.fixation);
    GrayMap map = render_fixation_map(sets, rec.width(), rec.height(), sigma_frac);
    if (center_bias) map = add_center_bias(map, cfg.center_bias_sigma);
    save_map(map, dir / (rec.id + ".pgm"));
  }
  std::printf("wrote %zu maps to %s\n", data.images.size(), dir.c_str());
  return 0;
}

int cmd_stats(const Common& c, const std::string& histogram) {
  const Dataset data = load_dataset(c.root, {.pools = false, .gaze = false, .maps = false});
  std::vector<ObjectStats> rows;
  for (const auto& rec : data.images) {
    const GrayMap edges = default_edge_map(rec.image);
    for (std::size_t k = 0; k < rec.objects.size(); ++k) {
      if (rec.objects[k].empty()) continue;
      ObjectStats s = object_stats(rec.image, edges, rec.objects[k]);
      s.image_id = rec.id;
      s.object_id = std::to_string(k + 1);
      rows.push_back(std::move(s));
    }
  }
  write_stats_csv(rows, c.out_or("stats.csv"));
  if (!histogram.empty()) write_stats_histogram_csv(rows, histogram);
  std::printf("%zu objects\n", rows.size());
  return 0;
}

int cmd_consistency(const Common& c, bool shuffled) {
  const ExperimentConfig cfg = c.experiment();
  const Dataset data = load_dataset(c.root, {.pools = false, .gaze = true, .maps = false});
  std::vector<ImageFixations> fixations;
  std::vector<std::vector<BinaryMask>> clicks;
  for (const auto& rec : data.images) {
    if (rec.gaze.size() >= 2) fixations.push_back({rec.width(), rec.height(), rec.fixations(cfg.fixation)});
    if (rec.clicks.size() >= 2) clicks.push_back(rec.subject_masks());
  }
  const std::string name = dataset_label(c.root);
  std::vector<ScoreRow> rows;
  if (!fixations.empty()) {
    ConsistencyParams params;
    params.shuffled = shuffled;
    const double v = consistency_fixation(fixations, cfg.seed, params);
    rows.push_back({shuffled ? "fixation_consistency_sauc" : "fixation_consistency_auc", name, "human", v,
                    fixations.size()});
  }
  if (!clicks.empty()) {
    rows.push_back({"segmentation_consistency_f", name, "human", consistency_segmentation(clicks, cfg.seed),
                    clicks.size()});
  }
  if (rows.empty()) throw InvalidArgument("consistency: no image has two or more subjects");
  write_scores_csv(rows, c.out_or("consistency.csv"));
  for (const auto& r : rows) std::printf("%s %.4f\n", r.metric.c_str(), r.value);
  return 0;
}

// Fixation prediction: s-AUC of each map against human fixations.
int cmd_eval_fixation(const Common& c, int n_splits) {
  const ExperimentConfig cfg = c.experiment();
  const Dataset data = load_dataset(c.root, {.pools = false, .gaze = true, .maps = true});
  std::vector<std::vector<Pixel>> fix;
  for (const auto& rec : data.images) {
    if (rec.gaze.empty()) throw InvalidArgument("no gaze logs for image " + rec.id);
    fix.push_back(fixation_pixels(rec.fixations(cfg.fixation), rec.width(), rec.height()));
  }
  const std::string name = dataset_label(c.root);
  std::vector<ScoreRow> rows;
  const auto algorithms = data.algorithms();
  if (algorithms.empty()) throw InvalidArgument("eval-fixation: no maps under " + c.root + "/maps");
  for (const auto& alg : algorithms) {
    const auto maps = algorithm_maps(data, alg);
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      if (fix[i].empty()) continue;
      // Fixations of other images, rescaled to this image's raster.
      std::vector<Pixel> others;
      for (std::size_t j = 0; j < fix.size(); ++j) {
        if (j == i) continue;
        const auto& o = data.images[j];
        for (const Pixel p : fix[j]) {
          others.push_back({std::min(maps[i].width - 1, p.x * maps[i].width / o.width()),
                            std::min(maps[i].height - 1, p.y * maps[i].height / o.height())});
        }
      }
      if (others.size() < fix[i].size()) continue;
      total += shuffled_auc(maps[i], fix[i], others, n_splits, derive_seed(cfg.seed, i));
      ++n;
    }
    if (n == 0) throw InvalidArgument("eval-fixation: not enough fixations to score");
    rows.push_back({"sauc", name, alg, total / static_cast<double>(n), n});
  }
  write_scores_csv(rows, c.out_or("eval_fixation.csv"));
  for (const auto& r : rows) std::printf("%-16s s-AUC %.4f\n", r.algorithm.c_str(), r.value);
  return 0;
}

// Salient-object segmentation: PR curves and F-measure of each map set.
int cmd_eval_salobj(const Common& c, double human_sigma) {
  const ExperimentConfig cfg = c.experiment();
  const Dataset data = load_dataset(c.root, {.pools = false, .gaze = true, .maps = true});
  const auto gts = ground_truths(data);
  const fs::path dir = c.out_or("eval_salobj");
  fs::create_directories(dir);
  const std::string name = dataset_label(c.root);
  std::vector<ScoreRow> rows;
  const auto score = [&](const std::string& alg, const std::vector<GrayMap>& maps) {
    const PrCurve curve = pr_curve(maps, gts, cfg.aggregation);
    write_pr_csv(curve, dir / ("pr_" + alg + ".csv"));
    rows.push_back({"f_measure", name, alg, best_f(curve).f, maps.size()});
  };
  const bool have_gaze = std::all_of(data.images.begin(), data.images.end(), [](const auto& r) { return !r.gaze.empty(); });
  if (have_gaze) {
    std::vector<GrayMap> human;
    for (const auto& rec : data.images) human.push_back(human_saliency_map(rec, cfg, human_sigma));
    score("human", human);
  }
  for (const auto& alg : data.algorithms()) score(alg, algorithm_maps(data, alg));
  if (rows.empty()) throw InvalidArgument("eval-salobj: no gaze logs and no maps to score");
  write_scores_csv(rows, dir / "scores.csv");
  for (const auto& r : rows) std::printf("%-16s F %.4f\n", r.algorithm.c_str(), r.value);
  return 0;
}

int cmd_train(const Common& c) {
  if (c.out.empty()) throw InvalidArgument("train: --out model path is required");
  const ExperimentConfig cfg = c.experiment();
  const Dataset data = load_dataset(c.root);
  const auto images = prepare_images(data, cfg);
  std::vector<std::size_t> all(images.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const TrainingSet rows = training_rows(images, all);
  const Forest forest = Forest::train(rows, cfg.forest, cfg.seed);
  forest.save(fs::path(c.out));
  std::printf("trained %zu trees on %zu rows from %zu images\n", forest.trees().size(), rows.rows(), images.size());
  return 0;
}

int cmd_predict(const Common& c, const std::string& model_path) {
  const ExperimentConfig cfg = c.experiment();
  const Forest forest = Forest::load(fs::path(model_path));
  if (forest.n_features() != kFeatureCount) throw InvalidArgument("predict: model has the wrong feature count");
  const DatasetIndex index = index_dataset(c.root);
  const fs::path dir = c.out_or("predictions");
  fs::create_directories(dir);
  for (const auto& id : index.image_ids) {
    ImageRecord rec = load_image_record(index, id);
    if (rec.pool.empty()) throw InvalidArgument("missing segment pool for image " + id);
    const GrayMap energy = fixation_energy(rec, cfg);
    std::vector<double> scores;
    for (const auto& cand : rec.pool.candidates) {
      scores.push_back(cand.rank <= cfg.first_n ? forest.predict(extract_features(cand.mask, energy)) : -1e300);
    }
    save_map(compose_topk(rec.pool, scores, cfg.K, cfg.min_score), dir / (id + ".pgm"));
  }
  std::printf("wrote %zu maps to %s\n", index.image_ids.size(), dir.c_str());
  return 0;
}

int cmd_ksweep(const Common& c, const std::vector<int>& Ks, const std::string& baseline) {
  const ExperimentConfig cfg = c.experiment();
  const Dataset data = load_dataset(c.root);
  const auto images = prepare_images(data, cfg);
  const auto points = ksweep(images, cfg, Ks);
  write_ksweep_csv(points, c.out_or("ksweep.csv"));
  if (!baseline.empty()) write_ksweep_csv(ksweep_rank_baseline(images, cfg, Ks), baseline);
  for (const auto& p : points) std::printf("K=%-4d F %.4f\n", p.K, p.f);
  return 0;
}

int cmd_bench(const Common& c) {
  const ExperimentConfig cfg = c.experiment();
  const Dataset data = load_dataset(c.root);
  const fs::path dir = c.out_or("bench");
  fs::create_directories(dir);
  const std::string name = dataset_label(c.root);

  std::vector<TableRow> table;
  std::vector<ScoreRow> scores;
  const auto record = [&](const std::string& label, double f) {
    table.push_back({label, {f}});
    scores.push_back({"f_measure", name, label, f, data.images.size()});
  };

  const auto images = prepare_images(data, cfg);
  const ExperimentResult ours = run_experiment(images, cfg);
  write_folds_csv(ours, dir / "folds_human.csv");
  record("ours/human", ours.mean_f);
  for (const auto& alg : data.algorithms()) {
    ExperimentConfig alt = cfg;
    alt.fixation_source = FixationSource::external_map;
    alt.algorithm = alg;
    const ExperimentResult r = run_experiment(data, alt);
    write_folds_csv(r, dir / ("folds_" + alg + ".csv"));
    record("ours/" + alg, r.mean_f);
  }
  record("rank-baseline", run_rank_baseline(images, cfg).mean_f);
  record("ideal-segmenter", upper_bound_selector(data, cfg).mean_f);
  record("best-segment", upper_bound_segmenter(data, cfg.first_n).f);

  write_scores_csv(scores, dir / "scores.csv");
  const std::vector<std::string> columns{name};
  const std::string title = "F-measure, K=" + std::to_string(cfg.K);
  std::ofstream txt(dir / "table.txt");
  if (!txt) throw IoError("cannot write " + (dir / "table.txt").string());
  write_text_table(txt, title, columns, table);
  write_text_table(std::cout, title, columns, table);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"salient object segmentation from eye fixations"};
  app.require_subcommand(1);

  Common c;
  SynthParams synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(s, c, false);
  s->add_option("--images", synth.n_images, "number of images")->check(CLI::Range(10, 100000));
  s->add_option("--width", synth.width, "image width")->check(CLI::Range(16, 4096));
  s->add_option("--height", synth.height, "image height")->check(CLI::Range(16, 4096));
  s->add_option("--proposals", synth.builtin_count, "builtin proposals per pool")->check(CLI::NonNegativeNumber);
  s->add_option("--distractors", synth.distractors, "random distractor masks per pool")->check(CLI::NonNegativeNumber);

  double fix_sigma = 0.05;
  bool fix_center = false;
  auto* fm = app.add_subcommand("fixmap", "render human fixation maps");
  add_common(fm, c, true);
  fm->add_option("--sigma", fix_sigma, "blur sigma as a fraction of image width")->check(CLI::PositiveNumber);
  fm->add_flag("--center-bias", fix_center, "superimpose the centered Gaussian");

  std::string hist;
  auto* st = app.add_subcommand("stats", "per-object design-bias statistics");
  add_common(st, c, true);
  st->add_option("--histogram", hist, "also write normalized histograms to this CSV");

  bool shuffled = false;
  auto* co = app.add_subcommand("consistency", "inter-subject consistency");
  add_common(co, c, true);
  co->add_flag("--shuffled", shuffled, "score fixations with shuffled AUC");

  int n_splits = 100;
  auto* ef = app.add_subcommand("eval-fixation", "score maps as fixation predictors (s-AUC)");
  add_common(ef, c, true);
  ef->add_option("--splits", n_splits, "negative draws per image")->check(CLI::PositiveNumber);

  double human_sigma = 0.03;
  auto* es = app.add_subcommand("eval-salobj", "score maps as salient-object maps (PR, F)");
  add_common(es, c, true);
  es->add_option("--human-sigma", human_sigma, "blur of human fixation maps")->check(CLI::PositiveNumber);

  auto* tr = app.add_subcommand("train", "train a forest on every image of a dataset");
  add_common(tr, c, true);

  std::string model;
  auto* pr = app.add_subcommand("predict", "write top-K segment maps from a trained forest");
  add_common(pr, c, true);
  pr->add_option("--model", model, "forest file")->required()->check(CLI::ExistingFile);

  std::vector<int> Ks{1, 2, 3, 5, 10, 15, 20, 30, 50};
  std::string baseline;
  auto* ks = app.add_subcommand("ksweep", "F-measure as a function of K");
  add_common(ks, c, true);
  ks->add_option("--k", Ks, "K values")->delimiter(',')->check(CLI::PositiveNumber);
  ks->add_option("--baseline", baseline, "also write the rank-order baseline sweep here");

  auto* be = app.add_subcommand("bench", "full benchmark table");
  add_common(be, c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (s->parsed()) return cmd_synth(c, synth);
    if (fm->parsed()) return cmd_fixmap(c, fix_sigma, fix_center);
    if (st->parsed()) return cmd_stats(c, hist);
    if (co->parsed()) return cmd_consistency(c, shuffled);
    if (ef->parsed()) return cmd_eval_fixation(c, n_splits);
    if (es->parsed()) return cmd_eval_salobj(c, human_sigma);
    if (tr->parsed()) return cmd_train(c);
    if (pr->parsed()) return cmd_predict(c, model);
    if (ks->parsed()) return cmd_ksweep(c, Ks, baseline);
    if (be->parsed()) return cmd_bench(c);
  } catch (const salobj::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
