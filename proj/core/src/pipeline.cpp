#include "salobj/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "salobj/error.hpp"
#include "salobj/random.hpp"

namespace salobj {

std::vector<TargetRow> build_targets(const SegmentPool& pool, const SalientGroundTruth& gt, const GrayMap& energy,
                                     int first_n) {
  if (gt.objects.empty()) throw InvalidArgument("build_targets: missing ground truth for " + pool.image_id);
  const std::vector<BinaryMask> salient = gt.salient_objects();
  std::vector<TargetRow> rows;
  for (const auto& c : pool.candidates) {
    if (c.rank > first_n) continue;
    TargetRow row;
    row.features = extract_features(c.mask, energy);
    for (const auto& obj : salient) row.target = std::max(row.target, iou(c.mask, obj));
    rows.push_back(row);
  }
  return rows;
}

GrayMap compose_topk(const SegmentPool& pool, std::span<const double> scores, int K, double min_score) {
  if (pool.empty()) throw InvalidArgument("compose_topk: empty pool");
  if (scores.size() != pool.size()) throw InvalidArgument("compose_topk: one score per candidate required");
  if (K < 1) throw InvalidArgument("compose_topk: K must be >= 1");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return pool.candidates[a].rank < pool.candidates[b].rank;
  });
  std::size_t take = std::min(order.size(), static_cast<std::size_t>(K));
  if (min_score > 0.0) {
    std::size_t passing = 0;
    while (passing < take && scores[order[passing]] >= min_score) ++passing;
    take = std::max<std::size_t>(passing, 1);
  }
  const BinaryMask& first = pool.candidates.front().mask;
  GrayMap map(first.width, first.height);
  for (std::size_t i = 0; i < take; ++i) {
    const BinaryMask& m = pool.candidates[order[i]].mask;
    for (std::size_t p = 0; p < m.data.size(); ++p) map.data[p] += m.data[p] ? 1.0 : 0.0;
  }
  const auto n = static_cast<double>(take);
  for (auto& v : map.data) v /= n;
  return map;
}

GrayMap fixation_energy(const ImageRecord& rec, const ExperimentConfig& cfg) {
  if (cfg.fixation_source == FixationSource::human) {
    if (rec.gaze.empty()) throw InvalidArgument("no gaze logs for image " + rec.id);
    const auto sets = rec.fixations(cfg.fixation);
    return fixation_count_map(sets, rec.width(), rec.height());
  }
  const auto it = rec.maps.find(cfg.algorithm);
  if (it == rec.maps.end()) throw InvalidArgument("no map '" + cfg.algorithm + "' for image " + rec.id);
  if (it->second.width != rec.width() || it->second.height != rec.height()) {
    throw InvalidArgument("map '" + cfg.algorithm + "' has wrong size for image " + rec.id);
  }
  return it->second;
}

std::vector<PreparedImage> prepare_images(const Dataset& dataset, const ExperimentConfig& cfg) {
  std::vector<PreparedImage> out;
  out.reserve(dataset.images.size());
  for (const auto& rec : dataset.images) {
    if (rec.pool.empty()) throw InvalidArgument("missing segment pool for image " + rec.id);
    PreparedImage img;
    img.id = rec.id;
    const SalientGroundTruth gt = rec.ground_truth();
    img.ground_truth = gt.combined;
    img.pool.image_id = rec.id;
    for (const auto& c : rec.pool.candidates) {
      if (c.rank <= cfg.first_n) img.pool.candidates.push_back(c);
    }
    if (img.pool.empty()) throw InvalidArgument("no candidates within first_n for image " + rec.id);
    const GrayMap energy = fixation_energy(rec, cfg);
    for (const auto& row : build_targets(img.pool, gt, energy, cfg.first_n)) {
      img.features.push_back(row.features);
      img.targets.push_back(row.target);
    }
    out.push_back(std::move(img));
  }
  return out;
}

Dataset with_ground_truth_pools(const Dataset& dataset) {
  Dataset out = dataset;
  for (auto& rec : out.images) {
    rec.pool = SegmentPool{};
    rec.pool.image_id = rec.id;
    for (const auto& obj : rec.objects) {
      if (obj.empty()) continue;
      rec.pool.candidates.push_back({obj, 0, CandidateSource::ground_truth, std::nullopt});
    }
    renumber(rec.pool);
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fold_split(std::size_t n_images, double train_fraction,
                                                                          std::uint64_t seed, int fold) {
  const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(n_images)));
  if (n_train < 1 || n_train >= n_images) {
    throw InvalidArgument("degenerate split: " + std::to_string(n_train) + " training images of " +
                          std::to_string(n_images));
  }
  std::vector<std::size_t> order(n_images);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(fold)));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

TrainingSet training_rows(std::span<const PreparedImage> images, std::span<const std::size_t> which) {
  TrainingSet data(kFeatureCount);
  for (std::size_t i : which) {
    const auto& img = images[i];
    for (std::size_t r = 0; r < img.features.size(); ++r) data.add(img.features[r], img.targets[r]);
  }
  return data;
}

namespace {

using Scorer = std::vector<double> (*)(const PreparedImage&, const Forest*);

std::vector<double> forest_scores(const PreparedImage& img, const Forest* forest) {
  std::vector<double> out;
  out.reserve(img.features.size());
  for (const auto& f : img.features) out.push_back(forest->predict(f));
  return out;
}

std::vector<double> rank_scores(const PreparedImage& img, const Forest*) {
  std::vector<double> out;
  out.reserve(img.pool.size());
  for (const auto& c : img.pool.candidates) out.push_back(-static_cast<double>(c.rank));
  return out;
}

struct FoldEval {
  FScore score;
  double f_at_threshold = 0.0;
};

FoldEval evaluate_fold(std::span<const PreparedImage> images, std::span<const std::size_t> test,
                       const std::vector<std::vector<double>>& scores, int K, const ExperimentConfig& cfg) {
  std::vector<GrayMap> maps;
  std::vector<BinaryMask> gts, binary;
  for (std::size_t t = 0; t < test.size(); ++t) {
    const auto& img = images[test[t]];
    maps.push_back(compose_topk(img.pool, scores[t], K, cfg.min_score));
    binary.push_back(threshold(maps.back(), cfg.mask_threshold));
    gts.push_back(img.ground_truth);
  }
  return {best_f(pr_curve(maps, gts, cfg.aggregation)), binary_f(binary, gts).f};
}

// Scores of every fold's test images; forests are trained once per fold.
struct FoldPlan {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::vector<double>> scores;
};

std::vector<FoldPlan> plan_folds(std::span<const PreparedImage> images, const ExperimentConfig& cfg, Scorer scorer,
                                 bool learn) {
  if (images.empty()) throw InvalidArgument("experiment: no images");
  if (cfg.n_folds < 1) throw InvalidArgument("experiment: n_folds must be >= 1");
  std::vector<FoldPlan> plans;
  for (int fold = 0; fold < cfg.n_folds; ++fold) {
    FoldPlan plan;
    std::tie(plan.train, plan.test) = fold_split(images.size(), cfg.train_fraction, cfg.seed, fold);
    Forest forest;
    if (learn) {
      const TrainingSet data = training_rows(images, plan.train);
      forest = Forest::train(data, cfg.forest, derive_seed(cfg.seed, 2000 + static_cast<std::uint64_t>(fold)));
    }
    for (std::size_t i : plan.test) plan.scores.push_back(scorer(images[i], &forest));
    plans.push_back(std::move(plan));
  }
  return plans;
}

ExperimentResult summarize(std::span<const PreparedImage> images, const std::vector<FoldPlan>& plans, int K,
                           const ExperimentConfig& cfg) {
  ExperimentResult result;
  for (std::size_t f = 0; f < plans.size(); ++f) {
    const FoldEval e = evaluate_fold(images, plans[f].test, plans[f].scores, K, cfg);
    result.folds.push_back({static_cast<int>(f), plans[f].train.size(), plans[f].test.size(), e.score, e.f_at_threshold});
    result.mean_f += e.score.f;
    result.mean_precision += e.score.precision;
    result.mean_recall += e.score.recall;
    result.mean_f_at_threshold += e.f_at_threshold;
  }
  const auto n = static_cast<double>(plans.size());
  result.mean_f /= n;
  result.mean_precision /= n;
  result.mean_recall /= n;
  result.mean_f_at_threshold /= n;
  return result;
}

std::vector<KPoint> sweep(std::span<const PreparedImage> images, const std::vector<FoldPlan>& plans,
                          const ExperimentConfig& cfg, std::span<const int> Ks) {
  std::vector<KPoint> out;
  for (int K : Ks) out.push_back({K, summarize(images, plans, K, cfg).mean_f});
  return out;
}

} // namespace

ExperimentResult run_experiment(std::span<const PreparedImage> images, const ExperimentConfig& cfg) {
  return summarize(images, plan_folds(images, cfg, forest_scores, true), cfg.K, cfg);
}

ExperimentResult run_experiment(const Dataset& dataset, const ExperimentConfig& cfg) {
  const auto images = prepare_images(dataset, cfg);
  return run_experiment(images, cfg);
}

ExperimentResult run_rank_baseline(std::span<const PreparedImage> images, const ExperimentConfig& cfg) {
  return summarize(images, plan_folds(images, cfg, rank_scores, false), cfg.K, cfg);
}

ExperimentResult upper_bound_selector(const Dataset& dataset, ExperimentConfig cfg) {
  cfg.fixation_source = FixationSource::human;
  cfg.min_score = 0.5;
  return run_experiment(with_ground_truth_pools(dataset), cfg);
}

FScore upper_bound_segmenter(const Dataset& dataset, int first_n) {
  std::vector<GrayMap> maps;
  std::vector<BinaryMask> gts;
  for (const auto& rec : dataset.images) {
    if (rec.pool.empty()) throw InvalidArgument("missing segment pool for image " + rec.id);
    const SalientGroundTruth gt = rec.ground_truth();
    BinaryMask picked(rec.width(), rec.height());
    const auto salient = gt.salient_objects();
    for (const auto& match : best_overlap_selection(rec.pool, salient, first_n)) {
      picked = mask_union(picked, rec.pool.candidates[match.candidate].mask);
    }
    maps.push_back(to_map(picked));
    gts.push_back(gt.combined);
  }
  return best_f(pr_curve(maps, gts));
}

std::vector<KPoint> ksweep(std::span<const PreparedImage> images, const ExperimentConfig& cfg, std::span<const int> Ks) {
  return sweep(images, plan_folds(images, cfg, forest_scores, true), cfg, Ks);
}

std::vector<KPoint> ksweep(const Dataset& dataset, const ExperimentConfig& cfg, std::span<const int> Ks) {
  const auto images = prepare_images(dataset, cfg);
  return ksweep(images, cfg, Ks);
}

std::vector<KPoint> ksweep_rank_baseline(std::span<const PreparedImage> images, const ExperimentConfig& cfg,
                                         std::span<const int> Ks) {
  return sweep(images, plan_folds(images, cfg, rank_scores, false), cfg, Ks);
}

} // namespace salobj
