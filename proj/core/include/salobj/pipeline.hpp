#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "salobj/dataset.hpp"
#include "salobj/forest.hpp"
#include "salobj/metrics.hpp"
#include "salobj/segfeat.hpp"

namespace salobj {

enum class FixationSource {
  human,       ///< raw fixation counts from the gaze logs
  external_map ///< maps/<algorithm>/<id>.pgm values
};

struct ExperimentConfig {
  int K = 20;
  double train_fraction = 0.4;
  int n_folds = 10;
  FixationSource fixation_source = FixationSource::human;
  std::string algorithm;          ///< external map name when fixation_source is external_map
  double center_bias_sigma = 0.4; ///< added when fixation maps are scored as saliency maps
  double mask_threshold = 0.5;    ///< binarization of the composed top-K map
  double min_score = -1.0;        ///< candidates scoring below are not composed (<= 0 disables)
  int first_n = 200;              ///< only candidates with rank <= first_n are used
  ForestParams forest{};
  FixationParams fixation{};
  PrAggregation aggregation = PrAggregation::pooled;
  std::uint64_t seed = 1;
};

/// One candidate's training row.
struct TargetRow {
  FeatureVector features{};
  double target = 0.0;
};

/// target = max IoU against the salient objects of the image.
std::vector<TargetRow> build_targets(const SegmentPool& pool, const SalientGroundTruth& gt, const GrayMap& energy,
                                     int first_n = 200);

/// Pixel-wise mean of the K best-scoring candidates (ties: lower rank).
/// K is clamped to the pool size. Candidates scoring below min_score are
/// skipped unless that would leave nothing, in which case the best one is kept.
GrayMap compose_topk(const SegmentPool& pool, std::span<const double> scores, int K, double min_score = -1.0);

/// Feature energy for one image under the configured fixation source.
GrayMap fixation_energy(const ImageRecord& rec, const ExperimentConfig& cfg);

/// Per-image features, targets and evaluation mask, computed once and shared
/// across folds and K values.
struct PreparedImage {
  std::string id;
  BinaryMask ground_truth;
  SegmentPool pool; ///< truncated to ranks <= first_n
  std::vector<FeatureVector> features;
  std::vector<double> targets;
};

std::vector<PreparedImage> prepare_images(const Dataset& dataset, const ExperimentConfig& cfg);

/// Copy of the dataset whose pools are the per-object ground-truth segments.
Dataset with_ground_truth_pools(const Dataset& dataset);

struct FoldScore {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  FScore score;            ///< best point of the pooled PR curve
  double f_at_threshold = 0.0; ///< F of the maps binarized at mask_threshold
};

struct ExperimentResult {
  std::vector<FoldScore> folds;
  double mean_f = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f_at_threshold = 0.0;
};

/// Train/test split of one fold: (train indices, test indices).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fold_split(std::size_t n_images, double train_fraction,
                                                                          std::uint64_t seed, int fold);

/// Forest-scored top-K segmentation, averaged over seeded random splits.
ExperimentResult run_experiment(std::span<const PreparedImage> images, const ExperimentConfig& cfg);
ExperimentResult run_experiment(const Dataset& dataset, const ExperimentConfig& cfg);

/// Same folds, candidates scored by external rank (rank 1 best), no learning.
ExperimentResult run_rank_baseline(std::span<const PreparedImage> images, const ExperimentConfig& cfg);

/// Selector upper bound: pools replaced by ground-truth object segments,
/// human fixations, and composition restricted to segments predicted to be
/// salient (min_score 0.5).
ExperimentResult upper_bound_selector(const Dataset& dataset, ExperimentConfig cfg);

/// Segmenter upper bound: per salient object, the best-IoU candidate among
/// the first first_n; the union of the picks is scored by dataset_f.
FScore upper_bound_segmenter(const Dataset& dataset, int first_n = 200);

struct KPoint {
  int K = 0;
  double f = 0.0;
};

/// F for each K, reusing the same folds and trained forests.
std::vector<KPoint> ksweep(std::span<const PreparedImage> images, const ExperimentConfig& cfg, std::span<const int> Ks);
std::vector<KPoint> ksweep(const Dataset& dataset, const ExperimentConfig& cfg, std::span<const int> Ks);

/// Rank-baseline counterpart of ksweep.
std::vector<KPoint> ksweep_rank_baseline(std::span<const PreparedImage> images, const ExperimentConfig& cfg,
                                         std::span<const int> Ks);

/// Training matrix from every candidate of the given images.
TrainingSet training_rows(std::span<const PreparedImage> images, std::span<const std::size_t> which);

} // namespace salobj
