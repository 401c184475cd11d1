#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "salobj/fixproc.hpp"
#include "salobj/raster.hpp"

namespace salobj {

inline constexpr int kPrLevels = 256;
inline constexpr double kDefaultBetaSq = 0.3;

/// Threshold level i is i / 255; a pixel is predicted positive when map >= level.
double pr_threshold(int level);

struct PrCurve {
  std::array<double, kPrLevels> thresholds{};
  std::array<double, kPrLevels> precision{};
  std::array<double, kPrLevels> recall{};
};

/// Pixel confusion counts at every threshold level.
struct PrCounts {
  std::array<std::uint64_t, kPrLevels> tp{};
  std::array<std::uint64_t, kPrLevels> fp{};
  std::uint64_t positives = 0; ///< ground-truth positive pixels

  void add(const GrayMap& map, const BinaryMask& gt);
  PrCounts& operator+=(const PrCounts& other);
};

/// Precision with zero predicted positives is 1; recall with zero
/// ground-truth positives is 1.
double precision_of(std::uint64_t tp, std::uint64_t fp);
double recall_of(std::uint64_t tp, std::uint64_t positives);

enum class PrAggregation {
  pooled,   ///< TP/FP/FN summed over the dataset
  per_image ///< precision and recall averaged over images
};

PrCurve pr_curve(std::span<const GrayMap> maps, std::span<const BinaryMask> gts,
                 PrAggregation mode = PrAggregation::pooled);
PrCurve pr_curve(const PrCounts& counts);

/// (1 + b2) p r / (b2 p + r); 0 when r == 0.
double f_measure(double p, double r, double beta_sq = kDefaultBetaSq);

struct FScore {
  double f = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;
};

/// Best point of the PR curve under f_measure(.,., 0.3).
FScore best_f(const PrCurve& curve, double beta_sq = kDefaultBetaSq);

/// Max-over-thresholds F-measure of a set of maps.
double dataset_f(std::span<const GrayMap> maps, std::span<const BinaryMask> gts,
                 PrAggregation mode = PrAggregation::pooled);

/// F-measure of binary predictions, pooled over the dataset. Equivalent to
/// dataset_f restricted to thresholds in (0, 1] for 0/1 maps.
FScore binary_f(std::span<const BinaryMask> predictions, std::span<const BinaryMask> gts,
                double beta_sq = kDefaultBetaSq);

/// Mann-Whitney AUC: P(pos > neg) + P(pos == neg) / 2.
double roc_auc(const GrayMap& map, std::span<const Pixel> positives, std::span<const Pixel> negatives);

/// Mean AUC over n_splits draws of negatives (without replacement, as many as
/// positives) from the fixations of other images.
double shuffled_auc(const GrayMap& map, std::span<const Pixel> fixations_this_image,
                    std::span<const Pixel> fixations_other_images, int n_splits, std::uint64_t seed);

/// |a and b| / |a or b|; 0 when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

/// Per-image subject fixations used by the consistency protocol.
struct ImageFixations {
  int width = 0;
  int height = 0;
  std::vector<FixationSet> subjects;
};

struct ConsistencyParams {
  double sigma_frac = 0.05;
  int negative_ratio = 10;     ///< uniform negatives per positive (plain AUC)
  bool shuffled = false;       ///< score by s-AUC against other images' fixations
  int n_splits = 100;          ///< s-AUC draws
};

/// Half the subjects predict the other half: AUC averaged over images.
double consistency_fixation(std::span<const ImageFixations> images, std::uint64_t seed,
                            const ConsistencyParams& params = {});

/// Half the subjects' majority mask scored by F against the other half's.
/// `subject_masks[i]` holds one mask per subject for image i.
double consistency_segmentation(std::span<const std::vector<BinaryMask>> subject_masks, std::uint64_t seed);

/// Majority vote: mean of masks thresholded at th (>=).
BinaryMask majority_mask(std::span<const BinaryMask> masks, double th = 0.5);

/// One row of `metric,dataset,algorithm,value,n_images`.
struct ScoreRow {
  std::string metric;
  std::string dataset;
  std::string algorithm;
  double value = 0.0;
  std::size_t n_images = 0;
};

void write_scores_csv(std::span<const ScoreRow> rows, const std::filesystem::path& path);
void write_pr_csv(const PrCurve& curve, const std::filesystem::path& path);

} // namespace salobj
