#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salobj/raster.hpp"

namespace salobj {

inline constexpr std::size_t kShapeFeatureCount = 15;
inline constexpr std::size_t kFixationFeatureCount = 18;
inline constexpr std::size_t kFeatureCount = kShapeFeatureCount + kFixationFeatureCount;
inline constexpr int kHistBinsMajor = 4;
inline constexpr int kHistBinsMinor = 3;

/// Component positions inside a FeatureVector.
enum Feature : std::size_t {
  // shape block
  kArea,
  kCentroidX,
  kCentroidY,
  kConvexArea,
  kEulerNumber,
  kPerimeter,
  kMajorAxisLength,
  kMinorAxisLength,
  kEccentricity,
  kOrientation,
  kEquivalentDiameter,
  kSolidity,
  kExtent,
  kWidth,
  kHeight,
  // fixation block
  kMinEnergy,
  kMaxEnergy,
  kMeanEnergy,
  kWeightedCentroidX,
  kWeightedCentroidY,
  kEnergyRatio,
  kHist0, ///< 12 cells, index kHist0 + minor * 4 + major
};

using FeatureVector = std::array<double, kFeatureCount>;
using ShapeFeatures = std::array<double, kShapeFeatureCount>;
using FixationFeatures = std::array<double, kFixationFeatureCount>;

std::string_view feature_name(std::size_t index);

/// Zeroth moment, centroid and central second moments of a mask (pixel
/// units). The second moments include the 1/12 term of a unit pixel.
struct RegionMoments {
  double m00 = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double mu20 = 0.0;
  double mu02 = 0.0;
  double mu11 = 0.0;

  /// Orientation of the major axis in (-pi/2, pi/2], image coordinates.
  double orientation() const;
  double major_axis_length() const;
  double minor_axis_length() const;
  double eccentricity() const;
};

RegionMoments region_moments(const BinaryMask& mask);

/// Foreground components (8-connected) minus holes (4-connected background
/// regions not touching the border).
int euler_number(const BinaryMask& mask);

/// Area of the convex hull of all pixel squares.
double convex_hull_area(const BinaryMask& mask);

ShapeFeatures shape_features(const BinaryMask& mask);

FixationFeatures fixation_features(const BinaryMask& mask, const GrayMap& energy);

/// shape block followed by fixation block.
FeatureVector extract_features(const BinaryMask& mask, const GrayMap& energy);

struct FeatureRow {
  std::string image_id;
  int rank = 0;
  FeatureVector features{};
  double target = 0.0;
};

/// `image_id,rank,f0..f32,target_iou`
void write_features_csv(std::span<const FeatureRow> rows, const std::filesystem::path& path);

} // namespace salobj
