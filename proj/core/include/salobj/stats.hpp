#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "salobj/raster.hpp"

namespace salobj {

/// Design-bias statistics of one annotated object.
struct ObjectStats {
  std::string image_id;
  std::string object_id;
  double local_contrast = 0.0;
  double global_contrast = 0.0;
  double boundary_strength = 0.0;
  double size_fraction = 0.0;
};

/// Mean chi-square distance between foreground and background colors inside
/// patch x patch windows centered on the object's boundary pixels.
double local_color_contrast(const RgbImage& img, const BinaryMask& mask, int patch = 5, int bins = 8);

/// Chi-square distance between object and background color histograms.
double global_color_contrast(const RgbImage& img, const BinaryMask& mask, int bins = 8);

/// Mean edge response in patch x patch windows around boundary pixels.
double boundary_strength(const GrayMap& edge_map, const BinaryMask& mask, int patch = 3);

/// Sobel magnitude, max over channels, divided by the global maximum.
GrayMap default_edge_map(const RgbImage& img);

/// Fraction of image pixels covered by the mask.
double object_size(const BinaryMask& mask);

/// All four statistics, edge map supplied by the caller.
ObjectStats object_stats(const RgbImage& img, const GrayMap& edge_map, const BinaryMask& mask, int bins = 8);

/// One row per object: image_id,object_id,local_contrast,global_contrast,boundary_strength,size_fraction.
void write_stats_csv(std::span<const ObjectStats> rows, const std::filesystem::path& path);

/// Per-statistic normalized histograms over [0,1]:
/// bin_lo,bin_hi,local_contrast,global_contrast,boundary_strength,size_fraction.
void write_stats_histogram_csv(std::span<const ObjectStats> rows, const std::filesystem::path& path, int n_bins = 20);

} // namespace salobj
