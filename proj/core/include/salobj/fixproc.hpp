#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "salobj/raster.hpp"

namespace salobj {

/// One raw eye-tracker sample.
struct GazeSample {
  double t_ms = 0.0;
  double x = 0.0;
  double y = 0.0;
  bool valid = true; ///< false during blinks or track loss
};

struct Fixation {
  double x = 0.0;
  double y = 0.0;
  double onset_ms = 0.0;
  double duration_ms = 0.0;
};

/// Fixations of one subject on one image.
struct FixationSet {
  std::string image_id;
  std::string subject_id;
  std::vector<Fixation> fixations;
};

struct FixationParams {
  double min_duration_ms = 160.0;
  double max_speed_px_per_100ms = 50.0;
};

/// Velocity-threshold grouping of gaze samples into fixations.
///
/// Consecutive valid samples whose displacement, scaled to a 100 ms window,
/// stays below the speed threshold belong to one group; invalid samples end a
/// group. Groups spanning less than the minimum duration are dropped. Each
/// remaining group becomes a fixation at its sample centroid.
std::vector<Fixation> detect_fixations(std::span<const GazeSample> samples, const FixationParams& params = {});

/// Clamps fixation coordinates into [0, w-1] x [0, h-1].
void clamp_fixations(FixationSet& set, int width, int height);

/// Rounded, clamped integer location of a fixation.
Pixel fixation_pixel(const Fixation& f, int width, int height);

/// All fixation pixels of the given sets, in order.
std::vector<Pixel> fixation_pixels(std::span<const FixationSet> sets, int width, int height);

/// Unblurred fixation energy: number of fixations landing on each pixel.
GrayMap fixation_count_map(std::span<const FixationSet> sets, int width, int height);

/// Count map blurred with sigma = sigma_frac * width and peak-normalized.
GrayMap render_fixation_map(std::span<const FixationSet> sets, int width, int height, double sigma_frac);

/// Centered Gaussian with peak 1 and sigma = sigma_frac * width.
GrayMap center_gaussian(int width, int height, double sigma_frac);

/// (map + centered Gaussian) / 2, renormalized by its maximum.
GrayMap add_center_bias(const GrayMap& map, double sigma_frac = 0.4);

/// Reads a `t_ms,x,y,valid` gaze log.
std::vector<GazeSample> read_gaze_csv(const std::filesystem::path& path);
void write_gaze_csv(std::span<const GazeSample> samples, const std::filesystem::path& path);

/// Writes `x,y,onset_ms,duration_ms`.
void write_fixations_csv(std::span<const Fixation> fixations, const std::filesystem::path& path);

} // namespace salobj
