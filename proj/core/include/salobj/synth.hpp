#pragma once

#include <cstdint>

#include "salobj/dataset.hpp"

namespace salobj {

struct SynthParams {
  int n_images = 200;
  int width = 160;
  int height = 120;
  int gaze_subjects = 8;
  int click_subjects = 12;
  int builtin_count = 20;   ///< builtin proposals per pool
  int distractors = 20;     ///< random shapes per pool
  double viewing_ms = 2000.0;
  double sample_hz = 125.0;
};

/// Deterministic desk-scale dataset.
///
/// Each image is a textured background with 1-3 flat-colored rectangles or
/// ellipses. Click subjects select each object with probability proportional
/// to area x color contrast (the most salient object of an image at 0.95).
/// Gaze subjects start near the center and then fixate points around object
/// centers, choosing objects by the same weights, mixed with uniform
/// distractor fixations. Pools hold the object masks, builtin proposals and
/// random shapes in shuffled rank order.
Dataset synth_dataset(const SynthParams& params, std::uint64_t seed);

} // namespace salobj
