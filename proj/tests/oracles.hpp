#pragma once

// Brute-force reference implementations shared by unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "salobj/raster.hpp"

namespace salobj::test {

struct BrutePr {
  std::vector<double> precision;
  std::vector<double> recall;
};

// Enumerates the 256 thresholds and every pixel of every map.
inline BrutePr brute_pr(std::span<const GrayMap> maps, std::span<const BinaryMask> gts) {
  BrutePr out;
  for (int i = 0; i < 256; ++i) {
    const double th = static_cast<double>(i) / 255.0;
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t m = 0; m < maps.size(); ++m) {
      for (std::size_t p = 0; p < maps[m].data.size(); ++p) {
        const bool pred = maps[m].data[p] >= th;
        const bool pos = gts[m].data[p] != 0;
        if (pred && pos) ++tp;
        if (pred && !pos) ++fp;
        if (!pred && pos) ++fn;
      }
    }
    out.precision.push_back(tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp));
    out.recall.push_back(tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn));
  }
  return out;
}

inline double brute_f(double p, double r) { return r == 0.0 ? 0.0 : 1.3 * p * r / (0.3 * p + r); }

inline double brute_dataset_f(std::span<const GrayMap> maps, std::span<const BinaryMask> gts) {
  const BrutePr pr = brute_pr(maps, gts);
  double best = 0.0;
  for (std::size_t i = 0; i < pr.precision.size(); ++i) best = std::max(best, brute_f(pr.precision[i], pr.recall[i]));
  return best;
}

// All positive/negative pairs, ties counted one half.
inline double brute_auc(const GrayMap& map, std::span<const Pixel> pos, std::span<const Pixel> neg) {
  double wins = 0.0;
  for (const Pixel a : pos) {
    for (const Pixel b : neg) {
      const double va = map.at(a.x, a.y), vb = map.at(b.x, b.y);
      if (va > vb) wins += 1.0;
      else if (va == vb) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

inline double brute_iou(const BinaryMask& a, const BinaryMask& b) {
  int inter = 0, uni = 0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      inter += (a.at(x, y) && b.at(x, y)) ? 1 : 0;
      uni += (a.at(x, y) || b.at(x, y)) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

} // namespace salobj::test
