#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "salobj/fixproc.hpp"
#include "salobj/proposals.hpp"
#include "salobj/raster.hpp"

namespace salobj {

/// Salient-object ground truth of one image.
struct SalientGroundTruth {
  std::vector<BinaryMask> objects;
  std::vector<double> saliency; ///< clicks / subjects, per object
  BinaryMask combined;          ///< union of objects with saliency >= 0.5

  /// Objects whose saliency reaches the threshold.
  std::vector<BinaryMask> salient_objects(double th = 0.5) const;
};

/// Everything known about one image. Loaded from disk or produced in memory
/// by the synthetic generator.
struct ImageRecord {
  std::string id;
  RgbImage image;
  std::vector<BinaryMask> objects;                     ///< objects/<id>/NN.pgm, NN from 01
  std::map<std::string, std::vector<bool>> clicks;     ///< subject -> clicked flag per object
  std::map<std::string, std::vector<GazeSample>> gaze; ///< subject -> raw gaze log
  SegmentPool pool;                                    ///< segments/<id>/
  std::map<std::string, GrayMap> maps;                 ///< algorithm -> maps/<algorithm>/<id>.pgm

  int width() const { return image.width; }
  int height() const { return image.height; }

  SalientGroundTruth ground_truth(double th = 0.5) const;

  /// Per click-subject union of clicked objects.
  std::vector<BinaryMask> subject_masks() const;

  /// Fixations detected from every gaze log, clamped to the image.
  std::vector<FixationSet> fixations(const FixationParams& params = {}) const;
};

struct Dataset {
  std::string name = "dataset";
  std::vector<ImageRecord> images;

  std::vector<std::string> algorithms() const; ///< keys of maps present on any image
};

/// On-disk layout of a dataset root:
///
///   images/<id>.ppm|.png
///   objects/<id>/NN.pgm
///   clicks.csv                     image,object,subject,clicked
///   fixations/<subject>/<id>.csv   t_ms,x,y,valid
///   segments/<id>/NNN.pgm          (+ optional scores.csv)
///   maps/<algorithm>/<id>.pgm
struct DatasetIndex {
  std::filesystem::path root;
  std::vector<std::string> image_ids;
  std::map<std::string, std::filesystem::path> image_paths;
  std::vector<std::string> gaze_subjects;
  std::vector<std::string> algorithms;

  std::filesystem::path objects_dir(const std::string& id) const { return root / "objects" / id; }
  std::filesystem::path segments_dir(const std::string& id) const { return root / "segments" / id; }
  std::filesystem::path gaze_path(const std::string& subject, const std::string& id) const {
    return root / "fixations" / subject / (id + ".csv");
  }
  std::filesystem::path map_path(const std::string& algorithm, const std::string& id) const {
    return root / "maps" / algorithm / (id + ".pgm");
  }
};

/// Scans a dataset root. Fails if images/ is missing or empty.
DatasetIndex index_dataset(const std::filesystem::path& root);

struct LoadOptions {
  bool pools = true;
  bool gaze = true;
  bool maps = true;
};

ImageRecord load_image_record(const DatasetIndex& index, const std::string& id, const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

/// Writes the full layout. Image files are written as PPM.
void write_dataset(const Dataset& dataset, const std::filesystem::path& root);

} // namespace salobj
