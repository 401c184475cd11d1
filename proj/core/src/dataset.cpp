#include "salobj/dataset.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "csv.hpp"
#include "salobj/error.hpp"
#include "salobj/image_io.hpp"

namespace salobj {

namespace fs = std::filesystem;

std::vector<BinaryMask> SalientGroundTruth::salient_objects(double th) const {
  std::vector<BinaryMask> out;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (saliency[i] >= th) out.push_back(objects[i]);
  }
  return out;
}

SalientGroundTruth ImageRecord::ground_truth(double th) const {
  SalientGroundTruth gt;
  gt.objects = objects;
  gt.saliency.assign(objects.size(), 0.0);
  if (!clicks.empty()) {
    for (const auto& [subject, flags] : clicks) {
      for (std::size_t o = 0; o < objects.size() && o < flags.size(); ++o) gt.saliency[o] += flags[o] ? 1.0 : 0.0;
    }
    for (auto& s : gt.saliency) s /= static_cast<double>(clicks.size());
  }
  gt.combined = BinaryMask(image.width, image.height);
  for (std::size_t o = 0; o < objects.size(); ++o) {
    if (gt.saliency[o] >= th) gt.combined = mask_union(gt.combined, objects[o]);
  }
  return gt;
}

std::vector<BinaryMask> ImageRecord::subject_masks() const {
  std::vector<BinaryMask> out;
  for (const auto& [subject, flags] : clicks) {
    BinaryMask m(image.width, image.height);
    for (std::size_t o = 0; o < objects.size() && o < flags.size(); ++o) {
      if (flags[o]) m = mask_union(m, objects[o]);
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<FixationSet> ImageRecord::fixations(const FixationParams& params) const {
  std::vector<FixationSet> out;
  for (const auto& [subject, samples] : gaze) {
    FixationSet set{id, subject, {}};
    if (!samples.empty()) set.fixations = detect_fixations(samples, params);
    clamp_fixations(set, image.width, image.height);
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<std::string> Dataset::algorithms() const {
  std::set<std::string> names;
  for (const auto& img : images) {
    for (const auto& [name, map] : img.maps) names.insert(name);
  }
  return {names.begin(), names.end()};
}

DatasetIndex index_dataset(const fs::path& root) {
  DatasetIndex index;
  index.root = root;
  const fs::path images = root / "images";
  if (!fs::is_directory(images)) throw IoError("dataset has no images/ directory: " + root.string());
  for (const auto& entry : fs::directory_iterator(images)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext != ".ppm" && ext != ".png") continue;
    const std::string id = entry.path().stem().string();
    if (!index.image_paths.emplace(id, entry.path()).second) {
      throw FormatError("duplicate image id " + id + " in " + images.string());
    }
    index.image_ids.push_back(id);
  }
  if (index.image_ids.empty()) throw IoError("no images found in " + images.string());
  std::sort(index.image_ids.begin(), index.image_ids.end());

  const auto list_dirs = [](const fs::path& dir) {
    std::vector<std::string> names;
    if (!fs::is_directory(dir)) return names;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
  };
  index.gaze_subjects = list_dirs(root / "fixations");
  index.algorithms = list_dirs(root / "maps");
  return index;
}

namespace {

std::vector<BinaryMask> load_objects(const fs::path& dir) {
  std::vector<BinaryMask> out;
  if (!fs::is_directory(dir)) return out;
  static const std::regex name(R"((\d+)\.pgm)");
  std::map<long, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string file = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(file, m, name)) files.emplace(std::stol(m[1].str()), entry.path());
  }
  long expected = 1;
  for (const auto& [n, path] : files) {
    if (n != expected) throw FormatError(dir.string() + ": object numbering must be contiguous from 01");
    out.push_back(load_mask(path));
    ++expected;
  }
  return out;
}

// image -> subject -> flags
using ClickTable = std::map<std::string, std::map<std::string, std::map<long, bool>>>;

ClickTable load_clicks(const fs::path& path) {
  ClickTable table;
  if (!fs::exists(path)) return table;
  const auto csv = detail::read_csv(path, {"image", "object", "subject", "clicked"});
  for (const auto& row : csv.rows) {
    const long object = detail::parse_long(row[1], path);
    if (object < 1) throw FormatError(path.string() + ": object numbers start at 1");
    table[row[0]][row[2]][object] = detail::parse_long(row[3], path) != 0;
  }
  return table;
}

ImageRecord load_record(const DatasetIndex& index, const std::string& id, const LoadOptions& options,
                        const ClickTable& clicks) {
  const auto it = index.image_paths.find(id);
  if (it == index.image_paths.end()) throw InvalidArgument("unknown image id " + id);
  ImageRecord rec;
  rec.id = id;
  rec.image = load_image(it->second);
  rec.objects = load_objects(index.objects_dir(id));
  for (const auto& obj : rec.objects) {
    if (obj.width != rec.width() || obj.height != rec.height()) {
      throw FormatError("object mask size differs from image " + id);
    }
  }
  if (const auto c = clicks.find(id); c != clicks.end()) {
    for (const auto& [subject, flags] : c->second) {
      std::vector<bool> row(rec.objects.size(), false);
      for (const auto& [object, clicked] : flags) {
        if (static_cast<std::size_t>(object) > rec.objects.size()) {
          throw FormatError("clicks.csv references missing object " + std::to_string(object) + " of " + id);
        }
        row[static_cast<std::size_t>(object - 1)] = clicked;
      }
      rec.clicks.emplace(subject, std::move(row));
    }
  }
  if (options.gaze) {
    for (const auto& subject : index.gaze_subjects) {
      const fs::path p = index.gaze_path(subject, id);
      if (fs::exists(p)) rec.gaze.emplace(subject, read_gaze_csv(p));
    }
  }
  if (options.pools && fs::is_directory(index.segments_dir(id))) {
    rec.pool = load_pool(index.segments_dir(id));
    rec.pool.image_id = id;
  }
  if (options.maps) {
    for (const auto& alg : index.algorithms) {
      const fs::path p = index.map_path(alg, id);
      if (fs::exists(p)) rec.maps.emplace(alg, load_map(p));
    }
  }
  return rec;
}

} // namespace

ImageRecord load_image_record(const DatasetIndex& index, const std::string& id, const LoadOptions& options) {
  return load_record(index, id, options, load_clicks(index.root / "clicks.csv"));
}

Dataset load_dataset(const fs::path& root, const LoadOptions& options) {
  const DatasetIndex index = index_dataset(root);
  const ClickTable clicks = load_clicks(root / "clicks.csv");
  Dataset ds;
  ds.name = fs::absolute(root).lexically_normal().filename().string();
  if (ds.name.empty()) ds.name = fs::absolute(root).lexically_normal().parent_path().filename().string();
  for (const auto& id : index.image_ids) ds.images.push_back(load_record(index, id, options, clicks));
  return ds;
}

void write_dataset(const Dataset& dataset, const fs::path& root) {
  fs::create_directories(root / "images");
  auto clicks = detail::open_output(root / "clicks.csv");
  clicks << "image,object,subject,clicked\n";
  for (const auto& rec : dataset.images) {
    save_ppm(rec.image, root / "images" / (rec.id + ".ppm"));
    if (!rec.objects.empty()) {
      const fs::path dir = root / "objects" / rec.id;
      fs::create_directories(dir);
      for (std::size_t o = 0; o < rec.objects.size(); ++o) {
        std::string num = std::to_string(o + 1);
        if (num.size() < 2) num.insert(0, 1, '0');
        save_mask(rec.objects[o], dir / (num + ".pgm"));
      }
    }
    for (const auto& [subject, flags] : rec.clicks) {
      for (std::size_t o = 0; o < flags.size(); ++o) {
        clicks << rec.id << ',' << (o + 1) << ',' << subject << ',' << (flags[o] ? 1 : 0) << '\n';
      }
    }
    for (const auto& [subject, samples] : rec.gaze) {
      write_gaze_csv(samples, root / "fixations" / subject / (rec.id + ".csv"));
    }
    if (!rec.pool.empty()) save_pool(rec.pool, root / "segments" / rec.id);
    for (const auto& [alg, map] : rec.maps) {
      fs::create_directories(root / "maps" / alg);
      save_map(map, root / "maps" / alg / (rec.id + ".pgm"));
    }
  }
  if (!clicks) throw IoError("write failed for clicks.csv");
}

} // namespace salobj
