#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "salobj/error.hpp"
#include "salobj/pipeline.hpp"
#include "salobj/report.hpp"
#include "salobj/synth.hpp"
#include "test_support.hpp"

using namespace salobj;

namespace {

SynthParams small_params(int n = 12) {
  SynthParams p;
  p.n_images = n;
  p.width = 80;
  p.height = 60;
  p.builtin_count = 8;
  p.distractors = 6;
  return p;
}

const Dataset& small_dataset() {
  static const Dataset ds = synth_dataset(small_params(), 5);
  return ds;
}

ExperimentConfig quick_config() {
  ExperimentConfig cfg;
  cfg.n_folds = 3;
  cfg.forest.n_trees = 5;
  cfg.seed = 3;
  return cfg;
}

SegmentPool pool_of(std::vector<BinaryMask> masks) {
  SegmentPool pool;
  pool.image_id = "img";
  for (auto& m : masks) pool.candidates.push_back({std::move(m), 0, CandidateSource::external, {}});
  renumber(pool);
  return pool;
}

std::vector<std::string> tree_listing(const std::filesystem::path& root) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out.push_back(std::filesystem::relative(e.path(), root).string() + ":" + std::to_string(std::hash<std::string>{}(bytes)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_CASE("build_targets") {
  const auto obj = test::rect_mask(20, 20, 0, 0, 10, 10);
  SalientGroundTruth gt{{obj}, {1.0}, obj};
  const auto pool = pool_of({obj, test::rect_mask(20, 20, 12, 12, 5, 5), test::rect_mask(20, 20, 0, 0, 5, 10)});
  const auto rows = build_targets(pool, gt, GrayMap(20, 20));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].target == 1.0);
  CHECK(rows[1].target == 0.0);
  CHECK(rows[2].target == 0.5);
  CHECK(rows[0].features[kArea] == 0.25);

  SalientGroundTruth none{{}, {}, BinaryMask(20, 20)};
  CHECK_THROWS_AS(build_targets(pool, none, GrayMap(20, 20)), InvalidArgument);

  // Objects below the saliency threshold do not count.
  SalientGroundTruth weak{{obj, test::rect_mask(20, 20, 12, 12, 5, 5)}, {1.0, 0.25}, obj};
  CHECK(build_targets(pool, weak, GrayMap(20, 20))[1].target == 0.0);
  CHECK(build_targets(pool, gt, GrayMap(20, 20), 2).size() == 2);
}

TEST_CASE("compose_topk") {
  const auto a = test::rect_mask(10, 10, 0, 0, 5, 5);
  const auto b = test::rect_mask(10, 10, 3, 3, 5, 5);
  const auto c = test::rect_mask(10, 10, 6, 0, 4, 4);
  const auto pool = pool_of({a, b, c});
  SUBCASE("K = 1 gives the best mask") {
    const std::vector<double> s{0.2, 0.9, 0.5};
    CHECK(compose_topk(pool, s, 1) == to_map(b));
  }
  SUBCASE("K larger than the pool averages everything") {
    const std::vector<double> s{0.2, 0.9, 0.5};
    const auto m = compose_topk(pool, s, 10);
    CHECK(m.at(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(m.at(3, 3) == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("two identical masks") {
    const auto twin = pool_of({a, a, c});
    const std::vector<double> s{0.8, 0.8, 0.1};
    CHECK(compose_topk(twin, s, 2) == to_map(a));
  }
  SUBCASE("ties go to the lower rank") {
    const std::vector<double> s{0.5, 0.5, 0.5};
    CHECK(compose_topk(pool, s, 1) == to_map(a));
  }
  SUBCASE("min_score keeps at least one") {
    const std::vector<double> s{0.2, 0.3, 0.1};
    CHECK(compose_topk(pool, s, 3, 0.5) == to_map(b));
    const std::vector<double> t{0.7, 0.9, 0.1};
    const auto m = compose_topk(pool, t, 3, 0.5);
    CHECK(m.at(0, 0) == 0.5);
    CHECK(m.at(9, 0) == 0.0);
  }
  SUBCASE("values lie on the 1/K lattice") {
    Rng rng(6);
    std::vector<BinaryMask> masks;
    for (int i = 0; i < 9; ++i) masks.push_back(test::random_mask(rng, 10, 10, 0.4));
    const auto p = pool_of(masks);
    std::vector<double> s(9);
    for (auto& v : s) v = rng.uniform();
    for (int K = 1; K <= 9; ++K) {
      for (double v : compose_topk(p, s, K).data) {
        const double k = v * K;
        CHECK(std::abs(k - std::round(k)) < 1e-12);
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(compose_topk(SegmentPool{}, {}, 1), InvalidArgument);
    const std::vector<double> s{0.1, 0.2};
    CHECK_THROWS_AS(compose_topk(pool, s, 1), InvalidArgument);
    const std::vector<double> ok{0.1, 0.2, 0.3};
    CHECK_THROWS_AS(compose_topk(pool, ok, 0), InvalidArgument);
  }
}

TEST_CASE("fold_split") {
  const auto [train, test] = fold_split(100, 0.4, 1, 0);
  CHECK(train.size() == 40);
  CHECK(test.size() == 60);
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(test.begin(), test.end());
  CHECK(all.size() == 100);
  CHECK(fold_split(100, 0.4, 1, 0) == fold_split(100, 0.4, 1, 0));
  CHECK_FALSE(fold_split(100, 0.4, 1, 0) == fold_split(100, 0.4, 1, 1));
  CHECK_THROWS_AS(fold_split(3, 0.1, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(fold_split(3, 1.0, 1, 0), InvalidArgument);
}

TEST_CASE("synthetic dataset") {
  const Dataset& ds = small_dataset();
  REQUIRE(ds.images.size() == 12);
  CHECK(ds.images[0].id == "img0001");
  for (const auto& rec : ds.images) {
    CHECK(rec.width() == 80);
    CHECK(rec.objects.size() >= 1);
    CHECK(rec.objects.size() <= 3);
    CHECK(rec.gaze.size() == 8);
    CHECK(rec.clicks.size() == 12);
    for (const auto& obj : rec.objects) {
      const bool planted = std::any_of(rec.pool.candidates.begin(), rec.pool.candidates.end(),
                                       [&](const auto& c) { return c.mask == obj; });
      CHECK(planted);
    }
    for (std::size_t i = 0; i < rec.pool.size(); ++i) CHECK(rec.pool.candidates[i].rank == static_cast<int>(i) + 1);
  }

  SUBCASE("same seed, same bytes on disk") {
    test::TempDir a("synth_a"), b("synth_b");
    const auto p = small_params(10);
    write_dataset(synth_dataset(p, 9), a.path());
    write_dataset(synth_dataset(p, 9), b.path());
    CHECK(tree_listing(a.path()) == tree_listing(b.path()));
    CHECK_THROWS_AS(synth_dataset(small_params(5), 1), InvalidArgument);
  }

  SUBCASE("fixations concentrate on objects") {
    double inside = 0, outside = 0, in_area = 0, out_area = 0;
    for (const auto& rec : ds.images) {
      BinaryMask objects(rec.width(), rec.height());
      for (const auto& o : rec.objects) objects = mask_union(objects, o);
      const auto sets = rec.fixations();
      for (const Pixel p : fixation_pixels(sets, rec.width(), rec.height())) (objects.at(p.x, p.y) ? inside : outside) += 1;
      in_area += static_cast<double>(objects.count());
      out_area += static_cast<double>(objects.size() - objects.count());
    }
    CHECK(inside / in_area > 3.0 * outside / out_area);
  }
}

TEST_CASE("dataset files round trip") {
  test::TempDir dir("ds");
  const Dataset& ds = small_dataset();
  Dataset part;
  part.images.assign(ds.images.begin(), ds.images.begin() + 3);
  part.images[1].maps["toy"] = to_map(test::rect_mask(80, 60, 10, 10, 20, 20));
  write_dataset(part, dir.path());
  const Dataset back = load_dataset(dir.path());
  REQUIRE(back.images.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& x = part.images[i];
    const auto& y = back.images[i];
    CHECK(y.id == x.id);
    CHECK(y.image == x.image);
    CHECK(y.objects == x.objects);
    CHECK(y.clicks == x.clicks);
    REQUIRE(y.gaze.size() == x.gaze.size());
    for (const auto& [subject, samples] : x.gaze) {
      const auto& got = y.gaze.at(subject);
      REQUIRE(got.size() == samples.size());
      for (std::size_t k = 0; k < samples.size(); ++k) {
        CHECK(got[k].x == doctest::Approx(samples[k].x).epsilon(1e-9));
        CHECK(got[k].valid == samples[k].valid);
      }
    }
    REQUIRE(y.pool.size() == x.pool.size());
    for (std::size_t k = 0; k < x.pool.size(); ++k) CHECK(y.pool.candidates[k].mask == x.pool.candidates[k].mask);
  }
  CHECK(back.algorithms() == std::vector<std::string>{"toy"});
  CHECK(back.images[1].maps.at("toy").at(15, 15) == 1.0);
  const auto index = index_dataset(dir.path());
  CHECK(index.gaze_subjects.size() == 8);
  CHECK_THROWS_AS(index_dataset(dir / "missing"), IoError);
}

TEST_CASE("ground truth from clicks") {
  ImageRecord rec;
  rec.image = RgbImage(10, 10);
  rec.objects = {test::rect_mask(10, 10, 0, 0, 3, 3), test::rect_mask(10, 10, 5, 5, 3, 3)};
  rec.clicks = {{"a", {true, false}}, {"b", {true, true}}, {"c", {true, false}}, {"d", {false, true}}};
  const auto gt = rec.ground_truth();
  CHECK(gt.saliency == std::vector<double>{0.75, 0.5});
  CHECK(gt.combined.count() == 18);
  CHECK(gt.salient_objects(0.6).size() == 1);
  CHECK(rec.subject_masks()[1].count() == 18);
}

TEST_CASE("experiments") {
  const Dataset& ds = small_dataset();
  const auto cfg = quick_config();
  const auto images = prepare_images(ds, cfg);
  REQUIRE(images.size() == 12);

  SUBCASE("reruns are identical") {
    const auto a = run_experiment(images, cfg);
    const auto b = run_experiment(images, cfg);
    REQUIRE(a.folds.size() == 3);
    for (std::size_t f = 0; f < 3; ++f) CHECK(a.folds[f].score.f == b.folds[f].score.f);
    CHECK(a.folds[0].n_train == 5);
    CHECK(a.folds[0].n_test == 7);
    CHECK(a.mean_f >= 0.0);
    CHECK(a.mean_f <= 1.0);
  }
  SUBCASE("test targets are never read") {
    ExperimentConfig one = cfg;
    one.n_folds = 1;
    const auto [train, test] = fold_split(images.size(), one.train_fraction, one.seed, 0);
    auto corrupted = images;
    for (std::size_t i : test) {
      for (auto& t : corrupted[i].targets) t = 1.0 - t;
    }
    CHECK(run_experiment(images, one).mean_f == run_experiment(corrupted, one).mean_f);
  }
  SUBCASE("ksweep at K = 1 matches a direct run") {
    ExperimentConfig k1 = cfg;
    k1.K = 1;
    const std::vector<int> Ks{1};
    CHECK(ksweep(images, cfg, Ks)[0].f == run_experiment(images, k1).mean_f);
    const std::vector<int> many{1, 5, 20};
    for (const auto& p : ksweep(images, cfg, many)) {
      CHECK(p.f >= 0.0);
      CHECK(p.f <= 1.0);
    }
    for (const auto& p : ksweep_rank_baseline(images, cfg, many)) CHECK(p.f <= 1.0);
  }
  SUBCASE("full-frame pools score the all-positive baseline") {
    Dataset full = ds;
    for (auto& rec : full.images) rec.pool = pool_of({BinaryMask(rec.width(), rec.height(), true)});
    const auto res = run_experiment(full, cfg);
    double mean = 0.0;
    for (int fold = 0; fold < cfg.n_folds; ++fold) {
      const auto [train, test] = fold_split(full.images.size(), cfg.train_fraction, cfg.seed, fold);
      std::vector<GrayMap> maps;
      std::vector<BinaryMask> gts;
      for (std::size_t i : test) {
        maps.push_back(GrayMap(80, 60, 1.0));
        gts.push_back(full.images[i].ground_truth().combined);
      }
      mean += dataset_f(maps, gts);
    }
    CHECK(res.mean_f == doctest::Approx(mean / cfg.n_folds).epsilon(1e-12));
  }
  SUBCASE("external maps as fixation energy") {
    Dataset ext = ds;
    for (auto& rec : ext.images) rec.maps["center"] = center_gaussian(rec.width(), rec.height(), 0.3);
    ExperimentConfig c = cfg;
    c.fixation_source = FixationSource::external_map;
    c.algorithm = "center";
    const auto res = run_experiment(ext, c);
    CHECK(res.folds.size() == 3);
    c.algorithm = "missing";
    CHECK_THROWS_AS(run_experiment(ext, c), InvalidArgument);
  }
}

TEST_CASE("upper bounds") {
  const Dataset& ds = small_dataset();
  CHECK(upper_bound_segmenter(ds).f == 1.0);

  const auto full = upper_bound_segmenter(ds, 1000);
  for (int n : {1, 3, 10}) CHECK(upper_bound_segmenter(ds, n).f <= full.f);

  SUBCASE("one candidate per image") {
    Dataset single = ds;
    Rng rng(4);
    std::vector<GrayMap> maps;
    std::vector<BinaryMask> gts;
    for (auto& rec : single.images) {
      const auto pick = rec.pool.candidates[rng.below(rec.pool.size())].mask;
      rec.pool = pool_of({pick});
      maps.push_back(to_map(pick));
      gts.push_back(rec.ground_truth().combined);
    }
    CHECK(upper_bound_segmenter(single).f == dataset_f(maps, gts));
  }

  const auto sel = upper_bound_selector(ds, quick_config());
  CHECK(sel.mean_f > 0.5);
}

TEST_CASE("reports") {
  test::TempDir dir("report");
  ExperimentResult r;
  r.folds.push_back({0, 4, 6, {0.5, 0.6, 0.4, 0.5}, 0.45});
  r.mean_f = 0.5;
  write_folds_csv(r, dir / "folds.csv");
  const std::vector<KPoint> pts{{1, 0.5}, {20, 0.75}};
  write_ksweep_csv(pts, dir / "k.csv");
  std::ifstream in(dir / "k.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "K,F");
  std::getline(in, line);
  CHECK(line == "1,0.5");

  std::ostringstream table;
  const std::vector<std::string> cols{"synth"};
  const std::vector<TableRow> rows{{"forest", {0.8123}}, {"rank", {0.7}}};
  write_text_table(table, "F-measure", cols, rows);
  CHECK(table.str().find("0.8123") != std::string::npos);
  CHECK(table.str().find("forest") != std::string::npos);
}
