#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "salobj/config.hpp"
#include "salobj/error.hpp"
#include "test_support.hpp"

using namespace salobj;

TEST_CASE("defaults") {
  const ExperimentConfig cfg;
  CHECK(cfg.K == 20);
  CHECK(cfg.train_fraction == 0.4);
  CHECK(cfg.n_folds == 10);
  CHECK(cfg.forest.n_trees == 30);
  CHECK(cfg.forest.mtry == 11);
  CHECK(cfg.fixation.min_duration_ms == 160.0);
  CHECK(cfg.fixation.max_speed_px_per_100ms == 50.0);
  CHECK(cfg.center_bias_sigma == 0.4);
  CHECK(cfg.mask_threshold == 0.5);
}

TEST_CASE("config file") {
  test::TempDir dir("cfg");
  test::write_text(dir / "run.cfg",
                   "# experiment\n"
                   "K = 10\n"
                   "train_fraction=0.5   # half\n"
                   "\n"
                   "fixation_source=external\n"
                   "algorithm=gbvs\n"
                   "aggregation=per_image\n"
                   "n_trees=7\n"
                   "bootstrap=false\n"
                   "seed=99\n"
                   "min_fixation_ms=100\n");
  const auto cfg = load_config(dir / "run.cfg");
  CHECK(cfg.K == 10);
  CHECK(cfg.train_fraction == 0.5);
  CHECK(cfg.fixation_source == FixationSource::external_map);
  CHECK(cfg.algorithm == "gbvs");
  CHECK(cfg.aggregation == PrAggregation::per_image);
  CHECK(cfg.forest.n_trees == 7);
  CHECK_FALSE(cfg.forest.bootstrap);
  CHECK(cfg.seed == 99);
  CHECK(cfg.fixation.min_duration_ms == 100.0);
  CHECK(cfg.n_folds == 10);
}

TEST_CASE("invalid settings") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(apply_setting(cfg, "bogus", "1"), InvalidArgument);
  CHECK_THROWS_AS(apply_setting(cfg, "K", "0"), InvalidArgument);
  CHECK_THROWS_AS(apply_setting(cfg, "K", "3x"), InvalidArgument);
  CHECK_THROWS_AS(apply_setting(cfg, "train_fraction", "1.5"), InvalidArgument);
  CHECK_THROWS_AS(apply_setting(cfg, "fixation_source", "robot"), InvalidArgument);
  CHECK_THROWS_AS(apply_setting(cfg, "bootstrap", "maybe"), InvalidArgument);

  test::TempDir dir("cfg_bad");
  test::write_text(dir / "bad.cfg", "K 10\n");
  CHECK_THROWS_AS(load_config(dir / "bad.cfg"), InvalidArgument);
  CHECK_THROWS_AS(load_config(dir / "none.cfg"), IoError);
}
