#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "salobj/error.hpp"
#include "salobj/fixproc.hpp"
#include "test_support.hpp"

using namespace salobj;

namespace {

std::vector<GazeSample> dwell(double t0, int n, double x, double y, double dt = 8.0) {
  std::vector<GazeSample> out;
  for (int i = 0; i < n; ++i) out.push_back({t0 + i * dt, x, y, true});
  return out;
}

void append(std::vector<GazeSample>& a, const std::vector<GazeSample>& b) { a.insert(a.end(), b.begin(), b.end()); }

// Oracle: mark breaks first, then cut the recording into runs.
std::vector<Fixation> oracle_fixations(const std::vector<GazeSample>& s, double min_ms, double max_speed) {
  std::vector<std::vector<std::size_t>> runs(1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].valid) {
      runs.emplace_back();
      continue;
    }
    auto& cur = runs.back();
    if (!cur.empty()) {
      const auto& p = s[cur.back()];
      const double v = std::sqrt((s[i].x - p.x) * (s[i].x - p.x) + (s[i].y - p.y) * (s[i].y - p.y)) /
                       (s[i].t_ms - p.t_ms) * 100.0;
      if (v >= max_speed) runs.emplace_back();
    }
    runs.back().push_back(i);
  }
  std::vector<Fixation> out;
  for (const auto& r : runs) {
    if (r.empty()) continue;
    const double span = s[r.back()].t_ms - s[r.front()].t_ms;
    if (span < min_ms) continue;
    double x = 0, y = 0;
    for (auto i : r) {
      x += s[i].x;
      y += s[i].y;
    }
    out.push_back({x / static_cast<double>(r.size()), y / static_cast<double>(r.size()), s[r.front()].t_ms, span});
  }
  return out;
}

} // namespace

TEST_CASE("detect_fixations examples") {
  SUBCASE("30 samples at one point") {
    const auto fx = detect_fixations(dwell(0, 30, 100, 100));
    REQUIRE(fx.size() == 1);
    CHECK(fx[0].x == 100.0);
    CHECK(fx[0].y == 100.0);
    CHECK(fx[0].duration_ms == 232.0);
    CHECK(fx[0].onset_ms == 0.0);
  }
  SUBCASE("72 ms dwell then a jump is too short") {
    auto s = dwell(0, 10, 50, 50);
    s.push_back({80, 300, 300, true});
    CHECK(detect_fixations(s).empty());
  }
  SUBCASE("two clusters split by one saccade sample") {
    auto s = dwell(0, 25, 40, 40);
    s.push_back({200, 120, 90, true});
    append(s, dwell(208, 25, 200, 140));
    const auto fx = detect_fixations(s);
    REQUIRE(fx.size() == 2);
    CHECK(fx[0].x == 40.0);
    CHECK(fx[1].x == 200.0);
    CHECK(fx[1].onset_ms == 208.0);
  }
  SUBCASE("invalid sample ends a group") {
    auto s = dwell(0, 25, 10, 10);
    s.push_back({200, 10, 10, false});
    append(s, dwell(208, 25, 10, 10));
    CHECK(detect_fixations(s).size() == 2);
  }
  SUBCASE("speed is scaled to 100 ms") {
    // 3.9 px per 8 ms = 48.75 px/100ms stays in one group; 4 px = 50 breaks.
    std::vector<GazeSample> slow, fast;
    for (int i = 0; i < 30; ++i) {
      slow.push_back({i * 8.0, i * 3.9, 0, true});
      fast.push_back({i * 8.0, i * 4.0, 0, true});
    }
    CHECK(detect_fixations(slow).size() == 1);
    CHECK(detect_fixations(fast).empty());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(detect_fixations({}), InvalidArgument);
    std::vector<GazeSample> s{{0, 1, 1, true}, {0, 1, 1, true}};
    CHECK_THROWS_AS(detect_fixations(s), InvalidArgument);
  }
}

TEST_CASE("detect_fixations matches the run-splitting oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GazeSample> s;
    double t = 0, x = rng.uniform(0, 100), y = rng.uniform(0, 100);
    const int n = 20 + static_cast<int>(rng.below(200));
    for (int i = 0; i < n; ++i) {
      t += 8.0;
      if (rng.bernoulli(0.05)) {
        x = rng.uniform(0, 100);
        y = rng.uniform(0, 100);
      } else {
        x += rng.normal() * 1.5;
        y += rng.normal() * 1.5;
      }
      s.push_back({t, x, y, !rng.bernoulli(0.02)});
    }
    const auto got = detect_fixations(s);
    const auto want = oracle_fixations(s, 160.0, 50.0);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].x == doctest::Approx(want[i].x).epsilon(1e-12));
      CHECK(got[i].y == doctest::Approx(want[i].y).epsilon(1e-12));
      CHECK(got[i].onset_ms == want[i].onset_ms);
      CHECK(got[i].duration_ms == want[i].duration_ms);
      CHECK(got[i].duration_ms >= 160.0);
    }
    CHECK(got.size() <= static_cast<std::size_t>(std::floor((s.back().t_ms - s.front().t_ms) / 160.0)));

    // Translation equivariance.
    auto shifted = s;
    for (auto& g : shifted) {
      g.x += 13.25;
      g.y -= 7.5;
    }
    const auto moved = detect_fixations(shifted);
    REQUIRE(moved.size() == got.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(moved[i].x == doctest::Approx(got[i].x + 13.25).epsilon(1e-9));
      CHECK(moved[i].y == doctest::Approx(got[i].y - 7.5).epsilon(1e-9));
    }
  }
}

TEST_CASE("fixation maps") {
  const int w = 41, h = 31;
  SUBCASE("no fixations") {
    const std::vector<FixationSet> none{{"a", "s", {}}};
    CHECK(render_fixation_map(none, w, h, 0.05).max_value() == 0.0);
  }
  SUBCASE("one fixation is the normalized kernel") {
    const std::vector<FixationSet> one{{"a", "s", {{20, 15, 0, 200}}}};
    const auto m = render_fixation_map(one, w, h, 0.05);
    CHECK(m.at(20, 15) == 1.0);
    CHECK(m.max_value() == 1.0);
    const auto k = gaussian_kernel(0.05 * w);
    const std::size_t r = k.size() / 2;
    CHECK(m.at(21, 15) == doctest::Approx(k[r + 1] / k[r]).epsilon(1e-12));
    CHECK(m.at(22, 17) == doctest::Approx(k[r + 2] * k[r + 2] / (k[r] * k[r])).epsilon(1e-12));
  }
  SUBCASE("repeated fixation gives the same map") {
    const std::vector<FixationSet> one{{"a", "s", {{7, 9, 0, 200}}}};
    const std::vector<FixationSet> two{{"a", "s", {{7, 9, 0, 200}, {7.2, 8.9, 300, 200}}}};
    const auto m1 = render_fixation_map(one, w, h, 0.05);
    const auto m2 = render_fixation_map(two, w, h, 0.05);
    for (std::size_t i = 0; i < m1.size(); ++i) CHECK(m1.data[i] == doctest::Approx(m2.data[i]).epsilon(1e-12));
  }
  SUBCASE("rendered maps lie in [0,1] with peak 1") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      FixationSet set{"a", "s", {}};
      for (int i = 0; i < 1 + static_cast<int>(rng.below(10)); ++i) set.fixations.push_back({rng.uniform(-5, 50), rng.uniform(-5, 40), 0, 200});
      const std::vector<FixationSet> sets{set};
      const auto m = render_fixation_map(sets, w, h, 0.03);
      CHECK(m.max_value() == 1.0);
      CHECK(m.min_value() >= 0.0);
    }
  }
  SUBCASE("count map clamps and counts") {
    const std::vector<FixationSet> sets{{"a", "s", {{-3, -3, 0, 200}, {0.4, 0.2, 0, 200}, {100, 100, 0, 200}}}};
    const auto c = fixation_count_map(sets, w, h);
    CHECK(c.at(0, 0) == 2.0);
    CHECK(c.at(w - 1, h - 1) == 1.0);
    CHECK(c.sum() == 3.0);
  }
}

TEST_CASE("center bias") {
  const int w = 33, h = 21;
  const auto g = center_gaussian(w, h, 0.4);
  const auto biased = add_center_bias(GrayMap(w, h), 0.4);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(biased.data[i] == doctest::Approx(g.data[i]).epsilon(1e-12));
  CHECK(biased.at(16, 10) == 1.0);
  for (std::size_t i = 0; i < biased.size(); ++i) {
    if (i != 10u * w + 16u) CHECK(biased.data[i] < 1.0);
  }

  SUBCASE("pointwise order is kept before normalization") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const auto m1 = test::random_map(rng, w, h);
      GrayMap m2 = m1;
      for (auto& v : m2.data) v = std::min(1.0, v + rng.uniform(0, 0.3));
      // Undo the final peak normalization to compare raw averages.
      const auto a = add_center_bias(m1, 0.4);
      const auto b = add_center_bias(m2, 0.4);
      double pa = 0, pb = 0;
      for (std::size_t i = 0; i < m1.size(); ++i) {
        pa = std::max(pa, 0.5 * (m1.data[i] + g.data[i]));
        pb = std::max(pb, 0.5 * (m2.data[i] + g.data[i]));
      }
      for (std::size_t i = 0; i < m1.size(); ++i) CHECK(a.data[i] * pa <= b.data[i] * pb + 1e-12);
    }
  }
}

TEST_CASE("gaze csv round trip") {
  test::TempDir dir("gaze");
  const std::vector<GazeSample> s{{0, 1.5, 2.25, true}, {8, 3, 4, false}, {16, 120.125, 0, true}};
  write_gaze_csv(s, dir / "sub" / "img.csv");
  const auto back = read_gaze_csv(dir / "sub" / "img.csv");
  REQUIRE(back.size() == 3);
  CHECK(back[0].x == 1.5);
  CHECK(back[1].valid == false);
  CHECK(back[2].x == 120.125);
  test::write_text(dir / "bad.csv", "t,x,y\n1,2,3\n");
  CHECK_THROWS_AS(read_gaze_csv(dir / "bad.csv"), FormatError);
}
