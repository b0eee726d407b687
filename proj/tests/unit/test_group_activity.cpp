#include <doctest.h>

#include <cmath>

#include "ntb/error.hpp"
#include "ntb/group_activity.hpp"

using namespace ntb;

namespace {

Trajectory track(TrackId id, std::vector<std::pair<double, double>> xy, Frame first = 0) {
  Trajectory t;
  t.track_id = id;
  for (std::size_t k = 0; k < xy.size(); ++k) {
    t.samples.push_back({first + static_cast<Frame>(k), xy[k].first, xy[k].second});
  }
  return t;
}

SceneConfig big_scene() {
  SceneConfig s;
  s.image_width = 480;
  s.image_height = 480;
  s.patch_size = 48;
  return s;
}

}  // namespace

TEST_SUITE("group_activity") {
  TEST_CASE("two stationary people have zero energies") {
    const auto a = track(1, {{24, 24}, {24, 24}, {24, 24}});
    const auto b = track(2, {{120, 24}, {120, 24}, {120, 24}});
    const auto f = extract_pair_features(a, b, big_scene(), RelativeNetworkSpec{});
    CHECK(f.values() == std::vector<double>{0, 0, 0, 0});
    CHECK(f.dimension() == 4);
  }

  TEST_CASE("approach towards a stationary person") {
    const auto a = track(1, {{24, 24}, {24, 24}, {24, 24}, {24, 24}});
    const auto b = track(2, {{168, 24}, {120, 24}, {72, 24}, {24, 24}});
    const auto f = extract_pair_features(a, b, big_scene(), RelativeNetworkSpec{});
    CHECK(f.e1 == 0.0);
    CHECK(f.e2 == 3.0);
    CHECK(f.enr == 3.0);
    CHECK(f.ewr == doctest::Approx(11.0 / 6.0));
    // Argument order does not change the reference.
    const auto g = extract_pair_features(b, a, big_scene(), RelativeNetworkSpec{});
    CHECK(g.values() == f.values());
  }

  TEST_CASE("orbiting on one ring has zero relative energy") {
    const auto a = track(1, {{240, 240}, {240, 240}, {240, 240}, {240, 240}});
    const auto b = track(2, {{336, 240}, {336, 336}, {240, 336}, {144, 336}});
    const auto f = extract_pair_features(a, b, big_scene(), RelativeNetworkSpec{});
    CHECK(f.enr == 0.0);
    CHECK(f.ewr == 0.0);
    CHECK(f.e2 == 6.0);
  }

  TEST_CASE("motion energies extend the vector") {
    const auto a = track(1, {{24, 24}, {72, 24}});
    const auto b = track(2, {{24, 120}, {72, 120}});
    MotionField field;
    const auto f = extract_pair_features(a, b, big_scene(), RelativeNetworkSpec{}, &field);
    CHECK(f.dimension() == 6);
    CHECK(*f.emi1 == doctest::Approx(48.0));  // speed 48 against an absent field entry
    CHECK(GroupFeatureVector::column_names(6).back() == "EMI2");
  }

  TEST_CASE("disjoint pair") {
    const auto a = track(1, {{24, 24}, {24, 24}});
    const auto b = track(2, {{24, 24}, {24, 24}}, 10);
    CHECK_THROWS_WITH_AS((void)extract_pair_features(a, b, big_scene(), RelativeNetworkSpec{}),
                         "disjoint tracks", DataError);
  }

  TEST_CASE("classifier separates by the sign of ENR") {
    std::vector<LabelledFeatures> data;
    for (int k = 1; k <= 10; ++k) {
      data.push_back({{0, 1, static_cast<double>(k), 0.1 * k}, "approach"});
      data.push_back({{0, 1, -static_cast<double>(k), -0.1 * k}, "leave"});
    }
    const auto m = train_group_classifier(data);
    CHECK(m.classes == std::vector<std::string>{"approach", "leave"});
    CHECK(m.dimension() == 4);
    for (const auto& d : data) CHECK(classify_pair(d.values, m).label == d.label);
    CHECK_THROWS_AS((void)classify_pair(std::vector<double>(6, 0.0), m), DataError);
  }

  TEST_CASE("contradictory labels still train") {
    std::vector<LabelledFeatures> data{{{1, 1}, "a"}, {{1, 1}, "b"}, {{2, 2}, "a"}};
    const auto m = train_group_classifier(data);
    CHECK(m.classes.size() == 2);
    const auto p = classify_pair(std::vector<double>{1, 1}, m);
    CHECK(std::isfinite(p.scores[0]));
  }

  TEST_CASE("constant columns keep unit scale") {
    const std::vector<std::vector<double>> rows{{1, 5}, {3, 5}};
    const Standardizer s = Standardizer::fit(rows);
    CHECK(s.mean == std::vector<double>{2, 5});
    CHECK(s.scale[1] == 1.0);
  }

  TEST_CASE("ties go to the first class") {
    SoftmaxModel flat(Standardizer{{0.0}, {1.0}}, {{0.0}, {0.0}}, {0.0, 0.0});
    GroupClassifierModel m{{"x", "y"}, flat};
    CHECK(classify_pair(std::vector<double>{3.0}, m).label == "x");
  }

  TEST_CASE("training input errors") {
    std::vector<LabelledFeatures> one{{{1}, "a"}, {{2}, "a"}};
    CHECK_THROWS_AS((void)train_group_classifier(one), DataError);
    std::vector<LabelledFeatures> mixed{{{1}, "a"}, {{2, 3}, "b"}};
    CHECK_THROWS_AS((void)train_group_classifier(mixed), DataError);
  }

  TEST_CASE("crowd energies by direction") {
    const RelativeNetworkSpec spec;
    const Point c{240, 240};
    const FlowVector outward{0, 240 + 96, 240, 48, 0};
    const FlowVector tangential{0, 240 + 96, 240, 0, 48};
    const FlowVector inward{0, 240 + 144, 240, -48, 0};
    CHECK(crowd_window_energy(std::vector{outward}, c, 48, spec) == -1.0);
    CHECK(crowd_window_energy(std::vector{tangential}, c, 48, spec) == 0.0);
    CHECK(crowd_window_energy(std::vector{outward, inward}, c, 48, spec) == 0.0);
    CHECK(crowd_window_energy(std::vector<FlowVector>{}, c, 48, spec) == 0.0);
  }

  TEST_CASE("crowd detection flags an outward burst") {
    CrowdParams p;
    p.center = {240, 240};
    p.window_frames = 2;
    std::vector<FlowVector> flows;
    for (Frame t = 0; t < 10; ++t) {
      // Balanced in/out motion, then everyone moves outward from frame 6.
      const double sign = t >= 6 ? 1.0 : (t % 2 == 0 ? 1.0 : -1.0);
      for (int k = 0; k < 20; ++k) flows.push_back({t, 240.0 + 96, 240.0, sign * 48, 0});
    }
    const auto d = crowd_detect(flows, p, 10.0);
    REQUIRE(d.frames.size() == 10);
    CHECK_FALSE(d.frames[0].second);
    CHECK(d.frames[9].second);
    std::vector<std::pair<Frame, bool>> truth;
    for (Frame t = 0; t < 10; ++t) truth.emplace_back(t, t >= 6);
    const auto roc = crowd_roc(flows, p, truth);
    CHECK(roc_auc(roc) > 0.9);
  }

  TEST_CASE("calibration of a balanced segment") {
    CrowdParams p;
    p.center = {240, 240};
    p.window_frames = 2;
    std::vector<FlowVector> flows;
    for (Frame t = 0; t < 8; ++t) flows.push_back({t, 336, 240, t % 2 == 0 ? 48.0 : -48.0, 0});
    CHECK(calibrate_crowd_threshold(flows, p, 3.0) == doctest::Approx(0.0));
  }
}
