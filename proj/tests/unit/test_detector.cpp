#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ntb/abnormality_detector.hpp"
#include "ntb/error.hpp"

using namespace ntb;

namespace {

StepEnergies one_step(double e, double emin) {
  StepEnergies s;
  s.patches = {0};
  s.frames = {0};
  s.energy = {e};
  s.min_energy = {emin};
  return s;
}

/// Four patches in a row, unit energy between neighbours, entrance 0.
TrainedAbnormalityModel line_model(Thresholds th) {
  TrainedAbnormalityModel m;
  m.scene.image_width = 4 * 48;
  m.scene.image_height = 48;
  m.scene.entrance_patches = {0};
  m.network = TransmissionNetwork(4, false, 1e6);
  m.network.set(0, 1, 1);
  m.network.set(1, 2, 1);
  m.network.set(2, 3, 1);
  m.thresholds = th;
  m.refresh_route_maps();
  return m;
}

}  // namespace

TEST_SUITE("abnormality_detector") {
  TEST_CASE("label text round trip") {
    for (Label l : {Label::normal, Label::type_i, Label::type_ii, Label::type_iii}) {
      CHECK(parse_label(to_string(l)) == l);
    }
    CHECK(to_string(Label::type_ii) == "II");
    CHECK_THROWS_AS((void)parse_label("IV"), DataError);
  }

  TEST_CASE("detection rules") {
    const Thresholds th{8.0, 3.0};
    RuleOutcome r = apply_rules(one_step(12, 1), th, 1e6);
    CHECK(r.flagged);
    CHECK(r.reason == FlagReason::total_energy);
    r = apply_rules(one_step(5, 1), th, 1e6);
    CHECK(r.flagged);
    CHECK(r.reason == FlagReason::energy_ratio);
    CHECK(r.t2_at_flag == 3.0);
    CHECK_FALSE(apply_rules(one_step(2, 1), th, 1e6).flagged);
    r = apply_rules(one_step(0, 1e6), th, 1e6);
    CHECK(r.flagged);
    CHECK(r.reason == FlagReason::unreachable);
  }

  TEST_CASE("abnormality types") {
    CHECK(classify_type(20, 8, 10) == Label::type_i);
    CHECK(classify_type(5, 8, 3) == Label::type_ii);
    CHECK(classify_type(9, 8, 12) == Label::type_iii);
    CHECK(classify_type(2, 8, 3) == Label::normal);
  }

  TEST_CASE("shortest walk is normal") {
    const auto m = line_model({100, 1.5});
    const DetectionVerdict v = detect(PatchRoute({0, 1, 2, 3}), m);
    CHECK_FALSE(v.abnormal);
    CHECK(v.type == Label::normal);
    CHECK(v.final_energy() == 3.0);
    CHECK_FALSE(v.on_demand_map);
  }

  TEST_CASE("back-and-forth is caught by the ratio rule and stays flagged") {
    const auto m = line_model({100, 1.5});
    const DetectionVerdict v = detect(PatchRoute({0, 1, 2, 1, 2, 3}), m);
    REQUIRE(v.abnormal);
    CHECK(v.reason == FlagReason::energy_ratio);
    CHECK(*v.first_flag_step == 3);  // E = 3 at patch 1 against T2 = 1.5
    CHECK(v.type == Label::type_ii);
    for (std::size_t k = 0; k < v.steps.size(); ++k) CHECK(v.steps[k].flagged == (k >= 3));
  }

  TEST_CASE("routes from a non-entrance use an on-demand map") {
    const auto m = line_model({100, 1.5});
    const DetectionVerdict v = detect(PatchRoute({2, 3}), m);
    CHECK(v.on_demand_map);
    CHECK_FALSE(v.abnormal);
    CHECK_THROWS_AS((void)detect(PatchRoute({9}), m), DataError);
    CHECK_THROWS_AS((void)detect(PatchRoute{}, m), DataError);
  }

  TEST_CASE("windowed detection re-arms") {
    const auto m = line_model({2.5, 10});
    const PatchRoute r({0, 1, 2, 3, 2, 1});
    CHECK(detect(r, m).abnormal);
    const DetectionVerdict w = detect_windowed(r, m, 3);
    CHECK(w.steps.size() == 6);
    CHECK_FALSE(w.abnormal);  // each window stays under T1
    CHECK_THROWS_AS((void)detect_windowed(r, m, 0), DataError);
  }

  TEST_CASE("trace of a single patch") {
    const auto m = line_model({100, 1.5});
    const auto rows = energy_trace(PatchRoute({0}), m);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].energy == 0.0);
  }

  TEST_CASE("trace of a two-patch loop grows while the minimum stalls") {
    const auto m = line_model({100, 10});
    const PatchRoute loop({0, 1, 0, 1, 0, 1});
    const auto rows = energy_trace(loop, m);
    const DetectionVerdict v = detect(loop, m);
    double e = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      e += 1.0;  // each revisit crosses the unit edge once more
      CHECK(rows[k].energy == e);
      CHECK(rows[k].energy > rows[k - 1].energy);
      CHECK(v.steps[k].min_energy <= 1.0);
    }
    std::ostringstream os;
    write_trace_csv(os, rows);
    CHECK(os.str().rfind("step,patch,E,T1,T2,flag\n0,0,0,100,0,0\n1,1,1,100,10,0\n", 0) == 0);
  }

  TEST_CASE("energy features") {
    const auto f = energy_features(3, 1);
    CHECK(f[0] == doctest::Approx(std::log1p(3.0)));
    CHECK(f[1] == doctest::Approx(std::log1p(3.0)));
    CHECK(energy_features(0, 0)[1] == doctest::Approx(std::log1p(1.0)));
    CHECK(energy_features(5, 0)[1] == doctest::Approx(std::log1p(1000.0)));
  }
}
