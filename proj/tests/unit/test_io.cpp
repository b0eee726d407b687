#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ntb/error.hpp"
#include "ntb/io.hpp"

using namespace ntb;
using nlohmann::json;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

TrainedAbnormalityModel toy_model() {
  TrainedAbnormalityModel m;
  m.scene.image_width = 96;
  m.scene.image_height = 48;
  m.scene.entrance_patches = {0};
  m.network = TransmissionNetwork(2, false, 1e6);
  m.network.set(0, 1, 1.0 / 3.0);
  m.thresholds = {2.75, 1.3};
  m.log.push_back({1, {2.75, 1.3}, 0.01, 0.2, 0.125});
  m.converged = true;
  m.refresh_route_maps();
  return m;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("doubles print in shortest round-trip form") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(3.0) == "3");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
      const double v = u(rng);
      CHECK(std::stod(io::format_double(v)) == v);
    }
  }

  TEST_CASE("trajectories round trip and sort") {
    std::istringstream in("track_id,frame,x,y\n2,0,1.5,2\n1,1,3,4\n1,0,0.25,0\n");
    const auto tracks = io::read_trajectories(in, "t.csv");
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].track_id == 1);
    CHECK(tracks[0].samples[0].x == 0.25);
    std::ostringstream out;
    io::write_trajectories(out, tracks);
    std::istringstream back(out.str());
    const auto again = io::read_trajectories(back, "t.csv");
    CHECK(again[1].samples[0].x == 1.5);
    std::ostringstream out2;
    io::write_trajectories(out2, again);
    CHECK(out2.str() == out.str());
  }

  TEST_CASE("malformed rows report the line") {
    std::istringstream bad("track_id,frame,x,y\n1,0,0,0\n1,x,0,0\n");
    CHECK(error_of([&] { (void)io::read_trajectories(bad, "t.csv"); }).starts_with("t.csv:3: "));
    std::istringstream short_row("track_id,frame,x,y\n1,0,0\n");
    CHECK(error_of([&] { (void)io::read_trajectories(short_row, "t.csv"); })
              .starts_with("t.csv:2: "));
    std::istringstream dup("track_id,frame,x,y\n1,0,0,0\n1,0,1,1\n");
    CHECK(error_of([&] { (void)io::read_trajectories(dup, "t.csv"); }).starts_with("t.csv:3: "));
    std::istringstream header("id,frame,x,y\n");
    CHECK(error_of([&] { (void)io::read_trajectories(header, "t.csv"); })
              .starts_with("t.csv:1: "));
    std::istringstream label("track_id,label\n1,IV\n");
    CHECK(error_of([&] { (void)io::read_labels(label, "l.csv"); }).starts_with("l.csv:2: "));
  }

  TEST_CASE("labels, truth and predictions round trip") {
    const std::map<TrackId, Label> labels{{1, Label::normal}, {4, Label::type_iii}};
    std::ostringstream o;
    io::write_labels(o, labels);
    std::istringstream i(o.str());
    CHECK(io::read_labels(i, "l") == labels);

    const std::vector<std::pair<Frame, bool>> truth{{0, false}, {1, true}};
    std::ostringstream ot;
    io::write_frame_truth(ot, truth);
    std::istringstream it(ot.str());
    CHECK(io::read_frame_truth(it, "f") == truth);
  }

  TEST_CASE("features keep their dimension") {
    const std::vector<io::FeatureRow> rows{{"p0", "meet", {1, 2, 3, 0.5, 0.25, 7}},
                                           {"p1", "", {0, 0, -1, -0.5, 0, 0}}};
    std::ostringstream o;
    io::write_features(o, rows);
    CHECK(o.str().starts_with("pair_id,label,E1,E2,ENR,EWR,EMI1,EMI2\n"));
    std::istringstream i(o.str());
    const auto back = io::read_features(i, "f");
    REQUIRE(back.size() == 2);
    CHECK(back[0].values == rows[0].values);
    CHECK(back[1].label.empty());
  }

  TEST_CASE("motion field round trip") {
    SceneConfig scene;
    MotionField f;
    f.set(3, scene.index_of(2, 1), 1.25);
    std::ostringstream o;
    io::write_motion_field(o, f, scene);
    std::istringstream i(o.str());
    CHECK(io::read_motion_field(i, "m", scene).entries() == f.entries());
  }

  TEST_CASE("scene documents are strict") {
    SceneConfig s;
    s.entrance_patches = {0, 5};
    s.equivalence_sets = {{1, 2}};
    const SceneConfig back = io::scene_from_json(io::scene_to_json(s));
    CHECK(back.entrance_patches == s.entrance_patches);
    CHECK(back.equivalence_sets == s.equivalence_sets);
    json j = io::scene_to_json(s);
    j["colour"] = "red";
    CHECK(error_of([&] { (void)io::scene_from_json(j); }).find("unknown key 'colour'") !=
          std::string::npos);
    json k = io::scene_to_json(s);
    k.erase("patch_size");
    CHECK_THROWS_AS((void)io::scene_from_json(k), DataError);
  }

  TEST_CASE("training config") {
    TrainingConfig c;
    c.max_iterations = 7;
    c.alpha_step = 0.5;
    const TrainingConfig back = io::training_config_from_json(io::training_config_to_json(c));
    CHECK(back.max_iterations == 7);
    CHECK(back.alpha_step == 0.5);
    CHECK(io::training_config_from_json(json::object()).max_iterations == 100);
    CHECK_THROWS_AS((void)io::training_config_from_json(json{{"alpha_step", 0}}), DataError);
    CHECK_THROWS_AS((void)io::training_config_from_json(json{{"alpah_step", 1}}), DataError);
  }

  TEST_CASE("model round trip") {
    const auto m = toy_model();
    const json j = io::model_to_json(m, json{{"tool", "test"}});
    const auto back = io::model_from_json(j);
    CHECK(back.network == m.network);
    CHECK(back.thresholds == m.thresholds);
    CHECK(back.log == m.log);
    CHECK(back.converged);
    CHECK(back.route_maps.maps().size() == 1);
    CHECK(io::model_to_json(back, json{{"tool", "test"}}).dump() == j.dump());
  }

  TEST_CASE("model validation") {
    const json j = io::model_to_json(toy_model(), json::object());
    json v = j;
    v["format_version"] = io::kModelFormatVersion + 1;
    CHECK(error_of([&] { (void)io::model_from_json(v); }).find("format_version") !=
          std::string::npos);
    json e = j;
    e["energy"] = json::array({0, 1, 1});
    CHECK_THROWS_AS((void)io::model_from_json(e), DataError);
    json n = j;
    n["scene"]["image_width"] = 480;
    CHECK_THROWS_AS((void)io::model_from_json(n), DataError);
  }

  TEST_CASE("group model round trip") {
    GroupClassifierModel m{{"a", "b"},
                           SoftmaxModel(Standardizer{{0.5, 1}, {2, 1}}, {{1, -1}, {-1, 1}}, {0.1, 0})};
    CHECK(io::group_model_from_json(io::group_model_to_json(m)) == m);
  }

  TEST_CASE("atomic file write") {
    const auto dir = std::filesystem::temp_directory_path() / "ntb_io_test";
    std::filesystem::create_directories(dir);
    const auto p = dir / "x.txt";
    io::write_file_atomic(p, "hello\n");
    io::write_file_atomic(p, "again\n");
    CHECK(io::read_file(p) == "again\n");
    CHECK_FALSE(std::filesystem::exists(dir / "x.txt.tmp"));
    CHECK_THROWS_AS((void)io::read_file(dir / "missing"), DataError);
    CHECK_THROWS_AS((void)io::parse_json("{", "doc"), DataError);
    std::filesystem::remove_all(dir);
  }
}
