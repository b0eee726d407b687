#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ntb/synth_gen.hpp"

using namespace ntb;

namespace {

ScenarioConfig small_config(std::uint64_t seed) {
  ScenarioConfig c;
  c.seed = seed;
  c.normal_count = 40;
  c.type_i_count = 10;
  c.type_ii_count = 10;
  c.type_iii_count = 10;
  return c;
}

const PairSample& first_of(const GroupCorpus& c, const std::string& label) {
  return *std::find_if(c.pairs.begin(), c.pairs.end(),
                       [&](const PairSample& p) { return p.label == label; });
}

}  // namespace

TEST_SUITE("synth_gen") {
  TEST_CASE("abnormality corpus is seeded") {
    const auto a = gen_abnormality_corpus(small_config(5));
    const auto b = gen_abnormality_corpus(small_config(5));
    const auto c = gen_abnormality_corpus(small_config(6));
    REQUIRE(a.tracks.size() == 70);
    CHECK(a.labels == b.labels);
    CHECK(a.tracks[3].samples.back().x == b.tracks[3].samples.back().x);
    CHECK(a.tracks[3].samples.back().x != c.tracks[3].samples.back().x);
    CHECK(a.tracks.front().track_id == 1);
    for (const auto& t : a.tracks) CHECK_NOTHROW(t.validate());
  }

  TEST_CASE("abnormal routes differ from normal ones in the expected way") {
    const auto corpus = gen_abnormality_corpus(small_config(2));
    const SceneConfig scene = corpus.scene(48);
    std::set<PatchIndex> normal_patches;
    for (std::size_t k = 0; k < corpus.tracks.size(); ++k) {
      if (corpus.labels[k] != Label::normal) continue;
      const PatchRoute r = route_from_trajectory(corpus.tracks[k], scene);
      for (PatchIndex p : r.patches()) {
        normal_patches.insert(p);
      }
    }
    for (std::size_t k = 0; k < corpus.tracks.size(); ++k) {
      const PatchRoute r = route_from_trajectory(corpus.tracks[k], scene);
      const auto ps = r.patches();
      CHECK(scene.entrance_patches.end() !=
            std::find(scene.entrance_patches.begin(), scene.entrance_patches.end(), ps[0]));
      if (corpus.labels[k] == Label::type_ii) {
        const std::set<PatchIndex> distinct(ps.begin(), ps.end());
        CHECK(distinct.size() < ps.size());
      } else if (corpus.labels[k] != Label::normal) {
        CHECK(std::any_of(ps.begin(), ps.end(),
                          [&](PatchIndex p) { return !normal_patches.contains(p); }));
      }
    }
  }

  TEST_CASE("group corpus geometry") {
    GroupScenarioConfig cfg;
    cfg.pairs_per_class = 3;
    const GroupCorpus c = gen_group_corpus(cfg);
    CHECK(c.classes().size() == 8);
    CHECK(c.pairs.size() == 24);
    CHECK(c.field.size() == 0);

    auto rings = [&](const PairSample& p) {
      return relative_route(p.first, p.second, cfg.cell, 15).rings();
    };
    for (int r : rings(first_of(c, "together"))) CHECK(r <= 1);

    const PairSample& ap = first_of(c, "approach");
    CHECK(ap.first.track_id < ap.second.track_id);
    CHECK(ap.first.samples.front().x == doctest::Approx(ap.first.samples.back().x).epsilon(0.01));
    const auto ar = rings(ap);
    CHECK(ar.front() > ar.back());

    const auto ex = rings(first_of(c, "exchange"));
    const int low = *std::min_element(ex.begin(), ex.end());
    CHECK(ex.front() > low);
    CHECK(ex.back() > low);
  }

  TEST_CASE("casia corpus carries a motion field") {
    GroupScenarioConfig cfg;
    cfg.pairs_per_class = 2;
    const GroupCorpus c = gen_casia_corpus(cfg);
    CHECK(c.classes().size() == 7);
    CHECK(c.field.size() > 0);
  }

  TEST_CASE("escape flows point outward, normal flows balance") {
    CrowdScenarioConfig cfg;
    const auto esc = gen_crowd_flows(cfg, CrowdMode::escape, 0, 5);
    const Point c{cfg.image_width / 2, cfg.image_height / 2};
    std::size_t outward = 0;
    for (const auto& f : esc) outward += ((f.x - c.x) * f.dx + (f.y - c.y) * f.dy) > 0;
    CHECK(static_cast<double>(outward) >= 0.9 * static_cast<double>(esc.size()));

    const auto norm = gen_crowd_flows(cfg, CrowdMode::normal, 0, 50);
    double mx = 0, my = 0;
    for (const auto& f : norm) {
      mx += f.dx;
      my += f.dy;
    }
    mx /= static_cast<double>(norm.size());
    my /= static_cast<double>(norm.size());
    CHECK(std::abs(mx) < 0.1);
    CHECK(std::abs(my) < 0.1);

    const auto seq = gen_crowd_sequence(cfg);
    CHECK(seq.truth.size() == cfg.normal_frames + cfg.escape_frames);
    CHECK_FALSE(seq.truth.front().second);
    CHECK(seq.truth.back().second);
  }
}
