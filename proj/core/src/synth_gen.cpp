#include "ntb/synth_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "ntb/error.hpp"

namespace ntb {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gaussian(Rng& rng, double sigma) {
  if (!(sigma > 0.0)) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }
double norm(Point a) { return std::hypot(a.x, a.y); }

double polyline_length(const Polyline& p) {
  double len = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) len += norm(p[k] - p[k - 1]);
  return len;
}

/// Point and unit direction at arc length s.
std::pair<Point, Point> polyline_at(const Polyline& p, double s) {
  if (p.size() == 1) return {p.front(), {1.0, 0.0}};
  s = std::max(s, 0.0);
  for (std::size_t k = 1; k < p.size(); ++k) {
    const Point seg = p[k] - p[k - 1];
    const double len = norm(seg);
    if (s <= len || k + 1 == p.size()) {
      const Point dir = (1.0 / len) * seg;
      return {p[k - 1] + std::min(s, len) * dir, dir};
    }
    s -= len;
  }
  return {p.back(), {1.0, 0.0}};
}

double distance_to_segment(Point q, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  const double t = len2 > 0.0 ? std::clamp(((q.x - a.x) * ab.x + (q.y - a.y) * ab.y) / len2, 0.0, 1.0) : 0.0;
  return norm(q - (a + t * ab));
}

double distance_to_paths(Point q, const std::vector<Polyline>& paths) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : paths) {
    for (std::size_t k = 1; k < p.size(); ++k) {
      best = std::min(best, distance_to_segment(q, p[k - 1], p[k]));
    }
  }
  return best;
}

/// Piece of a walk: either along the base path between two arc lengths
/// (keeping the track's lateral offset), or a straight line to a point.
struct Leg {
  bool along_path = true;
  double from = 0.0;
  double to = 0.0;
  Point target;
};

struct Walker {
  const Polyline& path;
  double offset;

  [[nodiscard]] Point on_path(double s) const {
    const auto [pt, dir] = polyline_at(path, s);
    return pt + offset * Point{-dir.y, dir.x};
  }
};

/// Samples the legs at constant speed, one position per frame.
std::vector<Point> walk(const Walker& w, const std::vector<Leg>& legs, double speed) {
  // Dense geometric polyline of the whole walk, then resampled by arc length.
  Polyline dense;
  Point current = legs.front().along_path ? w.on_path(legs.front().from) : legs.front().target;
  dense.push_back(current);
  for (const Leg& leg : legs) {
    if (leg.along_path) {
      const double span = leg.to - leg.from;
      const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(span))));
      for (std::size_t k = 1; k <= steps; ++k) {
        dense.push_back(w.on_path(leg.from + span * static_cast<double>(k) / static_cast<double>(steps)));
      }
    } else {
      dense.push_back(leg.target);
    }
  }
  const double total = polyline_length(dense);
  std::vector<Point> out;
  for (double s = 0.0; s < total; s += speed) out.push_back(polyline_at(dense, s).first);
  out.push_back(dense.back());
  return out;
}

Trajectory to_trajectory(TrackId id, const std::vector<Point>& pts, Frame first, Rng& rng,
                         double jitter) {
  Trajectory t;
  t.track_id = id;
  t.samples.reserve(pts.size());
  Frame f = first;
  for (const Point& p : pts) {
    t.samples.push_back({f++, p.x + gaussian(rng, jitter), p.y + gaussian(rng, jitter)});
  }
  return t;
}

/// Point off all normal paths, at distance [110, 170] px sideways from the
/// path position at arc length s.
Point off_path_point(const ScenarioConfig& cfg, const Polyline& path, double s, Rng& rng) {
  Point best{};
  double best_clearance = -1.0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto [pt, dir] = polyline_at(path, s);
    const double side = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    const double d = uniform(rng, 110.0, 170.0);
    Point q = pt + (side * d) * Point{-dir.y, dir.x};
    q.x = std::clamp(q.x, 20.0, cfg.image_width - 20.0);
    q.y = std::clamp(q.y, 20.0, cfg.image_height - 20.0);
    const double clearance = distance_to_paths(q, cfg.paths);
    if (clearance >= 40.0) return q;
    if (clearance > best_clearance) {
      best_clearance = clearance;
      best = q;
    }
  }
  return best;
}

}  // namespace

std::vector<Polyline> ScenarioConfig::default_paths() {
  return {
      {{12, 108}, {588, 108}},
      {{12, 300}, {300, 300}, {300, 468}},
      {{588, 12}, {588, 204}, {108, 204}},
      {{204, 12}, {204, 396}, {492, 396}},
  };
}

SceneConfig AbnormalityCorpus::scene(double patch_size) const {
  SceneConfig s;
  s.image_width = image_width;
  s.image_height = image_height;
  s.patch_size = patch_size;
  std::set<PatchIndex> entrances;
  for (const Point& p : entrance_points) entrances.insert(locate_patch(p, s));
  s.entrance_patches.assign(entrances.begin(), entrances.end());
  return s;
}

std::vector<TrainingSample> AbnormalityCorpus::samples(const SceneConfig& scene,
                                                       std::span<const std::size_t> indices) const {
  std::vector<TrainingSample> out;
  auto add = [&](std::size_t k) {
    out.push_back({tracks[k].track_id, route_from_trajectory(tracks[k], scene), labels[k]});
  };
  if (indices.empty()) {
    for (std::size_t k = 0; k < tracks.size(); ++k) add(k);
  } else {
    for (std::size_t k : indices) add(k);
  }
  return out;
}

AbnormalityCorpus gen_abnormality_corpus(const ScenarioConfig& cfg) {
  if (cfg.paths.empty()) throw DataError("scenario needs at least one path");
  for (const auto& p : cfg.paths) {
    if (p.size() < 2) throw DataError("scenario paths need at least two waypoints");
  }
  Rng rng(cfg.seed);
  AbnormalityCorpus corpus;
  corpus.image_width = cfg.image_width;
  corpus.image_height = cfg.image_height;
  for (const auto& p : cfg.paths) corpus.entrance_points.push_back(p.front());

  TrackId next_id = 1;
  auto emit = [&](Label label) {
    const auto which = static_cast<std::size_t>(
        std::uniform_int_distribution<std::size_t>(0, cfg.paths.size() - 1)(rng));
    const Polyline& path = cfg.paths[which];
    const double len = polyline_length(path);
    const double offset = std::clamp(gaussian(rng, cfg.noise_sigma), -9.0, 9.0);
    const double speed = uniform(rng, cfg.speed_min, cfg.speed_max);
    const Walker w{path, offset};
    std::vector<Leg> legs;
    std::size_t dwell = 0;
    switch (label) {
      case Label::normal:
        legs.push_back({true, 0.0, len, {}});
        break;
      case Label::type_i: {
        const double a = uniform(rng, 0.2, 0.4) * len;
        const double b = uniform(rng, 0.6, 0.85) * len;
        const Point apex = off_path_point(cfg, path, 0.5 * (a + b), rng);
        legs.push_back({true, 0.0, a, {}});
        legs.push_back({false, 0.0, 0.0, apex});
        legs.push_back({false, 0.0, 0.0, w.on_path(b)});
        legs.push_back({true, b, len, {}});
        break;
      }
      case Label::type_ii: {
        const double turn = uniform(rng, 0.35, 0.75) * len;
        const double back = std::min(uniform(rng, 100.0, 180.0), turn - 20.0);
        const int reps = uniform(rng, 0.0, 1.0) < 0.5 ? 1 : 2;
        legs.push_back({true, 0.0, turn, {}});
        for (int r = 0; r < reps; ++r) {
          legs.push_back({true, turn, turn - back, {}});
          legs.push_back({true, turn - back, turn, {}});
        }
        legs.push_back({true, turn, len, {}});
        break;
      }
      case Label::type_iii: {
        const double leave = uniform(rng, 0.3, 0.7) * len;
        legs.push_back({true, 0.0, leave, {}});
        legs.push_back({false, 0.0, 0.0, off_path_point(cfg, path, leave, rng)});
        dwell = 10;
        break;
      }
    }
    std::vector<Point> pts = walk(w, legs, speed);
    for (std::size_t k = 0; k < dwell; ++k) pts.push_back(pts.back());
    corpus.tracks.push_back(to_trajectory(next_id++, pts, 0, rng, cfg.jitter_sigma));
    corpus.labels.push_back(label);
  };

  for (std::size_t k = 0; k < cfg.normal_count; ++k) emit(Label::normal);
  for (std::size_t k = 0; k < cfg.type_i_count; ++k) emit(Label::type_i);
  for (std::size_t k = 0; k < cfg.type_ii_count; ++k) emit(Label::type_ii);
  for (std::size_t k = 0; k < cfg.type_iii_count; ++k) emit(Label::type_iii);
  return corpus;
}

std::vector<std::string> GroupCorpus::classes() const {
  std::set<std::string> names;
  for (const auto& p : pairs) names.insert(p.label);
  return {names.begin(), names.end()};
}

namespace {

/// Frame-by-frame motion script for one person.
class Script {
 public:
  explicit Script(Point start) : pos_(start) { pts_.push_back(start); }

  Script& walk_to(Point target, double speed) {
    while (norm(target - pos_) > speed) {
      pos_ = pos_ + (speed / norm(target - pos_)) * (target - pos_);
      pts_.push_back(pos_);
    }
    pos_ = target;
    pts_.push_back(pos_);
    return *this;
  }
  Script& walk_dir(Point dir, double speed, std::size_t frames) {
    for (std::size_t k = 0; k < frames; ++k) {
      pos_ = pos_ + speed * dir;
      pts_.push_back(pos_);
    }
    return *this;
  }
  Script& stand(std::size_t frames) {
    for (std::size_t k = 0; k < frames; ++k) pts_.push_back(pos_);
    return *this;
  }
  /// Exactly `frames` positions: truncated, or padded by standing still.
  [[nodiscard]] std::vector<Point> take(std::size_t frames) const {
    std::vector<Point> out(pts_.begin(), pts_.begin() + static_cast<long>(std::min(frames, pts_.size())));
    while (out.size() < frames) out.push_back(pts_.back());
    return out;
  }

 private:
  Point pos_;
  std::vector<Point> pts_;
};

struct PairScript {
  std::vector<Point> first;
  std::vector<Point> second;
  /// Local-motion burst amplitude per person (0 = none).
  double burst_first = 0.0;
  double burst_second = 0.0;
};

PairScript script_for(const std::string& label, const GroupScenarioConfig& cfg, Rng& rng) {
  const double c = cfg.cell;
  const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const Point u{std::cos(angle), std::sin(angle)};
  const Point v{-u.y, u.x};
  // Near the centre of a patch close to the image centre, so a person
  // standing at the base point stays inside one patch.
  const double col = std::floor(cfg.image_width / 2.0 / c) + std::floor(uniform(rng, -1.0, 2.0));
  const double row = std::floor(cfg.image_height / 2.0 / c) + std::floor(uniform(rng, -1.0, 2.0));
  const Point base{(col + 0.5) * c + uniform(rng, -8.0, 8.0), (row + 0.5) * c + uniform(rng, -8.0, 8.0)};
  auto at = [&](double along, double side = 0.0) { return base + (along * c) * u + (side * c) * v; };
  const double s1 = uniform(rng, cfg.speed_min, cfg.speed_max);
  const double s2 = uniform(rng, cfg.speed_min, cfg.speed_max);
  const std::size_t n = cfg.frames;
  PairScript out;

  if (label == "meet") {
    out.first = Script(at(-3)).walk_to(at(-0.15), s1).take(n);
    out.second = Script(at(3)).walk_to(at(0.15), s2).take(n);
  } else if (label == "follow") {
    const auto delay = static_cast<std::size_t>(uniform(rng, 25.0, 40.0));
    out.second = Script(at(-1)).walk_dir(u, s1, n).take(n);
    out.first = Script(at(-3)).stand(delay).walk_dir(u, s1, n).take(n);
  } else if (label == "approach") {
    out.first = Script(at(0)).take(n);
    out.second = Script(at(6)).walk_to(at(1.0), s2).take(n);
  } else if (label == "separate") {
    out.first = Script(at(-0.15)).walk_to(at(-3), s1).take(n);
    out.second = Script(at(0.15)).walk_to(at(3), s2).take(n);
  } else if (label == "leave") {
    out.first = Script(at(0)).take(n);
    out.second = Script(at(1.0)).walk_to(at(6), s2).take(n);
  } else if (label == "together") {
    out.first = Script(at(-3)).walk_dir(u, s1, n).take(n);
    out.second = Script(at(-3, 1)).walk_dir(u, s1, n).take(n);
  } else if (label == "exchange") {
    out.first = Script(at(-3, -0.1)).walk_to(at(3, -0.1), s1).take(n);
    out.second = Script(at(3, 0.1)).walk_to(at(-3, 0.1), s2).take(n);
  } else if (label == "return") {
    out.first = Script(at(-1)).walk_to(at(-3), s1).walk_to(at(-1), s1).take(n);
    out.second = Script(at(1)).walk_to(at(3), s2).walk_to(at(1), s2).take(n);
  } else if (label == "rob") {
    out.first = Script(at(0)).take(n);
    out.second = Script(at(5)).walk_to(at(0.3), s2).stand(5).walk_to(at(6), 2.0 * s2).take(n);
    out.burst_second = uniform(rng, 3.0, 5.0);
  } else if (label == "fight" || label == "meet_part") {
    out.first = Script(at(-3)).walk_to(at(-0.2), s1).stand(10).walk_to(at(-3), s1).take(n);
    out.second = Script(at(3)).walk_to(at(0.2), s1).stand(10).walk_to(at(3), s1).take(n);
    if (label == "fight") {
      out.burst_first = uniform(rng, 3.0, 5.0);
      out.burst_second = uniform(rng, 3.0, 5.0);
    }
  } else if (label == "follow_gather") {
    const auto catch_up = static_cast<std::size_t>(std::lround(4.0 * c / (0.6 * s1)));
    out.second = Script(at(0, 1)).walk_dir(u, s1, n).take(n);
    out.first = Script(at(-4)).walk_dir(u, 1.6 * s1, catch_up).walk_dir(u, s1, n).take(n);
  } else if (label == "meet_gather") {
    out.first = Script(at(-3)).walk_to(at(-0.5), s1).walk_dir(v, s1, n).take(n);
    out.second = Script(at(3)).walk_to(at(0.5), s1).walk_dir(v, s1, n).take(n);
  } else if (label == "overtake") {
    out.second = Script(at(0)).walk_dir(u, s1, n).take(n);
    out.first = Script(at(-3, 0.3)).walk_dir(u, 2.0 * s1, n).take(n);
  } else {
    throw DataError("unknown group class '" + label + "'");
  }
  return out;
}

void add_motion(MotionField& field, const SceneConfig& scene, const Trajectory& t, double burst,
                Rng& rng) {
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    const Sample& s = t.samples[k];
    const PatchIndex here = locate_patch({s.x, s.y}, scene);
    double speed = 0.0;
    PatchIndex prev = here;
    if (k > 0) {
      const Sample& p = t.samples[k - 1];
      speed = std::hypot(s.x - p.x, s.y - p.y);
      prev = locate_patch({p.x, p.y}, scene);
    }
    const double value = speed + burst + std::abs(gaussian(rng, 0.1));
    for (PatchIndex patch : {here, prev}) {
      const double old = field.magnitude(s.frame, patch).value_or(0.0);
      field.set(s.frame, patch, std::max(old, value));
    }
  }
}

GroupCorpus gen_pairs(const GroupScenarioConfig& cfg, const std::vector<std::string>& classes,
                      bool with_field) {
  Rng rng(cfg.seed);
  GroupCorpus corpus;
  SceneConfig scene;
  scene.image_width = cfg.image_width;
  scene.image_height = cfg.image_height;
  scene.patch_size = cfg.cell;
  TrackId next_id = 1;
  std::size_t pair_index = 0;
  for (const std::string& label : classes) {
    for (std::size_t k = 0; k < cfg.pairs_per_class; ++k, ++pair_index) {
      const PairScript script = script_for(label, cfg, rng);
      const Frame first = static_cast<Frame>(pair_index) * cfg.frame_stride;
      PairSample pair;
      pair.pair_id = "p" + std::to_string(pair_index + 1);
      pair.label = label;
      pair.first = to_trajectory(next_id++, script.first, first, rng, cfg.jitter_sigma);
      pair.second = to_trajectory(next_id++, script.second, first, rng, cfg.jitter_sigma);
      if (with_field) {
        add_motion(corpus.field, scene, pair.first, script.burst_first, rng);
        add_motion(corpus.field, scene, pair.second, script.burst_second, rng);
      }
      corpus.pairs.push_back(std::move(pair));
    }
  }
  return corpus;
}

}  // namespace

GroupCorpus gen_group_corpus(const GroupScenarioConfig& cfg) {
  return gen_pairs(cfg,
                   {"meet", "follow", "approach", "separate", "leave", "together", "exchange",
                    "return"},
                   false);
}

GroupCorpus gen_casia_corpus(const GroupScenarioConfig& cfg) {
  return gen_pairs(cfg,
                   {"rob", "fight", "follow", "follow_gather", "meet_part", "meet_gather",
                    "overtake"},
                   true);
}

std::vector<FlowVector> gen_crowd_flows(const CrowdScenarioConfig& cfg, CrowdMode mode,
                                        Frame first_frame, std::size_t frames) {
  Rng rng(cfg.seed ^ (static_cast<std::uint64_t>(first_frame) * 0x9E3779B97F4A7C15ULL) ^
          (mode == CrowdMode::escape ? 0xE5CA9EULL : 0ULL));
  const Point center{cfg.image_width / 2.0, cfg.image_height / 2.0};
  std::vector<FlowVector> out;
  out.reserve(frames * cfg.vectors_per_frame);
  for (std::size_t f = 0; f < frames; ++f) {
    const Frame frame = first_frame + static_cast<Frame>(f);
    for (std::size_t k = 0; k < cfg.vectors_per_frame; ++k) {
      const double x = uniform(rng, 0.0, cfg.image_width);
      const double y = uniform(rng, 0.0, cfg.image_height);
      double heading = 0.0;
      double speed = 0.0;
      if (mode == CrowdMode::normal) {
        heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        speed = uniform(rng, 0.0, cfg.normal_speed_max);
      } else {
        heading = std::atan2(y - center.y, x - center.x) +
                  gaussian(rng, cfg.escape_spread_deg * std::numbers::pi / 180.0);
        speed = uniform(rng, cfg.escape_speed_min, cfg.escape_speed_max);
      }
      out.push_back({frame, x, y, speed * std::cos(heading), speed * std::sin(heading)});
    }
  }
  return out;
}

CrowdSequence gen_crowd_sequence(const CrowdScenarioConfig& cfg) {
  CrowdSequence seq;
  seq.center = {cfg.image_width / 2.0, cfg.image_height / 2.0};
  seq.flows = gen_crowd_flows(cfg, CrowdMode::normal, 0, cfg.normal_frames);
  const auto escape = gen_crowd_flows(cfg, CrowdMode::escape,
                                      static_cast<Frame>(cfg.normal_frames), cfg.escape_frames);
  seq.flows.insert(seq.flows.end(), escape.begin(), escape.end());
  for (std::size_t f = 0; f < cfg.normal_frames + cfg.escape_frames; ++f) {
    seq.truth.emplace_back(static_cast<Frame>(f), f >= cfg.normal_frames);
  }
  return seq;
}

}  // namespace ntb
