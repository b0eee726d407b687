#include "ntb/scene_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

#include "ntb/error.hpp"

namespace ntb {

void Trajectory::validate() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].frame <= samples[i - 1].frame) {
      throw DataError("track " + std::to_string(track_id) +
                      ": frames must be strictly increasing (frame " +
                      std::to_string(samples[i].frame) + ")");
    }
  }
}

Point Trajectory::position_at(Frame frame) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), frame,
                             [](const Sample& s, Frame f) { return s.frame < f; });
  if (it == samples.end()) {
    throw DataError("track " + std::to_string(track_id) + ": frame " +
                    std::to_string(frame) + " outside track");
  }
  if (it->frame == frame) return {it->x, it->y};
  if (it == samples.begin()) {
    throw DataError("track " + std::to_string(track_id) + ": frame " +
                    std::to_string(frame) + " outside track");
  }
  const Sample& hi = *it;
  const Sample& lo = *(it - 1);
  const double t = static_cast<double>(frame - lo.frame) /
                   static_cast<double>(hi.frame - lo.frame);
  return {lo.x + t * (hi.x - lo.x), lo.y + t * (hi.y - lo.y)};
}

std::size_t SceneConfig::columns() const {
  return static_cast<std::size_t>(std::ceil(image_width / patch_size));
}

std::size_t SceneConfig::rows() const {
  return static_cast<std::size_t>(std::ceil(image_height / patch_size));
}

void SceneConfig::validate() const {
  if (!(patch_size > 0.0)) throw DataError("scene: patch_size must be positive");
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw DataError("scene: image dimensions must be positive");
  }
  const std::size_t n = node_count();
  for (PatchIndex p : entrance_patches) {
    if (p >= n) {
      throw DataError("scene: entrance patch " + std::to_string(p) +
                      " outside grid of " + std::to_string(n) + " patches");
    }
  }
  std::set<PatchIndex> seen;
  for (const auto& group : equivalence_sets) {
    for (PatchIndex p : group) {
      if (p >= n) {
        throw DataError("scene: equivalence patch " + std::to_string(p) +
                        " outside grid");
      }
      if (!seen.insert(p).second) {
        throw DataError("scene: equivalence sets must be disjoint (patch " +
                        std::to_string(p) + ")");
      }
    }
  }
}

PatchRoute::PatchRoute(std::vector<PatchIndex> patches) {
  for (PatchIndex p : patches) append(p);
}

void PatchRoute::append(PatchIndex patch, Frame frame) {
  if (!patches_.empty() && patches_.back() == patch) return;
  patches_.push_back(patch);
  frames_.push_back(frame);
}

PatchIndex PatchRoute::start() const {
  if (patches_.empty()) throw DataError("empty route");
  return patches_.front();
}

PatchIndex PatchRoute::last() const {
  if (patches_.empty()) throw DataError("empty route");
  return patches_.back();
}

PatchRoute PatchRoute::prefix(std::size_t count) const {
  PatchRoute r;
  count = std::min(count, patches_.size());
  for (std::size_t i = 0; i < count; ++i) r.append(patches_[i], frames_[i]);
  return r;
}

PatchRoute PatchRoute::reversed() const {
  PatchRoute r;
  for (std::size_t i = patches_.size(); i-- > 0;) r.append(patches_[i], frames_[i]);
  return r;
}

int ring_of(Cell c, int max_ring) {
  return std::min(std::max(std::abs(c.dx), std::abs(c.dy)), max_ring);
}

std::vector<int> RelativeCellRoute::rings() const {
  std::vector<int> out;
  out.reserve(cells.size());
  for (Cell c : cells) out.push_back(ring_of(c, max_ring));
  return out;
}

PatchIndex locate_patch(Point p, const SceneConfig& scene) {
  const std::size_t cols = scene.columns();
  const std::size_t rows = scene.rows();
  const double x = std::clamp(p.x, 0.0, scene.image_width);
  const double y = std::clamp(p.y, 0.0, scene.image_height);
  auto col = static_cast<std::size_t>(std::floor(x / scene.patch_size));
  auto row = static_cast<std::size_t>(std::floor(y / scene.patch_size));
  col = std::min(col, cols - 1);
  row = std::min(row, rows - 1);
  return row * cols + col;
}

PatchRoute route_from_trajectory(const Trajectory& traj, const SceneConfig& scene) {
  if (traj.samples.empty()) throw DataError("empty input");
  PatchRoute route;
  for (const Sample& s : traj.samples) {
    route.append(locate_patch({s.x, s.y}, scene), s.frame);
  }
  return route;
}

RelativeCellRoute relative_route(const Trajectory& reference, const Trajectory& other,
                                 double cell_size, int max_ring) {
  if (reference.samples.empty() || other.samples.empty()) {
    throw DataError("disjoint tracks");
  }
  const Frame lo = std::max(reference.samples.front().frame, other.samples.front().frame);
  const Frame hi = std::min(reference.samples.back().frame, other.samples.back().frame);
  RelativeCellRoute route;
  route.max_ring = max_ring;
  for (const Sample& s : reference.samples) {
    if (s.frame < lo || s.frame > hi) continue;
    const Point q = other.position_at(s.frame);
    const Cell c{static_cast<int>(std::lround((q.x - s.x) / cell_size)),
                 static_cast<int>(std::lround((q.y - s.y) / cell_size))};
    if (route.cells.empty() || !(route.cells.back() == c)) {
      route.cells.push_back(c);
      route.frames.push_back(s.frame);
    }
  }
  if (route.cells.empty()) throw DataError("disjoint tracks");
  return route;
}

OrderedPair order_pair(const Trajectory& a, const Trajectory& b) {
  if (b.track_id < a.track_id) return {&b, &a};
  return {&a, &b};
}

}  // namespace ntb
