#pragma once

// Scene geometry: the patch grid, trajectories, and the patch routes and
// relative-cell routes derived from them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ntb {

using PatchIndex = std::size_t;
using TrackId = std::int64_t;
using Frame = std::int64_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Sample {
  Frame frame = 0;
  double x = 0.0;
  double y = 0.0;
};

struct Trajectory {
  TrackId track_id = 0;
  std::vector<Sample> samples;

  /// Throws DataError unless frames are strictly increasing.
  void validate() const;
  /// Position at `frame`, linearly interpolated between neighbouring samples.
  /// Requires first frame <= frame <= last frame.
  [[nodiscard]] Point position_at(Frame frame) const;
};

struct SceneConfig {
  double image_width = 640.0;
  double image_height = 480.0;
  double patch_size = 48.0;
  std::vector<PatchIndex> entrance_patches;
  /// Groups of patches that observe the same ground area (overlapping
  /// cameras). Transitions inside one group cost nothing.
  std::vector<std::vector<PatchIndex>> equivalence_sets;

  [[nodiscard]] std::size_t columns() const;
  [[nodiscard]] std::size_t rows() const;
  [[nodiscard]] std::size_t node_count() const { return rows() * columns(); }

  [[nodiscard]] std::size_t row_of(PatchIndex p) const { return p / columns(); }
  [[nodiscard]] std::size_t col_of(PatchIndex p) const { return p % columns(); }
  [[nodiscard]] PatchIndex index_of(std::size_t row, std::size_t col) const {
    return row * columns() + col;
  }

  /// Throws DataError when the config breaks a grid invariant.
  void validate() const;
};

/// Ordered patch sequence of one activity. Consecutive duplicates are merged
/// on insertion; revisits are kept.
class PatchRoute {
 public:
  PatchRoute() = default;
  explicit PatchRoute(std::vector<PatchIndex> patches);

  /// Appends `patch` unless it equals the current last patch. `frame` is the
  /// frame at which the patch was entered.
  void append(PatchIndex patch, Frame frame = 0);

  [[nodiscard]] std::span<const PatchIndex> patches() const { return patches_; }
  [[nodiscard]] std::span<const Frame> entry_frames() const { return frames_; }
  [[nodiscard]] std::size_t size() const { return patches_.size(); }
  [[nodiscard]] bool empty() const { return patches_.empty(); }
  [[nodiscard]] PatchIndex start() const;
  [[nodiscard]] PatchIndex last() const;

  /// Route made of the first `count` patches.
  [[nodiscard]] PatchRoute prefix(std::size_t count) const;
  /// Same patches visited in reverse order.
  [[nodiscard]] PatchRoute reversed() const;

  friend bool operator==(const PatchRoute& a, const PatchRoute& b) {
    return a.patches_ == b.patches_;
  }

 private:
  std::vector<PatchIndex> patches_;
  std::vector<Frame> frames_;
};

struct Cell {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Chebyshev ring of a relative cell, clamped to `max_ring`.
[[nodiscard]] int ring_of(Cell c, int max_ring);

/// Position of one person expressed in cells relative to another.
struct RelativeCellRoute {
  std::vector<Cell> cells;
  std::vector<Frame> frames;
  int max_ring = 15;

  [[nodiscard]] std::vector<int> rings() const;
};

[[nodiscard]] PatchIndex locate_patch(Point p, const SceneConfig& scene);

/// Throws DataError("empty input") on an empty trajectory.
[[nodiscard]] PatchRoute route_from_trajectory(const Trajectory& traj,
                                               const SceneConfig& scene);

/// Relative route of `other` seen from `reference`, sampled at the reference
/// frames that fall inside both tracks' frame ranges. `other` is linearly
/// interpolated. Throws DataError("disjoint tracks") without overlap.
[[nodiscard]] RelativeCellRoute relative_route(const Trajectory& reference,
                                               const Trajectory& other,
                                               double cell_size, int max_ring);

/// Orders a pair so the reference person (smaller track id) comes first.
struct OrderedPair {
  const Trajectory* reference;
  const Trajectory* other;
};
[[nodiscard]] OrderedPair order_pair(const Trajectory& a, const Trajectory& b);

}  // namespace ntb
