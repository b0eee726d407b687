#pragma once

// Transmission networks and the energies that packages (people, flow
// vectors) consume while moving through them.

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ntb/scene_grid.hpp"

namespace ntb {

/// Marker energy for edges no training activity ever crossed.
inline constexpr double kDefaultLargeValue = 1e6;

/// Dense node-to-node direct-transmission energy assignment.
class TransmissionNetwork {
 public:
  TransmissionNetwork() = default;
  /// All off-diagonal energies start at `large_value`.
  TransmissionNetwork(std::size_t node_count, bool directed,
                      double large_value = kDefaultLargeValue);

  [[nodiscard]] std::size_t node_count() const { return nodes_; }
  [[nodiscard]] bool directed() const { return directed_; }
  [[nodiscard]] double large_value() const { return large_; }

  [[nodiscard]] double energy(PatchIndex from, PatchIndex to) const {
    return energy_[from * nodes_ + to];
  }
  /// Bounds-checked access; throws DataError.
  [[nodiscard]] double at(PatchIndex from, PatchIndex to) const;

  /// Sets e(from,to), and e(to,from) as well when undirected. Diagonal
  /// entries stay zero.
  void set(PatchIndex from, PatchIndex to, double value);

  /// Row-major node_count^2 energies.
  [[nodiscard]] const std::vector<double>& matrix() const { return energy_; }
  /// Rebuilds a network from a row-major matrix. Throws DataError when the
  /// size is not a perfect square or the diagonal is non-zero.
  static TransmissionNetwork from_matrix(std::vector<double> matrix, bool directed,
                                         double large_value);

  friend bool operator==(const TransmissionNetwork&, const TransmissionNetwork&) = default;

 private:
  std::size_t nodes_ = 0;
  bool directed_ = false;
  double large_ = kDefaultLargeValue;
  std::vector<double> energy_;
};

/// Zeroes the energy between every pair of patches in the same equivalence set.
void apply_equivalence_links(TransmissionNetwork& net,
                             const std::vector<std::vector<PatchIndex>>& sets);

/// Sum of e(i,j) over consecutive route entries. Throws DataError when an
/// index is outside the network.
[[nodiscard]] double total_energy(const PatchRoute& route, const TransmissionNetwork& net);

/// Running totals: entry k is the energy of the first k+1 patches.
[[nodiscard]] std::vector<double> cumulative_energy(const PatchRoute& route,
                                                    const TransmissionNetwork& net);

/// Undirected grid network used for group activities: unit energy between
/// 8-neighbours, Chebyshev distance between any other pair of patches.
[[nodiscard]] TransmissionNetwork build_scene_group_network(std::size_t rows,
                                                            std::size_t cols);

enum class EwrScheme { head, tail };

/// Closed-form relative networks centred on a reference person.
struct RelativeNetworkSpec {
  int max_ring = 15;
  EwrScheme scheme = EwrScheme::head;

  /// Weight of ring r; positive and strictly decreasing.
  [[nodiscard]] static double ring_weight(int r) { return 1.0 / (r + 1.0); }
};

/// +1 per ring crossed inward, -1 per ring crossed outward.
[[nodiscard]] double enr_energy(Cell from, Cell to, const RelativeNetworkSpec& spec);
/// Ring-weighted variant of enr_energy; multi-ring jumps are summed over
/// unit crossings.
[[nodiscard]] double ewr_energy(Cell from, Cell to, const RelativeNetworkSpec& spec);

[[nodiscard]] double total_enr(const RelativeCellRoute& route, const RelativeNetworkSpec& spec);
[[nodiscard]] double total_ewr(const RelativeCellRoute& route, const RelativeNetworkSpec& spec);

/// Mean optical-flow magnitude (pixels/frame) per (frame, patch).
class MotionField {
 public:
  /// Throws DataError on a negative magnitude.
  void set(Frame frame, PatchIndex patch, double magnitude);
  [[nodiscard]] std::optional<double> magnitude(Frame frame, PatchIndex patch) const;
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] const std::map<std::pair<Frame, PatchIndex>, double>& entries() const {
    return values_;
  }

 private:
  std::map<std::pair<Frame, PatchIndex>, double> values_;
};

struct MotionEnergy {
  double energy = 0.0;
  /// Patch magnitudes that were absent from the field and counted as 0.
  std::size_t missing_entries = 0;
};

/// Local-motion energy of a route: sum over transitions of
/// |flow magnitude - object speed|. `transition_frames[k]` is the frame of
/// the transition from patch k to patch k+1. Throws DataError when the
/// number of frames does not match the number of transitions.
[[nodiscard]] MotionEnergy motion_intensity_energy(const PatchRoute& route,
                                                   std::span<const Frame> transition_frames,
                                                   const MotionField& field,
                                                   const Trajectory& traj);

/// Convenience overload using the route's own patch-entry frames.
[[nodiscard]] MotionEnergy motion_intensity_energy(const Trajectory& traj,
                                                   const SceneConfig& scene,
                                                   const MotionField& field);

/// Object speed at `frame` by one-frame backward difference (0 at the first
/// sample).
[[nodiscard]] double object_speed(const Trajectory& traj, Frame frame);

}  // namespace ntb
