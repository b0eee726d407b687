#include "ntb/transmission_network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "ntb/error.hpp"

namespace ntb {

TransmissionNetwork::TransmissionNetwork(std::size_t node_count, bool directed,
                                         double large_value)
    : nodes_(node_count),
      directed_(directed),
      large_(large_value),
      energy_(node_count * node_count, large_value) {
  for (std::size_t i = 0; i < nodes_; ++i) energy_[i * nodes_ + i] = 0.0;
}

double TransmissionNetwork::at(PatchIndex from, PatchIndex to) const {
  if (from >= nodes_ || to >= nodes_) {
    throw DataError("patch index out of range: (" + std::to_string(from) + "," +
                    std::to_string(to) + ") for " + std::to_string(nodes_) + " nodes");
  }
  return energy(from, to);
}

void TransmissionNetwork::set(PatchIndex from, PatchIndex to, double value) {
  if (from >= nodes_ || to >= nodes_) {
    throw DataError("patch index out of range: (" + std::to_string(from) + "," +
                    std::to_string(to) + ")");
  }
  if (from == to) return;
  energy_[from * nodes_ + to] = value;
  if (!directed_) energy_[to * nodes_ + from] = value;
}

TransmissionNetwork TransmissionNetwork::from_matrix(std::vector<double> matrix,
                                                     bool directed, double large_value) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(matrix.size()))));
  if (n * n != matrix.size()) {
    throw DataError("energy matrix size " + std::to_string(matrix.size()) +
                    " is not a square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i * n + i] != 0.0) throw DataError("energy matrix diagonal must be zero");
  }
  TransmissionNetwork net;
  net.nodes_ = n;
  net.directed_ = directed;
  net.large_ = large_value;
  net.energy_ = std::move(matrix);
  return net;
}

void apply_equivalence_links(TransmissionNetwork& net,
                             const std::vector<std::vector<PatchIndex>>& sets) {
  for (const auto& group : sets) {
    for (PatchIndex a : group) {
      for (PatchIndex b : group) {
        if (a == b) continue;
        net.set(a, b, 0.0);
      }
    }
  }
}

double total_energy(const PatchRoute& route, const TransmissionNetwork& net) {
  const auto patches = route.patches();
  if (!patches.empty() && patches.front() >= net.node_count()) {
    throw DataError("patch index out of range: " + std::to_string(patches.front()));
  }
  double sum = 0.0;
  for (std::size_t k = 1; k < patches.size(); ++k) sum += net.at(patches[k - 1], patches[k]);
  return sum;
}

std::vector<double> cumulative_energy(const PatchRoute& route, const TransmissionNetwork& net) {
  const auto patches = route.patches();
  std::vector<double> out;
  out.reserve(patches.size());
  if (patches.empty()) return out;
  if (patches.front() >= net.node_count()) {
    throw DataError("patch index out of range: " + std::to_string(patches.front()));
  }
  double sum = 0.0;
  out.push_back(sum);
  for (std::size_t k = 1; k < patches.size(); ++k) {
    sum += net.at(patches[k - 1], patches[k]);
    out.push_back(sum);
  }
  return out;
}

TransmissionNetwork build_scene_group_network(std::size_t rows, std::size_t cols) {
  const std::size_t n = rows * cols;
  TransmissionNetwork net(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    const auto ra = static_cast<long>(a / cols);
    const auto ca = static_cast<long>(a % cols);
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto rb = static_cast<long>(b / cols);
      const auto cb = static_cast<long>(b % cols);
      const long d = std::max(std::labs(ra - rb), std::labs(ca - cb));
      net.set(a, b, static_cast<double>(d));
    }
  }
  return net;
}

double enr_energy(Cell from, Cell to, const RelativeNetworkSpec& spec) {
  return static_cast<double>(ring_of(from, spec.max_ring) - ring_of(to, spec.max_ring));
}

double ewr_energy(Cell from, Cell to, const RelativeNetworkSpec& spec) {
  const int a = ring_of(from, spec.max_ring);
  const int b = ring_of(to, spec.max_ring);
  const bool head = spec.scheme == EwrScheme::head;
  double sum = 0.0;
  // Each unit crossing r -> r-1 (inward) or r -> r+1 (outward); the head
  // scheme weights it by the destination ring, the tail scheme by the source.
  for (int r = a; r > b; --r) {
    sum += RelativeNetworkSpec::ring_weight(head ? r - 1 : r);
  }
  for (int r = a; r < b; ++r) {
    sum -= RelativeNetworkSpec::ring_weight(head ? r + 1 : r);
  }
  return sum;
}

double total_enr(const RelativeCellRoute& route, const RelativeNetworkSpec& spec) {
  double sum = 0.0;
  for (std::size_t k = 1; k < route.cells.size(); ++k) {
    sum += enr_energy(route.cells[k - 1], route.cells[k], spec);
  }
  return sum;
}

double total_ewr(const RelativeCellRoute& route, const RelativeNetworkSpec& spec) {
  double sum = 0.0;
  for (std::size_t k = 1; k < route.cells.size(); ++k) {
    sum += ewr_energy(route.cells[k - 1], route.cells[k], spec);
  }
  return sum;
}

void MotionField::set(Frame frame, PatchIndex patch, double magnitude) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw DataError("motion field magnitude must be finite and non-negative");
  }
  values_[{frame, patch}] = magnitude;
}

std::optional<double> MotionField::magnitude(Frame frame, PatchIndex patch) const {
  auto it = values_.find({frame, patch});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double object_speed(const Trajectory& traj, Frame frame) {
  const auto& s = traj.samples;
  auto it = std::lower_bound(s.begin(), s.end(), frame,
                             [](const Sample& a, Frame f) { return a.frame < f; });
  if (it == s.end() || it->frame != frame) {
    throw DataError("track " + std::to_string(traj.track_id) + " has no sample at frame " +
                    std::to_string(frame));
  }
  if (it == s.begin()) return 0.0;
  const Sample& prev = *(it - 1);
  const double dt = static_cast<double>(it->frame - prev.frame);
  return std::hypot(it->x - prev.x, it->y - prev.y) / dt;
}

MotionEnergy motion_intensity_energy(const PatchRoute& route,
                                     std::span<const Frame> transition_frames,
                                     const MotionField& field, const Trajectory& traj) {
  const auto patches = route.patches();
  const std::size_t transitions = patches.empty() ? 0 : patches.size() - 1;
  if (transition_frames.size() != transitions) {
    throw DataError("expected " + std::to_string(transitions) + " transition frames, got " +
                    std::to_string(transition_frames.size()));
  }
  MotionEnergy out;
  for (std::size_t k = 0; k < transitions; ++k) {
    const Frame t = transition_frames[k];
    double flow = 0.0;
    for (PatchIndex p : {patches[k], patches[k + 1]}) {
      if (auto m = field.magnitude(t, p)) {
        flow += *m;
      } else {
        ++out.missing_entries;
      }
    }
    flow *= 0.5;
    out.energy += std::abs(flow - object_speed(traj, t));
  }
  return out;
}

MotionEnergy motion_intensity_energy(const Trajectory& traj, const SceneConfig& scene,
                                     const MotionField& field) {
  const PatchRoute route = route_from_trajectory(traj, scene);
  const auto frames = route.entry_frames();
  return motion_intensity_energy(route, frames.subspan(std::min<std::size_t>(1, frames.size())),
                                 field, traj);
}

}  // namespace ntb
