#pragma once

// Minimum-energy route maps grown from a single source patch.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <vector>

#include "ntb/transmission_network.hpp"

namespace ntb {

/// Minimum energies and routes from one source to every patch.
///
/// Nodes that can only be reached through edges of energy >= L are left
/// with `min_energy == L` and `reachable == false`; their route is empty.
struct RouteMap {
  PatchIndex source = 0;
  std::vector<double> min_energy;
  std::vector<std::vector<PatchIndex>> routes;
  std::vector<bool> reachable;
  /// Tree parent of each reachable node; the source is its own parent.
  std::vector<PatchIndex> parent;
  /// Nodes in the order they joined the tree.
  std::vector<PatchIndex> settle_order;

  [[nodiscard]] std::size_t node_count() const { return min_energy.size(); }

  friend bool operator==(const RouteMap&, const RouteMap&) = default;
};

/// Builds the route map from `source`.
///
/// The frontier node joining the tree is the pair (i in tree, j outside)
/// minimising E_min(i) + e(i,j); ties go to the smallest i, then the
/// smallest j. Candidates whose energy reaches L never join, which leaves
/// their nodes unreachable. Throws DataError on negative energies or an
/// out-of-range source.
[[nodiscard]] RouteMap sbip(const TransmissionNetwork& net, PatchIndex source);

/// Same result as `sbip`, computed by the literal triple-loop scan over
/// every (tree, non-tree) pair in each round. O(n^3); kept for
/// cross-checking and small graphs.
[[nodiscard]] RouteMap sbip_full_scan(const TransmissionNetwork& net, PatchIndex source);

/// Route maps for a set of entrance patches, with on-demand maps for
/// routes starting elsewhere.
class RouteMapSet {
 public:
  RouteMapSet() = default;
  RouteMapSet(const TransmissionNetwork& net, const std::vector<PatchIndex>& entrances);

  /// Map from `source`, or nullptr when `source` is not an entrance.
  [[nodiscard]] const RouteMap* find(PatchIndex source) const;
  [[nodiscard]] const std::map<PatchIndex, RouteMap>& maps() const { return maps_; }

 private:
  std::map<PatchIndex, RouteMap> maps_;
};

/// Resolves the map for `source`: the entrance map when one exists,
/// otherwise a freshly computed one with `on_demand` set.
struct ResolvedMap {
  RouteMap map;
  bool on_demand = false;
};
[[nodiscard]] ResolvedMap resolve_route_map(const RouteMapSet& set, const TransmissionNetwork& net,
                                            PatchIndex source);

[[nodiscard]] RouteMapSet route_maps_for_entrances(const TransmissionNetwork& net,
                                                   const SceneConfig& scene);

struct TreeEdge {
  PatchIndex from = 0;
  PatchIndex to = 0;
  double energy = 0.0;
  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};
using EdgeList = std::vector<TreeEdge>;

/// Every tree edge of the map, in settle order.
[[nodiscard]] EdgeList tree_edges(const RouteMap& map, const TransmissionNetwork& net);

/// Tree edges whose energy does not exceed `threshold`. Note that the tree
/// omits cycles, so two patches may be unconnected here yet close in the
/// trained matrix; detection always uses the matrix.
[[nodiscard]] EdgeList prune_route_map(const RouteMap& map, const TransmissionNetwork& net,
                                       double threshold);

void write_dot(std::ostream& os, const RouteMap& map, const EdgeList& edges);
void write_min_energy_csv(std::ostream& os, const RouteMap& map);

}  // namespace ntb
