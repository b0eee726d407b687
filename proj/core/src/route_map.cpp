#include "ntb/route_map.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "ntb/error.hpp"

namespace ntb {
namespace {

constexpr PatchIndex kNoParent = std::numeric_limits<PatchIndex>::max();

void check_inputs(const TransmissionNetwork& net, PatchIndex source) {
  if (source >= net.node_count()) {
    throw DataError("route map source " + std::to_string(source) + " outside network of " +
                    std::to_string(net.node_count()) + " nodes");
  }
  for (double e : net.matrix()) {
    if (std::isnan(e) || e < 0.0) throw DataError("negative energy unsupported");
  }
}

RouteMap empty_map(const TransmissionNetwork& net, PatchIndex source) {
  const std::size_t n = net.node_count();
  RouteMap map;
  map.source = source;
  map.min_energy.assign(n, net.large_value());
  map.routes.assign(n, {});
  map.reachable.assign(n, false);
  map.parent.assign(n, kNoParent);
  map.min_energy[source] = 0.0;
  map.routes[source] = {source};
  map.reachable[source] = true;
  map.parent[source] = source;
  map.settle_order.push_back(source);
  return map;
}

void settle(RouteMap& map, PatchIndex from, PatchIndex node, double energy) {
  map.min_energy[node] = energy;
  map.routes[node] = map.routes[from];
  map.routes[node].push_back(node);
  map.reachable[node] = true;
  map.parent[node] = from;
  map.settle_order.push_back(node);
}

}  // namespace

RouteMap sbip(const TransmissionNetwork& net, PatchIndex source) {
  check_inputs(net, source);
  const std::size_t n = net.node_count();
  const double large = net.large_value();
  RouteMap map = empty_map(net, source);

  // Best tree-to-node candidate per outside node, ordered by (energy, from).
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<PatchIndex> best_from(n, kNoParent);
  std::vector<bool> in_tree(n, false);
  in_tree[source] = true;

  PatchIndex joined = source;
  for (std::size_t round = 1; round < n; ++round) {
    const double base = map.min_energy[joined];
    for (PatchIndex j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double candidate = base + net.energy(joined, j);
      if (candidate < best[j] || (candidate == best[j] && joined < best_from[j])) {
        best[j] = candidate;
        best_from[j] = joined;
      }
    }
    PatchIndex pick = kNoParent;
    for (PatchIndex j = 0; j < n; ++j) {
      if (in_tree[j] || !(best[j] < large)) continue;
      if (pick == kNoParent || best[j] < best[pick] ||
          (best[j] == best[pick] && best_from[j] < best_from[pick])) {
        pick = j;
      }
    }
    if (pick == kNoParent) break;
    in_tree[pick] = true;
    settle(map, best_from[pick], pick, best[pick]);
    joined = pick;
  }
  return map;
}

RouteMap sbip_full_scan(const TransmissionNetwork& net, PatchIndex source) {
  check_inputs(net, source);
  const std::size_t n = net.node_count();
  const double large = net.large_value();
  RouteMap map = empty_map(net, source);
  std::vector<bool> in_tree(n, false);
  in_tree[source] = true;

  while (map.settle_order.size() != n) {
    double best = large;
    PatchIndex ic = kNoParent;
    PatchIndex jc = kNoParent;
    for (PatchIndex i = 0; i < n; ++i) {
      if (!in_tree[i]) continue;
      for (PatchIndex j = 0; j < n; ++j) {
        if (in_tree[j]) continue;
        const double candidate = map.min_energy[i] + net.energy(i, j);
        if (candidate < best) {
          best = candidate;
          ic = i;
          jc = j;
        }
      }
    }
    if (jc == kNoParent) break;
    in_tree[jc] = true;
    settle(map, ic, jc, best);
  }
  return map;
}

RouteMapSet::RouteMapSet(const TransmissionNetwork& net, const std::vector<PatchIndex>& entrances) {
  for (PatchIndex u : entrances) {
    if (!maps_.contains(u)) maps_.emplace(u, sbip(net, u));
  }
}

const RouteMap* RouteMapSet::find(PatchIndex source) const {
  auto it = maps_.find(source);
  return it == maps_.end() ? nullptr : &it->second;
}

ResolvedMap resolve_route_map(const RouteMapSet& set, const TransmissionNetwork& net,
                              PatchIndex source) {
  if (const RouteMap* m = set.find(source)) return {*m, false};
  return {sbip(net, source), true};
}

RouteMapSet route_maps_for_entrances(const TransmissionNetwork& net, const SceneConfig& scene) {
  return RouteMapSet(net, scene.entrance_patches);
}

EdgeList tree_edges(const RouteMap& map, const TransmissionNetwork& net) {
  EdgeList edges;
  for (PatchIndex node : map.settle_order) {
    if (node == map.source) continue;
    const PatchIndex from = map.parent[node];
    edges.push_back({from, node, net.energy(from, node)});
  }
  return edges;
}

EdgeList prune_route_map(const RouteMap& map, const TransmissionNetwork& net, double threshold) {
  EdgeList kept;
  for (const TreeEdge& e : tree_edges(map, net)) {
    if (e.energy <= threshold) kept.push_back(e);
  }
  return kept;
}

void write_dot(std::ostream& os, const RouteMap& map, const EdgeList& edges) {
  os.precision(17);
  os << "digraph route_map {\n";
  os << "  " << map.source << " [shape=doublecircle];\n";
  for (const TreeEdge& e : edges) {
    os << "  " << e.from << " -> " << e.to << " [label=\"" << e.energy << "\"];\n";
  }
  os << "}\n";
}

void write_min_energy_csv(std::ostream& os, const RouteMap& map) {
  os.precision(17);
  os << "patch,E_min\n";
  for (std::size_t p = 0; p < map.node_count(); ++p) {
    os << p << ',' << map.min_energy[p] << '\n';
  }
}

}  // namespace ntb
