#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ntb/linear_classifier.hpp"
#include "ntb/route_map.hpp"
#include "ntb/scene_grid.hpp"
#include "ntb/transmission_network.hpp"

namespace ntb {

/// Ground-truth or predicted activity label. Abnormal activities carry one
/// of three types: irregular path (I), back-and-forth (II), unusual region
/// (III).
enum class Label { normal, type_i, type_ii, type_iii };

[[nodiscard]] constexpr bool is_abnormal(Label l) { return l != Label::normal; }
/// "normal", "I", "II", "III".
[[nodiscard]] std::string_view to_string(Label l);
/// Inverse of to_string; throws DataError on anything else.
[[nodiscard]] Label parse_label(std::string_view text);

struct Thresholds {
  double t1 = 0.0;
  /// Scales the minimum energy into the per-patch threshold T2 = alpha * E_min.
  double alpha = 1.0;
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct IterationRecord {
  std::size_t iteration = 0;
  Thresholds thresholds;
  double err_fa = 0.0;
  double err_miss = 0.0;
  /// Largest relative change of any finite energy in this iteration's update.
  double max_relative_change = 0.0;
  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

/// Undirected patch pair, stored with first < second.
struct EdgeKey {
  PatchIndex first = 0;
  PatchIndex second = 0;
  static EdgeKey of(PatchIndex a, PatchIndex b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

/// Correlation impact weights: for each training sample, the weight of every
/// patch pair its route crosses. Pairs it never crosses weigh zero and are
/// not stored.
struct ImpactWeights {
  std::vector<std::vector<std::pair<EdgeKey, double>>> per_sample;
  friend bool operator==(const ImpactWeights&, const ImpactWeights&) = default;
};

/// Binary normal/abnormal decision on [E, E / E_min] of a whole route.
struct ClassifierPrediction {
  bool abnormal = false;
  /// Confidence in the predicted label, in [0, 1].
  double probability = 0.0;
};

/// Built-in probability classifier: softmax linear model on
/// [log1p(E), log1p(E / E_min)].
struct EnergyClassifier {
  SoftmaxModel model;

  [[nodiscard]] ClassifierPrediction predict(double energy, double min_energy) const;
  friend bool operator==(const EnergyClassifier&, const EnergyClassifier&) = default;
};

struct TrainedAbnormalityModel {
  SceneConfig scene;
  TransmissionNetwork network;
  Thresholds thresholds;
  ImpactWeights weights;
  std::vector<IterationRecord> log;
  bool converged = false;
  /// Present when trained with the classifier in the loop.
  std::optional<EnergyClassifier> classifier;
  /// Entrance route maps for `network`; rebuilt by refresh_route_maps().
  RouteMapSet route_maps;

  void refresh_route_maps() { route_maps = route_maps_for_entrances(network, scene); }
};

}  // namespace ntb
