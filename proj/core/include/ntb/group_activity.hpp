#pragma once

// Pairwise group-activity features, the group classifier, and crowd-escape
// detection from flow vectors.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ntb/linear_classifier.hpp"
#include "ntb/scene_grid.hpp"
#include "ntb/transmission_network.hpp"

namespace ntb {

/// Energies of one person pair: scene energies of both people, relative
/// energies of the second person around the first, and optionally both
/// people's local-motion energies.
struct GroupFeatureVector {
  double e1 = 0.0;
  double e2 = 0.0;
  double enr = 0.0;
  double ewr = 0.0;
  std::optional<double> emi1;
  std::optional<double> emi2;

  [[nodiscard]] std::size_t dimension() const { return emi1 ? 6 : 4; }
  [[nodiscard]] std::vector<double> values() const;
  /// Column names matching values().
  [[nodiscard]] static std::vector<std::string> column_names(std::size_t dimension);
};

/// Features of a pair. The person with the smaller track id is the
/// reference. Relative cells use `cell_size` pixels (the scene patch size
/// when zero). Throws DataError("disjoint tracks") without frame overlap.
[[nodiscard]] GroupFeatureVector extract_pair_features(const Trajectory& a, const Trajectory& b,
                                                       const SceneConfig& scene,
                                                       const RelativeNetworkSpec& spec,
                                                       const MotionField* field = nullptr,
                                                       double cell_size = 0.0);

/// Same as above with a prebuilt scene network (avoids rebuilding it for
/// every pair).
[[nodiscard]] GroupFeatureVector extract_pair_features(const Trajectory& a, const Trajectory& b,
                                                       const SceneConfig& scene,
                                                       const TransmissionNetwork& scene_net,
                                                       const RelativeNetworkSpec& spec,
                                                       const MotionField* field,
                                                       double cell_size);

struct GroupClassifierModel {
  std::vector<std::string> classes;
  SoftmaxModel model;

  [[nodiscard]] std::size_t dimension() const { return model.dimension(); }
  friend bool operator==(const GroupClassifierModel&, const GroupClassifierModel&) = default;
};

struct LabelledFeatures {
  std::vector<double> values;
  std::string label;
};

/// Trains one linear score per class over standardized features. Classes
/// are ordered lexicographically. Throws DataError with fewer than two
/// classes or mixed dimensions.
[[nodiscard]] GroupClassifierModel train_group_classifier(std::span<const LabelledFeatures> data,
                                                          const LinearTrainingConfig& config = {});

struct PairClassification {
  std::string label;
  std::vector<double> scores;
};

/// Highest-scoring class; ties go to the class listed first. Throws
/// DataError on a dimension mismatch.
[[nodiscard]] PairClassification classify_pair(std::span<const double> features,
                                               const GroupClassifierModel& model);

struct FlowVector {
  Frame frame = 0;
  double x = 0.0;
  double y = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

/// Sum of relative-network (unit) energies of flow vectors moving in a
/// network fixed at `center`.
[[nodiscard]] double crowd_window_energy(std::span<const FlowVector> flows, Point center,
                                         double cell_size, const RelativeNetworkSpec& spec);

struct CrowdWindow {
  Frame first_frame = 0;
  Frame last_frame = 0;
  double energy = 0.0;
  bool abnormal = false;
};

struct CrowdDetection {
  std::vector<CrowdWindow> windows;
  /// Frame label: true when any covering window is abnormal.
  std::vector<std::pair<Frame, bool>> frames;
};

struct CrowdParams {
  Point center;
  double cell_size = 48.0;
  std::size_t window_frames = 10;
  std::size_t stride = 1;
  RelativeNetworkSpec spec;
};

/// Energy of every frame in [first, last] (frames without flows score 0).
[[nodiscard]] std::vector<std::pair<Frame, double>> crowd_frame_energies(
    std::span<const FlowVector> flows, const CrowdParams& params);

/// Windows of `window_frames` consecutive frames every `stride` frames; a
/// window is abnormal when its energy is below -threshold.
[[nodiscard]] CrowdDetection crowd_detect(std::span<const FlowVector> flows,
                                          const CrowdParams& params, double threshold);

/// Threshold of `sigmas` standard deviations of the window energies of a
/// normal calibration segment.
[[nodiscard]] double calibrate_crowd_threshold(std::span<const FlowVector> normal_flows,
                                               const CrowdParams& params, double sigmas = 3.0);

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

/// Frame-level ROC over every distinct window energy as threshold, sorted
/// by increasing threshold. `truth` maps frames to escape labels.
[[nodiscard]] std::vector<RocPoint> crowd_roc(std::span<const FlowVector> flows,
                                              const CrowdParams& params,
                                              const std::vector<std::pair<Frame, bool>>& truth);

/// Area under the ROC curve by the trapezoid rule, with (0,0) and (1,1)
/// appended.
[[nodiscard]] double roc_auc(std::span<const RocPoint> roc);

}  // namespace ntb
