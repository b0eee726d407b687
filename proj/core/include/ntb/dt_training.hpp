#pragma once

// Learns patch-pair energies and detection thresholds from labelled routes.
//
// Each iteration: build route maps on the current energies, pick the
// thresholds minimising err_FA^2 + err_miss^2 on the training routes, then
// scale the impact weights of every misclassified route (false alarms up,
// misses down) and recompute energies as 1 / sum of weights.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ntb/abnormality_detector.hpp"
#include "ntb/abnormality_model.hpp"

namespace ntb {

struct TrainingSample {
  TrackId track_id = 0;
  PatchRoute route;
  Label label = Label::normal;
};

struct TrainingConfig {
  std::size_t max_iterations = 100;
  /// Stop once no energy changes by more than this relative amount and the
  /// thresholds are stable.
  double tolerance = 1e-4;
  double alpha_min = 1.0;
  double alpha_max = 10.0;
  double alpha_step = 0.1;
  /// Floor for impact weights; correlations below it map to large_value.
  double epsilon = 1e-9;
  double large_value = kDefaultLargeValue;
  LinearTrainingConfig classifier{.epochs = 400, .learning_rate = 0.5, .l2 = 1e-4};

  [[nodiscard]] std::vector<double> alpha_grid() const;
};

/// Weights, correlations and energies at one point of training.
struct WeightState {
  ImpactWeights weights;
  /// Row-major activity correlation, node_count^2.
  std::vector<double> correlation;
  TransmissionNetwork network;
};

/// Initial weights: 1 for every patch pair a route crosses (once per route,
/// in either direction), energies = 1 / correlation or large_value.
[[nodiscard]] WeightState init_weights(std::span<const TrainingSample> samples,
                                       const SceneConfig& scene, const TrainingConfig& config);

/// Recomputes correlation and energies from `weights`.
[[nodiscard]] WeightState rebuild_energies(ImpactWeights weights, const SceneConfig& scene,
                                           const TrainingConfig& config);

/// Step energies of every sample against `maps`, with on-demand maps for
/// routes that do not start at an entrance.
[[nodiscard]] std::vector<StepEnergies> evaluate_samples(std::span<const TrainingSample> samples,
                                                         const TransmissionNetwork& net,
                                                         const RouteMapSet& maps,
                                                         std::size_t* on_demand = nullptr);

struct ThresholdChoice {
  Thresholds thresholds;
  double err_fa = 0.0;
  double err_miss = 0.0;
  [[nodiscard]] double objective() const { return err_fa * err_fa + err_miss * err_miss; }
};

/// Exhaustive search. T1 candidates are midpoints between consecutive
/// distinct final energies, one value above the largest energy, and
/// `previous->t1`; alpha runs over the configured grid plus
/// `previous->alpha`. Ties go to the smaller T1, then the smaller alpha.
/// An empty class contributes an error rate of 0.
[[nodiscard]] ThresholdChoice update_thresholds(std::span<const StepEnergies> energies,
                                                std::span<const Label> labels,
                                                const TrainingConfig& config,
                                                std::optional<Thresholds> previous = std::nullopt,
                                                double large_value = kDefaultLargeValue);

/// Multiplicative weight update for one sample. Returns the factor applied
/// to each of its weights (1 when correctly recognised).
[[nodiscard]] double rule_update_factor(const StepEnergies& steps, Label label,
                                        Thresholds thresholds, double large_value);

/// Applies the rule-based update to every sample; weights are floored at
/// config.epsilon. Returns the number of samples whose weights changed.
std::size_t update_weights(ImpactWeights& weights, std::span<const TrainingSample> samples,
                           std::span<const StepEnergies> energies, Thresholds thresholds,
                           const TrainingConfig& config);

/// Classifier-loop weight factor for one route: 1 when the decision is
/// right, 1 + p for a false alarm, 1 - p for a miss (kept above `epsilon`),
/// p being the classifier's confidence in its wrong decision.
[[nodiscard]] double classifier_update_factor(bool flagged, Label label, double p,
                                              double epsilon);

/// Per-iteration hook for inspecting intermediate training state.
using TrainingObserver = std::function<void(const IterationRecord&, const WeightState&)>;

[[nodiscard]] TrainedAbnormalityModel train(std::span<const TrainingSample> samples,
                                            const SceneConfig& scene,
                                            const TrainingConfig& config = {},
                                            const TrainingObserver& observer = {});

/// Classifier-in-the-loop variant: the threshold search is replaced by
/// re-training the energy classifier each iteration, and misclassified
/// routes are re-weighted by (1 + P) for false alarms and (1 - P) for misses,
/// P being the classifier's confidence. The rule thresholds are still
/// fitted on the final energies for reporting.
[[nodiscard]] TrainedAbnormalityModel train_with_classifier(std::span<const TrainingSample> samples,
                                                            const SceneConfig& scene,
                                                            const TrainingConfig& config = {},
                                                            const TrainingObserver& observer = {});

/// Fraction of samples whose abnormal/normal decision is wrong.
[[nodiscard]] double training_error(std::span<const TrainingSample> samples,
                                    const TrainedAbnormalityModel& model);

}  // namespace ntb
