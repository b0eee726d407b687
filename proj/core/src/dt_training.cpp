#include "ntb/dt_training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "ntb/error.hpp"

namespace ntb {
namespace {

void check_routes(std::span<const TrainingSample> samples, std::size_t node_count) {
  for (const TrainingSample& s : samples) {
    if (s.route.empty()) {
      throw DataError("training track " + std::to_string(s.track_id) + " has an empty route");
    }
    for (PatchIndex p : s.route.patches()) {
      if (p >= node_count) {
        throw DataError("training track " + std::to_string(s.track_id) + " visits patch " +
                        std::to_string(p) + " outside the grid");
      }
    }
  }
}

double max_relative_change(const TransmissionNetwork& before, const TransmissionNetwork& after) {
  const auto& a = before.matrix();
  const auto& b = after.matrix();
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > 0.0) worst = std::max(worst, std::abs(b[k] - a[k]) / a[k]);
  }
  return worst;
}

std::size_t count_if_greater(const std::vector<double>& sorted, double t) {
  return static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t));
}

struct Rates {
  double fa = 0.0;
  double miss = 0.0;
};

Rates error_rates(std::span<const Label> labels, const std::vector<bool>& flagged) {
  std::size_t normals = 0, abnormals = 0, fa = 0, miss = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (is_abnormal(labels[k])) {
      ++abnormals;
      if (!flagged[k]) ++miss;
    } else {
      ++normals;
      if (flagged[k]) ++fa;
    }
  }
  return {normals ? static_cast<double>(fa) / static_cast<double>(normals) : 0.0,
          abnormals ? static_cast<double>(miss) / static_cast<double>(abnormals) : 0.0};
}

std::vector<Label> labels_of(std::span<const TrainingSample> samples) {
  std::vector<Label> out;
  out.reserve(samples.size());
  for (const TrainingSample& s : samples) out.push_back(s.label);
  return out;
}

/// Index of the first step the classifier flags, if any.
std::optional<std::size_t> classifier_flag(const EnergyClassifier& c, const StepEnergies& steps) {
  for (std::size_t k = 0; k < steps.energy.size(); ++k) {
    if (c.predict(steps.energy[k], steps.min_energy[k]).abnormal) return k;
  }
  return std::nullopt;
}

EnergyClassifier fit_energy_classifier(std::span<const StepEnergies> energies,
                                       std::span<const Label> labels,
                                       const TrainingConfig& config) {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> y;
  rows.reserve(energies.size());
  for (std::size_t k = 0; k < energies.size(); ++k) {
    rows.push_back(energy_features(energies[k].energy.back(), energies[k].min_energy.back()));
    y.push_back(is_abnormal(labels[k]) ? 1 : 0);
  }
  return {SoftmaxModel::fit(rows, y, 2, config.classifier)};
}

}  // namespace

std::vector<double> TrainingConfig::alpha_grid() const {
  std::vector<double> grid;
  if (!(alpha_step > 0.0) || alpha_max < alpha_min) return {alpha_min};
  const auto steps = static_cast<std::size_t>(std::floor((alpha_max - alpha_min) / alpha_step + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    grid.push_back(alpha_min + static_cast<double>(k) * alpha_step);
  }
  return grid;
}

WeightState rebuild_energies(ImpactWeights weights, const SceneConfig& scene,
                             const TrainingConfig& config) {
  const std::size_t n = scene.node_count();
  WeightState state;
  state.correlation.assign(n * n, 0.0);
  for (const auto& sample : weights.per_sample) {
    for (const auto& [edge, w] : sample) {
      state.correlation[edge.first * n + edge.second] += w;
      state.correlation[edge.second * n + edge.first] += w;
    }
  }
  state.network = TransmissionNetwork(n, false, config.large_value);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double ac = state.correlation[a * n + b];
      if (ac >= config.epsilon) state.network.set(a, b, std::min(1.0 / ac, config.large_value));
    }
  }
  apply_equivalence_links(state.network, scene.equivalence_sets);
  state.weights = std::move(weights);
  return state;
}

WeightState init_weights(std::span<const TrainingSample> samples, const SceneConfig& scene,
                         const TrainingConfig& config) {
  if (samples.empty()) throw DataError("training needs at least one sample");
  check_routes(samples, scene.node_count());
  ImpactWeights weights;
  weights.per_sample.reserve(samples.size());
  for (const TrainingSample& s : samples) {
    std::set<EdgeKey> crossed;
    const auto p = s.route.patches();
    for (std::size_t k = 1; k < p.size(); ++k) crossed.insert(EdgeKey::of(p[k - 1], p[k]));
    auto& row = weights.per_sample.emplace_back();
    for (const EdgeKey& e : crossed) row.emplace_back(e, 1.0);
  }
  return rebuild_energies(std::move(weights), scene, config);
}

std::vector<StepEnergies> evaluate_samples(std::span<const TrainingSample> samples,
                                           const TransmissionNetwork& net, const RouteMapSet& maps,
                                           std::size_t* on_demand) {
  std::map<PatchIndex, RouteMap> extra;
  std::vector<StepEnergies> out;
  out.reserve(samples.size());
  for (const TrainingSample& s : samples) {
    const PatchIndex u = s.route.start();
    const RouteMap* map = maps.find(u);
    if (map == nullptr) {
      auto it = extra.find(u);
      if (it == extra.end()) it = extra.emplace(u, sbip(net, u)).first;
      map = &it->second;
      if (on_demand != nullptr) ++*on_demand;
    }
    out.push_back(step_energies(s.route, net, *map));
  }
  return out;
}

ThresholdChoice update_thresholds(std::span<const StepEnergies> energies,
                                  std::span<const Label> labels, const TrainingConfig& config,
                                  std::optional<Thresholds> previous, double large_value) {
  if (energies.size() != labels.size()) throw DataError("energy/label count mismatch");
  std::size_t normals = 0;
  std::size_t abnormals = 0;
  std::vector<double> finals;
  finals.reserve(energies.size());
  for (std::size_t k = 0; k < energies.size(); ++k) {
    finals.push_back(energies[k].energy.empty() ? 0.0 : energies[k].energy.back());
    (is_abnormal(labels[k]) ? abnormals : normals) += 1;
  }

  std::vector<double> t1_candidates;
  {
    std::vector<double> sorted = finals;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      t1_candidates.push_back(0.5 * (sorted[k - 1] + sorted[k]));
    }
    t1_candidates.push_back(sorted.empty() ? 1.0 : sorted.back() + 1.0);
    if (previous) t1_candidates.push_back(previous->t1);
    std::sort(t1_candidates.begin(), t1_candidates.end());
    t1_candidates.erase(std::unique(t1_candidates.begin(), t1_candidates.end()),
                        t1_candidates.end());
  }
  std::vector<double> alphas = config.alpha_grid();
  if (previous) alphas.push_back(previous->alpha);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  const double n_norm = static_cast<double>(normals);
  const double n_abn = static_cast<double>(abnormals);
  std::optional<ThresholdChoice> best;
  std::vector<double> rest_normal;
  std::vector<double> rest_abnormal;
  for (double alpha : alphas) {
    // Routes the ratio rule (or an unreachable patch) flags for this alpha
    // are flagged whatever T1 is; the rest are flagged iff final E > T1.
    std::size_t fa_fixed = 0;
    rest_normal.clear();
    rest_abnormal.clear();
    for (std::size_t k = 0; k < energies.size(); ++k) {
      const StepEnergies& s = energies[k];
      bool fires = false;
      for (std::size_t i = 0; i < s.energy.size() && !fires; ++i) {
        fires = s.min_energy[i] >= large_value || s.energy[i] > alpha * s.min_energy[i];
      }
      if (is_abnormal(labels[k])) {
        if (!fires) rest_abnormal.push_back(finals[k]);
      } else if (fires) {
        ++fa_fixed;
      } else {
        rest_normal.push_back(finals[k]);
      }
    }
    std::sort(rest_normal.begin(), rest_normal.end());
    std::sort(rest_abnormal.begin(), rest_abnormal.end());
    for (double t1 : t1_candidates) {
      const std::size_t fa = fa_fixed + count_if_greater(rest_normal, t1);
      const std::size_t miss = rest_abnormal.size() - count_if_greater(rest_abnormal, t1);
      ThresholdChoice c{{t1, alpha},
                        normals ? static_cast<double>(fa) / n_norm : 0.0,
                        abnormals ? static_cast<double>(miss) / n_abn : 0.0};
      if (!best) {
        best = c;
        continue;
      }
      const double a = c.objective();
      const double b = best->objective();
      if (a < b || (a == b && (t1 < best->thresholds.t1 ||
                               (t1 == best->thresholds.t1 && alpha < best->thresholds.alpha)))) {
        best = c;
      }
    }
  }
  return *best;
}

double rule_update_factor(const StepEnergies& steps, Label label, Thresholds thresholds,
                          double large_value) {
  const RuleOutcome r = apply_rules(steps, thresholds, large_value);
  const double e = steps.energy.empty() ? 0.0 : steps.energy.back();
  if (is_abnormal(label) == r.flagged) return 1.0;
  if (r.flagged) {
    // False alarm: scale by the threshold of the rule that fired.
    const double t = r.reason == FlagReason::energy_ratio ? r.t2_at_flag : thresholds.t1;
    if (!(e > 0.0) || !(e > t)) return 1.0;
    return 1.0 + (e - t) / e;
  }
  // Miss: use the threshold the route came relatively closest to.
  const double t2 = thresholds.alpha * steps.min_energy.back();
  const double r1 = thresholds.t1 > 0.0 ? e / thresholds.t1 : 0.0;
  const double r2 = t2 > 0.0 ? e / t2 : 0.0;
  const double t = r2 > r1 ? t2 : thresholds.t1;
  if (!(t > 0.0)) return 1.0;
  return 1.0 - (t - e) / (2.0 * t);
}

double classifier_update_factor(bool flagged, Label label, double p, double epsilon) {
  if (flagged == is_abnormal(label)) return 1.0;
  return flagged ? 1.0 + p : 1.0 - std::min(p, 1.0 - epsilon);
}

namespace {

std::size_t apply_factors(ImpactWeights& weights, const std::vector<double>& factors,
                          double epsilon) {
  std::size_t changed = 0;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k] == 1.0) continue;
    ++changed;
    for (auto& entry : weights.per_sample[k]) {
      entry.second = std::max(entry.second * factors[k], epsilon);
    }
  }
  return changed;
}

}  // namespace

std::size_t update_weights(ImpactWeights& weights, std::span<const TrainingSample> samples,
                           std::span<const StepEnergies> energies, Thresholds thresholds,
                           const TrainingConfig& config) {
  if (weights.per_sample.size() != samples.size() || energies.size() != samples.size()) {
    throw DataError("weights, samples and energies must have equal counts");
  }
  std::vector<double> factors(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    factors[k] = rule_update_factor(energies[k], samples[k].label, thresholds, config.large_value);
  }
  return apply_factors(weights, factors, config.epsilon);
}

TrainedAbnormalityModel train(std::span<const TrainingSample> samples, const SceneConfig& scene,
                              const TrainingConfig& config, const TrainingObserver& observer) {
  scene.validate();
  const std::vector<Label> labels = labels_of(samples);
  WeightState state = init_weights(samples, scene, config);

  TrainedAbnormalityModel model;
  model.scene = scene;
  std::optional<Thresholds> previous;
  for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
    const RouteMapSet maps = route_maps_for_entrances(state.network, scene);
    const std::vector<StepEnergies> energies = evaluate_samples(samples, state.network, maps);
    const ThresholdChoice choice =
        update_thresholds(energies, labels, config, previous, config.large_value);

    IterationRecord record{iter, choice.thresholds, choice.err_fa, choice.err_miss, 0.0};
    model.thresholds = choice.thresholds;
    bool stop = iter == config.max_iterations;
    if (!stop) {
      ImpactWeights next = state.weights;
      const std::size_t changed =
          update_weights(next, samples, energies, choice.thresholds, config);
      if (changed > 0) {
        WeightState updated = rebuild_energies(std::move(next), scene, config);
        record.max_relative_change = max_relative_change(state.network, updated.network);
        state = std::move(updated);
      }
      const bool stable = changed == 0 || previous == choice.thresholds;
      stop = record.max_relative_change < config.tolerance && stable;
      model.converged = stop;
    }
    previous = choice.thresholds;
    model.log.push_back(record);
    if (observer) observer(record, state);
    if (stop) break;
  }
  model.network = std::move(state.network);
  model.weights = std::move(state.weights);
  model.refresh_route_maps();
  return model;
}

TrainedAbnormalityModel train_with_classifier(std::span<const TrainingSample> samples,
                                              const SceneConfig& scene,
                                              const TrainingConfig& config,
                                              const TrainingObserver& observer) {
  scene.validate();
  const std::vector<Label> labels = labels_of(samples);
  WeightState state = init_weights(samples, scene, config);

  TrainedAbnormalityModel model;
  model.scene = scene;
  std::vector<bool> previous_flags;
  std::vector<StepEnergies> energies;
  bool weights_changed_since_fit = false;
  EnergyClassifier classifier;
  for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
    const RouteMapSet maps = route_maps_for_entrances(state.network, scene);
    energies = evaluate_samples(samples, state.network, maps);
    classifier = fit_energy_classifier(energies, labels, config);
    weights_changed_since_fit = false;

    std::vector<bool> flags(samples.size());
    std::vector<double> factors(samples.size(), 1.0);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const auto flag = classifier_flag(classifier, energies[k]);
      flags[k] = flag.has_value();
      if (flags[k] == is_abnormal(labels[k])) continue;
      const std::size_t at = flag.value_or(energies[k].energy.size() - 1);
      const double p = classifier.predict(energies[k].energy[at], energies[k].min_energy[at]).probability;
      factors[k] = classifier_update_factor(flags[k], labels[k], p, config.epsilon);
    }
    const Rates rates = error_rates(labels, flags);
    IterationRecord record{iter, {}, rates.fa, rates.miss, 0.0};

    bool stop = iter == config.max_iterations;
    if (!stop) {
      const std::size_t changed = apply_factors(state.weights, factors, config.epsilon);
      if (changed > 0) {
        WeightState updated = rebuild_energies(std::move(state.weights), scene, config);
        record.max_relative_change = max_relative_change(state.network, updated.network);
        state = std::move(updated);
        weights_changed_since_fit = true;
      }
      stop = record.max_relative_change < config.tolerance &&
             (changed == 0 || flags == previous_flags);
      model.converged = stop;
    }
    previous_flags = std::move(flags);
    model.log.push_back(record);
    if (observer) observer(record, state);
    if (stop) break;
  }

  const RouteMapSet maps = route_maps_for_entrances(state.network, scene);
  if (weights_changed_since_fit) {
    energies = evaluate_samples(samples, state.network, maps);
    classifier = fit_energy_classifier(energies, labels, config);
  }
  model.thresholds =
      update_thresholds(energies, labels, config, std::nullopt, config.large_value).thresholds;
  model.classifier = std::move(classifier);
  model.network = std::move(state.network);
  model.weights = std::move(state.weights);
  model.route_maps = maps;
  return model;
}

double training_error(std::span<const TrainingSample> samples, const TrainedAbnormalityModel& model) {
  if (samples.empty()) return 0.0;
  std::size_t wrong = 0;
  for (const TrainingSample& s : samples) {
    if (detect(s.route, model).abnormal != is_abnormal(s.label)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(samples.size());
}

}  // namespace ntb
