#include "ntb/abnormality_detector.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ntb/error.hpp"

namespace ntb {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::normal: return "normal";
    case Label::type_i: return "I";
    case Label::type_ii: return "II";
    case Label::type_iii: return "III";
  }
  return "normal";
}

Label parse_label(std::string_view text) {
  if (text == "normal") return Label::normal;
  if (text == "I") return Label::type_i;
  if (text == "II") return Label::type_ii;
  if (text == "III") return Label::type_iii;
  throw DataError("unknown label '" + std::string(text) + "'");
}

std::string_view to_string(FlagReason r) {
  switch (r) {
    case FlagReason::none: return "none";
    case FlagReason::total_energy: return "total energy above T1";
    case FlagReason::energy_ratio: return "energy above T2";
    case FlagReason::unreachable: return "unreachable patch";
    case FlagReason::classifier: return "classifier";
  }
  return "none";
}

std::vector<double> energy_features(double energy, double min_energy) {
  double ratio = 1.0;
  if (min_energy > 0.0) {
    ratio = energy / min_energy;
  } else if (energy > 0.0) {
    ratio = 1000.0;
  }
  ratio = std::min(ratio, 1000.0);
  return {std::log1p(energy), std::log1p(ratio)};
}

ClassifierPrediction EnergyClassifier::predict(double energy, double min_energy) const {
  const std::vector<double> p = model.probabilities(energy_features(energy, min_energy));
  const bool abnormal = p[1] > p[0];
  return {abnormal, abnormal ? p[1] : p[0]};
}

StepEnergies step_energies(const PatchRoute& route, const TransmissionNetwork& net,
                           const RouteMap& map) {
  StepEnergies out;
  const auto patches = route.patches();
  out.patches.assign(patches.begin(), patches.end());
  const auto frames = route.entry_frames();
  out.frames.assign(frames.begin(), frames.end());
  out.energy = cumulative_energy(route, net);
  out.min_energy.reserve(patches.size());
  for (PatchIndex p : patches) out.min_energy.push_back(map.min_energy.at(p));
  return out;
}

RuleOutcome apply_rules(const StepEnergies& steps, Thresholds thresholds, double large_value) {
  for (std::size_t k = 0; k < steps.energy.size(); ++k) {
    const double e = steps.energy[k];
    const double t2 = thresholds.alpha * steps.min_energy[k];
    if (steps.min_energy[k] >= large_value) return {true, FlagReason::unreachable, k, t2};
    if (e > thresholds.t1) return {true, FlagReason::total_energy, k, t2};
    if (e > t2) return {true, FlagReason::energy_ratio, k, t2};
  }
  return {};
}

Label classify_type(double energy, double t1, double t2_final) {
  const bool above_t1 = energy > t1;
  const bool above_t2 = energy > t2_final;
  if (above_t1 && above_t2) return Label::type_i;
  if (above_t2) return Label::type_ii;
  if (above_t1) return Label::type_iii;
  return Label::normal;
}

namespace {

DetectionVerdict detect_with_map(const PatchRoute& route, const TrainedAbnormalityModel& model,
                                 const RouteMap& map) {
  const StepEnergies steps = step_energies(route, model.network, map);
  const Thresholds th = model.thresholds;
  DetectionVerdict v;
  v.steps.reserve(steps.energy.size());
  for (std::size_t k = 0; k < steps.energy.size(); ++k) {
    v.steps.push_back({steps.patches[k], steps.frames[k], steps.energy[k], steps.min_energy[k],
                       th.alpha * steps.min_energy[k], false});
  }

  if (model.classifier) {
    for (std::size_t k = 0; k < v.steps.size(); ++k) {
      if (model.classifier->predict(steps.energy[k], steps.min_energy[k]).abnormal) {
        v.first_flag_step = k;
        v.reason = FlagReason::classifier;
        break;
      }
    }
  } else {
    const RuleOutcome r = apply_rules(steps, th, model.network.large_value());
    if (r.flagged) {
      v.first_flag_step = r.first_step;
      v.reason = r.reason;
    }
  }

  if (v.first_flag_step) {
    v.abnormal = true;
    for (std::size_t k = *v.first_flag_step; k < v.steps.size(); ++k) v.steps[k].flagged = true;
    const StepRecord& last = v.steps.back();
    v.type = classify_type(last.energy, th.t1, last.t2);
    // A ratio spike earlier in the route can fire while the final step sits
    // below both thresholds; that pattern is the back-and-forth type.
    if (v.type == Label::normal) v.type = Label::type_ii;
  }
  return v;
}

}  // namespace

DetectionVerdict detect(const PatchRoute& route, const TrainedAbnormalityModel& model) {
  if (route.empty()) throw DataError("empty route");
  if (route.start() >= model.network.node_count()) {
    throw DataError("route start patch outside model grid");
  }
  if (const RouteMap* map = model.route_maps.find(route.start())) {
    return detect_with_map(route, model, *map);
  }
  DetectionVerdict v = detect_with_map(route, model, sbip(model.network, route.start()));
  v.on_demand_map = true;
  return v;
}

DetectionVerdict detect_windowed(const PatchRoute& route, const TrainedAbnormalityModel& model,
                                 std::size_t window_steps) {
  if (window_steps == 0) throw DataError("window must contain at least one step");
  const auto patches = route.patches();
  const auto frames = route.entry_frames();
  DetectionVerdict out;
  for (std::size_t begin = 0; begin < patches.size(); begin += window_steps) {
    PatchRoute piece;
    for (std::size_t k = begin; k < std::min(begin + window_steps, patches.size()); ++k) {
      piece.append(patches[k], frames[k]);
    }
    DetectionVerdict v = detect(piece, model);
    out.on_demand_map = out.on_demand_map || v.on_demand_map;
    if (v.abnormal && !out.abnormal) {
      out.abnormal = true;
      out.first_flag_step = begin + *v.first_flag_step;
      out.reason = v.reason;
      out.type = v.type;
    }
    out.steps.insert(out.steps.end(), v.steps.begin(), v.steps.end());
  }
  return out;
}

std::vector<TraceRow> energy_trace(const PatchRoute& route, const TrainedAbnormalityModel& model) {
  const DetectionVerdict v = detect(route, model);
  std::vector<TraceRow> rows;
  rows.reserve(v.steps.size());
  for (std::size_t k = 0; k < v.steps.size(); ++k) {
    const StepRecord& s = v.steps[k];
    rows.push_back({k, s.patch, s.energy, model.thresholds.t1, s.t2, s.flagged});
  }
  return rows;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os.precision(17);
  os << "step,patch,E,T1,T2,flag\n";
  for (const TraceRow& r : rows) {
    os << r.step << ',' << r.patch << ',' << r.energy << ',' << r.t1 << ',' << r.t2 << ','
       << (r.flagged ? 1 : 0) << '\n';
  }
}

}  // namespace ntb
