#pragma once

// Online abnormality detection over patch routes.
//
// At every step q of a route started at u the accumulated energy E(u,q) is
// compared against a global threshold T1 and an adaptive threshold
// T2(u,q) = alpha * E_min(u,q). Exceeding either one flags the activity,
// and the flag is never cleared for the rest of the route.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ntb/abnormality_model.hpp"

namespace ntb {

/// Accumulated and minimum energies at every step of a route.
struct StepEnergies {
  std::vector<PatchIndex> patches;
  std::vector<Frame> frames;
  std::vector<double> energy;
  std::vector<double> min_energy;
};

[[nodiscard]] StepEnergies step_energies(const PatchRoute& route, const TransmissionNetwork& net,
                                         const RouteMap& map);

enum class FlagReason { none, total_energy, energy_ratio, unreachable, classifier };

[[nodiscard]] std::string_view to_string(FlagReason r);

struct RuleOutcome {
  bool flagged = false;
  FlagReason reason = FlagReason::none;
  std::size_t first_step = 0;
  /// T2 at the flagged step (only meaningful for FlagReason::energy_ratio).
  double t2_at_flag = 0.0;
};

/// First step at which the rules fire. A step whose minimum energy is at
/// least `large_value` is unreachable and always fires. The total-energy
/// rule is checked before the ratio rule.
[[nodiscard]] RuleOutcome apply_rules(const StepEnergies& steps, Thresholds thresholds,
                                      double large_value);

/// Abnormality type from the final energy and both thresholds; Label::normal
/// when neither threshold is exceeded.
[[nodiscard]] Label classify_type(double energy, double t1, double t2_final);

struct StepRecord {
  PatchIndex patch = 0;
  Frame frame = 0;
  double energy = 0.0;
  double min_energy = 0.0;
  double t2 = 0.0;
  bool flagged = false;
};

struct DetectionVerdict {
  std::vector<StepRecord> steps;
  bool abnormal = false;
  Label type = Label::normal;
  std::optional<std::size_t> first_flag_step;
  FlagReason reason = FlagReason::none;
  /// The route did not start at an entrance; its map was computed on demand.
  bool on_demand_map = false;

  [[nodiscard]] double final_energy() const { return steps.empty() ? 0.0 : steps.back().energy; }
};

[[nodiscard]] DetectionVerdict detect(const PatchRoute& route, const TrainedAbnormalityModel& model);

/// Splits the route into consecutive windows of `window_steps` patches and
/// runs detect on each independently, re-arming the flag at every window
/// start. The returned verdict concatenates the windows' step records.
[[nodiscard]] DetectionVerdict detect_windowed(const PatchRoute& route,
                                               const TrainedAbnormalityModel& model,
                                               std::size_t window_steps);

struct TraceRow {
  std::size_t step = 0;
  PatchIndex patch = 0;
  double energy = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  bool flagged = false;
};

[[nodiscard]] std::vector<TraceRow> energy_trace(const PatchRoute& route,
                                                 const TrainedAbnormalityModel& model);
/// CSV `step,patch,E,T1,T2,flag`.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

/// [log1p(E), log1p(E / E_min)] with E/E_min taken as 1 for 0/0 and capped
/// at 1000 otherwise.
[[nodiscard]] std::vector<double> energy_features(double energy, double min_energy);

}  // namespace ntb
