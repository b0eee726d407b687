#pragma once

// Seeded synthetic scenarios: labelled trajectories for abnormality
// detection, person pairs for group activities, and crowd flow fields.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ntb/abnormality_model.hpp"
#include "ntb/dt_training.hpp"
#include "ntb/group_activity.hpp"
#include "ntb/scene_grid.hpp"
#include "ntb/transmission_network.hpp"

namespace ntb {

using Polyline = std::vector<Point>;

struct ScenarioConfig {
  std::uint64_t seed = 1;
  double image_width = 640.0;
  double image_height = 480.0;
  /// Normal routes; each starts at an entrance.
  std::vector<Polyline> paths = default_paths();
  std::size_t normal_count = 200;
  std::size_t type_i_count = 30;
  std::size_t type_ii_count = 30;
  std::size_t type_iii_count = 30;
  /// Standard deviation of a track's lateral offset from its path (clamped
  /// to +-9 px).
  double noise_sigma = 3.0;
  /// Per-sample positional jitter.
  double jitter_sigma = 0.4;
  double speed_min = 2.5;
  double speed_max = 4.0;

  /// Four paths whose straight runs keep at least 12 px from every patch
  /// boundary for patch sizes 24, 32 and 48.
  static std::vector<Polyline> default_paths();
};

struct AbnormalityCorpus {
  std::vector<Trajectory> tracks;
  std::vector<Label> labels;
  std::vector<Point> entrance_points;
  double image_width = 640.0;
  double image_height = 480.0;

  /// Scene over this corpus with entrances at the paths' start patches.
  [[nodiscard]] SceneConfig scene(double patch_size) const;
  /// Training samples for the tracks at `indices` (all tracks when empty).
  [[nodiscard]] std::vector<TrainingSample> samples(const SceneConfig& scene,
                                                    std::span<const std::size_t> indices = {}) const;
};

/// Normal tracks follow a path; type I cuts across off-path ground between
/// two points of its path, type II walks back and forth along it one or two
/// times, type III leaves it for an unused region and stays there. Track ids
/// run from 1 in label order.
[[nodiscard]] AbnormalityCorpus gen_abnormality_corpus(const ScenarioConfig& config);

struct GroupScenarioConfig {
  std::uint64_t seed = 1;
  double image_width = 1280.0;
  double image_height = 960.0;
  std::size_t pairs_per_class = 50;
  /// Length unit of the motion scripts, normally the patch size.
  double cell = 48.0;
  double jitter_sigma = 0.3;
  double speed_min = 2.5;
  double speed_max = 3.5;
  /// Frames per pair; pair k occupies frames [k * frame_stride, ...).
  std::size_t frames = 110;
  Frame frame_stride = 1000;
};

struct PairSample {
  std::string pair_id;
  Trajectory first;
  Trajectory second;
  std::string label;
};

struct GroupCorpus {
  std::vector<PairSample> pairs;
  /// Local-motion field (CASIA-style corpora only; empty otherwise).
  MotionField field;
  [[nodiscard]] std::vector<std::string> classes() const;
};

/// Eight classes: meet, follow, approach, separate, leave, together,
/// exchange, return. The first track of each pair has the smaller id and is
/// the stationary one where a class has one.
[[nodiscard]] GroupCorpus gen_group_corpus(const GroupScenarioConfig& config);

/// Seven classes: rob, fight, follow, follow_gather, meet_part,
/// meet_gather, overtake, plus a motion field whose local-motion bursts mark
/// rob and fight. Fight shares its trajectories with meet_part.
[[nodiscard]] GroupCorpus gen_casia_corpus(const GroupScenarioConfig& config);

enum class CrowdMode { normal, escape };

struct CrowdScenarioConfig {
  std::uint64_t seed = 1;
  double image_width = 640.0;
  double image_height = 480.0;
  std::size_t vectors_per_frame = 200;
  std::size_t normal_frames = 100;
  std::size_t escape_frames = 50;
  double normal_speed_max = 2.5;
  double escape_speed_min = 3.0;
  double escape_speed_max = 6.0;
  /// Standard deviation of the escape direction around the radial, degrees.
  double escape_spread_deg = 15.0;
};

struct CrowdSequence {
  std::vector<FlowVector> flows;
  /// Per-frame ground truth, true during the escape.
  std::vector<std::pair<Frame, bool>> truth;
  Point center;
};

/// `frames` frames of flow vectors starting at `first_frame`; normal is
/// isotropic, escape is radially outward from the image centre.
[[nodiscard]] std::vector<FlowVector> gen_crowd_flows(const CrowdScenarioConfig& config,
                                                      CrowdMode mode, Frame first_frame,
                                                      std::size_t frames);

/// Normal frames followed by escape frames, with ground truth.
[[nodiscard]] CrowdSequence gen_crowd_sequence(const CrowdScenarioConfig& config);

}  // namespace ntb
