#pragma once

// File formats: CSV tables, JSON documents, atomic writes.
//
// Every reader reports malformed input as DataError with a
// "<source>:<line>: <reason>" message.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ntb/abnormality_detector.hpp"
#include "ntb/abnormality_model.hpp"
#include "ntb/dt_training.hpp"
#include "ntb/group_activity.hpp"
#include "ntb/scene_grid.hpp"
#include "ntb/transmission_network.hpp"

namespace ntb::io {

inline constexpr int kModelFormatVersion = 1;

/// Shortest decimal text that parses back to exactly `v`.
[[nodiscard]] std::string format_double(double v);

// Trajectories: track_id,frame,x,y. Tracks come back ordered by id with
// samples ordered by frame.
[[nodiscard]] std::vector<Trajectory> read_trajectories(std::istream& is, std::string_view source);
void write_trajectories(std::ostream& os, std::span<const Trajectory> tracks);

// Labels: track_id,label with label in {normal, I, II, III}.
[[nodiscard]] std::map<TrackId, Label> read_labels(std::istream& is, std::string_view source);
void write_labels(std::ostream& os, const std::map<TrackId, Label>& labels);

// Motion field: frame,patch_row,patch_col,magnitude.
[[nodiscard]] MotionField read_motion_field(std::istream& is, std::string_view source,
                                            const SceneConfig& scene);
void write_motion_field(std::ostream& os, const MotionField& field, const SceneConfig& scene);

// Flow vectors: frame,x,y,dx,dy.
[[nodiscard]] std::vector<FlowVector> read_flows(std::istream& is, std::string_view source);
void write_flows(std::ostream& os, std::span<const FlowVector> flows);

// Per-frame escape truth: frame,abnormal with abnormal in {0, 1}.
[[nodiscard]] std::vector<std::pair<Frame, bool>> read_frame_truth(std::istream& is,
                                                                   std::string_view source);
void write_frame_truth(std::ostream& os, std::span<const std::pair<Frame, bool>> truth);

struct GroupLabelRow {
  std::string pair_id;
  TrackId first = 0;
  TrackId second = 0;
  std::string label;
};
// Group labels: pair_id,track_id_1,track_id_2,label.
[[nodiscard]] std::vector<GroupLabelRow> read_group_labels(std::istream& is, std::string_view source);
void write_group_labels(std::ostream& os, std::span<const GroupLabelRow> rows);

// Group predictions: pair_id,label.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> read_pair_predictions(
    std::istream& is, std::string_view source);
void write_pair_predictions(std::ostream& os,
                            std::span<const std::pair<std::string, std::string>> rows);

struct FeatureRow {
  std::string pair_id;
  std::string label;
  std::vector<double> values;
};
// Features: pair_id,label,E1,E2,ENR,EWR[,EMI1,EMI2]. The label may be empty.
[[nodiscard]] std::vector<FeatureRow> read_features(std::istream& is, std::string_view source);
void write_features(std::ostream& os, std::span<const FeatureRow> rows);

// Iteration log: iter,T1,alpha,err_fa,err_miss.
[[nodiscard]] std::vector<IterationRecord> read_iteration_log(std::istream& is,
                                                              std::string_view source);
void write_iteration_log(std::ostream& os, std::span<const IterationRecord> log);

/// Keys: image_width, image_height, patch_size, entrance_patches,
/// equivalence_sets (optional). Unknown keys are rejected.
[[nodiscard]] SceneConfig scene_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json scene_to_json(const SceneConfig& scene);

/// Every key is optional; unknown keys are rejected.
[[nodiscard]] TrainingConfig training_config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json training_config_to_json(const TrainingConfig& config);

/// Model document. Impact weights are not stored; route maps are rebuilt on
/// load. Throws DataError on a version mismatch, a missing or unknown key,
/// or a matrix inconsistent with the scene.
[[nodiscard]] nlohmann::json model_to_json(const TrainedAbnormalityModel& model,
                                           const nlohmann::json& metadata);
[[nodiscard]] TrainedAbnormalityModel model_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json group_model_to_json(const GroupClassifierModel& model);
[[nodiscard]] GroupClassifierModel group_model_from_json(const nlohmann::json& j);

/// Per-track verdict: verdict, type, first flag frame, final energies.
[[nodiscard]] nlohmann::json verdict_to_json(TrackId id, const DetectionVerdict& verdict);

[[nodiscard]] nlohmann::json parse_json(std::string_view text, std::string_view source);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ntb::io
