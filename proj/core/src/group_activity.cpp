#include "ntb/group_activity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ntb/error.hpp"

namespace ntb {
namespace {

Trajectory clip(const Trajectory& t, Frame lo, Frame hi) {
  Trajectory out;
  out.track_id = t.track_id;
  for (const Sample& s : t.samples) {
    if (s.frame >= lo && s.frame <= hi) out.samples.push_back(s);
  }
  return out;
}

Cell cell_of(double x, double y, Point center, double cell_size) {
  return {static_cast<int>(std::lround((x - center.x) / cell_size)),
          static_cast<int>(std::lround((y - center.y) / cell_size))};
}

}  // namespace

std::vector<double> GroupFeatureVector::values() const {
  std::vector<double> v{e1, e2, enr, ewr};
  if (emi1) {
    v.push_back(*emi1);
    v.push_back(emi2.value_or(0.0));
  }
  return v;
}

std::vector<std::string> GroupFeatureVector::column_names(std::size_t dimension) {
  std::vector<std::string> names{"E1", "E2", "ENR", "EWR"};
  if (dimension == 6) {
    names.emplace_back("EMI1");
    names.emplace_back("EMI2");
  }
  return names;
}

GroupFeatureVector extract_pair_features(const Trajectory& a, const Trajectory& b,
                                         const SceneConfig& scene, const RelativeNetworkSpec& spec,
                                         const MotionField* field, double cell_size) {
  const TransmissionNetwork net = build_scene_group_network(scene.rows(), scene.columns());
  return extract_pair_features(a, b, scene, net, spec, field, cell_size);
}

GroupFeatureVector extract_pair_features(const Trajectory& a, const Trajectory& b,
                                         const SceneConfig& scene,
                                         const TransmissionNetwork& scene_net,
                                         const RelativeNetworkSpec& spec, const MotionField* field,
                                         double cell_size) {
  if (a.samples.empty() || b.samples.empty()) throw DataError("disjoint tracks");
  const auto [ref, other] = order_pair(a, b);
  const Frame lo = std::max(ref->samples.front().frame, other->samples.front().frame);
  const Frame hi = std::min(ref->samples.back().frame, other->samples.back().frame);
  if (lo > hi) throw DataError("disjoint tracks");
  const Trajectory p1 = clip(*ref, lo, hi);
  const Trajectory p2 = clip(*other, lo, hi);
  if (p1.samples.empty() || p2.samples.empty()) throw DataError("disjoint tracks");

  GroupFeatureVector f;
  f.e1 = total_energy(route_from_trajectory(p1, scene), scene_net);
  f.e2 = total_energy(route_from_trajectory(p2, scene), scene_net);
  const RelativeCellRoute rel =
      relative_route(p1, p2, cell_size > 0.0 ? cell_size : scene.patch_size, spec.max_ring);
  f.enr = total_enr(rel, spec);
  f.ewr = total_ewr(rel, spec);
  if (field != nullptr) {
    f.emi1 = motion_intensity_energy(p1, scene, *field).energy;
    f.emi2 = motion_intensity_energy(p2, scene, *field).energy;
  }
  return f;
}

GroupClassifierModel train_group_classifier(std::span<const LabelledFeatures> data,
                                            const LinearTrainingConfig& config) {
  if (data.empty()) throw DataError("group classifier: no training data");
  std::set<std::string> names;
  for (const auto& d : data) names.insert(d.label);
  if (names.size() < 2) throw DataError("group classifier: need at least two classes");
  GroupClassifierModel out;
  out.classes.assign(names.begin(), names.end());
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;
  rows.reserve(data.size());
  for (const auto& d : data) {
    rows.push_back(d.values);
    labels.push_back(static_cast<std::size_t>(
        std::lower_bound(out.classes.begin(), out.classes.end(), d.label) - out.classes.begin()));
  }
  out.model = SoftmaxModel::fit(rows, labels, out.classes.size(), config);
  return out;
}

PairClassification classify_pair(std::span<const double> features,
                                 const GroupClassifierModel& model) {
  PairClassification out;
  out.scores = model.model.scores(features);
  std::size_t best = 0;
  for (std::size_t c = 1; c < out.scores.size(); ++c) {
    if (out.scores[c] > out.scores[best]) best = c;
  }
  out.label = model.classes.at(best);
  return out;
}

double crowd_window_energy(std::span<const FlowVector> flows, Point center, double cell_size,
                           const RelativeNetworkSpec& spec) {
  double sum = 0.0;
  for (const FlowVector& f : flows) {
    const Cell from = cell_of(f.x, f.y, center, cell_size);
    const Cell to = cell_of(f.x + f.dx, f.y + f.dy, center, cell_size);
    sum += enr_energy(from, to, spec);
  }
  return sum;
}

std::vector<std::pair<Frame, double>> crowd_frame_energies(std::span<const FlowVector> flows,
                                                           const CrowdParams& params) {
  std::map<Frame, double> per_frame;
  for (const FlowVector& f : flows) {
    per_frame[f.frame] +=
        crowd_window_energy(std::span<const FlowVector>(&f, 1), params.center, params.cell_size,
                            params.spec);
  }
  std::vector<std::pair<Frame, double>> out;
  if (per_frame.empty()) return out;
  for (Frame t = per_frame.begin()->first; t <= per_frame.rbegin()->first; ++t) {
    auto it = per_frame.find(t);
    out.emplace_back(t, it == per_frame.end() ? 0.0 : it->second);
  }
  return out;
}

namespace {

/// Window energies and the frame span each covers.
std::vector<CrowdWindow> windows_of(const std::vector<std::pair<Frame, double>>& frames,
                                    const CrowdParams& params) {
  if (params.window_frames == 0) throw DataError("crowd window must span at least one frame");
  if (params.stride == 0) throw DataError("crowd window stride must be positive");
  std::vector<CrowdWindow> out;
  const std::size_t n = frames.size();
  if (n == 0) return out;
  const std::size_t w = std::min(params.window_frames, n);
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + w <= n; s += params.stride) starts.push_back(s);
  if (starts.back() + w < n) starts.push_back(n - w);
  for (std::size_t s : starts) {
    CrowdWindow cw;
    cw.first_frame = frames[s].first;
    cw.last_frame = frames[s + w - 1].first;
    for (std::size_t k = s; k < s + w; ++k) cw.energy += frames[k].second;
    out.push_back(cw);
  }
  return out;
}

/// Per-frame escape score: minus the lowest energy of any covering window.
std::vector<std::pair<Frame, double>> frame_scores(const std::vector<CrowdWindow>& windows,
                                                   const std::vector<std::pair<Frame, double>>& frames) {
  std::vector<std::pair<Frame, double>> out;
  out.reserve(frames.size());
  std::size_t first = 0;
  for (const auto& [t, e] : frames) {
    while (first < windows.size() && windows[first].last_frame < t) ++first;
    double score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = first; k < windows.size() && windows[k].first_frame <= t; ++k) {
      score = std::max(score, -windows[k].energy);
    }
    out.emplace_back(t, score);
  }
  return out;
}

}  // namespace

CrowdDetection crowd_detect(std::span<const FlowVector> flows, const CrowdParams& params,
                            double threshold) {
  const auto frames = crowd_frame_energies(flows, params);
  CrowdDetection out;
  out.windows = windows_of(frames, params);
  for (CrowdWindow& w : out.windows) w.abnormal = w.energy < -threshold;
  for (const auto& [t, score] : frame_scores(out.windows, frames)) {
    out.frames.emplace_back(t, score > threshold);
  }
  return out;
}

double calibrate_crowd_threshold(std::span<const FlowVector> normal_flows,
                                 const CrowdParams& params, double sigmas) {
  const auto windows = windows_of(crowd_frame_energies(normal_flows, params), params);
  if (windows.empty()) return 0.0;
  double mean = 0.0;
  for (const auto& w : windows) mean += w.energy;
  mean /= static_cast<double>(windows.size());
  double var = 0.0;
  for (const auto& w : windows) var += (w.energy - mean) * (w.energy - mean);
  var /= static_cast<double>(windows.size());
  return sigmas * std::sqrt(var);
}

std::vector<RocPoint> crowd_roc(std::span<const FlowVector> flows, const CrowdParams& params,
                                const std::vector<std::pair<Frame, bool>>& truth) {
  const auto frames = crowd_frame_energies(flows, params);
  const auto windows = windows_of(frames, params);
  const auto scores = frame_scores(windows, frames);
  const std::map<Frame, bool> label(truth.begin(), truth.end());

  std::vector<std::pair<double, bool>> scored;
  std::size_t positives = 0;
  for (const auto& [t, s] : scores) {
    auto it = label.find(t);
    if (it == label.end()) continue;
    scored.emplace_back(s, it->second);
    if (it->second) ++positives;
  }
  const std::size_t negatives = scored.size() - positives;
  std::set<double> thresholds;
  for (const auto& [s, y] : scored) thresholds.insert(s);

  std::vector<RocPoint> roc;
  for (double th : thresholds) {
    std::size_t tp = 0, fp = 0;
    for (const auto& [s, y] : scored) {
      if (s > th) (y ? tp : fp) += 1;
    }
    roc.push_back({th, positives ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0,
                   negatives ? static_cast<double>(fp) / static_cast<double>(negatives) : 0.0});
  }
  return roc;
}

double roc_auc(std::span<const RocPoint> roc) {
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
  for (const RocPoint& p : roc) pts.emplace_back(p.fpr, p.tpr);
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    area += (pts[k].first - pts[k - 1].first) * 0.5 * (pts[k].second + pts[k - 1].second);
  }
  return area;
}

}  // namespace ntb
