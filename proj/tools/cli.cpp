#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ntb/abnormality_detector.hpp"
#include "ntb/dt_training.hpp"
#include "ntb/error.hpp"
#include "ntb/evaluation.hpp"
#include "ntb/group_activity.hpp"
#include "ntb/io.hpp"
#include "ntb/route_map.hpp"
#include "ntb/synth_gen.hpp"

namespace ntb::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Globals {
  std::string scene;
  std::uint64_t seed = 1;
  std::string out = ".";
};

/// Collects output files so nothing is written until a command succeeds.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  std::ostringstream& add(const std::string& name) {
    files_.emplace_back(name, std::ostringstream{});
    return files_.back().second;
  }
  void add(const std::string& name, const json& j) { add(name) << j.dump(2) << '\n'; }
  void commit(std::ostream& out) {
    for (auto& [name, content] : files_) {
      const fs::path p = dir_ / name;
      io::write_file_atomic(p, content.str());
      out << "wrote " << p.string() << '\n';
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::ostringstream>> files_;
};

template <typename F>
auto read_csv(const std::string& path, F reader) {
  std::istringstream in(io::read_file(path));
  return reader(in, path);
}

json read_json(const std::string& path) { return io::parse_json(io::read_file(path), path); }

SceneConfig load_scene(const Globals& g) {
  if (g.scene.empty()) throw DataError("this command needs --scene");
  try {
    return io::scene_from_json(read_json(g.scene));
  } catch (const DataError& e) {
    throw DataError(g.scene + ": " + e.what());
  }
}

std::string id_list(const std::vector<TrackId>& ids) {
  std::string s;
  for (std::size_t k = 0; k < ids.size() && k < 20; ++k) s += (k ? ", " : "") + std::to_string(ids[k]);
  if (ids.size() > 20) s += ", ... (" + std::to_string(ids.size()) + " in total)";
  return s;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string tracks, labels, config;
  bool classifier_loop = false;
  std::optional<std::size_t> max_iters;
  std::optional<double> tol;
};

void cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out) {
  const SceneConfig scene = load_scene(g);
  const auto tracks = read_csv(a.tracks, io::read_trajectories);
  const auto labels = read_csv(a.labels, io::read_labels);

  std::vector<TrackId> unlabelled, unknown;
  std::set<TrackId> track_ids;
  for (const auto& t : tracks) {
    track_ids.insert(t.track_id);
    if (!labels.contains(t.track_id)) unlabelled.push_back(t.track_id);
  }
  for (const auto& [id, l] : labels) {
    if (!track_ids.contains(id)) unknown.push_back(id);
  }
  if (!unlabelled.empty() || !unknown.empty()) {
    std::string msg = "labels and tracks disagree";
    if (!unlabelled.empty()) msg += "; tracks without a label: " + id_list(unlabelled);
    if (!unknown.empty()) msg += "; labels for unknown tracks: " + id_list(unknown);
    throw DataError(msg);
  }

  TrainingConfig config;
  if (!a.config.empty()) config = io::training_config_from_json(read_json(a.config));
  if (a.max_iters) config.max_iterations = *a.max_iters;
  if (a.tol) config.tolerance = *a.tol;

  std::vector<TrainingSample> samples;
  samples.reserve(tracks.size());
  for (const auto& t : tracks) {
    samples.push_back({t.track_id, route_from_trajectory(t, scene), labels.at(t.track_id)});
  }
  const TrainedAbnormalityModel model = a.classifier_loop
                                            ? train_with_classifier(samples, scene, config)
                                            : train(samples, scene, config);

  const json meta{{"tool", "ntb"},
                  {"version", kVersion},
                  {"samples", samples.size()},
                  {"classifier_loop", a.classifier_loop},
                  {"config", io::training_config_to_json(config)}};
  Outputs files(g.out);
  files.add("model.json", io::model_to_json(model, meta));
  io::write_iteration_log(files.add("iterations.csv"), model.log);
  files.commit(out);
  out << "iterations " << model.log.size() << (model.converged ? " (converged)" : " (not converged)")
      << ", T1 " << io::format_double(model.thresholds.t1) << ", alpha "
      << io::format_double(model.thresholds.alpha) << ", training error "
      << io::format_double(training_error(samples, model)) << '\n';
}

// ---- detect ---------------------------------------------------------------

struct DetectArgs {
  std::string model, tracks;
  bool trace = false;
  bool online = false;
  std::size_t rearm_window = 0;
};

void cmd_detect(const Globals& g, const DetectArgs& a, std::ostream& out) {
  const TrainedAbnormalityModel model = io::model_from_json(read_json(a.model));
  if (!g.scene.empty() && io::scene_to_json(load_scene(g)) != io::scene_to_json(model.scene)) {
    throw DataError("scene '" + g.scene + "' does not match the model's patch grid");
  }
  const auto tracks = read_csv(a.tracks, io::read_trajectories);

  json verdicts = json::array();
  std::map<TrackId, Label> predictions;
  Outputs files(g.out);
  std::ostringstream online;
  for (const auto& t : tracks) {
    const PatchRoute route = route_from_trajectory(t, model.scene);
    const DetectionVerdict v =
        a.rearm_window ? detect_windowed(route, model, a.rearm_window) : detect(route, model);
    verdicts.push_back(io::verdict_to_json(t.track_id, v));
    predictions[t.track_id] = v.abnormal ? v.type : Label::normal;
    if (a.trace) {
      write_trace_csv(files.add("traces/track_" + std::to_string(t.track_id) + ".csv"),
                      energy_trace(route, model));
    }
    if (a.online) {
      for (std::size_t k = 0; k < v.steps.size(); ++k) {
        const StepRecord& s = v.steps[k];
        online << t.track_id << ',' << k << ',' << s.frame << ',' << s.patch << ','
               << io::format_double(s.energy) << ',' << io::format_double(s.t2) << ','
               << (s.flagged ? "abnormal" : "normal") << '\n';
      }
    }
  }
  files.add("verdicts.json", json{{"tracks", verdicts}});
  io::write_labels(files.add("predictions.csv"), predictions);
  if (a.online) out << "track_id,step,frame,patch,E,T2,state\n" << online.str();
  files.commit(out);
  const auto abnormal = std::count_if(predictions.begin(), predictions.end(),
                                      [](const auto& p) { return is_abnormal(p.second); });
  out << abnormal << " of " << predictions.size() << " tracks abnormal\n";
}

// ---- route-map ------------------------------------------------------------

struct RouteMapArgs {
  std::string model;
  std::optional<PatchIndex> source;
  std::optional<double> prune;
};

void cmd_route_map(const Globals& g, const RouteMapArgs& a, std::ostream& out) {
  const TrainedAbnormalityModel model = io::model_from_json(read_json(a.model));
  std::vector<PatchIndex> sources = model.scene.entrance_patches;
  if (a.source) {
    if (*a.source >= model.network.node_count()) {
      throw DataError("source patch " + std::to_string(*a.source) + " outside the grid");
    }
    sources = {*a.source};
  }
  if (sources.empty()) throw DataError("model has no entrance patches; pass --source");
  Outputs files(g.out);
  for (PatchIndex s : sources) {
    const RouteMap map = resolve_route_map(model.route_maps, model.network, s).map;
    const EdgeList edges =
        a.prune ? prune_route_map(map, model.network, *a.prune) : tree_edges(map, model.network);
    const std::string stem = "route_map_" + std::to_string(s);
    write_dot(files.add(stem + ".dot"), map, edges);
    write_min_energy_csv(files.add(stem + ".csv"), map);
  }
  files.commit(out);
}

// ---- group ----------------------------------------------------------------

struct GroupExtractArgs {
  std::string tracks, pairs, field, scheme = "head";
  double cell_size = 0.0;
  int max_ring = 15;
};

void cmd_group_extract(const Globals& g, const GroupExtractArgs& a, std::ostream& out) {
  const SceneConfig scene = load_scene(g);
  const auto tracks = read_csv(a.tracks, io::read_trajectories);
  const auto pairs = read_csv(a.pairs, io::read_group_labels);
  std::optional<MotionField> field;
  if (!a.field.empty()) {
    std::istringstream in(io::read_file(a.field));
    field = io::read_motion_field(in, a.field, scene);
  }
  std::map<TrackId, const Trajectory*> by_id;
  for (const auto& t : tracks) by_id[t.track_id] = &t;
  RelativeNetworkSpec spec;
  spec.max_ring = a.max_ring;
  spec.scheme = a.scheme == "tail" ? EwrScheme::tail : EwrScheme::head;
  const TransmissionNetwork scene_net = build_scene_group_network(scene.rows(), scene.columns());

  std::vector<io::FeatureRow> rows;
  for (const auto& p : pairs) {
    auto a1 = by_id.find(p.first);
    auto a2 = by_id.find(p.second);
    if (a1 == by_id.end() || a2 == by_id.end()) {
      throw DataError("pair '" + p.pair_id + "' references track " +
                      std::to_string(a1 == by_id.end() ? p.first : p.second) +
                      " which is not in " + a.tracks);
    }
    GroupFeatureVector f;
    try {
      f = extract_pair_features(*a1->second, *a2->second, scene, scene_net, spec,
                                field ? &*field : nullptr, a.cell_size);
    } catch (const DataError& e) {
      throw DataError("pair '" + p.pair_id + "': " + e.what());
    }
    rows.push_back({p.pair_id, p.label, f.values()});
  }
  Outputs files(g.out);
  io::write_features(files.add("features.csv"), rows);
  files.commit(out);
}

struct GroupTrainArgs {
  std::string features;
  LinearTrainingConfig linear;
};

void cmd_group_train(const Globals& g, const GroupTrainArgs& a, std::ostream& out) {
  const auto rows = read_csv(a.features, io::read_features);
  std::vector<LabelledFeatures> data;
  for (const auto& r : rows) {
    if (r.label.empty()) throw DataError("pair '" + r.pair_id + "' has no label");
    data.push_back({r.values, r.label});
  }
  const GroupClassifierModel model = train_group_classifier(data, a.linear);
  Outputs files(g.out);
  files.add("group_model.json", io::group_model_to_json(model));
  files.commit(out);
  out << model.classes.size() << " classes, " << model.dimension() << " features\n";
}

struct GroupClassifyArgs {
  std::string model, features;
};

void cmd_group_classify(const Globals& g, const GroupClassifyArgs& a, std::ostream& out) {
  const GroupClassifierModel model = io::group_model_from_json(read_json(a.model));
  const auto rows = read_csv(a.features, io::read_features);
  std::vector<std::pair<std::string, std::string>> preds;
  std::size_t labelled = 0, correct = 0;
  for (const auto& r : rows) {
    if (r.values.size() != model.dimension()) {
      throw DataError("pair '" + r.pair_id + "' has " + std::to_string(r.values.size()) +
                      " features; the model expects " + std::to_string(model.dimension()));
    }
    const std::string label = classify_pair(r.values, model).label;
    if (!r.label.empty()) {
      ++labelled;
      correct += label == r.label;
    }
    preds.emplace_back(r.pair_id, label);
  }
  Outputs files(g.out);
  io::write_pair_predictions(files.add("group_predictions.csv"), preds);
  files.commit(out);
  if (labelled) out << "accuracy " << correct << "/" << labelled << '\n';
}

// ---- crowd ----------------------------------------------------------------

struct CrowdArgs {
  std::string flows, calibration, truth;
  std::optional<double> threshold;
  std::optional<double> center_x, center_y;
  double cell_size = 48.0;
  double sigmas = 3.0;
  std::size_t window = 10;
  std::size_t stride = 1;
};

void cmd_crowd(const Globals& g, const CrowdArgs& a, std::ostream& out) {
  CrowdParams params;
  params.cell_size = a.cell_size;
  params.window_frames = a.window;
  params.stride = a.stride;
  if (a.center_x && a.center_y) {
    params.center = {*a.center_x, *a.center_y};
  } else if (!g.scene.empty()) {
    const SceneConfig scene = load_scene(g);
    params.center = {scene.image_width / 2.0, scene.image_height / 2.0};
  } else {
    throw DataError("crowd needs --center-x/--center-y or --scene for the network centre");
  }
  const auto flows = read_csv(a.flows, io::read_flows);
  double threshold = 0.0;
  if (a.threshold) {
    threshold = *a.threshold;
  } else if (!a.calibration.empty()) {
    threshold = calibrate_crowd_threshold(read_csv(a.calibration, io::read_flows), params, a.sigmas);
  } else {
    throw DataError("crowd needs --threshold or --calibration");
  }

  const CrowdDetection det = crowd_detect(flows, params, threshold);
  Outputs files(g.out);
  auto& win = files.add("crowd_windows.csv");
  win << "first_frame,last_frame,energy,abnormal\n";
  for (const CrowdWindow& w : det.windows) {
    win << w.first_frame << ',' << w.last_frame << ',' << io::format_double(w.energy) << ','
        << (w.abnormal ? 1 : 0) << '\n';
  }
  io::write_frame_truth(files.add("crowd_frames.csv"), det.frames);
  std::optional<double> auc;
  if (!a.truth.empty()) {
    const auto truth = read_csv(a.truth, io::read_frame_truth);
    const auto roc = crowd_roc(flows, params, truth);
    auto& csv = files.add("crowd_roc.csv");
    csv << "threshold,tpr,fpr\n";
    for (const RocPoint& p : roc) {
      csv << io::format_double(p.threshold) << ',' << io::format_double(p.tpr) << ','
          << io::format_double(p.fpr) << '\n';
    }
    auc = roc_auc(roc);
  }
  files.commit(out);
  const auto flagged = std::count_if(det.frames.begin(), det.frames.end(),
                                     [](const auto& f) { return f.second; });
  out << "threshold " << io::format_double(threshold) << ", " << flagged << " of "
      << det.frames.size() << " frames abnormal";
  if (auc) out << ", AUC " << io::format_double(*auc);
  out << '\n';
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string task = "abnormality";
  std::string pred, truth;
};

void cmd_eval(const Globals& g, const EvalArgs& a, std::ostream& out) {
  EvalReport report;
  if (a.task == "abnormality") {
    report = abnormality_metrics(read_csv(a.pred, io::read_labels), read_csv(a.truth, io::read_labels));
  } else {
    const auto pred = read_csv(a.pred, io::read_pair_predictions);
    const auto truth = read_csv(a.truth, io::read_group_labels);
    std::map<std::string, std::string> by_id(pred.begin(), pred.end());
    std::vector<std::string> p, t;
    std::set<std::string> classes;
    for (const auto& row : truth) {
      auto it = by_id.find(row.pair_id);
      if (it == by_id.end()) throw DataError("no prediction for pair '" + row.pair_id + "'");
      p.push_back(it->second);
      t.push_back(row.label);
      classes.insert(row.label);
      classes.insert(it->second);
      by_id.erase(it);
    }
    if (!by_id.empty()) {
      throw DataError("prediction for unknown pair '" + by_id.begin()->first + "'");
    }
    const std::vector<std::string> names(classes.begin(), classes.end());
    report = group_metrics(p, t, names);
  }
  Outputs files(g.out);
  write_report_json(files.add("report.json"), report);
  files.commit(out);
  write_report_table(out, report);
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string kind;
  double patch_size = 48.0;
  std::size_t normal = 200, type_i = 30, type_ii = 30, type_iii = 30;
  std::size_t pairs_per_class = 50;
  std::size_t normal_frames = 100, escape_frames = 50;
};

void cmd_synth(const Globals& g, const SynthArgs& a, std::ostream& out) {
  Outputs files(g.out);
  if (a.kind == "abnormality") {
    ScenarioConfig cfg;
    cfg.seed = g.seed;
    cfg.normal_count = a.normal;
    cfg.type_i_count = a.type_i;
    cfg.type_ii_count = a.type_ii;
    cfg.type_iii_count = a.type_iii;
    const AbnormalityCorpus corpus = gen_abnormality_corpus(cfg);
    std::map<TrackId, Label> labels;
    for (std::size_t k = 0; k < corpus.tracks.size(); ++k) {
      labels[corpus.tracks[k].track_id] = corpus.labels[k];
    }
    io::write_trajectories(files.add("tracks.csv"), corpus.tracks);
    io::write_labels(files.add("labels.csv"), labels);
    files.add("scene.json", io::scene_to_json(corpus.scene(a.patch_size)));
  } else if (a.kind == "group" || a.kind == "casia") {
    GroupScenarioConfig cfg;
    cfg.seed = g.seed;
    cfg.pairs_per_class = a.pairs_per_class;
    cfg.cell = a.patch_size;
    const GroupCorpus corpus = a.kind == "group" ? gen_group_corpus(cfg) : gen_casia_corpus(cfg);
    std::vector<Trajectory> tracks;
    std::vector<io::GroupLabelRow> rows;
    for (const auto& p : corpus.pairs) {
      tracks.push_back(p.first);
      tracks.push_back(p.second);
      rows.push_back({p.pair_id, p.first.track_id, p.second.track_id, p.label});
    }
    SceneConfig scene;
    scene.image_width = cfg.image_width;
    scene.image_height = cfg.image_height;
    scene.patch_size = a.patch_size;
    io::write_trajectories(files.add("tracks.csv"), tracks);
    io::write_group_labels(files.add("pairs.csv"), rows);
    files.add("scene.json", io::scene_to_json(scene));
    if (a.kind == "casia") io::write_motion_field(files.add("field.csv"), corpus.field, scene);
  } else if (a.kind == "crowd") {
    CrowdScenarioConfig cfg;
    cfg.seed = g.seed;
    cfg.normal_frames = a.normal_frames;
    cfg.escape_frames = a.escape_frames;
    const CrowdSequence seq = gen_crowd_sequence(cfg);
    CrowdScenarioConfig calib = cfg;
    calib.seed = cfg.seed + 0x5eed;
    SceneConfig scene;
    scene.image_width = cfg.image_width;
    scene.image_height = cfg.image_height;
    scene.patch_size = a.patch_size;
    io::write_flows(files.add("flows.csv"), seq.flows);
    io::write_frame_truth(files.add("truth.csv"), seq.truth);
    io::write_flows(files.add("calibration.csv"),
                    gen_crowd_flows(calib, CrowdMode::normal, 0, cfg.normal_frames));
    files.add("scene.json", io::scene_to_json(scene));
  } else {
    throw InvariantError("unhandled synth kind");
  }
  files.commit(out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Network transmission-based activity recognition", "ntb"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Globals g;
  app.add_option("--scene", g.scene, "Scene config JSON");
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train an abnormality model");
  train_cmd->add_option("--tracks", train_args.tracks, "Trajectory CSV")->required();
  train_cmd->add_option("--labels", train_args.labels, "Label CSV")->required();
  train_cmd->add_option("--config", train_args.config, "Training config JSON");
  train_cmd->add_flag("--classifier-loop", train_args.classifier_loop,
                      "Train with the energy classifier in the loop");
  train_cmd->add_option("--max-iters", train_args.max_iters, "Iteration cap");
  train_cmd->add_option("--tol", train_args.tol, "Convergence tolerance")
      ->check(CLI::NonNegativeNumber);

  DetectArgs detect_args;
  auto* detect_cmd = app.add_subcommand("detect", "Detect abnormal tracks with a trained model");
  detect_cmd->add_option("--model", detect_args.model, "Model JSON")->required();
  detect_cmd->add_option("--tracks", detect_args.tracks, "Trajectory CSV")->required();
  detect_cmd->add_flag("--trace", detect_args.trace, "Write per-track energy traces");
  detect_cmd->add_flag("--online", detect_args.online, "Stream per-step states to stdout");
  detect_cmd->add_option("--rearm-window", detect_args.rearm_window,
                         "Re-arm detection every N patches (0 = never)");

  RouteMapArgs route_args;
  auto* route_cmd = app.add_subcommand("route-map", "Export minimum-energy route maps");
  route_cmd->add_option("--model", route_args.model, "Model JSON")->required();
  route_cmd->add_option("--source", route_args.source, "Source patch (default: every entrance)");
  route_cmd->add_option("--prune", route_args.prune, "Drop tree edges above this energy");

  auto* group_cmd = app.add_subcommand("group", "Group activity features and classifier");
  group_cmd->require_subcommand(1);
  GroupExtractArgs gx;
  auto* gx_cmd = group_cmd->add_subcommand("extract", "Extract pair features");
  gx_cmd->add_option("--tracks", gx.tracks, "Trajectory CSV")->required();
  gx_cmd->add_option("--pairs", gx.pairs, "Group label CSV")->required();
  gx_cmd->add_option("--field", gx.field, "Motion field CSV (adds EMI features)");
  gx_cmd->add_option("--cell-size", gx.cell_size, "Relative cell size (default: patch size)");
  gx_cmd->add_option("--scheme", gx.scheme, "EWR weighting scheme")
      ->check(CLI::IsMember({"head", "tail"}))
      ->capture_default_str();
  gx_cmd->add_option("--max-ring", gx.max_ring, "Outermost ring")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  GroupTrainArgs gt;
  auto* gt_cmd = group_cmd->add_subcommand("train", "Train the pair classifier");
  gt_cmd->add_option("--features", gt.features, "Feature CSV")->required();
  gt_cmd->add_option("--epochs", gt.linear.epochs)->capture_default_str();
  gt_cmd->add_option("--lr", gt.linear.learning_rate)->capture_default_str();
  gt_cmd->add_option("--l2", gt.linear.l2)->capture_default_str();
  GroupClassifyArgs gc;
  auto* gc_cmd = group_cmd->add_subcommand("classify", "Classify pairs");
  gc_cmd->add_option("--model", gc.model, "Group model JSON")->required();
  gc_cmd->add_option("--features", gc.features, "Feature CSV")->required();

  CrowdArgs crowd_args;
  auto* crowd_cmd = app.add_subcommand("crowd", "Detect crowd escape in flow fields");
  crowd_cmd->add_option("--flows", crowd_args.flows, "Flow CSV")->required();
  crowd_cmd->add_option("--threshold", crowd_args.threshold, "Energy threshold")
      ->check(CLI::NonNegativeNumber);
  crowd_cmd->add_option("--calibration", crowd_args.calibration,
                        "Normal flows for calibrating the threshold");
  crowd_cmd->add_option("--sigmas", crowd_args.sigmas)->capture_default_str();
  crowd_cmd->add_option("--truth", crowd_args.truth, "Per-frame truth CSV (writes ROC)");
  crowd_cmd->add_option("--center-x", crowd_args.center_x);
  crowd_cmd->add_option("--center-y", crowd_args.center_y);
  crowd_cmd->add_option("--cell-size", crowd_args.cell_size)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  crowd_cmd->add_option("--window", crowd_args.window)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  crowd_cmd->add_option("--stride", crowd_args.stride)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("--task", eval_args.task)
      ->check(CLI::IsMember({"abnormality", "group"}))
      ->capture_default_str();
  eval_cmd->add_option("--pred", eval_args.pred, "Prediction CSV")->required();
  eval_cmd->add_option("--truth", eval_args.truth, "Ground-truth CSV")->required();

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("kind", synth_args.kind)
      ->required()
      ->check(CLI::IsMember({"abnormality", "group", "casia", "crowd"}));
  synth_cmd->add_option("--patch-size", synth_args.patch_size)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--normal", synth_args.normal)->capture_default_str();
  synth_cmd->add_option("--type-i", synth_args.type_i)->capture_default_str();
  synth_cmd->add_option("--type-ii", synth_args.type_ii)->capture_default_str();
  synth_cmd->add_option("--type-iii", synth_args.type_iii)->capture_default_str();
  synth_cmd->add_option("--pairs-per-class", synth_args.pairs_per_class)->capture_default_str();
  synth_cmd->add_option("--normal-frames", synth_args.normal_frames)->capture_default_str();
  synth_cmd->add_option("--escape-frames", synth_args.escape_frames)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*train_cmd) cmd_train(g, train_args, out);
    else if (*detect_cmd) cmd_detect(g, detect_args, out);
    else if (*route_cmd) cmd_route_map(g, route_args, out);
    else if (*gx_cmd) cmd_group_extract(g, gx, out);
    else if (*gt_cmd) cmd_group_train(g, gt, out);
    else if (*gc_cmd) cmd_group_classify(g, gc, out);
    else if (*crowd_cmd) cmd_crowd(g, crowd_args, out);
    else if (*eval_cmd) cmd_eval(g, eval_args, out);
    else if (*synth_cmd) cmd_synth(g, synth_args, out);
    return kOk;
  } catch (const InvariantError& e) {
    err << "ntb: internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const DataError& e) {
    err << "ntb: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    err << "ntb: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "ntb: internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace ntb::cli
