#include "ntb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>

#include "ntb/error.hpp"

namespace ntb::io {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += ',';
    out += parts[k];
  }
  return out;
}

class CsvReader {
 public:
  CsvReader(std::istream& is, std::string_view source) : is_(is), source_(source) {}

  /// Reads the header row and returns its columns.
  std::vector<std::string> header() {
    std::vector<std::string_view> fields;
    if (!next(fields)) fail("missing header");
    return {fields.begin(), fields.end()};
  }
  void expect_header(const std::vector<std::string>& expected) {
    if (header() != expected) fail("expected header '" + join(expected) + "'");
  }

  /// Next non-blank row; false at end of input.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(is_, line_)) {
      ++line_no_;
      if (trim(line_).empty()) continue;
      fields = split(line_);
      return true;
    }
    return false;
  }
  bool next(std::vector<std::string_view>& fields, std::size_t count) {
    if (!next(fields)) return false;
    if (fields.size() != count) {
      fail("expected " + std::to_string(count) + " fields, found " + std::to_string(fields.size()));
    }
    return true;
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw DataError(std::string(source_) + ":" + std::to_string(line_no_) + ": " + reason);
  }

  std::int64_t integer(std::string_view field, std::string_view what) const {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      fail("invalid " + std::string(what) + " '" + std::string(field) + "'");
    }
    return v;
  }
  double number(std::string_view field, std::string_view what) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
      fail("invalid " + std::string(what) + " '" + std::string(field) + "'");
    }
    return v;
  }
  std::size_t line() const { return line_no_; }

 private:
  std::istream& is_;
  std::string_view source_;
  std::string line_;
  std::size_t line_no_ = 0;
};

/// Strict object reader: every key must be consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j.is_object()) throw DataError(what_ + ": expected a JSON object");
  }

  const json& required(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) throw DataError(what_ + ": missing key '" + key + "'");
    used_.insert(key);
    return *it;
  }
  const json* optional(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }
  template <typename T>
  T get(const std::string& key) {
    return convert<T>(required(key), key);
  }
  template <typename T>
  void get_to(const std::string& key, T& out) {
    if (const json* v = optional(key)) out = convert<T>(*v, key);
  }
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) throw DataError(what_ + ": unknown key '" + key + "'");
    }
  }

 private:
  template <typename T>
  T convert(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw DataError("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw DataError(what_ + ": key '" + key + "' has the wrong type");
    }
  }

  const json& j_;
  std::string what_;
  std::set<std::string> used_;
};

json softmax_to_json(const SoftmaxModel& m) {
  return {{"mean", m.standardizer().mean},
          {"scale", m.standardizer().scale},
          {"weights", m.weights()},
          {"biases", m.biases()}};
}

SoftmaxModel softmax_from_json(const json& j, const std::string& what) {
  ObjectReader r(j, what);
  Standardizer s;
  s.mean = r.get<std::vector<double>>("mean");
  s.scale = r.get<std::vector<double>>("scale");
  auto weights = r.get<std::vector<std::vector<double>>>("weights");
  auto biases = r.get<std::vector<double>>("biases");
  r.finish();
  if (s.mean.size() != s.scale.size() || weights.size() != biases.size() || weights.empty()) {
    throw DataError(what + ": inconsistent classifier dimensions");
  }
  for (const auto& w : weights) {
    if (w.size() != s.mean.size()) throw DataError(what + ": inconsistent classifier dimensions");
  }
  return SoftmaxModel(std::move(s), std::move(weights), std::move(biases));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvariantError("number formatting failed");
  return {buf, ptr};
}

std::vector<Trajectory> read_trajectories(std::istream& is, std::string_view source) {
  CsvReader csv(is, source);
  csv.expect_header({"track_id", "frame", "x", "y"});
  std::map<TrackId, Trajectory> tracks;
  std::map<std::pair<TrackId, Frame>, std::size_t> seen;
  std::vector<std::string_view> f;
  while (csv.next(f, 4)) {
    const TrackId id = csv.integer(f[0], "track_id");
    const Frame frame = csv.integer(f[1], "frame");
    const double x = csv.number(f[2], "x");
    const double y = csv.number(f[3], "y");
    if (auto [it, fresh] = seen.emplace(std::pair{id, frame}, csv.line()); !fresh) {
      csv.fail("duplicate frame " + std::to_string(frame) + " for track " + std::to_string(id) +
               " (first at line " + std::to_string(it->second) + ")");
    }
    Trajectory& t = tracks[id];
    t.track_id = id;
    t.samples.push_back({frame, x, y});
  }
  std::vector<Trajectory> out;
  out.reserve(tracks.size());
  for (auto& [id, t] : tracks) {
    std::sort(t.samples.begin(), t.samples.end(),
              [](const Sample& a, const Sample& b) { return a.frame < b.frame; });
    out.push_back(std::move(t));
  }
  return out;
}

void write_trajectories(std::ostream& os, std::span<const Trajectory> tracks) {
  os << "track_id,frame,x,y\n";
  for (const Trajectory& t : tracks) {
    for (const Sample& s : t.samples) {
      os << t.track_id << ',' << s.frame << ',' << format_double(s.x) << ',' << format_double(s.y)
         << '\n';
    }
  }
}

std::map<TrackId, Label> read_labels(std::istream& is, std::string_view source) {
  CsvReader csv(is, source);
  csv.expect_header({"track_id", "label"});
  std::map<TrackId, Label> out;
  std::vector<std::string_view> f;
  while (csv.next(f, 2)) {
    const TrackId id = csv.integer(f[0], "track_id");
    Label label{};
    try {
      label = parse_label(f[1]);
    } catch (const DataError&) {
      csv.fail("invalid label '" + std::string(f[1]) + "'");
    }
    if (!out.emplace(id, label).second) csv.fail("duplicate track " + std::to_string(id));
  }
  return out;
}

void write_labels(std::ostream& os, const std::map<TrackId, Label>& labels) {
  os << "track_id,label\n";
  for (const auto& [id, label] : labels) os << id << ',' << to_string(label) << '\n';
}

MotionField read_motion_field(std::istream& is, std::string_view source, const SceneConfig& scene) {
  CsvReader csv(is, source);
  csv.expect_header({"frame", "patch_row", "patch_col", "magnitude"});
  MotionField field;
  std::vector<std::string_view> f;
  while (csv.next(f, 4)) {
    const Frame frame = csv.integer(f[0], "frame");
    const std::int64_t row = csv.integer(f[1], "patch_row");
    const std::int64_t col = csv.integer(f[2], "patch_col");
    const double mag = csv.number(f[3], "magnitude");
    if (row < 0 || col < 0 || static_cast<std::size_t>(row) >= scene.rows() ||
        static_cast<std::size_t>(col) >= scene.columns()) {
      csv.fail("patch (" + std::to_string(row) + "," + std::to_string(col) + ") outside the grid");
    }
    if (mag < 0.0) csv.fail("negative magnitude");
    field.set(frame, scene.index_of(static_cast<std::size_t>(row), static_cast<std::size_t>(col)),
              mag);
  }
  return field;
}

void write_motion_field(std::ostream& os, const MotionField& field, const SceneConfig& scene) {
  os << "frame,patch_row,patch_col,magnitude\n";
  for (const auto& [key, mag] : field.entries()) {
    os << key.first << ',' << scene.row_of(key.second) << ',' << scene.col_of(key.second) << ','
       << format_double(mag) << '\n';
  }
}

std::vector<FlowVector> read_flows(std::istream& is, std::string_view source) {
  CsvReader csv(is, source);
  csv.expect_header({"frame", "x", "y", "dx", "dy"});
  std::vector<FlowVector> out;
  std::vector<std::string_view> f;
  while (csv.next(f, 5)) {
    out.push_back({csv.integer(f[0], "frame"), csv.number(f[1], "x"), csv.number(f[2], "y"),
                   csv.number(f[3], "dx"), csv.number(f[4], "dy")});
  }
  return out;
}

void write_flows(std::ostream& os, std::span<const FlowVector> flows) {
  os << "frame,x,y,dx,dy\n";
  for (const FlowVector& v : flows) {
    os << v.frame << ',' << format_double(v.x) << ',' << format_double(v.y) << ','
       << format_double(v.dx) << ',' << format_double(v.dy) << '\n';
  }
}

std::vector<std::pair<Frame, bool>> read_frame_truth(std::istream& is, std::string_view source) {
  CsvReader csv(is, source);
  csv.expect_header({"frame", "abnormal"});
  std::vector<std::pair<Frame, bool>> out;
  std::vector<std::string_view> f;
  while (csv.next(f, 2)) {
    const Frame frame = csv.integer(f[0], "frame");
    const std::int64_t flag = csv.integer(f[1], "abnormal");
    if (flag != 0 && flag != 1) csv.fail("abnormal must be 0 or 1");
    out.emplace_back(frame, flag == 1);
  }
  return out;
}

void write_frame_truth(std::ostream& os, std::span<const std::pair<Frame, bool>> truth) {
  os << "frame,abnormal\n";
  for (const auto& [frame, abnormal] : truth) os << frame << ',' << (abnormal ? 1 : 0) << '\n';
}

std::vector<GroupLabelRow> read_group_labels(std::istream& is, std::string_view source) {
  CsvReader csv(is, source);
  csv.expect_header({"pair_id", "track_id_1", "track_id_2", "label"});
  std::vector<GroupLabelRow> out;
  std::set<std::string> ids;
  std::vector<std::string_view> f;
  while (csv.next(f, 4)) {
    GroupLabelRow row{std::string(f[0]), csv.integer(f[1], "track_id_1"),
                      csv.integer(f[2], "track_id_2"), std::string(f[3])};
    if (row.pair_id.empty()) csv.fail("empty pair_id");
    if (row.first == row.second) csv.fail("pair references the same track twice");
    if (!ids.insert(row.pair_id).second) csv.fail("duplicate pair_id '" + row.pair_id + "'");
    out.push_back(std::move(row));
  }
  return out;
}

void write_group_labels(std::ostream& os, std::span<const GroupLabelRow> rows) {
  os << "pair_id,track_id_1,track_id_2,label\n";
  for (const auto& r : rows) os << r.pair_id << ',' << r.first << ',' << r.second << ',' << r.label << '\n';
}

std::vector<std::pair<std::string, std::string>> read_pair_predictions(std::istream& is,
                                                                     std::string_view source) {
  CsvReader csv(is, source);
  csv.expect_header({"pair_id", "label"});
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> ids;
  std::vector<std::string_view> f;
  while (csv.next(f, 2)) {
    if (!ids.emplace(f[0]).second) csv.fail("duplicate pair_id '" + std::string(f[0]) + "'");
    out.emplace_back(std::string(f[0]), std::string(f[1]));
  }
  return out;
}

void write_pair_predictions(std::ostream& os,
                            std::span<const std::pair<std::string, std::string>> rows) {
  os << "pair_id,label\n";
  for (const auto& [id, label] : rows) os << id << ',' << label << '\n';
}

std::vector<FeatureRow> read_features(std::istream& is, std::string_view source) {
  CsvReader csv(is, source);
  const auto header = csv.header();
  const std::size_t dim = header.size() >= 2 ? header.size() - 2 : 0;
  std::vector<std::string> expected{"pair_id", "label"};
  if (dim == 4 || dim == 6) {
    for (auto& name : GroupFeatureVector::column_names(dim)) expected.push_back(name);
  }
  if (header != expected || dim < 4) {
    csv.fail("expected header 'pair_id,label,E1,E2,ENR,EWR' optionally followed by ',EMI1,EMI2'");
  }
  std::vector<FeatureRow> out;
  std::vector<std::string_view> f;
  while (csv.next(f, header.size())) {
    FeatureRow row{std::string(f[0]), std::string(f[1]), {}};
    for (std::size_t k = 0; k < dim; ++k) row.values.push_back(csv.number(f[k + 2], header[k + 2]));
    out.push_back(std::move(row));
  }
  return out;
}

void write_features(std::ostream& os, std::span<const FeatureRow> rows) {
  const std::size_t dim = rows.empty() ? 4 : rows.front().values.size();
  os << "pair_id,label";
  for (const auto& name : GroupFeatureVector::column_names(dim)) os << ',' << name;
  os << '\n';
  for (const FeatureRow& r : rows) {
    if (r.values.size() != dim) throw InvariantError("feature rows of mixed dimension");
    os << r.pair_id << ',' << r.label;
    for (double v : r.values) os << ',' << format_double(v);
    os << '\n';
  }
}

std::vector<IterationRecord> read_iteration_log(std::istream& is, std::string_view source) {
  CsvReader csv(is, source);
  csv.expect_header({"iter", "T1", "alpha", "err_fa", "err_miss"});
  std::vector<IterationRecord> out;
  std::vector<std::string_view> f;
  while (csv.next(f, 5)) {
    IterationRecord r;
    const std::int64_t iter = csv.integer(f[0], "iter");
    if (iter < 0) csv.fail("negative iteration");
    r.iteration = static_cast<std::size_t>(iter);
    r.thresholds = {csv.number(f[1], "T1"), csv.number(f[2], "alpha")};
    r.err_fa = csv.number(f[3], "err_fa");
    r.err_miss = csv.number(f[4], "err_miss");
    out.push_back(r);
  }
  return out;
}

void write_iteration_log(std::ostream& os, std::span<const IterationRecord> log) {
  os << "iter,T1,alpha,err_fa,err_miss\n";
  for (const auto& r : log) {
    os << r.iteration << ',' << format_double(r.thresholds.t1) << ','
       << format_double(r.thresholds.alpha) << ',' << format_double(r.err_fa) << ','
       << format_double(r.err_miss) << '\n';
  }
}

SceneConfig scene_from_json(const json& j) {
  ObjectReader r(j, "scene");
  SceneConfig s;
  s.image_width = r.get<double>("image_width");
  s.image_height = r.get<double>("image_height");
  s.patch_size = r.get<double>("patch_size");
  s.entrance_patches = r.get<std::vector<PatchIndex>>("entrance_patches");
  r.get_to("equivalence_sets", s.equivalence_sets);
  r.finish();
  s.validate();
  return s;
}

json scene_to_json(const SceneConfig& s) {
  return {{"image_width", s.image_width},
          {"image_height", s.image_height},
          {"patch_size", s.patch_size},
          {"entrance_patches", s.entrance_patches},
          {"equivalence_sets", s.equivalence_sets}};
}

TrainingConfig training_config_from_json(const json& j) {
  ObjectReader r(j, "training config");
  TrainingConfig c;
  r.get_to("max_iterations", c.max_iterations);
  r.get_to("tolerance", c.tolerance);
  r.get_to("alpha_min", c.alpha_min);
  r.get_to("alpha_max", c.alpha_max);
  r.get_to("alpha_step", c.alpha_step);
  r.get_to("epsilon", c.epsilon);
  r.get_to("large_value", c.large_value);
  if (const json* cls = r.optional("classifier")) {
    ObjectReader cr(*cls, "training config classifier");
    cr.get_to("epochs", c.classifier.epochs);
    cr.get_to("learning_rate", c.classifier.learning_rate);
    cr.get_to("l2", c.classifier.l2);
    cr.finish();
  }
  r.finish();
  if (!(c.alpha_step > 0.0) || c.alpha_max < c.alpha_min) {
    throw DataError("training config: alpha grid must have alpha_step > 0 and alpha_max >= alpha_min");
  }
  if (!(c.large_value > 0.0) || !(c.epsilon > 0.0) || c.tolerance < 0.0) {
    throw DataError("training config: large_value and epsilon must be positive, tolerance >= 0");
  }
  return c;
}

json training_config_to_json(const TrainingConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"tolerance", c.tolerance},
          {"alpha_min", c.alpha_min},
          {"alpha_max", c.alpha_max},
          {"alpha_step", c.alpha_step},
          {"epsilon", c.epsilon},
          {"large_value", c.large_value},
          {"classifier",
           {{"epochs", c.classifier.epochs},
            {"learning_rate", c.classifier.learning_rate},
            {"l2", c.classifier.l2}}}};
}

json model_to_json(const TrainedAbnormalityModel& m, const json& metadata) {
  json log = json::array();
  for (const IterationRecord& r : m.log) {
    log.push_back({{"iter", r.iteration},
                   {"t1", r.thresholds.t1},
                   {"alpha", r.thresholds.alpha},
                   {"err_fa", r.err_fa},
                   {"err_miss", r.err_miss},
                   {"max_relative_change", r.max_relative_change}});
  }
  json j{{"format_version", kModelFormatVersion},
         {"scene", scene_to_json(m.scene)},
         {"node_count", m.network.node_count()},
         {"directed", m.network.directed()},
         {"large_value", m.network.large_value()},
         {"energy", m.network.matrix()},
         {"t1", m.thresholds.t1},
         {"alpha", m.thresholds.alpha},
         {"entrance_patches", m.scene.entrance_patches},
         {"converged", m.converged},
         {"training_log", log},
         {"metadata", metadata}};
  if (m.classifier) j["classifier"] = softmax_to_json(m.classifier->model);
  return j;
}

TrainedAbnormalityModel model_from_json(const json& j) {
  ObjectReader r(j, "model");
  const int version = r.get<int>("format_version");
  if (version != kModelFormatVersion) {
    throw DataError("model: unsupported format_version " + std::to_string(version) + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  TrainedAbnormalityModel m;
  m.scene = scene_from_json(r.required("scene"));
  const auto n = r.get<std::size_t>("node_count");
  const bool directed = r.get<bool>("directed");
  const double large = r.get<double>("large_value");
  auto energy = r.get<std::vector<double>>("energy");
  m.thresholds.t1 = r.get<double>("t1");
  m.thresholds.alpha = r.get<double>("alpha");
  const auto entrances = r.get<std::vector<PatchIndex>>("entrance_patches");
  m.converged = r.get<bool>("converged");
  for (const json& row : r.required("training_log")) {
    ObjectReader lr(row, "model training_log entry");
    IterationRecord rec;
    rec.iteration = lr.get<std::size_t>("iter");
    rec.thresholds.t1 = lr.get<double>("t1");
    rec.thresholds.alpha = lr.get<double>("alpha");
    rec.err_fa = lr.get<double>("err_fa");
    rec.err_miss = lr.get<double>("err_miss");
    rec.max_relative_change = lr.get<double>("max_relative_change");
    lr.finish();
    m.log.push_back(rec);
  }
  if (!r.required("metadata").is_object()) throw DataError("model: metadata must be an object");
  if (const json* cls = r.optional("classifier")) {
    m.classifier = EnergyClassifier{softmax_from_json(*cls, "model classifier")};
    if (m.classifier->model.class_count() != 2 || m.classifier->model.dimension() != 2) {
      throw DataError("model classifier: expected 2 classes over 2 features");
    }
  }
  r.finish();

  if (n != m.scene.node_count()) {
    throw DataError("model: node_count " + std::to_string(n) + " does not match the scene grid (" +
                    std::to_string(m.scene.node_count()) + " patches)");
  }
  if (energy.size() != n * n) {
    throw DataError("model: energy matrix has " + std::to_string(energy.size()) +
                    " entries, expected " + std::to_string(n * n));
  }
  if (entrances != m.scene.entrance_patches) {
    throw DataError("model: entrance_patches disagree with the scene");
  }
  m.network = TransmissionNetwork::from_matrix(std::move(energy), directed, large);
  m.refresh_route_maps();
  return m;
}

json group_model_to_json(const GroupClassifierModel& m) {
  return {{"format_version", kModelFormatVersion},
          {"classes", m.classes},
          {"dimension", m.dimension()},
          {"model", softmax_to_json(m.model)}};
}

GroupClassifierModel group_model_from_json(const json& j) {
  ObjectReader r(j, "group model");
  const int version = r.get<int>("format_version");
  if (version != kModelFormatVersion) {
    throw DataError("group model: unsupported format_version " + std::to_string(version));
  }
  GroupClassifierModel m;
  m.classes = r.get<std::vector<std::string>>("classes");
  const auto dim = r.get<std::size_t>("dimension");
  m.model = softmax_from_json(r.required("model"), "group model");
  r.finish();
  if (m.model.class_count() != m.classes.size() || m.model.dimension() != dim) {
    throw DataError("group model: classes or dimension disagree with the weights");
  }
  return m;
}

json verdict_to_json(TrackId id, const DetectionVerdict& v) {
  json first = nullptr;
  if (v.first_flag_step) first = v.steps.at(*v.first_flag_step).frame;
  json final_min = nullptr;
  if (!v.steps.empty()) final_min = v.steps.back().min_energy;
  return {{"track_id", id},
          {"verdict", v.abnormal ? "abnormal" : "normal"},
          {"type", to_string(v.type)},
          {"reason", to_string(v.reason)},
          {"first_flag_frame", first},
          {"final_energy", v.final_energy()},
          {"final_min_energy", final_min},
          {"steps", v.steps.size()},
          {"on_demand_map", v.on_demand_map}};
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(source) + ": invalid JSON (" + e.what() + ")");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

}  // namespace ntb::io
