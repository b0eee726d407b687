#include "ntb/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "ntb/error.hpp"

namespace ntb {
namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string format_rate(const std::optional<double>& r) {
  if (!r) return "undef";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << *r * 100.0 << '%';
  return os.str();
}

nlohmann::json rate_json(const std::optional<double>& r) {
  if (!r) return nullptr;
  return *r;
}

}  // namespace

EvalReport abnormality_metrics(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) {
    throw DataError("prediction count does not match ground-truth count");
  }
  EvalReport r;
  for (Label l : {Label::normal, Label::type_i, Label::type_ii, Label::type_iii}) {
    r.classes.emplace_back(to_string(l));
  }
  r.confusion.assign(4, std::vector<std::size_t>(4, 0));
  std::array<std::size_t, 4> type_count{};
  std::array<std::size_t, 4> type_missed{};
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const auto t = static_cast<std::size_t>(truth[k]);
    const auto p = static_cast<std::size_t>(predicted[k]);
    ++r.confusion[t][p];
    const bool truth_abn = is_abnormal(truth[k]);
    const bool pred_abn = is_abnormal(predicted[k]);
    if (truth_abn) {
      ++r.positives;
      ++type_count[t];
      if (!pred_abn) {
        ++r.false_negatives;
        ++type_missed[t];
      }
    } else {
      ++r.negatives;
      if (pred_abn) ++r.false_positives;
    }
  }
  r.total = truth.size();
  r.wrong = r.false_positives + r.false_negatives;
  r.ter = r.total ? static_cast<double>(r.wrong) / static_cast<double>(r.total) : 0.0;
  r.fa_rate = ratio(r.false_positives, r.negatives);
  r.miss_rate = ratio(r.false_negatives, r.positives);
  for (std::size_t t = 1; t < 4; ++t) {
    ClassRates c;
    c.label = r.classes[t];
    c.positives = type_count[t];
    c.negatives = r.total - type_count[t];
    c.false_negatives = type_missed[t];
    c.miss = ratio(type_missed[t], type_count[t]);
    r.per_class.push_back(c);
  }
  return r;
}

EvalReport abnormality_metrics(const std::map<TrackId, Label>& predicted,
                               const std::map<TrackId, Label>& truth) {
  std::vector<Label> p;
  std::vector<Label> t;
  for (const auto& [id, label] : truth) {
    auto it = predicted.find(id);
    if (it == predicted.end()) {
      throw DataError("no prediction for track " + std::to_string(id));
    }
    t.push_back(label);
    p.push_back(it->second);
  }
  for (const auto& [id, label] : predicted) {
    if (!truth.contains(id)) throw DataError("no ground truth for track " + std::to_string(id));
  }
  return abnormality_metrics(p, t);
}

EvalReport group_metrics(std::span<const std::string> predicted, std::span<const std::string> truth,
                         std::span<const std::string> classes) {
  if (predicted.size() != truth.size()) {
    throw DataError("prediction count does not match ground-truth count");
  }
  EvalReport r;
  r.classes.assign(classes.begin(), classes.end());
  const std::size_t k = r.classes.size();
  auto index = [&](const std::string& label) {
    auto it = std::find(r.classes.begin(), r.classes.end(), label);
    if (it == r.classes.end()) throw DataError("unknown label '" + label + "'");
    return static_cast<std::size_t>(it - r.classes.begin());
  };
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t s = 0; s < truth.size(); ++s) {
    const std::size_t t = index(truth[s]);
    const std::size_t p = index(predicted[s]);
    ++r.confusion[t][p];
    if (t != p) ++r.wrong;
  }
  r.total = truth.size();
  r.ter = r.total ? static_cast<double>(r.wrong) / static_cast<double>(r.total) : 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    ClassRates cr;
    cr.label = r.classes[c];
    for (std::size_t j = 0; j < k; ++j) {
      cr.positives += r.confusion[c][j];
      if (j != c) {
        cr.false_negatives += r.confusion[c][j];
        cr.false_positives += r.confusion[j][c];
      }
    }
    cr.negatives = r.total - cr.positives;
    cr.miss = ratio(cr.false_negatives, cr.positives);
    cr.fa = ratio(cr.false_positives, cr.negatives);
    r.per_class.push_back(cr);
  }
  return r;
}

AveragedRates average_reports(std::span<const EvalReport> reports) {
  AveragedRates out;
  out.runs = reports.size();
  if (reports.empty()) return out;
  double fa = 0.0, miss = 0.0;
  std::size_t fa_n = 0, miss_n = 0;
  std::map<std::string, std::pair<double, std::size_t>> cls;
  for (const EvalReport& r : reports) {
    out.ter += r.ter;
    if (r.fa_rate) {
      fa += *r.fa_rate;
      ++fa_n;
    }
    if (r.miss_rate) {
      miss += *r.miss_rate;
      ++miss_n;
    }
    for (const ClassRates& c : r.per_class) {
      if (c.miss) {
        cls[c.label].first += *c.miss;
        ++cls[c.label].second;
      }
    }
  }
  out.ter /= static_cast<double>(reports.size());
  if (fa_n) out.fa_rate = fa / static_cast<double>(fa_n);
  if (miss_n) out.miss_rate = miss / static_cast<double>(miss_n);
  for (const auto& [label, acc] : cls) {
    out.class_miss[label] = acc.first / static_cast<double>(acc.second);
  }
  return out;
}

void write_report_table(std::ostream& os, const EvalReport& r) {
  const bool binary = r.positives + r.negatives > 0;
  if (binary) {
    os << std::left << std::setw(10) << "FA" << std::setw(10) << "Miss";
    for (const ClassRates& c : r.per_class) os << std::setw(10) << ("Miss(" + c.label + ")");
    os << "TER\n";
    os << std::setw(10) << format_rate(r.fa_rate) << std::setw(10) << format_rate(r.miss_rate);
    for (const ClassRates& c : r.per_class) os << std::setw(10) << format_rate(c.miss);
    os << format_rate(static_cast<double>(r.ter)) << '\n';
  } else {
    os << std::left << std::setw(14) << "class" << std::setw(10) << "Miss" << std::setw(10) << "FA"
       << '\n';
    for (const ClassRates& c : r.per_class) {
      os << std::setw(14) << c.label << std::setw(10) << format_rate(c.miss) << std::setw(10)
         << format_rate(c.fa) << '\n';
    }
    os << std::setw(14) << "TER" << format_rate(static_cast<double>(r.ter)) << '\n';
  }
  os << "\nconfusion (rows = truth, columns = prediction)\n" << std::setw(14) << "";
  for (const auto& c : r.classes) os << std::setw(10) << c;
  os << '\n';
  for (std::size_t i = 0; i < r.classes.size(); ++i) {
    os << std::setw(14) << r.classes[i];
    for (std::size_t count : r.confusion[i]) os << std::setw(10) << count;
    os << '\n';
  }
}

void write_report_json(std::ostream& os, const EvalReport& r) {
  nlohmann::json j;
  j["classes"] = r.classes;
  j["confusion"] = r.confusion;
  j["total"] = r.total;
  j["wrong"] = r.wrong;
  j["ter"] = r.ter;
  if (r.positives + r.negatives > 0) {
    j["positives"] = r.positives;
    j["negatives"] = r.negatives;
    j["false_positives"] = r.false_positives;
    j["false_negatives"] = r.false_negatives;
    j["fa_rate"] = rate_json(r.fa_rate);
    j["miss_rate"] = rate_json(r.miss_rate);
  }
  nlohmann::json per = nlohmann::json::array();
  for (const ClassRates& c : r.per_class) {
    per.push_back({{"label", c.label},
                   {"positives", c.positives},
                   {"negatives", c.negatives},
                   {"false_negatives", c.false_negatives},
                   {"false_positives", c.false_positives},
                   {"miss", rate_json(c.miss)},
                   {"fa", rate_json(c.fa)}});
  }
  j["per_class"] = per;
  os << j.dump(2) << '\n';
}

Split split_dataset(std::span<const std::string> strata, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train fraction must lie strictly between 0 and 1");
  }
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < strata.size(); ++k) groups[strata[k]].push_back(k);
  std::mt19937_64 rng(seed);
  Split out;
  for (auto& [label, members] : groups) {
    const std::size_t n = members.size();
    if (n < 2) {
      out.warnings.push_back("class '" + label + "' has fewer than 2 samples; kept in training");
      out.train.insert(out.train.end(), members.begin(), members.end());
      continue;
    }
    std::shuffle(members.begin(), members.end(), rng);
    auto keep = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
    keep = std::clamp<std::size_t>(keep, 1, n - 1);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<long>(keep));
    out.test.insert(out.test.end(), members.begin() + static_cast<long>(keep), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace ntb
