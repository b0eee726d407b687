#pragma once

// Error rates, confusion matrices and dataset splitting.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ntb/abnormality_model.hpp"

namespace ntb {

/// One-vs-rest counts and rates for a single class. A rate whose
/// denominator is zero is empty rather than 0.
struct ClassRates {
  std::string label;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t false_negatives = 0;
  std::size_t false_positives = 0;
  std::optional<double> miss;
  std::optional<double> fa;
};

struct EvalReport {
  /// Row = ground truth, column = prediction, both in `classes` order.
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t total = 0;
  std::size_t wrong = 0;
  double ter = 0.0;

  // Abnormal-vs-normal view (abnormality reports only).
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::optional<double> fa_rate;
  std::optional<double> miss_rate;

  /// Per abnormality type (abnormality reports) or per class (group reports).
  std::vector<ClassRates> per_class;
};

/// Binary FA/Miss/TER plus per-type miss rates. A type mismatch between two
/// abnormal labels counts as detected. Throws DataError on length mismatch.
[[nodiscard]] EvalReport abnormality_metrics(std::span<const Label> predicted,
                                             std::span<const Label> truth);
/// Keyed variant; throws DataError unless both maps hold the same ids.
[[nodiscard]] EvalReport abnormality_metrics(const std::map<TrackId, Label>& predicted,
                                             const std::map<TrackId, Label>& truth);

/// Multi-class report. Throws DataError on a label outside `classes`.
[[nodiscard]] EvalReport group_metrics(std::span<const std::string> predicted,
                                       std::span<const std::string> truth,
                                       std::span<const std::string> classes);

/// Mean of TER and every defined rate across runs.
struct AveragedRates {
  double ter = 0.0;
  std::optional<double> fa_rate;
  std::optional<double> miss_rate;
  std::map<std::string, double> class_miss;
  std::size_t runs = 0;
};
[[nodiscard]] AveragedRates average_reports(std::span<const EvalReport> reports);

void write_report_table(std::ostream& os, const EvalReport& report);
void write_report_json(std::ostream& os, const EvalReport& report);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;
};

/// Stratified seeded split of indices 0..strata.size()-1. Each stratum of n
/// >= 2 items keeps round(n * fraction) in training, clamped to [1, n-1];
/// smaller strata go entirely to training with a warning. Both index lists
/// are sorted. Throws DataError unless 0 < fraction < 1.
[[nodiscard]] Split split_dataset(std::span<const std::string> strata, double train_fraction,
                                  std::uint64_t seed);

}  // namespace ntb
