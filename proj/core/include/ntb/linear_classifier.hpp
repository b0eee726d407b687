#pragma once

// Multinomial linear classifier over standardized features, trained by
// full-batch gradient descent on the softmax cross-entropy loss.

#include <cstddef>
#include <span>
#include <vector>

namespace ntb {

struct LinearTrainingConfig {
  std::size_t epochs = 3000;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};

/// Per-feature affine standardization. Constant columns keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(std::span<const std::vector<double>> rows);
  [[nodiscard]] std::vector<double> apply(std::span<const double> row) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

class SoftmaxModel {
 public:
  SoftmaxModel() = default;
  SoftmaxModel(Standardizer standardizer, std::vector<std::vector<double>> weights,
               std::vector<double> biases);

  /// `labels[k]` is a class index in [0, class_count). Throws DataError on
  /// empty input, ragged rows, or out-of-range labels.
  static SoftmaxModel fit(std::span<const std::vector<double>> rows,
                          std::span<const std::size_t> labels, std::size_t class_count,
                          const LinearTrainingConfig& config = {});

  [[nodiscard]] std::size_t class_count() const { return weights_.size(); }
  [[nodiscard]] std::size_t dimension() const { return standardizer_.mean.size(); }

  /// Linear class scores. Throws DataError on a dimension mismatch.
  [[nodiscard]] std::vector<double> scores(std::span<const double> row) const;
  /// Softmax of the scores.
  [[nodiscard]] std::vector<double> probabilities(std::span<const double> row) const;
  /// Index of the highest score; ties go to the lower class index.
  [[nodiscard]] std::size_t predict(std::span<const double> row) const;

  [[nodiscard]] const Standardizer& standardizer() const { return standardizer_; }
  [[nodiscard]] const std::vector<std::vector<double>>& weights() const { return weights_; }
  [[nodiscard]] const std::vector<double>& biases() const { return biases_; }

  friend bool operator==(const SoftmaxModel&, const SoftmaxModel&) = default;

 private:
  Standardizer standardizer_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> biases_;
};

}  // namespace ntb
