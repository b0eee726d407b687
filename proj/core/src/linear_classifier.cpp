#include "ntb/linear_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntb/error.hpp"

namespace ntb {
namespace {

void softmax_in_place(std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - top);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

}  // namespace

Standardizer Standardizer::fit(std::span<const std::vector<double>> rows) {
  Standardizer s;
  if (rows.empty()) return s;
  const std::size_t d = rows.front().size();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += r[c];
  }
  for (double& m : s.mean) m /= static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < d; ++c) s.scale[c] += (r[c] - s.mean[c]) * (r[c] - s.mean[c]);
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(rows.size()));
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - mean[c]) / scale[c];
  return out;
}

SoftmaxModel::SoftmaxModel(Standardizer standardizer, std::vector<std::vector<double>> weights,
                           std::vector<double> biases)
    : standardizer_(std::move(standardizer)),
      weights_(std::move(weights)),
      biases_(std::move(biases)) {
  if (weights_.size() != biases_.size()) throw DataError("classifier: weight/bias count mismatch");
  for (const auto& w : weights_) {
    if (w.size() != standardizer_.mean.size() || w.size() != standardizer_.scale.size()) {
      throw DataError("classifier: weight dimension mismatch");
    }
  }
}

SoftmaxModel SoftmaxModel::fit(std::span<const std::vector<double>> rows,
                               std::span<const std::size_t> labels, std::size_t class_count,
                               const LinearTrainingConfig& config) {
  if (rows.empty()) throw DataError("classifier: no training samples");
  if (rows.size() != labels.size()) throw DataError("classifier: label count mismatch");
  if (class_count < 2) throw DataError("classifier: need at least two classes");
  const std::size_t d = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != d) throw DataError("classifier: ragged feature rows");
  }
  for (std::size_t y : labels) {
    if (y >= class_count) throw DataError("classifier: label out of range");
  }

  SoftmaxModel model;
  model.standardizer_ = Standardizer::fit(rows);
  std::vector<std::vector<double>> x;
  x.reserve(rows.size());
  for (const auto& r : rows) x.push_back(model.standardizer_.apply(r));

  model.weights_.assign(class_count, std::vector<double>(d, 0.0));
  model.biases_.assign(class_count, 0.0);
  const double n = static_cast<double>(rows.size());
  std::vector<std::vector<double>> grad_w(class_count, std::vector<double>(d));
  std::vector<double> grad_b(class_count);
  std::vector<double> p(class_count);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (std::size_t c = 0; c < class_count; ++c) {
        double s = model.biases_[c];
        for (std::size_t f = 0; f < d; ++f) s += model.weights_[c][f] * x[k][f];
        p[c] = s;
      }
      softmax_in_place(p);
      for (std::size_t c = 0; c < class_count; ++c) {
        const double err = p[c] - (labels[k] == c ? 1.0 : 0.0);
        grad_b[c] += err;
        for (std::size_t f = 0; f < d; ++f) grad_w[c][f] += err * x[k][f];
      }
    }
    for (std::size_t c = 0; c < class_count; ++c) {
      model.biases_[c] -= config.learning_rate * grad_b[c] / n;
      for (std::size_t f = 0; f < d; ++f) {
        model.weights_[c][f] -=
            config.learning_rate * (grad_w[c][f] / n + config.l2 * model.weights_[c][f]);
      }
    }
  }
  return model;
}

std::vector<double> SoftmaxModel::scores(std::span<const double> row) const {
  if (row.size() != dimension()) {
    throw DataError("feature dimension " + std::to_string(row.size()) +
                    " does not match model dimension " + std::to_string(dimension()));
  }
  const std::vector<double> x = standardizer_.apply(row);
  std::vector<double> out(weights_.size());
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    double s = biases_[c];
    for (std::size_t f = 0; f < x.size(); ++f) s += weights_[c][f] * x[f];
    out[c] = s;
  }
  return out;
}

std::vector<double> SoftmaxModel::probabilities(std::span<const double> row) const {
  std::vector<double> s = scores(row);
  softmax_in_place(s);
  return s;
}

std::size_t SoftmaxModel::predict(std::span<const double> row) const {
  const std::vector<double> s = scores(row);
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c) {
    if (s[c] > s[best]) best = c;
  }
  return best;
}

}  // namespace ntb
