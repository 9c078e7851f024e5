#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "aspectmill/features.hpp"

namespace aspectmill {

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
  bool shuffle = true;
  // Weight positives by min(negatives/positives, 10); off unless requested.
  bool balance_classes = false;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr double kMaxPositiveWeight = 10.0;

struct Example {
  FeatureVector features;
  bool label = false;
};

// One binary decision: sigma(w.x + b) >= threshold.
class LinearModel {
 public:
  using Weight = std::pair<FeatureId, double>;

  LinearModel() = default;
  LinearModel(std::vector<Weight> weights, double bias, double threshold = kDefaultThreshold,
              TrainConfig config = {});

  // Model whose score is ~0 (or ~1) on every input.
  static LinearModel constant(bool value, TrainConfig config = {});

  double margin(const FeatureVector& x) const;
  double score(const FeatureVector& x) const;
  bool predict(const FeatureVector& x) const { return score(x) >= threshold_; }

  const std::vector<Weight>& weights() const noexcept { return weights_; }
  double weight(FeatureId id) const;
  double bias() const noexcept { return bias_; }
  double threshold() const noexcept { return threshold_; }
  const TrainConfig& config() const noexcept { return config_; }

  bool operator==(const LinearModel&) const = default;

 private:
  std::vector<Weight> weights_;  // sorted by id, non-zero
  double bias_ = 0.0;
  double threshold_ = kDefaultThreshold;
  TrainConfig config_;
};

double sigmoid(double z);

// Logistic-loss SGD with L2 on the weights (not the bias). Step size at
// update t is learning_rate / (1 + learning_rate * l2 * t). Deterministic for
// a fixed config and example order. Throws ValidationError when empty.
LinearModel train_binary(std::span<const Example> examples, const TrainConfig& config);

// Dense parameterisation over an explicit feature list, used to state the
// training objective exactly:
//   L(w, b) = (1/m) sum_i c_i log(1 + exp(-y_i (w.x_i + b))) + (l2/2) |w|^2
// with y_i in {-1, +1} and c_i the class weight of example i.
struct DenseParams {
  std::vector<FeatureId> ids;   // sorted
  std::vector<double> weights;  // aligned with ids
  double bias = 0.0;
};

double objective(const DenseParams& params, std::span<const Example> examples, const TrainConfig& config);

// Analytic gradient of `objective`: returns (dL/dw aligned with ids, dL/db).
std::pair<std::vector<double>, double> objective_gradient(const DenseParams& params,
                                                          std::span<const Example> examples,
                                                          const TrainConfig& config);

// Dense view of a trained model over `ids` (weights of other ids dropped).
DenseParams to_dense(const LinearModel& model, std::vector<FeatureId> ids);

// Sorted distinct feature ids used by the examples.
std::vector<FeatureId> feature_ids(std::span<const Example> examples);

// Positive-class weight implied by the config for this data (1 when off).
double positive_class_weight(std::span<const Example> examples, const TrainConfig& config);

}  // namespace aspectmill
