#include "aspectmill/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aspectmill/error.hpp"
#include "aspectmill/shuffle.hpp"

namespace aspectmill {

namespace {

constexpr double kConstantMargin = 40.0;
constexpr double kMinScale = 1e-9;

// log(1 + exp(a)) without overflow.
double softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }

struct SparseRow {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
};

std::vector<SparseRow> densify(std::span<const Example> examples, const std::vector<FeatureId>& ids) {
  std::vector<SparseRow> rows(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    for (const auto& [id, value] : examples[i].features) {
      auto it = std::lower_bound(ids.begin(), ids.end(), id);
      if (it == ids.end() || *it != id) continue;
      rows[i].index.push_back(static_cast<std::uint32_t>(it - ids.begin()));
      rows[i].value.push_back(value);
    }
  }
  return rows;
}

double dot(const SparseRow& row, const std::vector<double>& w) {
  double z = 0.0;
  for (std::size_t k = 0; k < row.index.size(); ++k) z += w[row.index[k]] * row.value[k];
  return z;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be a positive integer");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be positive");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ValidationError("l2 must be non-negative");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

LinearModel::LinearModel(std::vector<Weight> weights, double bias, double threshold, TrainConfig config)
    : weights_(std::move(weights)), bias_(bias), threshold_(threshold), config_(config) {
  if (!(threshold_ > 0.0 && threshold_ < 1.0)) throw ValidationError("decision threshold must lie in (0,1)");
  if (!std::isfinite(bias_)) throw ValidationError("non-finite bias");
  std::sort(weights_.begin(), weights_.end());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i].second)) throw ValidationError("non-finite weight");
    if (i && weights_[i - 1].first == weights_[i].first) throw ValidationError("duplicate weight id");
  }
  std::erase_if(weights_, [](const Weight& w) { return w.second == 0.0; });
}

LinearModel LinearModel::constant(bool value, TrainConfig config) {
  return LinearModel({}, value ? kConstantMargin : -kConstantMargin, kDefaultThreshold, config);
}

double LinearModel::margin(const FeatureVector& x) const {
  double z = bias_;
  auto w = weights_.begin();
  for (const auto& [id, value] : x) {
    while (w != weights_.end() && w->first < id) ++w;
    if (w == weights_.end()) break;
    if (w->first == id) z += w->second * value;
  }
  return z;
}

double LinearModel::score(const FeatureVector& x) const { return sigmoid(margin(x)); }

double LinearModel::weight(FeatureId id) const {
  auto it = std::lower_bound(weights_.begin(), weights_.end(), id,
                             [](const Weight& w, FeatureId k) { return w.first < k; });
  return (it != weights_.end() && it->first == id) ? it->second : 0.0;
}

std::vector<FeatureId> feature_ids(std::span<const Example> examples) {
  std::vector<FeatureId> ids;
  for (const auto& ex : examples)
    for (const auto& [id, value] : ex.features) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

double positive_class_weight(std::span<const Example> examples, const TrainConfig& config) {
  if (!config.balance_classes) return 1.0;
  auto positives = static_cast<double>(std::count_if(examples.begin(), examples.end(), [](const Example& e) { return e.label; }));
  auto negatives = static_cast<double>(examples.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) return 1.0;
  return std::clamp(negatives / positives, 1.0, kMaxPositiveWeight);
}

LinearModel train_binary(std::span<const Example> examples, const TrainConfig& config) {
  config.validate();
  if (examples.empty()) throw ValidationError("cannot train a classifier on an empty training set");

  const auto ids = feature_ids(examples);
  const auto rows = densify(examples, ids);
  const double pos_weight = positive_class_weight(examples, config);

  std::vector<double> v(ids.size(), 0.0);  // w = scale * v
  double scale = 1.0;
  double bias = 0.0;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);
  std::uint64_t t = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) fisher_yates(std::span(order), rng);
    for (auto i : order) {
      const auto& row = rows[i];
      const bool y = examples[i].label;
      const double c = y ? pos_weight : 1.0;
      const double eta = config.learning_rate / (1.0 + config.learning_rate * config.l2 * static_cast<double>(t));
      const double z = scale * dot(row, v) + bias;
      const double g = c * (sigmoid(z) - (y ? 1.0 : 0.0));

      scale *= 1.0 - eta * config.l2;
      if (scale < kMinScale) {
        for (auto& x : v) x *= scale;
        scale = 1.0;
      }
      const double step = eta * g / scale;
      for (std::size_t k = 0; k < row.index.size(); ++k) v[row.index[k]] -= step * row.value[k];
      bias -= eta * g;
      ++t;
    }
  }

  std::vector<LinearModel::Weight> weights;
  for (std::size_t j = 0; j < ids.size(); ++j)
    if (double w = scale * v[j]; w != 0.0) weights.emplace_back(ids[j], w);
  return LinearModel(std::move(weights), bias, kDefaultThreshold, config);
}

double objective(const DenseParams& params, std::span<const Example> examples, const TrainConfig& config) {
  const auto rows = densify(examples, params.ids);
  const double pos_weight = positive_class_weight(examples, config);
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool y = examples[i].label;
    const double z = dot(rows[i], params.weights) + params.bias;
    loss += (y ? pos_weight : 1.0) * softplus(y ? -z : z);
  }
  loss /= static_cast<double>(rows.size());
  double norm2 = 0.0;
  for (double w : params.weights) norm2 += w * w;
  return loss + 0.5 * config.l2 * norm2;
}

std::pair<std::vector<double>, double> objective_gradient(const DenseParams& params,
                                                          std::span<const Example> examples,
                                                          const TrainConfig& config) {
  const auto rows = densify(examples, params.ids);
  const double pos_weight = positive_class_weight(examples, config);
  const double m = static_cast<double>(rows.size());
  std::vector<double> grad(params.weights.size(), 0.0);
  double grad_bias = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool y = examples[i].label;
    const double z = dot(rows[i], params.weights) + params.bias;
    const double g = (y ? pos_weight : 1.0) * (sigmoid(z) - (y ? 1.0 : 0.0)) / m;
    for (std::size_t k = 0; k < rows[i].index.size(); ++k) grad[rows[i].index[k]] += g * rows[i].value[k];
    grad_bias += g;
  }
  for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += config.l2 * params.weights[j];
  return {std::move(grad), grad_bias};
}

DenseParams to_dense(const LinearModel& model, std::vector<FeatureId> ids) {
  DenseParams p;
  p.ids = std::move(ids);
  p.weights.reserve(p.ids.size());
  for (auto id : p.ids) p.weights.push_back(model.weight(id));
  p.bias = model.bias();
  return p;
}

}  // namespace aspectmill
