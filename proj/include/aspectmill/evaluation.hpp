#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aspectmill/architectures.hpp"
#include "aspectmill/corpus.hpp"

namespace aspectmill {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

// Per-sentence membership flags; throws ValidationError on length mismatch.
ConfusionCounts count_label(const std::vector<bool>& gold, const std::vector<bool>& predicted);
// Sentence index sets over `sentences` sentences; indices must be < sentences.
ConfusionCounts count_label(const std::set<std::size_t>& gold, const std::set<std::size_t>& predicted,
                            std::size_t sentences);

// Unset members are 0/0. F1 is 0 when P and R are both defined and both 0.
struct Prf {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;

  bool fully_defined() const { return precision && recall && f1; }
};

Prf prf(const ConfusionCounts& counts);
double f1_from(double precision, double recall);

// Averages with undefined values counted as 0; `undefined` counts the
// labels (or, for micro, the pooled result) that had an undefined value.
struct Averaged {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t undefined = 0;
};

Averaged macro_average(std::span<const Prf> per_label);
Averaged micro_average(std::span<const ConfusionCounts> per_label);

enum class LabelGroup { Categories, InferredCategories, Aspects, Polarity };
std::string_view to_string(LabelGroup group);

enum class ScoringUnit { Sentence, SentenceAspect };

struct LabelMetrics {
  std::string label;
  ConfusionCounts counts;
  Prf metrics;
};

struct MetricsReport {
  LabelGroup group = LabelGroup::Aspects;
  ScoringUnit unit = ScoringUnit::Sentence;
  std::vector<LabelMetrics> labels;
  Averaged macro;
  Averaged micro;

  std::size_t warnings() const noexcept { return macro.undefined + micro.undefined; }
};

inline constexpr std::string_view kPolarityLabels[] = {"Positive", "Negative", "Neutral", "Polar"};

struct EvaluationInput {
  std::vector<SentencePrediction> predictions;  // one per corpus sentence, corpus order
  bool include_inferred_categories = true;
  // Aspect-specific scoring: per sentence, the predicted polarity of every
  // gold-annotated aspect. When set, polarity is scored per (sentence, aspect).
  std::optional<std::vector<AspectPolarities>> gold_aspect_polarities;
};

// Reports in order: categories, inferred categories (if requested), aspects, polarity.
std::vector<MetricsReport> evaluate_predictions(const AnnotatedCorpus& gold, const EvaluationInput& input);

// Predicts every test sentence with the bundle and scores it. Flat bundles
// get no inferred-category report; AspectPolarity bundles are scored per
// (sentence, aspect) pair. Throws ValidationError on taxonomy mismatch.
std::vector<MetricsReport> evaluate_bundle(const ModelBundle& bundle, const AnnotatedCorpus& test);

enum class ReportFormat { Table, Machine };

std::string format_reports(const std::vector<MetricsReport>& reports, Architecture arch, ReportFormat format);

}  // namespace aspectmill
