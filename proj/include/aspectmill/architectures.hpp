#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aspectmill/corpus.hpp"
#include "aspectmill/features.hpp"
#include "aspectmill/learner.hpp"
#include "aspectmill/taxonomy.hpp"

namespace aspectmill {

enum class Architecture { Flat, Hierarchical, Propagation, AspectPolarity };

// CLI spellings: flat, hier, prop, aspect-polarity.
std::string_view to_string(Architecture arch);
Architecture architecture_from_string(std::string_view s);

// Token radius around trigger matches; std::nullopt means the whole sentence.
using Window = std::optional<std::size_t>;

inline constexpr std::size_t kDefaultTriggerTerms = 10;

struct PolarityModels {
  LinearModel polar;     // polar vs neutral
  LinearModel positive;
  LinearModel negative;

  bool operator==(const PolarityModels&) const = default;
};

struct ModelBundle {
  Architecture architecture = Architecture::Flat;
  std::shared_ptr<const Taxonomy> taxonomy;
  Vocabulary vocabulary;
  LexiconSet lexicons;
  std::map<std::string, LinearModel> category_models;
  std::map<std::string, LinearModel> aspect_models;
  PolarityModels polarity;
  std::map<std::string, std::vector<std::string>> trigger_terms;  // AspectPolarity only
  std::size_t trigger_k = kDefaultTriggerTerms;
  Window window;
  TrainConfig train_config;

  // Lexicon name -> digest.
  std::map<std::string, std::string> lexicon_digests() const;

  bool operator==(const ModelBundle& other) const;
};

// Throws InvariantViolation if model key sets disagree with the taxonomy.
void validate_bundle(const ModelBundle& bundle);

// ---------------------------------------------------------------------------
// Training targets

struct SentenceTargets {
  std::vector<bool> categories;  // taxonomy category order
  std::vector<bool> aspects;     // taxonomy aspect order
  bool polar = false;            // any annotation with score != 0 (99 counts)
  bool positive = false;         // any score > 0 or 99
  bool negative = false;         // any score < 0 or 99
};

SentenceTargets sentence_targets(const Sentence& sentence, const Taxonomy& taxonomy);
std::vector<SentenceTargets> build_targets(const AnnotatedCorpus& corpus);

// ---------------------------------------------------------------------------
// Training

struct TrainingOptions {
  TrainConfig config;
  std::size_t trigger_k = kDefaultTriggerTerms;
  Window window;  // AspectPolarity only
};

struct LabelTrainingSummary {
  std::string label;  // e.g. "category/Tuition", "aspect/Scholarships", "polarity/polar"
  std::size_t examples = 0;
  std::size_t positives = 0;
  double training_accuracy = 0.0;
  bool constant = false;  // no training data; constant-false model
};

using TrainingLog = std::vector<LabelTrainingSummary>;

// Tokenized corpus with its fitted vocabulary and both feature profiles.
struct TrainingData {
  std::shared_ptr<const Taxonomy> taxonomy;
  Vocabulary vocabulary;
  LexiconSet lexicons;
  std::vector<Tokens> tokens;
  std::vector<FeatureVector> aspect_features;
  std::vector<FeatureVector> polarity_features;
  std::vector<SentenceTargets> targets;
};

TrainingData prepare_training_data(const AnnotatedCorpus& corpus, LexiconSet lexicons);

// Seed for one label's learner: config seed xor a hash of the label key, so
// results do not depend on training order.
std::uint64_t label_seed(std::uint64_t seed, std::string_view label_key);

// Building blocks shared by the four structures.
std::map<std::string, LinearModel> train_category_models(const TrainingData& data, const TrainConfig& config,
                                                         TrainingLog* log = nullptr);
std::map<std::string, LinearModel> train_flat_aspect_models(const TrainingData& data, const TrainConfig& config,
                                                            TrainingLog* log = nullptr);
std::map<std::string, LinearModel> train_gated_aspect_models(const TrainingData& data, const TrainConfig& config,
                                                             TrainingLog* log = nullptr);
std::map<std::string, LinearModel> train_propagation_aspect_models(
    const TrainingData& data, const std::map<std::string, LinearModel>& category_models, const TrainConfig& config,
    TrainingLog* log = nullptr);
// gated: positive/negative detectors see only gold-polar sentences.
PolarityModels train_polarity_models(const TrainingData& data, const TrainConfig& config, bool gated,
                                     TrainingLog* log = nullptr);

ModelBundle train_flat(const AnnotatedCorpus& corpus, const LexiconSet& lexicons, const TrainingOptions& options,
                       TrainingLog* log = nullptr);
ModelBundle train_hierarchical(const AnnotatedCorpus& corpus, const LexiconSet& lexicons,
                               const TrainingOptions& options, TrainingLog* log = nullptr);
ModelBundle train_propagation(const AnnotatedCorpus& corpus, const LexiconSet& lexicons,
                              const TrainingOptions& options, TrainingLog* log = nullptr);
ModelBundle train_aspect_polarity(const AnnotatedCorpus& corpus, const LexiconSet& lexicons,
                                  const TrainingOptions& options, TrainingLog* log = nullptr);
ModelBundle train_bundle(Architecture arch, const AnnotatedCorpus& corpus, const LexiconSet& lexicons,
                         const TrainingOptions& options, TrainingLog* log = nullptr);

// ---------------------------------------------------------------------------
// Prediction

using AspectPolarities = std::map<std::string, Polarity>;

struct SentencePrediction {
  std::set<std::string> categories;
  std::set<std::string> aspects;
  // Sentence-level polarity (Flat/Hierarchical/Propagation) or one polarity
  // per predicted aspect (AspectPolarity). Never Mixed.
  std::variant<Polarity, AspectPolarities> polarity = Polarity::Neutral;

  bool operator==(const SentencePrediction&) const = default;
};

struct PolarityDecision {
  Polarity label = Polarity::Neutral;
  double polar_score = 0.0;
  std::optional<double> positive_score;  // unset when the cascade stopped at neutral
  std::optional<double> negative_score;
};

// Polar-vs-neutral first; a neutral verdict yields Neutral. Otherwise the
// positive/negative detectors decide; if both or neither fire, the higher
// raw score wins and an exact tie goes to Positive. With `gated` the
// positive/negative detectors are not evaluated on neutral sentences.
PolarityDecision decide_polarity(const PolarityModels& models, const FeatureVector& features, bool gated);

// Category-indicator features appended for the propagation structure.
FeatureVector propagation_features(const FeatureVector& text_features, const Taxonomy& taxonomy,
                                   const std::set<std::string>& predicted_categories);

SentencePrediction predict_flat(const ModelBundle& bundle, std::span<const std::string> tokens);
SentencePrediction predict_hierarchical(const ModelBundle& bundle, std::span<const std::string> tokens);
SentencePrediction predict_propagation(const ModelBundle& bundle, std::span<const std::string> tokens);
SentencePrediction predict_aspect_polarity(const ModelBundle& bundle, std::span<const std::string> tokens);

// Dispatches on bundle.architecture.
SentencePrediction predict(const ModelBundle& bundle, std::span<const std::string> tokens);
SentencePrediction predict(const ModelBundle& bundle, std::string_view text);

// Token positions covered by the union of windows around trigger matches;
// empty when no trigger occurs. Window nullopt covers every token.
std::vector<std::size_t> window_positions(std::span<const std::string> tokens,
                                          const std::vector<std::string>& triggers, Window window);

// Aspect-specific polarity of `aspect` in the sentence, whether or not the
// aspect detector fires; falls back to the whole sentence without a match.
Polarity aspect_polarity(const ModelBundle& bundle, std::span<const std::string> tokens, const std::string& aspect);

// Owning categories of the given aspects. Throws UnknownAspectError.
std::set<std::string> infer_categories(const std::set<std::string>& aspects, const Taxonomy& taxonomy);

// Predicted aspects whose category was not predicted.
std::vector<std::string> gating_violations(const SentencePrediction& prediction, const Taxonomy& taxonomy);

// ---------------------------------------------------------------------------
// Trigger terms

// Mutual information (natural log) between two binary variables from the
// 2x2 table of counts, each cell smoothed by +1.
double smoothed_mutual_information(std::size_t both, std::size_t term_only, std::size_t label_only,
                                   std::size_t neither);

struct ScoredTerm {
  std::string term;
  double mi = 0.0;
};

// Per aspect, the k unigrams with the highest MI between term presence and
// aspect presence over the corpus sentences; ties broken by term.
std::map<std::string, std::vector<ScoredTerm>> rank_trigger_terms(const AnnotatedCorpus& corpus, std::size_t k);
std::map<std::string, std::vector<std::string>> select_trigger_terms(const AnnotatedCorpus& corpus, std::size_t k);

// ---------------------------------------------------------------------------
// Serialization

inline constexpr int kBundleFormatVersion = 1;

std::string serialize_bundle(const ModelBundle& bundle);
ModelBundle parse_bundle(std::string_view text, const std::string& source = "<bundle>");
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace aspectmill
