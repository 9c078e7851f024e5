#include "aspectmill/architectures.hpp"

#include <algorithm>

#include "aspectmill/error.hpp"
#include "text_util.hpp"

namespace aspectmill {

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::Flat: return "flat";
    case Architecture::Hierarchical: return "hier";
    case Architecture::Propagation: return "prop";
    case Architecture::AspectPolarity: return "aspect-polarity";
  }
  return "?";
}

Architecture architecture_from_string(std::string_view s) {
  if (s == "flat") return Architecture::Flat;
  if (s == "hier") return Architecture::Hierarchical;
  if (s == "prop") return Architecture::Propagation;
  if (s == "aspect-polarity") return Architecture::AspectPolarity;
  throw ValidationError("unknown architecture '" + std::string(s) + "' (expected flat|hier|prop|aspect-polarity)");
}

std::map<std::string, std::string> ModelBundle::lexicon_digests() const {
  std::map<std::string, std::string> out;
  for (const auto& lex : lexicons.lexicons) out[lex.name] = lex.digest();
  return out;
}

bool ModelBundle::operator==(const ModelBundle& o) const {
  const bool same_taxonomy = taxonomy == o.taxonomy || (taxonomy && o.taxonomy && *taxonomy == *o.taxonomy);
  return same_taxonomy && architecture == o.architecture && vocabulary == o.vocabulary && lexicons == o.lexicons &&
         category_models == o.category_models && aspect_models == o.aspect_models && polarity == o.polarity &&
         trigger_terms == o.trigger_terms && trigger_k == o.trigger_k && window == o.window &&
         train_config == o.train_config;
}

void validate_bundle(const ModelBundle& bundle) {
  if (!bundle.taxonomy) throw InvariantViolation("bundle without taxonomy");
  const auto& taxonomy = *bundle.taxonomy;
  if (bundle.category_models.size() != taxonomy.category_count())
    throw InvariantViolation("category model set does not match the taxonomy");
  for (const auto& cat : taxonomy.categories())
    if (!bundle.category_models.count(cat.name)) throw InvariantViolation("missing category model '" + cat.name + "'");
  if (bundle.aspect_models.size() != taxonomy.aspect_count())
    throw InvariantViolation("aspect model set does not match the taxonomy");
  for (const auto& aspect : taxonomy.aspects())
    if (!bundle.aspect_models.count(aspect)) throw InvariantViolation("missing aspect model '" + aspect + "'");
  if (bundle.architecture == Architecture::AspectPolarity) {
    for (const auto& aspect : taxonomy.aspects())
      if (!bundle.trigger_terms.count(aspect)) throw InvariantViolation("missing trigger terms for '" + aspect + "'");
  }
}

// ---------------------------------------------------------------------------
// Targets

SentenceTargets sentence_targets(const Sentence& sentence, const Taxonomy& taxonomy) {
  SentenceTargets t;
  t.categories.assign(taxonomy.category_count(), false);
  t.aspects.assign(taxonomy.aspect_count(), false);
  for (const auto& a : sentence.annotations) {
    auto idx = taxonomy.aspect_index(a.aspect);
    if (!idx) throw UnknownAspectError(a.aspect);
    t.aspects[*idx] = true;
    t.categories[taxonomy.category_of_index(*idx)] = true;
    switch (a.polarity()) {
      case Polarity::Positive: t.positive = true; t.polar = true; break;
      case Polarity::Negative: t.negative = true; t.polar = true; break;
      case Polarity::Mixed: t.positive = t.negative = t.polar = true; break;
      case Polarity::Neutral: break;
    }
  }
  return t;
}

std::vector<SentenceTargets> build_targets(const AnnotatedCorpus& corpus) {
  std::vector<SentenceTargets> out;
  corpus.for_each_sentence(
      [&](const Review&, const Sentence& s) { out.push_back(sentence_targets(s, *corpus.taxonomy)); });
  return out;
}

// ---------------------------------------------------------------------------
// Training

TrainingData prepare_training_data(const AnnotatedCorpus& corpus, LexiconSet lexicons) {
  if (!corpus.taxonomy) throw Error("corpus without taxonomy");
  TrainingData data;
  data.taxonomy = corpus.taxonomy;
  data.lexicons = std::move(lexicons);
  corpus.for_each_sentence([&](const Review&, const Sentence& s) {
    data.tokens.push_back(tokenize(s.text));
    data.targets.push_back(sentence_targets(s, *corpus.taxonomy));
  });
  data.vocabulary = fit_vocabulary(data.tokens);
  data.aspect_features.reserve(data.tokens.size());
  data.polarity_features.reserve(data.tokens.size());
  for (const auto& tokens : data.tokens) {
    data.aspect_features.push_back(assemble(tokens, data.vocabulary, data.lexicons, FeatureProfile::Aspect));
    data.polarity_features.push_back(assemble(tokens, data.vocabulary, data.lexicons, FeatureProfile::Polarity));
  }
  return data;
}

std::uint64_t label_seed(std::uint64_t seed, std::string_view label_key) { return seed ^ detail::fnv1a(label_key); }

namespace {

LinearModel train_label(const std::string& key, const std::vector<Example>& examples, const TrainConfig& config,
                        TrainingLog* log) {
  LabelTrainingSummary summary;
  summary.label = key;
  summary.examples = examples.size();
  summary.positives = static_cast<std::size_t>(
      std::count_if(examples.begin(), examples.end(), [](const Example& e) { return e.label; }));
  if (examples.empty()) {
    summary.constant = true;
    if (log) log->push_back(summary);
    return LinearModel::constant(false, config);
  }
  TrainConfig label_config = config;
  label_config.seed = label_seed(config.seed, key);
  auto model = train_binary(examples, label_config);
  std::size_t correct = 0;
  for (const auto& e : examples) correct += model.predict(e.features) == e.label;
  summary.training_accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  if (log) log->push_back(summary);
  return model;
}

template <typename Select, typename Label>
std::vector<Example> collect(const std::vector<FeatureVector>& features, Select select, Label label) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (select(i)) out.push_back(Example{features[i], label(i)});
  return out;
}

const auto kAll = [](std::size_t) { return true; };

std::string category_key(const std::string& name) { return "category/" + name; }
std::string aspect_key(const std::string& name) { return "aspect/" + name; }

}  // namespace

std::map<std::string, LinearModel> train_category_models(const TrainingData& data, const TrainConfig& config,
                                                         TrainingLog* log) {
  std::map<std::string, LinearModel> models;
  const auto& cats = data.taxonomy->categories();
  for (std::size_t c = 0; c < cats.size(); ++c) {
    auto examples = collect(data.aspect_features, kAll, [&](std::size_t i) { return data.targets[i].categories[c]; });
    models.emplace(cats[c].name, train_label(category_key(cats[c].name), examples, config, log));
  }
  return models;
}

std::map<std::string, LinearModel> train_flat_aspect_models(const TrainingData& data, const TrainConfig& config,
                                                            TrainingLog* log) {
  std::map<std::string, LinearModel> models;
  const auto& aspects = data.taxonomy->aspects();
  for (std::size_t a = 0; a < aspects.size(); ++a) {
    auto examples = collect(data.aspect_features, kAll, [&](std::size_t i) { return data.targets[i].aspects[a]; });
    models.emplace(aspects[a], train_label(aspect_key(aspects[a]), examples, config, log));
  }
  return models;
}

std::map<std::string, LinearModel> train_gated_aspect_models(const TrainingData& data, const TrainConfig& config,
                                                             TrainingLog* log) {
  std::map<std::string, LinearModel> models;
  const auto& aspects = data.taxonomy->aspects();
  for (std::size_t a = 0; a < aspects.size(); ++a) {
    const auto c = data.taxonomy->category_of_index(a);
    auto examples = collect(
        data.aspect_features, [&](std::size_t i) { return data.targets[i].categories[c]; },
        [&](std::size_t i) { return data.targets[i].aspects[a]; });
    models.emplace(aspects[a], train_label(aspect_key(aspects[a]), examples, config, log));
  }
  return models;
}

std::map<std::string, LinearModel> train_propagation_aspect_models(
    const TrainingData& data, const std::map<std::string, LinearModel>& category_models, const TrainConfig& config,
    TrainingLog* log) {
  const auto& taxonomy = *data.taxonomy;
  std::vector<FeatureVector> augmented;
  augmented.reserve(data.aspect_features.size());
  for (const auto& fv : data.aspect_features) {
    std::set<std::string> fired;
    for (const auto& cat : taxonomy.categories()) {
      auto it = category_models.find(cat.name);
      if (it != category_models.end() && it->second.predict(fv)) fired.insert(cat.name);
    }
    augmented.push_back(propagation_features(fv, taxonomy, fired));
  }
  std::map<std::string, LinearModel> models;
  const auto& aspects = taxonomy.aspects();
  for (std::size_t a = 0; a < aspects.size(); ++a) {
    auto examples = collect(augmented, kAll, [&](std::size_t i) { return data.targets[i].aspects[a]; });
    models.emplace(aspects[a], train_label(aspect_key(aspects[a]), examples, config, log));
  }
  return models;
}

PolarityModels train_polarity_models(const TrainingData& data, const TrainConfig& config, bool gated,
                                     TrainingLog* log) {
  const auto& f = data.polarity_features;
  const auto& t = data.targets;
  auto scope = [&](std::size_t i) { return !gated || t[i].polar; };
  PolarityModels models;
  models.polar = train_label("polarity/polar", collect(f, kAll, [&](std::size_t i) { return t[i].polar; }), config, log);
  models.positive =
      train_label("polarity/positive", collect(f, scope, [&](std::size_t i) { return t[i].positive; }), config, log);
  models.negative =
      train_label("polarity/negative", collect(f, scope, [&](std::size_t i) { return t[i].negative; }), config, log);
  return models;
}

namespace {

ModelBundle bundle_shell(Architecture arch, const TrainingData& data, const TrainingOptions& options) {
  ModelBundle bundle;
  bundle.architecture = arch;
  bundle.taxonomy = data.taxonomy;
  bundle.vocabulary = data.vocabulary;
  bundle.lexicons = data.lexicons;
  bundle.train_config = options.config;
  bundle.trigger_k = options.trigger_k;
  return bundle;
}

}  // namespace

ModelBundle train_flat(const AnnotatedCorpus& corpus, const LexiconSet& lexicons, const TrainingOptions& options,
                       TrainingLog* log) {
  options.config.validate();
  auto data = prepare_training_data(corpus, lexicons);
  auto bundle = bundle_shell(Architecture::Flat, data, options);
  bundle.category_models = train_category_models(data, options.config, log);
  bundle.aspect_models = train_flat_aspect_models(data, options.config, log);
  bundle.polarity = train_polarity_models(data, options.config, /*gated=*/false, log);
  return bundle;
}

ModelBundle train_hierarchical(const AnnotatedCorpus& corpus, const LexiconSet& lexicons,
                               const TrainingOptions& options, TrainingLog* log) {
  options.config.validate();
  auto data = prepare_training_data(corpus, lexicons);
  auto bundle = bundle_shell(Architecture::Hierarchical, data, options);
  bundle.category_models = train_category_models(data, options.config, log);
  bundle.aspect_models = train_gated_aspect_models(data, options.config, log);
  bundle.polarity = train_polarity_models(data, options.config, /*gated=*/true, log);
  return bundle;
}

ModelBundle train_propagation(const AnnotatedCorpus& corpus, const LexiconSet& lexicons,
                              const TrainingOptions& options, TrainingLog* log) {
  options.config.validate();
  auto data = prepare_training_data(corpus, lexicons);
  auto bundle = bundle_shell(Architecture::Propagation, data, options);
  bundle.category_models = train_category_models(data, options.config, log);
  bundle.aspect_models = train_propagation_aspect_models(data, bundle.category_models, options.config, log);
  bundle.polarity = train_polarity_models(data, options.config, /*gated=*/true, log);
  return bundle;
}

ModelBundle train_aspect_polarity(const AnnotatedCorpus& corpus, const LexiconSet& lexicons,
                                  const TrainingOptions& options, TrainingLog* log) {
  options.config.validate();
  if (options.trigger_k == 0) throw ValidationError("trigger term count k must be at least 1");
  auto data = prepare_training_data(corpus, lexicons);
  auto bundle = bundle_shell(Architecture::AspectPolarity, data, options);
  bundle.category_models = train_category_models(data, options.config, log);
  bundle.aspect_models = train_gated_aspect_models(data, options.config, log);
  bundle.polarity = train_polarity_models(data, options.config, /*gated=*/true, log);
  bundle.trigger_terms = select_trigger_terms(corpus, options.trigger_k);
  bundle.window = options.window;
  return bundle;
}

ModelBundle train_bundle(Architecture arch, const AnnotatedCorpus& corpus, const LexiconSet& lexicons,
                         const TrainingOptions& options, TrainingLog* log) {
  switch (arch) {
    case Architecture::Flat: return train_flat(corpus, lexicons, options, log);
    case Architecture::Hierarchical: return train_hierarchical(corpus, lexicons, options, log);
    case Architecture::Propagation: return train_propagation(corpus, lexicons, options, log);
    case Architecture::AspectPolarity: return train_aspect_polarity(corpus, lexicons, options, log);
  }
  throw InvariantViolation("unhandled architecture");
}

// ---------------------------------------------------------------------------
// Prediction

PolarityDecision decide_polarity(const PolarityModels& models, const FeatureVector& features, bool gated) {
  PolarityDecision d;
  d.polar_score = models.polar.score(features);
  const bool polar = d.polar_score >= models.polar.threshold();
  if (!polar && gated) return d;
  const double pos = models.positive.score(features);
  const double neg = models.negative.score(features);
  d.positive_score = pos;
  d.negative_score = neg;
  if (!polar) return d;
  const bool pos_fires = pos >= models.positive.threshold();
  const bool neg_fires = neg >= models.negative.threshold();
  if (pos_fires != neg_fires) d.label = pos_fires ? Polarity::Positive : Polarity::Negative;
  else d.label = pos >= neg ? Polarity::Positive : Polarity::Negative;
  return d;
}

FeatureVector propagation_features(const FeatureVector& text_features, const Taxonomy& taxonomy,
                                   const std::set<std::string>& predicted_categories) {
  FeatureVector cats;
  for (std::size_t c = 0; c < taxonomy.category_count(); ++c)
    if (predicted_categories.count(taxonomy.categories()[c].name))
      cats.set(make_feature_id(FeatureFamily::Category, c), 1.0);
  FeatureVector out = text_features;
  out.merge_disjoint(cats);
  return out;
}

namespace {

bool fires(const std::map<std::string, LinearModel>& models, const std::string& name, const FeatureVector& fv) {
  auto it = models.find(name);
  return it != models.end() && it->second.predict(fv);
}

struct SentenceFeatures {
  FeatureVector aspect;
  FeatureVector polarity;
};

SentenceFeatures extract(const ModelBundle& bundle, std::span<const std::string> tokens) {
  return {assemble(tokens, bundle.vocabulary, bundle.lexicons, FeatureProfile::Aspect),
          assemble(tokens, bundle.vocabulary, bundle.lexicons, FeatureProfile::Polarity)};
}

std::set<std::string> detect_categories(const ModelBundle& bundle, const FeatureVector& fv) {
  std::set<std::string> out;
  for (const auto& cat : bundle.taxonomy->categories())
    if (fires(bundle.category_models, cat.name, fv)) out.insert(cat.name);
  return out;
}

void require(const ModelBundle& bundle, Architecture arch) {
  if (bundle.architecture != arch)
    throw ValidationError("bundle architecture is '" + std::string(to_string(bundle.architecture)) + "', expected '" +
                          std::string(to_string(arch)) + "'");
  if (!bundle.taxonomy) throw InvariantViolation("bundle without taxonomy");
}

std::set<std::string> gated_aspects(const ModelBundle& bundle, const std::set<std::string>& categories,
                                    const FeatureVector& fv) {
  std::set<std::string> out;
  for (const auto& cat : bundle.taxonomy->categories()) {
    if (!categories.count(cat.name)) continue;
    for (const auto& aspect : cat.aspects)
      if (fires(bundle.aspect_models, aspect, fv)) out.insert(aspect);
  }
  return out;
}

}  // namespace

SentencePrediction predict_flat(const ModelBundle& bundle, std::span<const std::string> tokens) {
  require(bundle, Architecture::Flat);
  auto f = extract(bundle, tokens);
  SentencePrediction p;
  p.categories = detect_categories(bundle, f.aspect);
  for (const auto& aspect : bundle.taxonomy->aspects())
    if (fires(bundle.aspect_models, aspect, f.aspect)) p.aspects.insert(aspect);
  p.polarity = decide_polarity(bundle.polarity, f.polarity, /*gated=*/false).label;
  return p;
}

SentencePrediction predict_hierarchical(const ModelBundle& bundle, std::span<const std::string> tokens) {
  require(bundle, Architecture::Hierarchical);
  auto f = extract(bundle, tokens);
  SentencePrediction p;
  p.categories = detect_categories(bundle, f.aspect);
  p.aspects = gated_aspects(bundle, p.categories, f.aspect);
  p.polarity = decide_polarity(bundle.polarity, f.polarity, /*gated=*/true).label;
  return p;
}

SentencePrediction predict_propagation(const ModelBundle& bundle, std::span<const std::string> tokens) {
  require(bundle, Architecture::Propagation);
  auto f = extract(bundle, tokens);
  SentencePrediction p;
  p.categories = detect_categories(bundle, f.aspect);
  auto augmented = propagation_features(f.aspect, *bundle.taxonomy, p.categories);
  for (const auto& aspect : bundle.taxonomy->aspects())
    if (fires(bundle.aspect_models, aspect, augmented)) p.aspects.insert(aspect);
  p.polarity = decide_polarity(bundle.polarity, f.polarity, /*gated=*/true).label;
  return p;
}

std::vector<std::size_t> window_positions(std::span<const std::string> tokens,
                                          const std::vector<std::string>& triggers, Window window) {
  std::vector<std::size_t> positions;
  if (!window) {
    positions.resize(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) positions[i] = i;
    return positions;
  }
  std::vector<bool> covered(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (std::find(triggers.begin(), triggers.end(), tokens[i]) == triggers.end()) continue;
    const std::size_t lo = i >= *window ? i - *window : 0;
    const std::size_t hi = std::min(tokens.size() - 1, i + std::min(*window, tokens.size()));
    for (std::size_t j = lo; j <= hi; ++j) covered[j] = true;
  }
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (covered[i]) positions.push_back(i);
  return positions;
}

Polarity aspect_polarity(const ModelBundle& bundle, std::span<const std::string> tokens, const std::string& aspect) {
  static const std::vector<std::string> kNoTriggers;
  auto it = bundle.trigger_terms.find(aspect);
  const auto& triggers = it == bundle.trigger_terms.end() ? kNoTriggers : it->second;
  auto positions = window_positions(tokens, triggers, bundle.window);
  Tokens context;
  if (positions.empty()) {
    context.assign(tokens.begin(), tokens.end());
  } else {
    for (auto pos : positions) context.push_back(tokens[pos]);
  }
  auto fv = assemble(context, bundle.vocabulary, bundle.lexicons, FeatureProfile::Polarity);
  return decide_polarity(bundle.polarity, fv, /*gated=*/true).label;
}

SentencePrediction predict_aspect_polarity(const ModelBundle& bundle, std::span<const std::string> tokens) {
  require(bundle, Architecture::AspectPolarity);
  auto aspect_fv = assemble(tokens, bundle.vocabulary, bundle.lexicons, FeatureProfile::Aspect);
  SentencePrediction p;
  p.categories = detect_categories(bundle, aspect_fv);
  p.aspects = gated_aspects(bundle, p.categories, aspect_fv);
  AspectPolarities polarities;
  for (const auto& aspect : p.aspects) polarities.emplace(aspect, aspect_polarity(bundle, tokens, aspect));
  p.polarity = std::move(polarities);
  return p;
}

SentencePrediction predict(const ModelBundle& bundle, std::span<const std::string> tokens) {
  switch (bundle.architecture) {
    case Architecture::Flat: return predict_flat(bundle, tokens);
    case Architecture::Hierarchical: return predict_hierarchical(bundle, tokens);
    case Architecture::Propagation: return predict_propagation(bundle, tokens);
    case Architecture::AspectPolarity: return predict_aspect_polarity(bundle, tokens);
  }
  throw InvariantViolation("unhandled architecture");
}

SentencePrediction predict(const ModelBundle& bundle, std::string_view text) {
  auto tokens = tokenize(text);
  return predict(bundle, std::span<const std::string>(tokens));
}

std::set<std::string> infer_categories(const std::set<std::string>& aspects, const Taxonomy& taxonomy) {
  std::set<std::string> out;
  for (const auto& aspect : aspects) out.insert(taxonomy.category_of(aspect));
  return out;
}

std::vector<std::string> gating_violations(const SentencePrediction& prediction, const Taxonomy& taxonomy) {
  std::vector<std::string> out;
  for (const auto& aspect : prediction.aspects)
    if (!prediction.categories.count(taxonomy.category_of(aspect))) out.push_back(aspect);
  return out;
}

}  // namespace aspectmill
