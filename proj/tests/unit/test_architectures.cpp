#include <doctest.h>

#include "aspectmill/architectures.hpp"
#include "aspectmill/error.hpp"
#include "aspectmill/shuffle.hpp"
#include "support/synthetic.hpp"

using namespace aspectmill;

namespace {

using V = std::vector<std::string>;

const AnnotatedCorpus& corpus() {
  static const AnnotatedCorpus c =
      testsupport::make_synthetic_corpus(testsupport::default_taxonomy_ptr(), {.reviews = 80, .seed = 21});
  return c;
}

// Signed priors give the polarity learner a clean signal on short windows.
LexiconSet polarity_lexicons() {
  return {{parse_lexicon("kind: PriorScored\nsplendid\t1\ndreadful\t-1\n", "priors")}};
}

const ModelBundle& bundle(Architecture arch) {
  static std::map<Architecture, ModelBundle> cache;
  auto it = cache.find(arch);
  if (it == cache.end()) {
    TrainingOptions options;
    options.window = 1;
    it = cache.emplace(arch, train_bundle(arch, corpus(), polarity_lexicons(), options)).first;
  }
  return it->second;
}

V random_tokens(Rng& rng) {
  V words;
  for (std::size_t i = 0, n = 1 + uniform_below(rng, 10); i < n; ++i) {
    switch (uniform_below(rng, 4)) {
      case 0: words.push_back(testsupport::cue_token(uniform_below(rng, 32))); break;
      case 1: words.push_back(uniform_below(rng, 2) ? "splendid" : "dreadful"); break;
      default: words.push_back(testsupport::filler_words()[uniform_below(rng, 22)]);
    }
  }
  return words;
}

std::set<std::string> tuition_aspects() { return {"Basic Tuition", "Additional Charges", "Scholarships"}; }

}  // namespace

TEST_CASE("training targets") {
  const auto& t = default_taxonomy();
  auto s = sentence_targets({"x", {{"Supervision", 5}}}, t);
  CHECK(s.aspects[*t.aspect_index("Supervision")]);
  CHECK(s.categories[*t.category_index("Support and Organization")]);
  CHECK(s.polar);
  CHECK(s.positive);
  CHECK_FALSE(s.negative);

  auto empty = sentence_targets({"x", {}}, t);
  CHECK(std::none_of(empty.aspects.begin(), empty.aspects.end(), [](bool b) { return b; }));
  CHECK(std::none_of(empty.categories.begin(), empty.categories.end(), [](bool b) { return b; }));
  CHECK_FALSE(empty.polar);

  auto mixed = sentence_targets({"x", {{"Exams", 99}}}, t);
  CHECK(mixed.positive);
  CHECK(mixed.negative);
  CHECK(mixed.polar);

  auto neutral = sentence_targets({"x", {{"Exams", 0}}}, t);
  CHECK_FALSE(neutral.polar);
}

TEST_CASE("flat bundle has one model per label") {
  const auto& b = bundle(Architecture::Flat);
  CHECK(b.category_models.size() == 8);
  CHECK(b.aspect_models.size() == 32);
  CHECK(b.aspect_models.count("Scholarships"));
  CHECK_NOTHROW(validate_bundle(b));
}

TEST_CASE("flat aspects do not depend on category models") {
  auto stripped = bundle(Architecture::Flat);
  stripped.category_models.clear();
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto tokens = random_tokens(rng);
    CHECK(predict_flat(stripped, tokens).aspects == predict_flat(bundle(Architecture::Flat), tokens).aspects);
  }
}

TEST_CASE("flat predictions can contradict the hierarchy") {
  auto b = bundle(Architecture::Flat);
  for (auto& [name, model] : b.category_models) model = LinearModel::constant(false);
  auto p = predict_flat(b, V{testsupport::cue_token(0)});
  CHECK(p.categories.empty());
  CHECK_FALSE(p.aspects.empty());
}

TEST_CASE("all detectors silent") {
  auto b = bundle(Architecture::Flat);
  for (auto& [name, model] : b.category_models) model = LinearModel::constant(false);
  for (auto& [name, model] : b.aspect_models) model = LinearModel::constant(false);
  b.polarity.polar = LinearModel::constant(false);
  auto p = predict_flat(b, V{"cue3", "splendid"});
  CHECK(p.categories.empty());
  CHECK(p.aspects.empty());
  CHECK(std::get<Polarity>(p.polarity) == Polarity::Neutral);
}

TEST_CASE("polarity resolution") {
  PolarityModels m{LinearModel::constant(true), LinearModel::constant(true), LinearModel::constant(false)};
  CHECK(decide_polarity(m, {}, true).label == Polarity::Positive);
  m.positive = LinearModel::constant(false);
  m.negative = LinearModel::constant(true);
  CHECK(decide_polarity(m, {}, true).label == Polarity::Negative);

  // Both fire: the higher raw score wins; an exact tie goes to Positive.
  m.positive = LinearModel({}, 2.0);
  m.negative = LinearModel({}, 3.0);
  CHECK(decide_polarity(m, {}, true).label == Polarity::Negative);
  m.negative = LinearModel({}, 2.0);
  CHECK(decide_polarity(m, {}, true).label == Polarity::Positive);
  m.positive = LinearModel({}, -3.0);
  m.negative = LinearModel({}, -2.0);
  CHECK(decide_polarity(m, {}, true).label == Polarity::Negative);

  m.polar = LinearModel::constant(false);
  auto neutral = decide_polarity(m, {}, true);
  CHECK(neutral.label == Polarity::Neutral);
  CHECK_FALSE(neutral.positive_score.has_value());
  CHECK_FALSE(neutral.negative_score.has_value());
}

TEST_CASE("hierarchical training scope") {
  // A category never seen in gold gets constant-false aspect models.
  auto taxonomy = std::make_shared<const Taxonomy>(parse_taxonomy("# Seen\na\nb\n# Unseen\nc\n"));
  AnnotatedCorpus c;
  c.taxonomy = taxonomy;
  c.reviews.push_back({"r", {{"alpha one", {{"a", 1}}}, {"beta two", {{"b", -1}}}, {"gamma", {}}}});
  TrainingLog log;
  auto b = train_hierarchical(c, {}, {}, &log);
  CHECK(b.aspect_models.at("c") == LinearModel::constant(false, b.train_config));
  auto entry = [&](const std::string& label) {
    return *std::find_if(log.begin(), log.end(), [&](const auto& s) { return s.label == label; });
  };
  CHECK(entry("aspect/a").examples == 2);  // sentences gold-labelled with category Seen
  CHECK(entry("aspect/c").constant);
  CHECK(entry("category/Seen").examples == 3);
  CHECK(entry("polarity/polar").examples == 3);
  CHECK(entry("polarity/positive").examples == 2);  // gold-polar sentences only
}

TEST_CASE("hierarchical gating") {
  auto b = bundle(Architecture::Hierarchical);
  b.category_models.at("Tuition") = LinearModel::constant(false);
  for (const auto& a : tuition_aspects()) b.aspect_models.at(a) = LinearModel::constant(true);
  auto p = predict_hierarchical(b, V{"cue20", "fees"});
  for (const auto& a : tuition_aspects()) CHECK_FALSE(p.aspects.count(a));

  for (auto& [name, model] : b.category_models) model = LinearModel::constant(false);
  for (auto& [name, model] : b.aspect_models) model = LinearModel::constant(true);
  CHECK(predict_hierarchical(b, V{"cue1", "cue9"}).aspects.empty());
}

TEST_CASE("gated structures stay neutral when the polar detector says so") {
  Rng rng(3);
  for (auto arch : {Architecture::Hierarchical, Architecture::Propagation, Architecture::AspectPolarity}) {
    const auto& b = bundle(arch);
    for (int i = 0; i < 100; ++i) {
      auto tokens = random_tokens(rng);
      auto p = predict(b, tokens);
      auto fv = assemble(tokens, b.vocabulary, b.lexicons, FeatureProfile::Polarity);
      if (arch != Architecture::AspectPolarity && !b.polarity.polar.predict(fv))
        CHECK(std::get<Polarity>(p.polarity) == Polarity::Neutral);
      if (arch == Architecture::Hierarchical) {
        auto inferred = infer_categories(p.aspects, *b.taxonomy);
        CHECK(std::includes(p.categories.begin(), p.categories.end(), inferred.begin(), inferred.end()));
      }
    }
  }
}

TEST_CASE("category models agree across flat, hierarchical and propagation") {
  CHECK(bundle(Architecture::Flat).category_models == bundle(Architecture::Hierarchical).category_models);
  CHECK(bundle(Architecture::Flat).category_models == bundle(Architecture::Propagation).category_models);
}

TEST_CASE("propagation features") {
  const auto& b = bundle(Architecture::Propagation);
  const auto& t = *b.taxonomy;
  auto text = assemble(V{"cue4", "the"}, b.vocabulary, b.lexicons, FeatureProfile::Aspect);
  CHECK(propagation_features(text, t, {}) == text);
  auto full = propagation_features(text, t, {"Tuition", "Personal"});
  CHECK(full.size() == text.size() + 2);
  CHECK(full.get(make_feature_id(FeatureFamily::Category, *t.category_index("Tuition"))) == 1.0);
  for (const auto& [id, v] : text) CHECK(family_of(id) != FeatureFamily::Category);
}

TEST_CASE("propagation lets aspects vote against their category") {
  auto b = bundle(Architecture::Propagation);
  for (auto& [name, model] : b.category_models) model = LinearModel::constant(false);
  b.aspect_models.at("Scholarships") = LinearModel::constant(true);
  auto p = predict_propagation(b, V{"nothing"});
  CHECK(p.categories.empty());
  CHECK(p.aspects.count("Scholarships"));
}

TEST_CASE("propagation with silent category models matches flat aspect training") {
  auto data = prepare_training_data(corpus(), polarity_lexicons());
  std::map<std::string, LinearModel> silent;
  for (const auto& c : data.taxonomy->categories()) silent[c.name] = LinearModel::constant(false);
  TrainConfig config;
  CHECK(train_propagation_aspect_models(data, silent, config) == train_flat_aspect_models(data, config));
}

TEST_CASE("prediction is pure") {
  Rng rng(4);
  for (auto arch : {Architecture::Flat, Architecture::Hierarchical, Architecture::Propagation,
                    Architecture::AspectPolarity}) {
    auto tokens = random_tokens(rng);
    CHECK(predict(bundle(arch), tokens) == predict(bundle(arch), tokens));
  }
}

TEST_CASE("infer categories") {
  const auto& t = default_taxonomy();
  CHECK(infer_categories({"Basic Tuition"}, t) == std::set<std::string>{"Tuition"});
  CHECK(infer_categories({}, t).empty());
  CHECK(infer_categories({"Supervision", "Organization"}, t) == std::set<std::string>{"Support and Organization"});
  CHECK_THROWS_AS(infer_categories({"Nope"}, t), UnknownAspectError);
}

TEST_CASE("window positions") {
  V tokens{"t0", "t1", "t2", "hit", "t4", "t5", "t6"};
  CHECK(window_positions(tokens, {"hit"}, 1) == std::vector<std::size_t>{2, 3, 4});
  CHECK(window_positions(tokens, {"hit"}, 0) == std::vector<std::size_t>{3});
  CHECK(window_positions(tokens, {"hit"}, 100).size() == 7);
  CHECK(window_positions(tokens, {"hit"}, std::nullopt).size() == 7);
  CHECK(window_positions(tokens, {"miss"}, 2).empty());
  CHECK(window_positions(tokens, {"t0", "t6"}, 1) == std::vector<std::size_t>{0, 1, 5, 6});
}

TEST_CASE("aspect-specific polarity separates opposite windows") {
  const auto& b = bundle(Architecture::AspectPolarity);
  REQUIRE(b.trigger_terms.size() == 32);
  REQUIRE(b.trigger_terms.at("Average Demand").front() == "cue0");
  REQUIRE(b.trigger_terms.at("Supervision").front() == "cue9");
  V tokens{"cue0", "splendid", "the", "course", "was", "we", "dreadful", "cue9"};
  CHECK(aspect_polarity(b, tokens, "Average Demand") == Polarity::Positive);
  CHECK(aspect_polarity(b, tokens, "Supervision") == Polarity::Negative);
}

TEST_CASE("aspect-polarity bundle lists trigger terms for every aspect") {
  const auto& b = bundle(Architecture::AspectPolarity);
  for (const auto& a : b.taxonomy->aspects()) {
    REQUIRE(b.trigger_terms.count(a));
    CHECK(b.trigger_terms.at(a).size() <= kDefaultTriggerTerms);
    CHECK_FALSE(b.trigger_terms.at(a).empty());
  }
}

TEST_CASE("trigger terms") {
  auto ranked = rank_trigger_terms(corpus(), 1000);
  const auto& demand = ranked.at("Average Demand");
  CHECK(demand.front().term == "cue0");
  CHECK(std::is_sorted(demand.begin(), demand.end(), [](const auto& a, const auto& b) {
    return a.mi > b.mi || (a.mi == b.mi && a.term < b.term);
  }));
  std::set<std::string> unigrams;
  corpus().for_each_sentence([&](const Review&, const Sentence& s) {
    for (const auto& tok : tokenize(s.text)) unigrams.insert(tok);
  });
  CHECK(demand.size() == unigrams.size());

  // Independent of corpus order.
  auto shuffled = corpus();
  Rng rng(6);
  fisher_yates(std::span(shuffled.reviews), rng);
  CHECK(select_trigger_terms(shuffled, 10) == select_trigger_terms(corpus(), 10));
  CHECK(smoothed_mutual_information(5, 5, 5, 5) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("bundle serialization round-trip") {
  for (auto arch : {Architecture::Flat, Architecture::Hierarchical, Architecture::Propagation,
                    Architecture::AspectPolarity}) {
    auto text = serialize_bundle(bundle(arch));
    auto back = parse_bundle(text);
    CHECK(back == bundle(arch));
    CHECK(serialize_bundle(back) == text);
  }
  auto text = serialize_bundle(bundle(Architecture::Flat));
  auto bumped = text;
  bumped.replace(bumped.find("\"version\":1"), 11, "\"version\":7");
  CHECK_THROWS_AS(parse_bundle(bumped), Error);
  CHECK_THROWS_AS(parse_bundle("{}"), Error);
  CHECK_THROWS_AS(parse_bundle("not json"), Error);
  auto tampered = text;
  tampered.replace(tampered.find("splendid\\t1"), 8, "splendix");
  CHECK_THROWS_AS(parse_bundle(tampered), Error);
}

TEST_CASE("architecture names") {
  for (auto a : {Architecture::Flat, Architecture::Hierarchical, Architecture::Propagation,
                 Architecture::AspectPolarity})
    CHECK(architecture_from_string(to_string(a)) == a);
  CHECK(to_string(Architecture::AspectPolarity) == "aspect-polarity");
  CHECK_THROWS_AS(architecture_from_string("deep"), ValidationError);
}
