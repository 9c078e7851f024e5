#include <json.hpp>

#include "aspectmill/architectures.hpp"
#include "aspectmill/error.hpp"
#include "text_util.hpp"

namespace aspectmill {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kFormatTag = "aspectmill-bundle";

ordered_json config_to_json(const TrainConfig& c) {
  ordered_json j;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["l2"] = c.l2;
  j["seed"] = c.seed;
  j["shuffle"] = c.shuffle;
  j["balance_classes"] = c.balance_classes;
  return j;
}

TrainConfig config_from_json(const ordered_json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.l2 = j.at("l2").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.shuffle = j.at("shuffle").get<bool>();
  c.balance_classes = j.at("balance_classes").get<bool>();
  return c;
}

ordered_json model_to_json(const LinearModel& m) {
  ordered_json j;
  j["bias"] = m.bias();
  j["threshold"] = m.threshold();
  j["config"] = config_to_json(m.config());
  auto weights = ordered_json::array();
  for (const auto& [id, w] : m.weights()) weights.push_back(ordered_json::array({id, w}));
  j["weights"] = std::move(weights);
  return j;
}

LinearModel model_from_json(const ordered_json& j) {
  std::vector<LinearModel::Weight> weights;
  for (const auto& w : j.at("weights")) weights.emplace_back(w.at(0).get<FeatureId>(), w.at(1).get<double>());
  return LinearModel(std::move(weights), j.at("bias").get<double>(), j.at("threshold").get<double>(),
                     config_from_json(j.at("config")));
}

ordered_json models_to_json(const std::map<std::string, LinearModel>& models) {
  ordered_json j = ordered_json::object();
  for (const auto& [name, m] : models) j[name] = model_to_json(m);
  return j;
}

std::map<std::string, LinearModel> models_from_json(const ordered_json& j) {
  std::map<std::string, LinearModel> out;
  for (const auto& [name, m] : j.items()) out.emplace(name, model_from_json(m));
  return out;
}

}  // namespace

std::string serialize_bundle(const ModelBundle& bundle) {
  if (!bundle.taxonomy) throw InvariantViolation("bundle without taxonomy");
  ordered_json j;
  j["format"] = kFormatTag;
  j["version"] = kBundleFormatVersion;
  j["architecture"] = to_string(bundle.architecture);
  j["taxonomy"] = bundle.taxonomy->serialize();
  j["train_config"] = config_to_json(bundle.train_config);
  j["trigger_k"] = bundle.trigger_k;
  j["window"] = bundle.window ? ordered_json(*bundle.window) : ordered_json(nullptr);

  ordered_json vocab;
  vocab["documents"] = bundle.vocabulary.documents();
  auto entries = ordered_json::array();
  for (const auto& e : bundle.vocabulary.entries())
    entries.push_back(ordered_json::array({e.name, static_cast<int>(e.order), e.df}));
  vocab["entries"] = std::move(entries);
  j["vocabulary"] = std::move(vocab);

  auto lexicons = ordered_json::array();
  for (const auto& lex : bundle.lexicons.lexicons) {
    ordered_json jl;
    jl["name"] = lex.name;
    jl["digest"] = lex.digest();
    jl["text"] = lex.serialize();
    lexicons.push_back(std::move(jl));
  }
  j["lexicons"] = std::move(lexicons);

  ordered_json models;
  models["categories"] = models_to_json(bundle.category_models);
  models["aspects"] = models_to_json(bundle.aspect_models);
  models["polarity"]["polar"] = model_to_json(bundle.polarity.polar);
  models["polarity"]["positive"] = model_to_json(bundle.polarity.positive);
  models["polarity"]["negative"] = model_to_json(bundle.polarity.negative);
  j["models"] = std::move(models);

  ordered_json triggers = ordered_json::object();
  for (const auto& [aspect, terms] : bundle.trigger_terms) triggers[aspect] = terms;
  j["trigger_terms"] = std::move(triggers);
  return j.dump() + "\n";
}

ModelBundle parse_bundle(std::string_view text, const std::string& source) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw Error(source + ": not a model bundle: " + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != kFormatTag)
      throw Error(source + ": not a model bundle (missing format tag)");
    const int version = j.at("version").get<int>();
    if (version != kBundleFormatVersion)
      throw Error(source + ": bundle format version " + std::to_string(version) + " is not supported (expected " +
                  std::to_string(kBundleFormatVersion) + ")");

    ModelBundle bundle;
    bundle.architecture = architecture_from_string(j.at("architecture").get<std::string>());
    bundle.taxonomy =
        std::make_shared<const Taxonomy>(parse_taxonomy(j.at("taxonomy").get<std::string>(), source + "#taxonomy"));
    bundle.train_config = config_from_json(j.at("train_config"));
    bundle.trigger_k = j.at("trigger_k").get<std::size_t>();
    if (!j.at("window").is_null()) bundle.window = j.at("window").get<std::size_t>();

    const auto& vocab = j.at("vocabulary");
    std::vector<Vocabulary::Entry> entries;
    for (const auto& e : vocab.at("entries")) {
      const int order = e.at(1).get<int>();
      if (order < 1 || order > 3) throw Error(source + ": invalid n-gram order");
      entries.push_back({e.at(0).get<std::string>(), static_cast<NGramOrder>(order), e.at(2).get<std::uint32_t>()});
    }
    bundle.vocabulary = Vocabulary(vocab.at("documents").get<std::size_t>(), std::move(entries));

    for (const auto& jl : j.at("lexicons")) {
      auto name = jl.at("name").get<std::string>();
      auto lex = parse_lexicon(jl.at("text").get<std::string>(), name, source + "#lexicon/" + name);
      if (lex.digest() != jl.at("digest").get<std::string>())
        throw Error(source + ": digest mismatch for embedded lexicon '" + name + "'");
      bundle.lexicons.lexicons.push_back(std::move(lex));
    }

    const auto& models = j.at("models");
    bundle.category_models = models_from_json(models.at("categories"));
    bundle.aspect_models = models_from_json(models.at("aspects"));
    bundle.polarity.polar = model_from_json(models.at("polarity").at("polar"));
    bundle.polarity.positive = model_from_json(models.at("polarity").at("positive"));
    bundle.polarity.negative = model_from_json(models.at("polarity").at("negative"));

    for (const auto& [aspect, terms] : j.at("trigger_terms").items())
      bundle.trigger_terms[aspect] = terms.get<std::vector<std::string>>();

    try {
      validate_bundle(bundle);
    } catch (const InvariantViolation& e) {
      throw Error(source + ": " + e.what());
    }
    return bundle;
  } catch (const ordered_json::exception& e) {
    throw Error(source + ": malformed model bundle: " + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  detail::write_file(path, serialize_bundle(bundle));
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  return parse_bundle(detail::read_file(path), path.string());
}

}  // namespace aspectmill
