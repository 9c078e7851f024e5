#include "aspectmill/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "aspectmill/corpus.hpp"
#include "aspectmill/error.hpp"
#include "aspectmill/taxonomy.hpp"
#include "text_util.hpp"

namespace aspectmill::cli {

namespace {

std::shared_ptr<const Taxonomy> resolve_taxonomy(const RunConfig& config) {
  if (config.taxonomy) return std::make_shared<const Taxonomy>(load_taxonomy(*config.taxonomy));
  return std::make_shared<const Taxonomy>(default_taxonomy());
}

const std::filesystem::path& require_path(const std::optional<std::filesystem::path>& p, std::string_view flag) {
  if (!p) throw Error("missing required option " + std::string(flag));
  return *p;
}

LexiconSet resolve_lexicons(const RunConfig& config) {
  LexiconSet set;
  if (config.lexicons) set.lexicons = load_lexicon_directory(*config.lexicons);
  return set;
}

// Writes to --output when given, otherwise to `out`.
void emit(const RunConfig& config, std::ostream& out, std::string_view text) {
  if (config.output) {
    detail::write_file(*config.output, text);
  } else {
    out << text;
    out.flush();
  }
}

std::string window_string(const Window& w) { return w ? std::to_string(*w) : std::string("inf"); }

std::string_view subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::Train: return "train";
    case Subcommand::Predict: return "predict";
    case Subcommand::Eval: return "eval";
    case Subcommand::Stats: return "stats";
  }
  return "?";
}

std::string optional_path(const std::optional<std::filesystem::path>& p, std::string_view fallback = "-") {
  return p ? p->string() : std::string(fallback);
}

nlohmann::ordered_json in_taxonomy_order(const std::set<std::string>& names, const std::vector<std::string>& order) {
  auto list = nlohmann::ordered_json::array();
  for (const auto& n : order)
    if (names.count(n)) list.push_back(n);
  return list;
}

}  // namespace

void check_prediction(const SentencePrediction& p, const ModelBundle& bundle) {
  const bool gated =
      bundle.architecture == Architecture::Hierarchical || bundle.architecture == Architecture::AspectPolarity;
  if (gated) {
    auto violations = gating_violations(p, *bundle.taxonomy);
    if (!violations.empty())
      throw InvariantViolation("gating violated: aspect '" + violations.front() + "' predicted without its category");
  }
  if (const auto* label = std::get_if<Polarity>(&p.polarity)) {
    if (*label == Polarity::Mixed) throw InvariantViolation("classifier emitted Mixed polarity");
  } else {
    for (const auto& [aspect, label] : std::get<AspectPolarities>(p.polarity)) {
      if (label == Polarity::Mixed) throw InvariantViolation("classifier emitted Mixed polarity");
      if (!p.aspects.count(aspect)) throw InvariantViolation("polarity for unpredicted aspect '" + aspect + "'");
    }
  }
}

Window parse_window(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::nullopt;
  std::size_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ValidationError("window --n must be a non-negative integer or 'inf', got '" + text + "'");
  return value;
}

std::string describe(const RunConfig& c) {
  std::ostringstream out;
  out << "subcommand: " << subcommand_name(c.subcommand) << '\n'
      << "taxonomy: " << optional_path(c.taxonomy, "<built-in default>") << '\n'
      << "corpus: " << optional_path(c.corpus) << '\n'
      << "test-corpus: " << optional_path(c.test_corpus) << '\n'
      << "bundle: " << optional_path(c.bundle) << '\n'
      << "output: " << optional_path(c.output, "<stdout>") << '\n'
      << "lexicons: " << optional_path(c.lexicons, "<none>") << '\n'
      << "arch: " << to_string(c.architecture) << '\n'
      << "epochs: " << c.train.epochs << '\n'
      << "lr: " << c.train.learning_rate << '\n'
      << "l2: " << c.train.l2 << '\n'
      << "balance-classes: " << (c.train.balance_classes ? "on" : "off") << '\n'
      << "threshold: " << Defaults::threshold << '\n'
      << "seed: " << c.seed << '\n'
      << "k: " << c.trigger_k << '\n'
      << "n: " << window_string(c.window) << '\n'
      << "split: " << (c.split ? std::to_string(*c.split) : std::string("-")) << '\n'
      << "format: " << (c.format == ReportFormat::Table ? "table" : "machine") << '\n'
      << "check: " << (c.check ? "on" : "off");
  return std::move(out).str();
}

void cmd_train(const RunConfig& config, spdlog::logger& log) {
  const auto& bundle_path = require_path(config.bundle, "--bundle");
  auto taxonomy = resolve_taxonomy(config);
  auto lexicons = resolve_lexicons(config);
  auto corpus = load_corpus(require_path(config.corpus, "--corpus"), taxonomy);
  if (config.split) {
    auto parts = split_corpus(corpus, *config.split, config.seed);
    log.info("split: training on {} of {} reviews ({} held out)", parts.train.reviews.size(), corpus.reviews.size(),
             parts.test.reviews.size());
    corpus = std::move(parts.train);
  }
  log.info("training corpus: {} reviews, {} sentences, {} annotations", corpus.reviews.size(),
           corpus.sentence_count(), corpus.annotation_count());

  TrainingOptions options;
  options.config = config.train;
  options.config.seed = config.seed;
  options.trigger_k = config.trigger_k;
  options.window = config.window;
  TrainingLog training_log;
  auto bundle = train_bundle(config.architecture, corpus, lexicons, options, &training_log);
  validate_bundle(bundle);

  for (const auto& s : training_log) {
    if (s.constant)
      log.info("label {}: no training sentences, constant-false model", s.label);
    else
      log.info("label {}: {} examples, {} positive, training accuracy {:.4f}", s.label, s.examples, s.positives,
               s.training_accuracy);
  }
  if (config.architecture == Architecture::AspectPolarity) {
    for (const auto& [aspect, terms] : bundle.trigger_terms) {
      std::string joined;
      for (const auto& t : terms) joined += (joined.empty() ? "" : " ") + t;
      log.debug("trigger terms {}: {}", aspect, joined);
    }
  }
  save_bundle(bundle, bundle_path);
  log.info("wrote {} bundle to {}", to_string(bundle.architecture), bundle_path.string());
}

namespace {

ModelBundle load_checked_bundle(const RunConfig& config, spdlog::logger& log) {
  auto bundle = load_bundle(require_path(config.bundle, "--bundle"));
  if (config.taxonomy) {
    auto taxonomy = load_taxonomy(*config.taxonomy);
    if (!(taxonomy == *bundle.taxonomy))
      throw ValidationError("taxonomy '" + config.taxonomy->string() + "' does not match the bundle's taxonomy");
  }
  if (config.lexicons) {
    LexiconSet given{load_lexicon_directory(*config.lexicons)};
    std::map<std::string, std::string> digests;
    for (const auto& lex : given.lexicons) digests[lex.name] = lex.digest();
    if (digests != bundle.lexicon_digests())
      throw ValidationError("lexicons in '" + config.lexicons->string() + "' differ from those the bundle was trained with");
  }
  log.info("loaded {} bundle ({} vocabulary entries)", to_string(bundle.architecture), bundle.vocabulary.size());
  return bundle;
}

}  // namespace

void cmd_predict(const RunConfig& config, std::ostream& out, spdlog::logger& log) {
  auto bundle = load_checked_bundle(config, log);
  auto input = load_corpus(require_path(config.corpus, "--corpus"), bundle.taxonomy, AnnotationPolicy::Ignore);
  const auto& taxonomy = *bundle.taxonomy;
  std::vector<std::string> category_order;
  for (const auto& c : taxonomy.categories()) category_order.push_back(c.name);

  std::string text;
  std::size_t records = 0;
  for (const auto& review : input.reviews) {
    for (std::size_t i = 0; i < review.sentences.size(); ++i) {
      auto prediction = predict(bundle, std::string_view(review.sentences[i].text));
      if (config.check) check_prediction(prediction, bundle);
      nlohmann::ordered_json rec;
      rec["review"] = review.id;
      rec["sentence"] = i;
      rec["text"] = review.sentences[i].text;
      rec["categories"] = in_taxonomy_order(prediction.categories, category_order);
      rec["aspects"] = in_taxonomy_order(prediction.aspects, taxonomy.aspects());
      if (const auto* label = std::get_if<Polarity>(&prediction.polarity)) {
        rec["polarity"] = to_string(*label);
      } else {
        auto per_aspect = nlohmann::ordered_json::object();
        for (const auto& aspect : taxonomy.aspects()) {
          const auto& map = std::get<AspectPolarities>(prediction.polarity);
          if (auto it = map.find(aspect); it != map.end()) per_aspect[aspect] = to_string(it->second);
        }
        rec["aspect_polarities"] = std::move(per_aspect);
      }
      text += rec.dump();
      text += '\n';
      ++records;
    }
  }
  if (config.check && records != input.sentence_count())
    throw InvariantViolation("prediction record count differs from sentence count");
  emit(config, out, text);
  log.info("predicted {} sentences{}", records, config.check ? " (checks passed)" : "");
}

void cmd_eval(const RunConfig& config, std::ostream& out, spdlog::logger& log) {
  auto bundle = load_checked_bundle(config, log);
  AnnotatedCorpus test;
  if (config.test_corpus) {
    test = load_corpus(*config.test_corpus, bundle.taxonomy);
  } else if (config.corpus && config.split) {
    auto parts = split_corpus(load_corpus(*config.corpus, bundle.taxonomy), *config.split, config.seed);
    test = std::move(parts.test);
  } else {
    throw Error("eval needs --test-corpus, or --corpus together with --split");
  }
  log.info("evaluating on {} reviews, {} sentences", test.reviews.size(), test.sentence_count());
  auto reports = evaluate_bundle(bundle, test);
  std::size_t warnings = 0;
  for (const auto& r : reports) warnings += r.warnings();
  if (warnings) log.warn("{} undefined metric values counted as 0 in averages", warnings);
  emit(config, out, format_reports(reports, bundle.architecture, config.format));
}

void cmd_stats(const RunConfig& config, std::ostream& out, spdlog::logger& log) {
  auto taxonomy = resolve_taxonomy(config);
  auto corpus = load_corpus(require_path(config.corpus, "--corpus"), taxonomy);
  auto stats = compute_stats(corpus);
  log.info("corpus: {} reviews, {} sentences, {} annotations", stats.reviews, stats.sentences, stats.annotations);
  emit(config, out, format_stats_table(stats) + "\n" + format_ranking_table(polarity_ranking(stats)));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::string taxonomy, corpus, test_corpus, bundle, output, lexicons, arch = "hier", window = "inf", format = "table";
  double split = 0.0;

  CLI::App app{"Hierarchical aspect and polarity classification for review sentences", "aspectmill"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--taxonomy", taxonomy, "Taxonomy config (default: built-in 8x32 taxonomy)");
    sub->add_option("--lexicons", lexicons, "Directory of lexicon files");
    sub->add_option("--seed", config.seed, "Seed for shuffling and splitting")->capture_default_str();
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", output, "Write the result here instead of standard output");
  };

  auto* train = app.add_subcommand("train", "Train a model bundle");
  add_common(train);
  train->add_option("--corpus", corpus, "Annotated training corpus (JSON lines)")->required();
  train->add_option("--bundle", bundle, "Output bundle path")->required();
  train->add_option("--arch", arch, "flat|hier|prop|aspect-polarity")->capture_default_str();
  train->add_option("--epochs", config.train.epochs, "SGD epochs")->capture_default_str();
  train->add_option("--lr", config.train.learning_rate, "Initial learning rate")->capture_default_str();
  train->add_option("--l2", config.train.l2, "L2 regularisation strength")->capture_default_str();
  train->add_flag("--balance-classes", config.train.balance_classes, "Up-weight positives (capped at 10)");
  train->add_option("--k", config.trigger_k, "Trigger terms per aspect (aspect-polarity)")->capture_default_str();
  train->add_option("--n", window, "Polarity window radius in tokens, or inf")->capture_default_str();
  train->add_option("--split", split, "Hold out this fraction of reviews; train on the rest");

  auto* predict_cmd = app.add_subcommand("predict", "Predict categories, aspects and polarity");
  add_common(predict_cmd);
  add_output(predict_cmd);
  predict_cmd->add_option("--bundle", bundle, "Model bundle")->required();
  predict_cmd->add_option("--corpus", corpus, "Input corpus (annotations ignored)")->required();
  predict_cmd->add_flag("--check", config.check, "Verify output invariants (gating, no Mixed)");

  auto* eval = app.add_subcommand("eval", "Score a bundle against a gold corpus");
  add_common(eval);
  add_output(eval);
  eval->add_option("--bundle", bundle, "Model bundle")->required();
  eval->add_option("--test-corpus", test_corpus, "Gold test corpus");
  eval->add_option("--corpus", corpus, "Gold corpus to split (with --split)");
  eval->add_option("--split", split, "Evaluate on this held-out fraction of --corpus");
  eval->add_option("--format", format, "table|machine")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Corpus statistics and polarity ranking");
  add_common(stats);
  add_output(stats);
  stats->add_option("--corpus", corpus, "Annotated corpus")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUserError;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("aspectmill", sink);
  log.set_pattern("[%l] %v");
  log.set_level(spdlog::level::info);
  if (const char* level = std::getenv("ASPECTMILL_LOG")) log.set_level(spdlog::level::from_str(level));

  try {
    auto path_of = [](const std::string& s) -> std::optional<std::filesystem::path> {
      if (s.empty()) return std::nullopt;
      return std::filesystem::path(s);
    };
    config.taxonomy = path_of(taxonomy);
    config.corpus = path_of(corpus);
    config.test_corpus = path_of(test_corpus);
    config.bundle = path_of(bundle);
    config.output = path_of(output);
    config.lexicons = path_of(lexicons);
    config.architecture = architecture_from_string(arch);
    config.window = parse_window(window);
    config.train.seed = config.seed;
    if (split != 0.0) config.split = split;
    if (format == "table") config.format = ReportFormat::Table;
    else if (format == "machine") config.format = ReportFormat::Machine;
    else throw ValidationError("unknown --format '" + format + "' (expected table|machine)");

    if (train->parsed()) config.subcommand = Subcommand::Train;
    else if (predict_cmd->parsed()) config.subcommand = Subcommand::Predict;
    else if (eval->parsed()) config.subcommand = Subcommand::Eval;
    else config.subcommand = Subcommand::Stats;

    const auto echo = describe(config);
    for (const auto& line : detail::split_lines(echo)) log.info("config {}", line);

    switch (config.subcommand) {
      case Subcommand::Train: cmd_train(config, log); break;
      case Subcommand::Predict: cmd_predict(config, out, log); break;
      case Subcommand::Eval: cmd_eval(config, out, log); break;
      case Subcommand::Stats: cmd_stats(config, out, log); break;
    }
    log.flush();
    return kSuccess;
  } catch (const Error& e) {
    log.error("{}", e.what());
    log.flush();
    return kUserError;
  } catch (const std::exception& e) {
    log.critical("internal error: {}", e.what());
    log.flush();
    return kInternalError;
  }
}

}  // namespace aspectmill::cli
