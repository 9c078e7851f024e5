#include "aspectmill/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "aspectmill/error.hpp"
#include "aspectmill/shuffle.hpp"
#include "text_util.hpp"

namespace aspectmill {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t AnnotatedCorpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& r : reviews) n += r.sentences.size();
  return n;
}

std::size_t AnnotatedCorpus::annotation_count() const {
  std::size_t n = 0;
  for_each_sentence([&](const Review&, const Sentence& s) { n += s.annotations.size(); });
  return n;
}

bool AnnotatedCorpus::operator==(const AnnotatedCorpus& other) const {
  if (reviews != other.reviews) return false;
  if (taxonomy == other.taxonomy) return true;
  return taxonomy && other.taxonomy && *taxonomy == *other.taxonomy;
}

namespace {

void validate_review(const Review& review, const Taxonomy* taxonomy) {
  if (detail::trim(review.id).empty()) throw ValidationError("review with empty id");
  if (review.sentences.empty()) throw ValidationError("review '" + review.id + "' has no sentences");
  for (std::size_t i = 0; i < review.sentences.size(); ++i) {
    const auto& sentence = review.sentences[i];
    if (detail::trim(sentence.text).empty())
      throw ValidationError("review '" + review.id + "' sentence " + std::to_string(i) + " has empty text");
    std::unordered_set<std::string> seen;
    for (const auto& a : sentence.annotations) {
      if (taxonomy && !taxonomy->has_aspect(a.aspect)) throw UnknownAspectError(a.aspect);
      if (!is_valid_score(a.score)) throw ScoreRangeError(a.score);
      if (!seen.insert(a.aspect).second)
        throw ValidationError("review '" + review.id + "' sentence " + std::to_string(i) +
                              " annotates aspect '" + a.aspect + "' twice");
    }
  }
}

Review review_from_json(const json& j, AnnotationPolicy policy) {
  if (!j.is_object()) throw ValidationError("record is not an object");
  Review review;
  const auto& id = j.at("id");
  if (!id.is_string()) throw ValidationError("field 'id' must be a string");
  review.id = id.get<std::string>();
  const auto& sentences = j.at("sentences");
  if (!sentences.is_array()) throw ValidationError("field 'sentences' must be an array");
  for (const auto& js : sentences) {
    Sentence sentence;
    const auto& text = js.at("text");
    if (!text.is_string()) throw ValidationError("field 'text' must be a string");
    sentence.text = text.get<std::string>();
    if (policy == AnnotationPolicy::Validate && js.contains("annotations")) {
      const auto& annotations = js.at("annotations");
      if (!annotations.is_array()) throw ValidationError("field 'annotations' must be an array");
      for (const auto& ja : annotations) {
        const auto& aspect = ja.at("aspect");
        const auto& score = ja.at("score");
        if (!aspect.is_string()) throw ValidationError("field 'aspect' must be a string");
        if (!score.is_number_integer()) throw ValidationError("field 'score' must be an integer");
        auto value = score.get<long long>();
        if (!is_valid_score(value)) throw ScoreRangeError(value);
        sentence.annotations.push_back(
            Annotation{std::string(detail::trim(aspect.get<std::string>())), static_cast<int>(value)});
      }
    }
    review.sentences.push_back(std::move(sentence));
  }
  return review;
}

}  // namespace

void validate_corpus(const AnnotatedCorpus& corpus) {
  std::unordered_set<std::string> ids;
  for (const auto& review : corpus.reviews) {
    validate_review(review, corpus.taxonomy.get());
    if (!ids.insert(review.id).second) throw ValidationError("duplicate review id '" + review.id + "'");
  }
}

AnnotatedCorpus parse_corpus(std::string_view text, std::shared_ptr<const Taxonomy> taxonomy,
                             AnnotationPolicy policy, const std::string& source) {
  if (!taxonomy) throw Error("parse_corpus requires a taxonomy");
  AnnotatedCorpus corpus;
  corpus.taxonomy = std::move(taxonomy);
  std::unordered_set<std::string> ids;
  std::size_t lineno = 0;
  for (auto line : detail::split_lines(text)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    try {
      auto review = review_from_json(json::parse(line), policy);
      validate_review(review, corpus.taxonomy.get());
      if (!ids.insert(review.id).second) throw ValidationError("duplicate review id '" + review.id + "'");
      corpus.reviews.push_back(std::move(review));
    } catch (const json::exception& e) {
      throw CorpusError(source, lineno, e.what());
    } catch (const ValidationError& e) {
      throw CorpusError(source, lineno, e.what());
    }
  }
  return corpus;
}

AnnotatedCorpus load_corpus(const std::filesystem::path& path, std::shared_ptr<const Taxonomy> taxonomy,
                            AnnotationPolicy policy) {
  return parse_corpus(detail::read_file(path), std::move(taxonomy), policy, path.string());
}

std::string serialize_corpus(const AnnotatedCorpus& corpus) {
  std::string out;
  for (const auto& review : corpus.reviews) {
    ordered_json j;
    j["id"] = review.id;
    j["sentences"] = ordered_json::array();
    for (const auto& sentence : review.sentences) {
      ordered_json js;
      js["text"] = sentence.text;
      js["annotations"] = ordered_json::array();
      for (const auto& a : sentence.annotations) {
        ordered_json ja;
        ja["aspect"] = a.aspect;
        ja["score"] = a.score;
        js["annotations"].push_back(std::move(ja));
      }
      j["sentences"].push_back(std::move(js));
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

LabelCounts& LabelCounts::operator+=(const LabelCounts& o) {
  occurrences += o.occurrences;
  positive += o.positive;
  negative += o.negative;
  neutral += o.neutral;
  mixed += o.mixed;
  return *this;
}

double CorpusStats::sentences_per_review() const {
  return reviews == 0 ? 0.0 : static_cast<double>(sentences) / static_cast<double>(reviews);
}

double CorpusStats::annotations_per_sentence() const {
  return sentences == 0 ? 0.0 : static_cast<double>(annotations) / static_cast<double>(sentences);
}

bool CorpusStats::operator==(const CorpusStats& o) const {
  return reviews == o.reviews && sentences == o.sentences && annotations == o.annotations &&
         unlabeled_sentences == o.unlabeled_sentences && aspects == o.aspects && categories == o.categories;
}

CorpusStats compute_stats(const AnnotatedCorpus& corpus) {
  if (!corpus.taxonomy) throw Error("compute_stats requires a taxonomy");
  const auto& taxonomy = *corpus.taxonomy;
  CorpusStats stats;
  stats.taxonomy = corpus.taxonomy;
  stats.aspects.resize(taxonomy.aspect_count());
  stats.categories.resize(taxonomy.category_count());
  stats.reviews = corpus.reviews.size();
  corpus.for_each_sentence([&](const Review&, const Sentence& sentence) {
    ++stats.sentences;
    if (sentence.annotations.empty()) ++stats.unlabeled_sentences;
    for (const auto& a : sentence.annotations) {
      auto idx = taxonomy.aspect_index(a.aspect);
      if (!idx) throw UnknownAspectError(a.aspect);
      auto& counts = stats.aspects[*idx];
      ++stats.annotations;
      ++counts.occurrences;
      switch (a.polarity()) {
        case Polarity::Positive: ++counts.positive; break;
        case Polarity::Negative: ++counts.negative; break;
        case Polarity::Neutral: ++counts.neutral; break;
        case Polarity::Mixed: ++counts.mixed; break;
      }
    }
  });
  for (std::size_t i = 0; i < stats.aspects.size(); ++i)
    stats.categories[taxonomy.category_of_index(i)] += stats.aspects[i];
  return stats;
}

namespace {

void stats_row(std::ostream& out, std::string_view label, const LabelCounts& c) {
  out << label << '\t' << c.occurrences << '\t' << c.positive << '\t' << c.negative << '\t' << c.neutral << '\t'
      << c.mixed << '\n';
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string format_stats_table(const CorpusStats& stats) {
  const auto& taxonomy = *stats.taxonomy;
  std::ostringstream out;
  out << "Label\tOcc\tPos\tNeg\tNeutral\tMixed\n";
  std::size_t aspect = 0;
  for (std::size_t c = 0; c < taxonomy.category_count(); ++c) {
    const auto& cat = taxonomy.categories()[c];
    stats_row(out, cat.name, stats.categories[c]);
    for (const auto& name : cat.aspects) stats_row(out, "  " + name, stats.aspects[aspect++]);
  }
  LabelCounts unlabeled;
  unlabeled.occurrences = stats.unlabeled_sentences;
  stats_row(out, "Other", unlabeled);
  stats_row(out, "  No Label", unlabeled);
  out << '\n';
  out << "Summary\tValue\n";
  out << "reviews\t" << stats.reviews << '\n';
  out << "sentences\t" << stats.sentences << '\n';
  out << "annotations\t" << stats.annotations << '\n';
  out << "unlabeled sentences\t" << stats.unlabeled_sentences << '\n';
  out << "sentences per review\t" << fixed4(stats.sentences_per_review()) << '\n';
  out << "annotations per sentence\t" << fixed4(stats.annotations_per_sentence()) << '\n';
  return std::move(out).str();
}

CorpusSplit split_corpus(const AnnotatedCorpus& corpus, double test_fraction, std::uint64_t seed) {
  const std::size_t n = corpus.reviews.size();
  if (n < 2) throw ValidationError("cannot split a corpus with fewer than 2 reviews");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ValidationError("test fraction must lie strictly between 0 and 1");
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  fisher_yates(std::span(order), rng);
  std::vector<bool> in_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) in_test[order[i]] = true;

  CorpusSplit split;
  split.train.taxonomy = corpus.taxonomy;
  split.test.taxonomy = corpus.taxonomy;
  for (std::size_t i = 0; i < n; ++i) (in_test[i] ? split.test : split.train).reviews.push_back(corpus.reviews[i]);
  return split;
}

std::vector<PolarityRank> polarity_ranking(const CorpusStats& stats) {
  const auto& taxonomy = *stats.taxonomy;
  std::vector<PolarityRank> ranking;
  for (std::size_t c = 0; c < taxonomy.category_count(); ++c) {
    const auto& counts = stats.categories[c];
    PolarityRank rank{taxonomy.categories()[c].name, counts.positive, counts.negative, std::nullopt};
    if (auto polar = counts.positive + counts.negative; polar > 0)
      rank.ratio = static_cast<double>(counts.positive) / static_cast<double>(polar);
    ranking.push_back(std::move(rank));
  }
  std::stable_sort(ranking.begin(), ranking.end(), [](const PolarityRank& a, const PolarityRank& b) {
    if (a.ratio.has_value() != b.ratio.has_value()) return a.ratio.has_value();
    if (a.ratio && *a.ratio != *b.ratio) return *a.ratio > *b.ratio;
    return a.category < b.category;
  });
  return ranking;
}

std::string format_ranking_table(const std::vector<PolarityRank>& ranking) {
  std::ostringstream out;
  out << "# ratio = positive / (positive + negative); categories without polar mentions last\n";
  out << "Rank\tCategory\tPos\tNeg\tRatio\n";
  std::size_t rank = 0;
  for (const auto& r : ranking) {
    out << ++rank << '\t' << r.category << '\t' << r.positive << '\t' << r.negative << '\t'
        << (r.ratio ? fixed4(*r.ratio) : std::string("undefined")) << '\n';
  }
  return std::move(out).str();
}

}  // namespace aspectmill
