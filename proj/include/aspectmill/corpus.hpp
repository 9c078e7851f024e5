#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aspectmill/taxonomy.hpp"

namespace aspectmill {

struct Annotation {
  std::string aspect;
  int score = 0;

  Polarity polarity() const { return polarity_from_score(score); }
  bool operator==(const Annotation&) const = default;
};

struct Sentence {
  std::string text;
  std::vector<Annotation> annotations;

  bool operator==(const Sentence&) const = default;
};

struct Review {
  std::string id;
  std::vector<Sentence> sentences;

  bool operator==(const Review&) const = default;
};

// Reviews plus the taxonomy they were validated against.
struct AnnotatedCorpus {
  std::vector<Review> reviews;
  std::shared_ptr<const Taxonomy> taxonomy;

  std::size_t sentence_count() const;
  std::size_t annotation_count() const;

  // Visits every sentence in review order.
  template <typename F>
  void for_each_sentence(F&& f) const {
    for (const auto& review : reviews)
      for (const auto& sentence : review.sentences) f(review, sentence);
  }

  bool operator==(const AnnotatedCorpus& other) const;
};

enum class AnnotationPolicy {
  Validate,  // annotations must reference taxonomy aspects with valid scores
  Ignore,    // annotations are dropped (prediction input)
};

// Checks every corpus invariant; throws ValidationError naming the offender.
void validate_corpus(const AnnotatedCorpus& corpus);

AnnotatedCorpus parse_corpus(std::string_view text, std::shared_ptr<const Taxonomy> taxonomy,
                             AnnotationPolicy policy = AnnotationPolicy::Validate,
                             const std::string& source = "<corpus>");
AnnotatedCorpus load_corpus(const std::filesystem::path& path, std::shared_ptr<const Taxonomy> taxonomy,
                            AnnotationPolicy policy = AnnotationPolicy::Validate);

// One JSON object per review per line; parse_corpus(serialize_corpus(c)) == c.
std::string serialize_corpus(const AnnotatedCorpus& corpus);

struct LabelCounts {
  std::size_t occurrences = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t neutral = 0;
  std::size_t mixed = 0;

  LabelCounts& operator+=(const LabelCounts& o);
  bool operator==(const LabelCounts&) const = default;
};

struct CorpusStats {
  std::shared_ptr<const Taxonomy> taxonomy;
  std::size_t reviews = 0;
  std::size_t sentences = 0;
  std::size_t annotations = 0;
  std::size_t unlabeled_sentences = 0;
  std::vector<LabelCounts> aspects;     // taxonomy aspect order
  std::vector<LabelCounts> categories;  // taxonomy category order

  double sentences_per_review() const;
  double annotations_per_sentence() const;

  bool operator==(const CorpusStats& other) const;
};

CorpusStats compute_stats(const AnnotatedCorpus& corpus);

// Tab-separated table: Label, Occ, Pos, Neg, Neutral, Mixed; categories
// followed by their aspects, then the synthetic Other/No Label rows and totals.
std::string format_stats_table(const CorpusStats& stats);

struct CorpusSplit {
  AnnotatedCorpus train;
  AnnotatedCorpus test;
};

// Review-level split; |test| = round(fraction * reviews) clamped to
// [1, reviews - 1]. Both parts keep the original review order.
CorpusSplit split_corpus(const AnnotatedCorpus& corpus, double test_fraction, std::uint64_t seed);

struct PolarityRank {
  std::string category;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::optional<double> ratio;  // positive / (positive + negative); empty if no polar mentions
};

std::vector<PolarityRank> polarity_ranking(const CorpusStats& stats);
std::string format_ranking_table(const std::vector<PolarityRank>& ranking);

}  // namespace aspectmill
