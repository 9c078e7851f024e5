#pragma once

// Generated corpora for end-to-end tests. Every aspect owns one cue token
// ("cue" + aspect index), polar sentences carry one polarity word, and the
// remaining tokens come from a shared filler pool.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "aspectmill/corpus.hpp"
#include "aspectmill/shuffle.hpp"
#include "aspectmill/taxonomy.hpp"

namespace testsupport {

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "the", "a", "course", "was", "this", "we", "it", "and", "of", "in", "overall", "term",
      "also", "then", "our", "some", "many", "with", "for", "during", "week", "semester",
  };
  return words;
}

inline std::string cue_token(std::size_t aspect_index) { return "cue" + std::to_string(aspect_index); }

struct SyntheticOptions {
  std::size_t reviews = 120;
  std::size_t min_sentences = 4;
  std::size_t max_sentences = 8;
  double unlabeled_rate = 0.15;
  double second_aspect_rate = 0.2;
  std::uint64_t seed = 7;
};

inline aspectmill::AnnotatedCorpus make_synthetic_corpus(std::shared_ptr<const aspectmill::Taxonomy> taxonomy,
                                                         const SyntheticOptions& opt = {}) {
  using aspectmill::uniform_below;
  using aspectmill::uniform_unit;
  aspectmill::Rng rng(opt.seed);
  const auto& aspects = taxonomy->aspects();
  const auto& filler = filler_words();

  aspectmill::AnnotatedCorpus corpus;
  corpus.taxonomy = taxonomy;
  // Cycling through aspects keeps every aspect populated.
  std::size_t next_aspect = 0;
  for (std::size_t r = 0; r < opt.reviews; ++r) {
    aspectmill::Review review;
    review.id = "syn" + std::to_string(r);
    auto count = opt.min_sentences + uniform_below(rng, opt.max_sentences - opt.min_sentences + 1);
    for (std::size_t s = 0; s < count; ++s) {
      aspectmill::Sentence sentence;
      std::vector<std::string> words;
      for (std::size_t f = 0, n = 3 + uniform_below(rng, 5); f < n; ++f)
        words.push_back(filler[uniform_below(rng, filler.size())]);

      if (uniform_unit(rng) >= opt.unlabeled_rate) {
        std::vector<std::size_t> chosen = {next_aspect++ % aspects.size()};
        if (uniform_unit(rng) < opt.second_aspect_rate) {
          auto other = uniform_below(rng, aspects.size());
          if (other != chosen[0]) chosen.push_back(other);
        }
        // Sentence-level polarity shared by its annotations.
        int kind = static_cast<int>(uniform_below(rng, 3));
        int score = kind == 0 ? 0 : kind == 1 ? 1 + static_cast<int>(uniform_below(rng, 9))
                                             : -1 - static_cast<int>(uniform_below(rng, 9));
        for (auto a : chosen) {
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, words.size() + 1)),
                       cue_token(a));
          sentence.annotations.push_back({aspects[a], score});
        }
        if (score != 0) {
          const char* word = score > 0 ? "splendid" : "dreadful";
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, words.size() + 1)), word);
        }
      }
      for (const auto& w : words) sentence.text += (sentence.text.empty() ? "" : " ") + w;
      sentence.text += ".";
      review.sentences.push_back(std::move(sentence));
    }
    corpus.reviews.push_back(std::move(review));
  }
  return corpus;
}

inline std::shared_ptr<const aspectmill::Taxonomy> default_taxonomy_ptr() {
  return std::make_shared<const aspectmill::Taxonomy>(aspectmill::default_taxonomy());
}

}  // namespace testsupport
