#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "aspectmill/architectures.hpp"
#include "aspectmill/error.hpp"

namespace aspectmill {

double smoothed_mutual_information(std::size_t both, std::size_t term_only, std::size_t label_only,
                                   std::size_t neither) {
  const double a = static_cast<double>(both) + 1.0;
  const double b = static_cast<double>(term_only) + 1.0;
  const double c = static_cast<double>(label_only) + 1.0;
  const double d = static_cast<double>(neither) + 1.0;
  const double total = a + b + c + d;
  const double term_yes = a + b, term_no = c + d;
  const double label_yes = a + c, label_no = b + d;
  auto cell = [&](double n, double row, double col) { return n / total * std::log(n * total / (row * col)); };
  return cell(a, term_yes, label_yes) + cell(b, term_yes, label_no) + cell(c, term_no, label_yes) +
         cell(d, term_no, label_no);
}

std::map<std::string, std::vector<ScoredTerm>> rank_trigger_terms(const AnnotatedCorpus& corpus, std::size_t k) {
  if (!corpus.taxonomy) throw Error("corpus without taxonomy");
  if (k == 0) throw ValidationError("trigger term count k must be at least 1");
  const auto& taxonomy = *corpus.taxonomy;
  const std::size_t n_aspects = taxonomy.aspect_count();

  // term -> (sentence frequency, per-aspect co-occurrence)
  std::map<std::string, std::pair<std::size_t, std::vector<std::size_t>>> stats;
  std::vector<std::size_t> aspect_sentences(n_aspects, 0);
  std::size_t sentences = 0;
  corpus.for_each_sentence([&](const Review&, const Sentence& sentence) {
    ++sentences;
    std::vector<std::size_t> present;
    for (const auto& a : sentence.annotations) {
      auto idx = taxonomy.aspect_index(a.aspect);
      if (!idx) throw UnknownAspectError(a.aspect);
      present.push_back(*idx);
      ++aspect_sentences[*idx];
    }
    auto tokens = tokenize(sentence.text);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& term : unique) {
      auto& slot = stats[term];
      if (slot.second.empty()) slot.second.assign(n_aspects, 0);
      ++slot.first;
      for (auto a : present) ++slot.second[a];
    }
  });

  std::map<std::string, std::vector<ScoredTerm>> ranked;
  for (std::size_t a = 0; a < n_aspects; ++a) {
    std::vector<ScoredTerm> scored;
    scored.reserve(stats.size());
    for (const auto& [term, slot] : stats) {
      const std::size_t both = slot.second[a];
      const std::size_t term_only = slot.first - both;
      const std::size_t label_only = aspect_sentences[a] - both;
      const std::size_t neither = sentences - slot.first - label_only;
      scored.push_back({term, smoothed_mutual_information(both, term_only, label_only, neither)});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredTerm& x, const ScoredTerm& y) {
      if (x.mi != y.mi) return x.mi > y.mi;
      return x.term < y.term;
    });
    if (scored.size() > k) scored.resize(k);
    ranked.emplace(taxonomy.aspects()[a], std::move(scored));
  }
  return ranked;
}

std::map<std::string, std::vector<std::string>> select_trigger_terms(const AnnotatedCorpus& corpus, std::size_t k) {
  std::map<std::string, std::vector<std::string>> out;
  for (auto& [aspect, scored] : rank_trigger_terms(corpus, k)) {
    auto& terms = out[aspect];
    for (auto& s : scored) terms.push_back(std::move(s.term));
  }
  return out;
}

}  // namespace aspectmill
