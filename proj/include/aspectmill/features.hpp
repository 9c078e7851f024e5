#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace aspectmill {

// ---------------------------------------------------------------------------
// Tokenization

// Lowercases (ASCII and Latin-1 letters), splits on Unicode whitespace, peels
// leading/trailing punctuation into one-character tokens and splits a final
// "n't" off its stem. Inner punctuation ("e-mail", "don't" before the
// contraction rule) stays inside the token.
std::vector<std::string> tokenize(std::string_view text);

using Tokens = std::vector<std::string>;

// ---------------------------------------------------------------------------
// Feature ids and sparse vectors

// Feature families occupy disjoint id ranges: the family sits in the top
// byte and the family-local index in the low 56 bits.
enum class FeatureFamily : std::uint8_t {
  TfIdf = 1,
  NGram = 2,
  Lexicon = 3,
  Negation = 4,
  Category = 5,
};

using FeatureId = std::uint64_t;

constexpr FeatureId make_feature_id(FeatureFamily family, std::uint64_t index) {
  return (static_cast<FeatureId>(family) << 56) | (index & ((FeatureId{1} << 56) - 1));
}
constexpr FeatureFamily family_of(FeatureId id) { return static_cast<FeatureFamily>(id >> 56); }
constexpr std::uint64_t index_of(FeatureId id) { return id & ((FeatureId{1} << 56) - 1); }

// Sparse vector sorted by id. Zero values are never stored and non-finite
// values are rejected.
class FeatureVector {
 public:
  using Entry = std::pair<FeatureId, double>;

  FeatureVector() = default;

  // Adds `value` to the entry for `id`; an entry that reaches zero is removed.
  void add(FeatureId id, double value);
  void set(FeatureId id, double value);
  double get(FeatureId id) const;
  bool contains(FeatureId id) const;

  // Union of two vectors whose ids must not overlap.
  void merge_disjoint(const FeatureVector& other);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  bool operator==(const FeatureVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Vocabulary

enum class NGramOrder : std::uint8_t { Unigram = 1, Bigram = 2, Trigram = 3 };

// Joins n-gram tokens with a space; tokens never contain whitespace.
std::string ngram_name(std::span<const std::string> tokens);

// Frozen interning table over the unigrams, bigrams and trigrams of the
// training sentences (one sentence is one document). Ids are dense and
// assigned in lexicographic order of the n-gram names.
class Vocabulary {
 public:
  struct Entry {
    std::string name;
    NGramOrder order;
    std::uint32_t df;

    bool operator==(const Entry&) const = default;
  };

  Vocabulary() = default;
  // Restores a vocabulary from stored entries (bundle loading).
  Vocabulary(std::size_t documents, std::vector<Entry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t documents() const noexcept { return documents_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const Entry& entry(std::uint32_t id) const { return entries_.at(id); }

  std::optional<std::uint32_t> find(std::string_view name) const;
  std::optional<std::uint32_t> find_unigram(std::string_view token) const;
  std::uint32_t df(std::string_view name) const;

  bool operator==(const Vocabulary& other) const {
    return documents_ == other.documents_ && entries_ == other.entries_;
  }

 private:
  std::size_t documents_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::uint32_t> lookup_;
};

// Throws ValidationError on an empty training set.
Vocabulary fit_vocabulary(std::span<const Tokens> train_sentences);

// tf(t) * ln(N / df(t)) for interned unigrams; zero weights and
// out-of-vocabulary terms are omitted.
FeatureVector tfidf_features(std::span<const std::string> tokens, const Vocabulary& vocab);

struct NGramSelection {
  bool bigrams = true;
  bool trigrams = true;
};

// Binary indicator per interned bigram/trigram present in the sequence.
FeatureVector ngram_features(std::span<const std::string> tokens, const Vocabulary& vocab,
                             NGramSelection selection = {});

// ---------------------------------------------------------------------------
// Lexicons

enum class LexiconKind {
  AspectCue,
  CategoryCue,
  PolarityWord,
  Diminisher,
  Intensifier,
  PriorScored,
  NegationTrigger,
};

std::string_view to_string(LexiconKind kind);
LexiconKind lexicon_kind_from_string(std::string_view s);

struct Lexicon {
  std::string name;
  LexiconKind kind = LexiconKind::PolarityWord;
  std::map<std::string, std::optional<double>> entries;  // lowercased term -> prior

  bool contains(std::string_view term) const { return entries.find(std::string(term)) != entries.end(); }

  // Canonical text form; parse_lexicon(serialize()) reproduces the lexicon.
  std::string serialize() const;
  // FNV-1a over the canonical text, as 16 hex digits.
  std::string digest() const;

  bool operator==(const Lexicon&) const = default;
};

Lexicon parse_lexicon(std::string_view text, std::string name, const std::string& source = "<lexicon>");
Lexicon load_lexicon(const std::filesystem::path& path);

// Loads every *.lex / *.txt file of a directory in filename order; the
// lexicon name is the file stem. Throws Error if the directory is missing.
std::vector<Lexicon> load_lexicon_directory(const std::filesystem::path& dir);

// Triggers used when no NegationTrigger lexicon is supplied.
const std::set<std::string>& default_negation_triggers();

// Lexicons plus the negation triggers they imply.
struct LexiconSet {
  std::vector<Lexicon> lexicons;

  std::set<std::string> negation_triggers() const;
  bool operator==(const LexiconSet&) const = default;
};

// Count/sum features for lexicons whose kind passes `include`. Slot i*4+k
// belongs to the i-th lexicon of the list; PriorScored lexicons use three
// slots (positive sum, |negative| sum, zero-prior count), others one count.
template <typename KindFilter>
FeatureVector lexicon_features(std::span<const std::string> tokens, std::span<const Lexicon> lexicons,
                               KindFilter include);
FeatureVector lexicon_features(std::span<const std::string> tokens, std::span<const Lexicon> lexicons);

// NEG x w indicator for each vocabulary unigram w strictly after the first
// trigger token. Index space is the unigram id of w.
FeatureVector negation_features(std::span<const std::string> tokens, const std::set<std::string>& triggers,
                                const Vocabulary& vocab);

// Untied variant reporting the raw crossed words; useful for inspection
// and for checking the cross-product rule independent of the vocabulary.
std::vector<std::string> negation_cross_terms(std::span<const std::string> tokens,
                                              const std::set<std::string>& triggers);

enum class FeatureProfile { Aspect, Polarity };

// Aspect: tf-idf + bigrams/trigrams + cue lexicons.
// Polarity: bigrams + polarity/diminisher/intensifier/prior lexicons + negation.
FeatureVector assemble(std::span<const std::string> tokens, const Vocabulary& vocab, const LexiconSet& lexicons,
                       FeatureProfile profile);

// ---------------------------------------------------------------------------

template <typename KindFilter>
FeatureVector lexicon_features(std::span<const std::string> tokens, std::span<const Lexicon> lexicons,
                               KindFilter include) {
  FeatureVector out;
  for (std::size_t i = 0; i < lexicons.size(); ++i) {
    const auto& lex = lexicons[i];
    if (lex.kind == LexiconKind::NegationTrigger || !include(lex.kind)) continue;
    const auto slot = [&](std::uint64_t k) { return make_feature_id(FeatureFamily::Lexicon, i * 4 + k); };
    double count = 0.0, pos = 0.0, neg = 0.0, zero = 0.0;
    for (const auto& tok : tokens) {
      auto it = lex.entries.find(tok);
      if (it == lex.entries.end()) continue;
      count += 1.0;
      if (lex.kind == LexiconKind::PriorScored) {
        double prior = it->second.value_or(0.0);
        if (prior > 0) pos += prior;
        else if (prior < 0) neg += -prior;
        else zero += 1.0;
      }
    }
    if (lex.kind == LexiconKind::PriorScored) {
      out.add(slot(0), pos);
      out.add(slot(1), neg);
      out.add(slot(2), zero);
    } else {
      out.add(slot(0), count);
    }
  }
  return out;
}

}  // namespace aspectmill
