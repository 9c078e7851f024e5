#include "aspectmill/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "aspectmill/error.hpp"
#include "text_util.hpp"

namespace aspectmill {

// ---------------------------------------------------------------------------
// Tokenization

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes
};

// Lenient UTF-8 decoding; invalid bytes decode as themselves with length 1.
CodePoint decode(std::string_view s, std::size_t i) {
  auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t k) { return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F); };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0 && cont(1)) return {(static_cast<char32_t>(b0 & 0x1F) << 6) | bits(1), 2};
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2))
    return {(static_cast<char32_t>(b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2), 3};
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
    return {(static_cast<char32_t>(b0 & 0x07) << 18) | (bits(1) << 12) | (bits(2) << 6) | bits(3), 4};
  return {b0, 1};
}

bool is_unicode_space(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_punctuation(char32_t c) {
  if (c < 0x80) return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
                       (c >= 0x7B && c <= 0x7E);
  switch (c) {
    case 0xA1: case 0xAB: case 0xB7: case 0xBB: case 0xBF: case 0x2039: case 0x203A: case 0x3001: case 0x3002:
      return true;
    default:
      return c >= 0x2010 && c <= 0x2027;
  }
}

// ASCII and Latin-1 Supplement uppercase letters (U+00C0..U+00DE except U+00D7).
std::string lowercase(std::string_view s) {
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      auto d = static_cast<unsigned char>(out[i + 1]);
      if (d >= 0x80 && d <= 0x9E && d != 0x97) out[i + 1] = static_cast<char>(d + 0x20);
      ++i;
    }
  }
  return out;
}

constexpr std::string_view kNegSuffix = "n't";
constexpr std::string_view kNegSuffixCurly = "n\xE2\x80\x99t";  // n’t

void emit_core(std::string core, Tokens& out) {
  if (core.empty()) return;
  for (auto suffix : {kNegSuffix, kNegSuffixCurly}) {
    if (core.size() >= suffix.size() && std::string_view(core).ends_with(suffix)) {
      core.resize(core.size() - suffix.size());
      if (!core.empty()) out.push_back(std::move(core));
      out.emplace_back(kNegSuffix);
      return;
    }
  }
  out.push_back(std::move(core));
}

void split_chunk(std::string_view chunk, Tokens& out) {
  std::vector<CodePoint> cps;
  for (std::size_t i = 0; i < chunk.size();) {
    auto cp = decode(chunk, i);
    cps.push_back(cp);
    i += cp.length;
  }
  std::size_t first = 0, last = cps.size();
  std::size_t begin_byte = 0, end_byte = chunk.size();
  while (first < last && is_punctuation(cps[first].value)) {
    out.emplace_back(chunk.substr(begin_byte, cps[first].length));
    begin_byte += cps[first].length;
    ++first;
  }
  Tokens trailing;
  while (last > first && is_punctuation(cps[last - 1].value)) {
    end_byte -= cps[last - 1].length;
    trailing.emplace_back(chunk.substr(end_byte, cps[last - 1].length));
    --last;
  }
  emit_core(lowercase(chunk.substr(begin_byte, end_byte - begin_byte)), out);
  out.insert(out.end(), std::make_move_iterator(trailing.rbegin()), std::make_move_iterator(trailing.rend()));
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::size_t chunk_start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    auto cp = decode(text, i);
    if (is_unicode_space(cp.value)) {
      if (i > chunk_start) split_chunk(text.substr(chunk_start, i - chunk_start), tokens);
      chunk_start = i + cp.length;
    }
    i += cp.length;
  }
  if (text.size() > chunk_start) split_chunk(text.substr(chunk_start), tokens);
  return tokens;
}

// ---------------------------------------------------------------------------
// FeatureVector

namespace {

auto lower_bound_id(std::vector<FeatureVector::Entry>& v, FeatureId id) {
  return std::lower_bound(v.begin(), v.end(), id, [](const auto& e, FeatureId k) { return e.first < k; });
}

}  // namespace

void FeatureVector::add(FeatureId id, double value) {
  if (value == 0.0) return;
  if (!std::isfinite(value)) throw ValidationError("non-finite feature value");
  auto it = lower_bound_id(entries_, id);
  if (it != entries_.end() && it->first == id) {
    it->second += value;
    if (!std::isfinite(it->second)) throw ValidationError("non-finite feature value");
    if (it->second == 0.0) entries_.erase(it);
  } else {
    entries_.insert(it, {id, value});
  }
}

void FeatureVector::set(FeatureId id, double value) {
  if (!std::isfinite(value)) throw ValidationError("non-finite feature value");
  auto it = lower_bound_id(entries_, id);
  bool present = it != entries_.end() && it->first == id;
  if (value == 0.0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->second = value;
  } else {
    entries_.insert(it, {id, value});
  }
}

double FeatureVector::get(FeatureId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const auto& e, FeatureId k) { return e.first < k; });
  return (it != entries_.end() && it->first == id) ? it->second : 0.0;
}

bool FeatureVector::contains(FeatureId id) const { return get(id) != 0.0; }

void FeatureVector::merge_disjoint(const FeatureVector& other) {
  std::vector<Entry> merged;
  merged.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.cbegin();
  auto b = other.entries_.cbegin();
  while (a != entries_.cend() || b != other.entries_.cend()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      throw InvariantViolation("feature id collision while merging feature families");
    }
  }
  entries_ = std::move(merged);
}

// ---------------------------------------------------------------------------
// Vocabulary

std::string ngram_name(std::span<const std::string> tokens) {
  std::string name;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) name += ' ';
    name += tokens[i];
  }
  return name;
}

Vocabulary::Vocabulary(std::size_t documents, std::vector<Entry> entries)
    : documents_(documents), entries_(std::move(entries)) {
  lookup_.reserve(entries_.size());
  for (std::uint32_t id = 0; id < entries_.size(); ++id) {
    const auto& e = entries_[id];
    if (e.df == 0 || e.df > documents_)
      throw ValidationError("vocabulary entry '" + e.name + "' has document frequency outside [1, N]");
    if (!lookup_.emplace(e.name, id).second) throw ValidationError("duplicate vocabulary entry '" + e.name + "'");
  }
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Vocabulary::find_unigram(std::string_view token) const {
  auto id = find(token);
  if (id && entries_[*id].order == NGramOrder::Unigram) return id;
  return std::nullopt;
}

std::uint32_t Vocabulary::df(std::string_view name) const {
  auto id = find(name);
  return id ? entries_[*id].df : 0;
}

Vocabulary fit_vocabulary(std::span<const Tokens> train_sentences) {
  if (train_sentences.empty()) throw ValidationError("cannot fit a vocabulary on an empty training set");
  std::unordered_map<std::string, std::pair<NGramOrder, std::uint32_t>> counts;
  std::unordered_set<std::string> seen;
  for (const auto& tokens : train_sentences) {
    seen.clear();
    std::span<const std::string> all(tokens);
    for (std::size_t n = 1; n <= 3; ++n) {
      for (std::size_t i = 0; i + n <= all.size(); ++i) {
        auto name = ngram_name(all.subspan(i, n));
        if (!seen.insert(name).second) continue;
        auto& slot = counts[name];
        slot.first = static_cast<NGramOrder>(n);
        ++slot.second;
      }
    }
  }
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(counts.size());
  for (auto& [name, info] : counts) entries.push_back({name, info.first, info.second});
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return Vocabulary(train_sentences.size(), std::move(entries));
}

FeatureVector tfidf_features(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::map<std::uint32_t, double> tf;
  for (const auto& tok : tokens)
    if (auto id = vocab.find_unigram(tok)) tf[*id] += 1.0;
  FeatureVector out;
  const auto n_docs = static_cast<double>(vocab.documents());
  for (auto [id, count] : tf) {
    double idf = std::log(n_docs / static_cast<double>(vocab.entry(id).df));
    out.add(make_feature_id(FeatureFamily::TfIdf, id), count * idf);
  }
  return out;
}

FeatureVector ngram_features(std::span<const std::string> tokens, const Vocabulary& vocab, NGramSelection selection) {
  FeatureVector out;
  auto emit = [&](std::size_t n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
      if (auto id = vocab.find(ngram_name(tokens.subspan(i, n))))
        out.set(make_feature_id(FeatureFamily::NGram, *id), 1.0);
  };
  if (selection.bigrams) emit(2);
  if (selection.trigrams) emit(3);
  return out;
}

// ---------------------------------------------------------------------------
// Lexicons

namespace {

constexpr std::pair<LexiconKind, std::string_view> kKindNames[] = {
    {LexiconKind::AspectCue, "AspectCue"},       {LexiconKind::CategoryCue, "CategoryCue"},
    {LexiconKind::PolarityWord, "PolarityWord"}, {LexiconKind::Diminisher, "Diminisher"},
    {LexiconKind::Intensifier, "Intensifier"},   {LexiconKind::PriorScored, "PriorScored"},
    {LexiconKind::NegationTrigger, "NegationTrigger"},
};

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(LexiconKind kind) {
  for (auto [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

LexiconKind lexicon_kind_from_string(std::string_view s) {
  for (auto [k, name] : kKindNames)
    if (name == s) return k;
  throw ValidationError("unknown lexicon kind '" + std::string(s) + "'");
}

std::string Lexicon::serialize() const {
  std::string out = "kind: " + std::string(to_string(kind)) + "\n";
  for (const auto& [term, prior] : entries) {
    out += term;
    if (prior) out += '\t' + format_double(*prior);
    out += '\n';
  }
  return out;
}

std::string Lexicon::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(serialize())));
  return buf;
}

Lexicon parse_lexicon(std::string_view text, std::string name, const std::string& source) {
  Lexicon lex;
  lex.name = std::move(name);
  bool have_kind = false;
  std::size_t lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto line = raw;
    if (auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (!have_kind) {
      constexpr std::string_view prefix = "kind:";
      if (!line.starts_with(prefix)) throw ParseError(source, lineno, "expected 'kind: <Kind>' header");
      try {
        lex.kind = lexicon_kind_from_string(detail::trim(line.substr(prefix.size())));
      } catch (const ValidationError& e) {
        throw ParseError(source, lineno, e.what());
      }
      have_kind = true;
      continue;
    }
    std::string_view term = line;
    std::optional<double> prior;
    if (auto tab = line.find('\t'); tab != std::string_view::npos) {
      term = detail::trim(line.substr(0, tab));
      auto value = detail::trim(line.substr(tab + 1));
      double parsed = 0.0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), parsed);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(parsed))
        throw ParseError(source, lineno, "invalid prior '" + std::string(value) + "'");
      prior = parsed;
    }
    if (term.empty()) throw ParseError(source, lineno, "empty term");
    if (lex.kind == LexiconKind::PriorScored && !prior)
      throw ParseError(source, lineno, "PriorScored entry without a prior");
    if (lex.kind != LexiconKind::PriorScored && prior)
      throw ParseError(source, lineno, "only PriorScored lexicons carry priors");
    if (!lex.entries.emplace(lowercase(term), prior).second)
      throw ParseError(source, lineno, "duplicate term '" + std::string(term) + "'");
  }
  if (!have_kind) throw ParseError(source, lineno, "missing 'kind: <Kind>' header");
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(detail::read_file(path), path.stem().string(), path.string());
}

std::vector<Lexicon> load_lexicon_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error("lexicon directory '" + dir.string() + "' does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension();
    if (ext == ".lex" || ext == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Lexicon> lexicons;
  for (const auto& f : files) lexicons.push_back(load_lexicon(f));
  return lexicons;
}

const std::set<std::string>& default_negation_triggers() {
  static const std::set<std::string> triggers = {"not", "n't", "nicht", "kein", "keine"};
  return triggers;
}

std::set<std::string> LexiconSet::negation_triggers() const {
  std::set<std::string> triggers;
  bool any = false;
  for (const auto& lex : lexicons) {
    if (lex.kind != LexiconKind::NegationTrigger) continue;
    any = true;
    for (const auto& [term, prior] : lex.entries) triggers.insert(term);
  }
  return any ? triggers : default_negation_triggers();
}

FeatureVector lexicon_features(std::span<const std::string> tokens, std::span<const Lexicon> lexicons) {
  return lexicon_features(tokens, lexicons, [](LexiconKind) { return true; });
}

std::vector<std::string> negation_cross_terms(std::span<const std::string> tokens,
                                              const std::set<std::string>& triggers) {
  auto first = std::find_if(tokens.begin(), tokens.end(), [&](const std::string& t) { return triggers.count(t) > 0; });
  if (first == tokens.end()) return {};
  return {std::next(first), tokens.end()};
}

FeatureVector negation_features(std::span<const std::string> tokens, const std::set<std::string>& triggers,
                                const Vocabulary& vocab) {
  FeatureVector out;
  for (const auto& word : negation_cross_terms(tokens, triggers))
    if (auto id = vocab.find_unigram(word)) out.set(make_feature_id(FeatureFamily::Negation, *id), 1.0);
  return out;
}

FeatureVector assemble(std::span<const std::string> tokens, const Vocabulary& vocab, const LexiconSet& lexicons,
                       FeatureProfile profile) {
  FeatureVector out;
  std::span<const Lexicon> lex(lexicons.lexicons);
  if (profile == FeatureProfile::Aspect) {
    out.merge_disjoint(tfidf_features(tokens, vocab));
    out.merge_disjoint(ngram_features(tokens, vocab, {.bigrams = true, .trigrams = true}));
    out.merge_disjoint(lexicon_features(tokens, lex, [](LexiconKind k) {
      return k == LexiconKind::AspectCue || k == LexiconKind::CategoryCue;
    }));
  } else {
    out.merge_disjoint(ngram_features(tokens, vocab, {.bigrams = true, .trigrams = false}));
    out.merge_disjoint(lexicon_features(tokens, lex, [](LexiconKind k) {
      return k == LexiconKind::PolarityWord || k == LexiconKind::Diminisher || k == LexiconKind::Intensifier ||
             k == LexiconKind::PriorScored;
    }));
    out.merge_disjoint(negation_features(tokens, lexicons.negation_triggers(), vocab));
  }
  return out;
}

}  // namespace aspectmill
