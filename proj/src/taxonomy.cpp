#include "aspectmill/taxonomy.hpp"

#include <sstream>

#include "aspectmill/error.hpp"
#include "text_util.hpp"

namespace aspectmill {

namespace {

constexpr std::string_view kVersionPrefix = "version:";

// Kept byte-identical to data/default_taxonomy.txt.
constexpr std::string_view kDefaultTaxonomy = R"(; version: distance-education-1
# Study Contents
Average Demand
Up-To-Date
Practical Relevance
Quality of Contents
Exams
# Study Materials
Production Quality
Accessibility
Extent of Materials
Exercise Materials
# Support and Organization
Supervision
Revision Time
Organization
# Didactics
Teaching Competence
Didactics of Materials
Justified Grading
Revision Quality
# Online-Campus
Usefulness
Activity
User-Friendliness
Features
# Tuition
Basic Tuition
Additional Charges
Scholarships
# Attendance Seminar
Seminar Contents
Management
Locations
Communications
# Personal
Flexibility
Recommendation
Personal Benefit
Overall Satisfaction
Learning Effort
)";

}  // namespace

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Positive: return "positive";
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
    case Polarity::Mixed: return "mixed";
  }
  return "?";
}

Polarity polarity_from_string(std::string_view s) {
  if (s == "positive") return Polarity::Positive;
  if (s == "negative") return Polarity::Negative;
  if (s == "neutral") return Polarity::Neutral;
  if (s == "mixed") return Polarity::Mixed;
  throw ValidationError("unknown polarity '" + std::string(s) + "'");
}

bool is_valid_score(long long score) noexcept {
  return (score >= -9 && score <= 9) || score == kMixedScore;
}

Polarity polarity_from_score(long long score) {
  if (!is_valid_score(score)) throw ScoreRangeError(score);
  if (score == kMixedScore) return Polarity::Mixed;
  if (score > 0) return Polarity::Positive;
  if (score < 0) return Polarity::Negative;
  return Polarity::Neutral;
}

Taxonomy::Taxonomy(std::vector<Category> categories, std::string version)
    : categories_(std::move(categories)), version_(std::move(version)) {
  if (categories_.empty()) throw ValidationError("taxonomy has no categories");
  for (std::size_t c = 0; c < categories_.size(); ++c) {
    auto& cat = categories_[c];
    cat.name = std::string(detail::trim(cat.name));
    if (cat.name.empty()) throw ValidationError("category with empty name");
    if (cat.aspects.empty()) throw ValidationError("category '" + cat.name + "' has no aspects");
    if (!category_lookup_.emplace(cat.name, c).second)
      throw ValidationError("duplicate category '" + cat.name + "'");
    for (auto& aspect : cat.aspects) {
      aspect = std::string(detail::trim(aspect));
      if (aspect.empty()) throw ValidationError("empty aspect name in '" + cat.name + "'");
      if (!aspect_lookup_.emplace(aspect, aspects_.size()).second)
        throw ValidationError("duplicate aspect '" + aspect + "'");
      aspects_.push_back(aspect);
      owner_.push_back(c);
    }
  }
}

bool Taxonomy::has_aspect(std::string_view aspect) const {
  return aspect_index(aspect).has_value();
}

std::optional<std::size_t> Taxonomy::aspect_index(std::string_view aspect) const {
  auto it = aspect_lookup_.find(std::string(detail::trim(aspect)));
  if (it == aspect_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Taxonomy::category_index(std::string_view category) const {
  auto it = category_lookup_.find(std::string(detail::trim(category)));
  if (it == category_lookup_.end()) return std::nullopt;
  return it->second;
}

const std::string& Taxonomy::category_of(std::string_view aspect) const {
  auto idx = aspect_index(aspect);
  if (!idx) throw UnknownAspectError(std::string(aspect));
  return categories_[owner_[*idx]].name;
}

std::string Taxonomy::serialize() const {
  std::ostringstream out;
  if (!version_.empty()) out << "; " << kVersionPrefix << ' ' << version_ << '\n';
  for (const auto& cat : categories_) {
    out << "# " << cat.name << '\n';
    for (const auto& aspect : cat.aspects) out << aspect << '\n';
  }
  return std::move(out).str();
}

Taxonomy parse_taxonomy(std::string_view text, const std::string& source) {
  std::vector<Category> categories;
  std::string version;
  std::size_t lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == ';') {
      auto body = detail::trim(line.substr(1));
      if (body.starts_with(kVersionPrefix)) {
        if (!categories.empty()) throw ParseError(source, lineno, "version tag after first category");
        version = std::string(detail::trim(body.substr(kVersionPrefix.size())));
      }
      continue;
    }
    if (line.front() == '#') {
      auto name = detail::trim(line.substr(1));
      if (name.empty()) throw ParseError(source, lineno, "category header without a name");
      categories.push_back(Category{std::string(name), {}});
      continue;
    }
    if (auto semi = line.find(';'); semi != std::string_view::npos) line = detail::trim(line.substr(0, semi));
    if (line.empty()) continue;
    if (categories.empty()) throw ParseError(source, lineno, "aspect '" + std::string(line) + "' before any category");
    categories.back().aspects.emplace_back(line);
  }
  try {
    return Taxonomy(std::move(categories), std::move(version));
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  return parse_taxonomy(detail::read_file(path), path.string());
}

std::string_view default_taxonomy_text() { return kDefaultTaxonomy; }

const Taxonomy& default_taxonomy() {
  static const Taxonomy taxonomy = parse_taxonomy(kDefaultTaxonomy, "<default taxonomy>");
  return taxonomy;
}

}  // namespace aspectmill
