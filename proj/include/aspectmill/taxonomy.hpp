#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aspectmill {

enum class Polarity { Positive, Negative, Neutral, Mixed };

std::string_view to_string(Polarity p);
Polarity polarity_from_string(std::string_view s);

// Maps an annotation score in [-9,9] or 99 onto the polarity label space.
// Throws ScoreRangeError otherwise.
Polarity polarity_from_score(long long score);

bool is_valid_score(long long score) noexcept;

inline constexpr int kMixedScore = 99;

struct Category {
  std::string name;
  std::vector<std::string> aspects;

  bool operator==(const Category&) const = default;
};

// Two-level label hierarchy. Immutable once built; every constructor path
// validates name uniqueness and non-empty categories.
class Taxonomy {
 public:
  Taxonomy(std::vector<Category> categories, std::string version = {});

  const std::vector<Category>& categories() const noexcept { return categories_; }
  const std::string& version() const noexcept { return version_; }

  std::size_t category_count() const noexcept { return categories_.size(); }
  std::size_t aspect_count() const noexcept { return aspects_.size(); }

  // All aspects in file order (category by category).
  const std::vector<std::string>& aspects() const noexcept { return aspects_; }

  bool has_aspect(std::string_view aspect) const;
  std::optional<std::size_t> aspect_index(std::string_view aspect) const;
  std::optional<std::size_t> category_index(std::string_view category) const;

  // Index of the category owning the aspect at `aspect_idx`.
  std::size_t category_of_index(std::size_t aspect_idx) const { return owner_.at(aspect_idx); }

  // Throws UnknownAspectError.
  const std::string& category_of(std::string_view aspect) const;

  // Canonical config text; parse_taxonomy(serialize()) reproduces *this.
  std::string serialize() const;

  bool operator==(const Taxonomy& other) const {
    return version_ == other.version_ && categories_ == other.categories_;
  }

 private:
  std::vector<Category> categories_;
  std::string version_;
  std::vector<std::string> aspects_;
  std::vector<std::size_t> owner_;
  std::unordered_map<std::string, std::size_t> aspect_lookup_;
  std::unordered_map<std::string, std::size_t> category_lookup_;
};

Taxonomy parse_taxonomy(std::string_view text, const std::string& source = "<taxonomy>");
Taxonomy load_taxonomy(const std::filesystem::path& path);

// The 8-category / 32-aspect distance-education taxonomy compiled into the
// library; identical to data/default_taxonomy.txt.
const Taxonomy& default_taxonomy();
std::string_view default_taxonomy_text();

}  // namespace aspectmill
