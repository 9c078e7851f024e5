#include <doctest.h>

#include <fstream>
#include <sstream>

#include "aspectmill/error.hpp"
#include "aspectmill/taxonomy.hpp"

using namespace aspectmill;

TEST_CASE("default taxonomy has 8 categories and 32 aspects") {
  const auto& t = default_taxonomy();
  CHECK(t.category_count() == 8);
  CHECK(t.aspect_count() == 32);
  CHECK(t.version() == "distance-education-1");
}

TEST_CASE("category lookup") {
  const auto& t = default_taxonomy();
  CHECK(t.category_of("Supervision") == "Support and Organization");
  CHECK(t.category_of("Flexibility") == "Personal");
  CHECK(t.category_of("Scholarships") == "Tuition");
  CHECK(t.category_of("Additional Charges") == "Tuition");
  CHECK_THROWS_AS(t.category_of("NoSuchAspect"), UnknownAspectError);
  CHECK_FALSE(t.has_aspect("supervision"));
}

TEST_CASE("every aspect round-trips through its category") {
  const auto& t = default_taxonomy();
  for (std::size_t i = 0; i < t.aspect_count(); ++i) {
    const auto& a = t.aspects()[i];
    const auto& cat = t.categories()[*t.category_index(t.category_of(a))];
    CHECK(std::find(cat.aspects.begin(), cat.aspects.end(), a) != cat.aspects.end());
    CHECK(t.category_of_index(i) == *t.category_index(cat.name));
  }
}

TEST_CASE("custom config with a Tuition category") {
  auto t = parse_taxonomy("# Tuition\nBasic Tuition\nAdditional Charges\nScholarships\n# Other\nMisc\n");
  CHECK(t.category_of("Scholarships") == "Tuition");
  CHECK(t.aspect_count() == 4);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(parse_taxonomy(""), ValidationError);
  CHECK_THROWS_AS(parse_taxonomy("; only a comment\n"), ValidationError);
  CHECK_THROWS_AS(parse_taxonomy("# A\n"), ValidationError);
  CHECK_THROWS_AS(parse_taxonomy("# A\nx\n# A\ny\n"), ValidationError);
  CHECK_THROWS_AS(parse_taxonomy("# A\nx\n# B\nx\n"), ValidationError);
  CHECK_THROWS_AS(Taxonomy({}), ValidationError);
  try {
    parse_taxonomy("; header\nOrphan\n# A\nx\n", "tax.txt");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("tax.txt:2") != std::string::npos);
  }
}

TEST_CASE("names are trimmed and matched case-sensitively") {
  auto t = parse_taxonomy("#   Cat  \n   Aspect One   ; trailing comment\n");
  CHECK(t.categories()[0].name == "Cat");
  CHECK(t.has_aspect("Aspect One"));
  CHECK_FALSE(t.has_aspect("aspect one"));
}

TEST_CASE("default config re-serializes byte-identically") {
  CHECK(default_taxonomy().serialize() == default_taxonomy_text());
  std::ifstream in(std::string(ASPECTMILL_DATA_DIR) + "/default_taxonomy.txt", std::ios::binary);
  std::stringstream file;
  file << in.rdbuf();
  CHECK(file.str() == default_taxonomy_text());
  CHECK(parse_taxonomy(file.str()).serialize() == file.str());
}

TEST_CASE("polarity from score") {
  CHECK(polarity_from_score(9) == Polarity::Positive);
  CHECK(polarity_from_score(0) == Polarity::Neutral);
  CHECK(polarity_from_score(99) == Polarity::Mixed);
  CHECK(polarity_from_score(-1) == Polarity::Negative);
  CHECK_THROWS_AS(polarity_from_score(12), ScoreRangeError);
  CHECK_THROWS_AS(polarity_from_score(-10), ScoreRangeError);
  CHECK_THROWS_AS(polarity_from_score(98), ScoreRangeError);
}

TEST_CASE("polarity_from_score is total and sign-consistent") {
  for (long long p = -20; p <= 120; ++p) {
    bool valid = (p >= -9 && p <= 9) || p == 99;
    CHECK(is_valid_score(p) == valid);
    if (!valid) continue;
    auto label = polarity_from_score(p);
    CHECK((label == Polarity::Positive) == (p >= 1 && p <= 9));
    CHECK((label == Polarity::Negative) == (p <= -1));
    CHECK((label == Polarity::Neutral) == (p == 0));
  }
}

TEST_CASE("polarity names round-trip") {
  for (auto p : {Polarity::Positive, Polarity::Negative, Polarity::Neutral, Polarity::Mixed})
    CHECK(polarity_from_string(to_string(p)) == p);
}
