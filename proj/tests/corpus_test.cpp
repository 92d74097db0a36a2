#include <doctest.h>

#include <random>

#include "learnpath/corpus.hpp"
#include "learnpath/errors.hpp"
#include "test_support.hpp"

using namespace learnpath;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::kIo;
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("normalize_term") {
  CHECK(normalize_term("  Nucleic   Acid ") == "nucleic acid");
  CHECK(normalize_term("cell") == "cell");
  CHECK(normalize_term("DNA") == "dna");
  CHECK(normalize_term("\tGenetic\n material") == "genetic material");
  CHECK(code_of([] { normalize_term("   "); }) == Errc::kInvalidTerm);
  CHECK(code_of([] { normalize_term(""); }) == Errc::kInvalidTerm);
  CHECK(code_of([] { normalize_term(" <ROOT> "); }) == Errc::kInvalidTerm);
}

TEST_CASE("normalize_term is idempotent") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "aBc XyZ\t\n-";
  for (int i = 0; i < 1000; ++i) {
    std::string raw;
    const auto len = 1 + rng() % 12;
    for (std::size_t k = 0; k < len; ++k) raw.push_back(alphabet[rng() % alphabet.size()]);
    std::string once;
    try {
      once = normalize_term(raw);
    } catch (const Error&) {
      continue;
    }
    CHECK(normalize_term(once) == once);
  }
}

TEST_CASE("parse_definitions") {
  SUBCASE("keyword order and dedupe") {
    const auto defs = parse_definitions(R"([
      {"term": "DNA", "keywords": ["Nucleic acid", "Cell", "nucleic  ACID"]},
      {"term": "Cell", "keywords": []}
    ])");
    REQUIRE(defs.size() == 2);
    CHECK(defs[0] == TermDefinition{"dna", {"nucleic acid", "cell"}});
    CHECK(defs[1] == TermDefinition{"cell", {}});
  }
  SUBCASE("empty array") { CHECK(parse_definitions("[]").empty()); }
  SUBCASE("missing keywords means none") { CHECK(parse_definitions(R"([{"term":"x"}])")[0].keywords.empty()); }
  SUBCASE("malformed entry names its line") {
    const std::string text = "[\n  {\"term\": \"a\", \"keywords\": []},\n  {\"keywords\": [\"b\"]}\n]";
    CHECK(code_of([&] { parse_definitions(text); }) == Errc::kParse);
    CHECK(error_text([&] { parse_definitions(text); }).starts_with("line 3:"));
  }
  SUBCASE("syntax error names its line") {
    const std::string text = "[\n  {\"term\": \"a\",\n  \"keywords\": [}\n]";
    CHECK(error_text([&] { parse_definitions(text); }).starts_with("line 3:"));
  }
  SUBCASE("duplicate term") {
    const std::string text = "[{\"term\":\"Cell\"},\n{\"term\":\" cell \"}]";
    CHECK(code_of([&] { parse_definitions(text); }) == Errc::kDuplicateDefinition);
    CHECK(error_text([&] { parse_definitions(text); }).starts_with("line 2:"));
  }
  SUBCASE("self reference rejected") {
    CHECK(code_of([] { parse_definitions(R"([{"term":"a","keywords":["A"]}])"); }) == Errc::kParse);
  }
  SUBCASE("not an array") { CHECK(code_of([] { parse_definitions(R"({"term":"a"})"); }) == Errc::kParse); }
}

TEST_CASE("to_transaction") {
  const auto t = to_transaction(TermDefinition{"mitochondria", {"cell", "eukaryotic", "organelle"}});
  CHECK(t.target == "mitochondria");
  CHECK(t.prerequisites == std::vector<std::string>{"cell", "eukaryotic", "organelle"});
  CHECK(t.kind == TransactionKind::kDefinition);
  CHECK(to_transaction(TermDefinition{"cell", {}}).prerequisites.empty());
  CHECK(to_transaction(TermDefinition{"nucleotide", {"dna", "rna"}}).prerequisites ==
        std::vector<std::string>{"dna", "rna"});
}

TEST_CASE("parse_qa_log") {
  const auto txns = parse_qa_log(
      "{\"question\": \"t1\", \"answer_keywords\": [\"t2\", \"t3\", \"t4\"]}\n"
      "\n"
      "{\"question\": \"t5\", \"answer_keywords\": [\"t6\", \"t6\", \"T7\"]}\n");
  REQUIRE(txns.size() == 2);
  CHECK(txns[0] == Transaction{"t1", {"t2", "t3", "t4"}, TransactionKind::kQA});
  CHECK(txns[1].prerequisites == std::vector<std::string>{"t6", "t7"});
  CHECK(parse_qa_log("").empty());
  CHECK(error_text([] { parse_qa_log("{\"question\":\"a\"}\n{\"answer_keywords\":[]}\n"); }).starts_with("record 2:"));
  CHECK(code_of([] { parse_qa_log("not json\n"); }) == Errc::kParse);
}

TEST_CASE("definitions round-trip through serialize") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    std::vector<TermDefinition> defs;
    for (const auto& t : testing::random_transactions(rng, 8, 1 + static_cast<int>(rng() % 6), 4)) {
      if (std::none_of(defs.begin(), defs.end(), [&](const auto& d) { return d.term == t.target; })) {
        defs.push_back({t.target, t.prerequisites});
      }
    }
    CHECK(parse_definitions(serialize_definitions(defs)) == defs);
  }
}

TEST_CASE("parsed transactions respect invariants") {
  for (const char* name : {"biology_definitions.json", "case_study_definitions.json"}) {
    const auto txns = to_transactions(parse_definitions(testing::read_file(testing::fixture_path(name))));
    for (const auto& t : txns) {
      CHECK(std::find(t.prerequisites.begin(), t.prerequisites.end(), t.target) == t.prerequisites.end());
      auto sorted = t.prerequisites;
      std::sort(sorted.begin(), sorted.end());
      CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    }
  }
  const auto qa = parse_qa_log(testing::read_file(testing::fixture_path("case_study_qa.jsonl")));
  CHECK(qa.size() == 8);
  CHECK(parse_qa_log(serialize_qa_log(qa)) == qa);
}

TEST_CASE("vocabulary of the biology corpus") {
  const auto txns = to_transactions(parse_definitions(testing::read_file(testing::fixture_path("biology_definitions.json"))));
  const auto vocab = vocabulary_of(txns);
  CHECK(vocab.size() == 18);
  CHECK(vocab.contains("organism"));
  for (const auto& term : vocab) CHECK(normalize_term(term) == term);
}
