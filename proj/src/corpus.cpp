#include "learnpath/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "learnpath/errors.hpp"

namespace learnpath {

namespace {

using nlohmann::json;

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Start offsets of the top-level array elements. Only called on text that
// already parsed, so the scan can assume well-formed JSON.
std::vector<std::size_t> element_offsets(std::string_view text) {
  std::vector<std::size_t> starts;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  bool expect_element = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (expect_element && depth == 1 && c != ']') {
      starts.push_back(i);
      expect_element = false;
    }
    switch (c) {
      case '"':
        in_string = true;
        break;
      case '[':
      case '{':
        if (++depth == 1 && c == '[') expect_element = true;
        break;
      case ']':
      case '}':
        --depth;
        break;
      case ',':
        if (depth == 1) expect_element = true;
        break;
      default:
        break;
    }
  }
  return starts;
}

// Normalizes and deduplicates keywords; the self-reference check is left to
// the caller so it can phrase the error.
std::vector<std::string> normalize_keywords(const json& arr) {
  std::vector<std::string> out;
  for (const auto& item : arr) {
    if (!item.is_string()) throw Error(Errc::kParse, "keyword is not a string");
    std::string kw = normalize_term(item.get<std::string>());
    if (std::find(out.begin(), out.end(), kw) == out.end()) out.push_back(std::move(kw));
  }
  return out;
}

}  // namespace

std::string normalize_term(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (const char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (out.empty()) throw Error(Errc::kInvalidTerm, "term is empty after normalization");
  if (out == kRootTerm) throw Error(Errc::kInvalidTerm, "term '" + out + "' is reserved for Root");
  return out;
}

std::vector<TermDefinition> parse_definitions(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::kParse, "line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::kParse, "line 1: definitions file must be a JSON array");

  const auto offsets = element_offsets(text);
  std::vector<TermDefinition> defs;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::size_t line = i < offsets.size() ? line_of_offset(text, offsets[i]) : 0;
    const auto where = "line " + std::to_string(line) + ": ";
    const json& entry = doc[i];
    try {
      if (!entry.is_object() || !entry.contains("term") || !entry["term"].is_string()) {
        throw Error(Errc::kParse, "entry needs a string \"term\"");
      }
      TermDefinition def;
      def.term = normalize_term(entry["term"].get<std::string>());
      if (entry.contains("keywords")) {
        if (!entry["keywords"].is_array()) throw Error(Errc::kParse, "\"keywords\" must be an array");
        def.keywords = normalize_keywords(entry["keywords"]);
      }
      if (std::find(def.keywords.begin(), def.keywords.end(), def.term) != def.keywords.end()) {
        throw Error(Errc::kParse, "term '" + def.term + "' lists itself as a keyword");
      }
      if (!seen.insert(def.term).second) {
        throw Error(Errc::kDuplicateDefinition, "duplicate definition of '" + def.term + "'");
      }
      defs.push_back(std::move(def));
    } catch (const Error& e) {
      const Errc code = e.code() == Errc::kDuplicateDefinition ? e.code() : Errc::kParse;
      throw Error(code, where + e.what());
    }
  }
  return defs;
}

std::string serialize_definitions(std::span<const TermDefinition> defs) {
  json doc = json::array();
  for (const auto& d : defs) doc.push_back({{"term", d.term}, {"keywords", d.keywords}});
  return doc.dump(2) + "\n";
}

Transaction to_transaction(const TermDefinition& defn) {
  return Transaction{defn.term, defn.keywords, TransactionKind::kDefinition};
}

std::vector<Transaction> to_transactions(std::span<const TermDefinition> defs) {
  std::vector<Transaction> out;
  out.reserve(defs.size());
  for (const auto& d : defs) out.push_back(to_transaction(d));
  return out;
}

std::vector<Transaction> parse_qa_log(std::string_view text) {
  std::vector<Transaction> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    ++record;
    const auto where = "record " + std::to_string(record) + ": ";
    try {
      const json rec = json::parse(line);
      if (!rec.is_object() || !rec.contains("question") || !rec["question"].is_string()) {
        throw Error(Errc::kParse, "record needs a string \"question\"");
      }
      Transaction txn;
      txn.kind = TransactionKind::kQA;
      txn.target = normalize_term(rec["question"].get<std::string>());
      if (rec.contains("answer_keywords")) {
        if (!rec["answer_keywords"].is_array()) throw Error(Errc::kParse, "\"answer_keywords\" must be an array");
        txn.prerequisites = normalize_keywords(rec["answer_keywords"]);
      }
      if (std::find(txn.prerequisites.begin(), txn.prerequisites.end(), txn.target) != txn.prerequisites.end()) {
        throw Error(Errc::kParse, "answer repeats the question term '" + txn.target + "'");
      }
      out.push_back(std::move(txn));
    } catch (const json::exception& e) {
      throw Error(Errc::kParse, where + e.what());
    } catch (const Error& e) {
      throw Error(Errc::kParse, where + e.what());
    }
  }
  return out;
}

std::string serialize_qa_log(std::span<const Transaction> txns) {
  std::string out;
  for (const auto& t : txns) {
    out += json{{"question", t.target}, {"answer_keywords", t.prerequisites}}.dump();
    out += '\n';
  }
  return out;
}

Vocabulary vocabulary_of(std::span<const Transaction> txns) {
  Vocabulary vocab;
  for (const auto& t : txns) {
    vocab.insert(t.target);
    vocab.insert(t.prerequisites.begin(), t.prerequisites.end());
  }
  return vocab;
}

}  // namespace learnpath
