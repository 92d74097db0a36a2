#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace learnpath {

// Reserved term for the graph's Root node. Never a valid user term.
inline constexpr std::string_view kRootTerm = "<root>";

// A defined term together with the emphasized keywords its definition
// relies on, in order of appearance.
struct TermDefinition {
  std::string term;
  std::vector<std::string> keywords;

  bool operator==(const TermDefinition&) const = default;
};

enum class TransactionKind { kDefinition, kQA };

struct Transaction {
  std::string target;
  std::vector<std::string> prerequisites;
  TransactionKind kind = TransactionKind::kDefinition;

  bool operator==(const Transaction&) const = default;
};

using Vocabulary = std::set<std::string>;

// Lowercases, trims and collapses internal whitespace runs. Throws
// Error(kInvalidTerm) when nothing is left or the result is the Root
// sentinel.
std::string normalize_term(std::string_view raw);

// Definitions file: JSON array of {"term": s, "keywords": [s...]}.
// Errors carry the 1-based line of the offending entry.
std::vector<TermDefinition> parse_definitions(std::string_view text);
std::string serialize_definitions(std::span<const TermDefinition> defs);

Transaction to_transaction(const TermDefinition& defn);
std::vector<Transaction> to_transactions(std::span<const TermDefinition> defs);

// QA log: JSON Lines of {"question": s, "answer_keywords": [s...]}. Blank
// lines are skipped; errors name the 1-based record index.
std::vector<Transaction> parse_qa_log(std::string_view text);
std::string serialize_qa_log(std::span<const Transaction> txns);

Vocabulary vocabulary_of(std::span<const Transaction> txns);

}  // namespace learnpath
