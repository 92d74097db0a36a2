#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "learnpath/corpus.hpp"

namespace learnpath {

struct TermNode {
  std::string term;
  // Targets whose branches pass through this node.
  std::set<std::string> data_list;

  bool operator==(const TermNode&) const = default;
};

// Edges point from prerequisite to dependent; Root is always a source.
struct EdgeKey {
  std::string from;
  std::string to;

  auto operator<=>(const EdgeKey&) const = default;
};

struct EdgeStats {
  std::string from;
  std::string to;
  std::uint64_t frequency = 1;
  bool is_association = false;

  EdgeKey key() const { return {from, to}; }
  bool operator==(const EdgeStats&) const = default;
};

using EdgeRef = std::reference_wrapper<const EdgeStats>;

enum class MatchStatus { kFull, kSuffix, kUnmatched, kUnknownTarget };

std::string_view match_status_name(MatchStatus status);

struct MatchReport {
  MatchStatus status = MatchStatus::kUnmatched;
  // Index into the prerequisite list where the credited suffix starts.
  std::size_t suffix_start = 0;
  // Number of edges whose frequency was incremented.
  std::size_t credited_edges = 0;
};

class FPGraph {
 public:
  explicit FPGraph(std::uint64_t sigma);

  static FPGraph restore(const nlohmann::json& doc);
  static FPGraph from_text(std::string_view text);

  // Adds the branch Root -> p1 -> ... -> pn -> target.
  void insert_branch(const Transaction& txn);

  // Credits the longest existing suffix of p1 -> ... -> pn -> target. Never
  // creates nodes or edges.
  MatchReport apply_qa_transaction(const Transaction& txn);

  // Returns the edges promoted by this pass, in key order.
  std::vector<EdgeKey> promote_associations();

  // In-edges of `term` ordered by source term. Throws kNotFound.
  std::vector<EdgeRef> predecessors(std::string_view term) const;

  bool contains(std::string_view term) const;
  const TermNode& node(std::string_view term) const;
  const EdgeStats* find_edge(std::string_view from, std::string_view to) const;

  std::uint64_t sigma() const noexcept { return sigma_; }
  const std::map<std::string, TermNode, std::less<>>& nodes() const noexcept { return nodes_; }
  const std::map<EdgeKey, EdgeStats>& edges() const noexcept { return edges_; }
  const std::vector<Transaction>& unmatched_log() const noexcept { return unmatched_; }
  std::size_t association_count() const;

  nlohmann::json snapshot() const;
  std::string snapshot_text() const;
  std::string to_dot() const;

  bool operator==(const FPGraph& other) const;

 private:
  TermNode& ensure_node(const std::string& term);
  void add_or_bump_edge(const std::string& from, const std::string& to);

  std::uint64_t sigma_;
  std::map<std::string, TermNode, std::less<>> nodes_;
  std::map<EdgeKey, EdgeStats> edges_;
  std::map<std::string, std::set<std::string>, std::less<>> in_edges_;
  std::vector<Transaction> unmatched_;
};

// Strict word-set containment used for the subset-to-superset rule.
bool is_word_subset(std::string_view from, std::string_view to);

}  // namespace learnpath
