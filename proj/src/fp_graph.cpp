#include "learnpath/fp_graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "learnpath/errors.hpp"

namespace learnpath {

namespace {

using nlohmann::json;

std::set<std::string_view> word_set(std::string_view term) {
  std::set<std::string_view> words;
  std::size_t pos = 0;
  while (pos < term.size()) {
    const auto end = term.find(' ', pos);
    const auto stop = end == std::string_view::npos ? term.size() : end;
    if (stop > pos) words.insert(term.substr(pos, stop - pos));
    pos = stop + 1;
  }
  return words;
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::kValidation, what); }

std::string require_term(const json& value, const std::string& where) {
  if (!value.is_string()) invalid(where + ": expected a string term");
  const auto raw = value.get<std::string>();
  if (raw == kRootTerm) return raw;
  std::string norm;
  try {
    norm = normalize_term(raw);
  } catch (const Error& e) {
    invalid(where + ": " + e.what());
  }
  if (norm != raw) invalid(where + ": term '" + raw + "' is not normalized");
  return norm;
}

}  // namespace

std::string_view match_status_name(MatchStatus status) {
  switch (status) {
    case MatchStatus::kFull:
      return "full";
    case MatchStatus::kSuffix:
      return "suffix";
    case MatchStatus::kUnmatched:
      return "unmatched";
    case MatchStatus::kUnknownTarget:
      return "unknown_target";
  }
  return "unmatched";
}

bool is_word_subset(std::string_view from, std::string_view to) {
  const auto a = word_set(from);
  const auto b = word_set(to);
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

FPGraph::FPGraph(std::uint64_t sigma) : sigma_(sigma) {
  if (sigma < 1) throw Error(Errc::kInvalidParameter, "sigma must be >= 1");
  nodes_.emplace(std::string(kRootTerm), TermNode{std::string(kRootTerm), {}});
}

TermNode& FPGraph::ensure_node(const std::string& term) {
  auto it = nodes_.find(term);
  if (it == nodes_.end()) it = nodes_.emplace(term, TermNode{term, {}}).first;
  return it->second;
}

void FPGraph::add_or_bump_edge(const std::string& from, const std::string& to) {
  auto [it, inserted] = edges_.try_emplace(EdgeKey{from, to}, EdgeStats{from, to, 1, false});
  if (!inserted) ++it->second.frequency;
  in_edges_[to].insert(from);
}

void FPGraph::insert_branch(const Transaction& txn) {
  if (txn.target == kRootTerm) throw Error(Errc::kInvalidTerm, "Root cannot be a branch target");
  ensure_node(txn.target);
  std::string prev(kRootTerm);
  for (const auto& p : txn.prerequisites) {
    if (p == kRootTerm || p == txn.target) throw Error(Errc::kInvalidTerm, "invalid prerequisite '" + p + "'");
    ensure_node(p).data_list.insert(txn.target);
    add_or_bump_edge(prev, p);
    prev = p;
  }
  add_or_bump_edge(prev, txn.target);
}

MatchReport FPGraph::apply_qa_transaction(const Transaction& txn) {
  MatchReport report;
  if (!contains(txn.target) || txn.target == kRootTerm) {
    report.status = MatchStatus::kUnknownTarget;
    return report;
  }
  std::vector<const std::string*> seq;
  for (const auto& p : txn.prerequisites) seq.push_back(&p);
  seq.push_back(&txn.target);

  // A suffix needs at least one edge, so the last candidate start is n-1.
  const std::size_t n = txn.prerequisites.size();
  for (std::size_t start = 0; start < n; ++start) {
    bool all_present = true;
    for (std::size_t i = start; i + 1 < seq.size() && all_present; ++i) {
      all_present = edges_.contains(EdgeKey{*seq[i], *seq[i + 1]});
    }
    if (!all_present) continue;
    for (std::size_t i = start; i + 1 < seq.size(); ++i) {
      ++edges_.at(EdgeKey{*seq[i], *seq[i + 1]}).frequency;
    }
    report.status = start == 0 ? MatchStatus::kFull : MatchStatus::kSuffix;
    report.suffix_start = start;
    report.credited_edges = seq.size() - 1 - start;
    return report;
  }
  unmatched_.push_back(txn);
  report.status = MatchStatus::kUnmatched;
  return report;
}

std::vector<EdgeKey> FPGraph::promote_associations() {
  std::vector<EdgeKey> promoted;
  for (auto& [key, edge] : edges_) {
    if (edge.is_association) continue;
    if (edge.frequency >= sigma_ || is_word_subset(edge.from, edge.to)) {
      edge.is_association = true;
      promoted.push_back(key);
    }
  }
  return promoted;
}

std::vector<EdgeRef> FPGraph::predecessors(std::string_view term) const {
  if (!contains(term)) throw Error(Errc::kNotFound, "unknown term '" + std::string(term) + "'");
  std::vector<EdgeRef> out;
  const auto it = in_edges_.find(term);
  if (it == in_edges_.end()) return out;
  for (const auto& from : it->second) out.emplace_back(edges_.at(EdgeKey{from, std::string(term)}));
  return out;
}

bool FPGraph::contains(std::string_view term) const { return nodes_.find(term) != nodes_.end(); }

const TermNode& FPGraph::node(std::string_view term) const {
  const auto it = nodes_.find(term);
  if (it == nodes_.end()) throw Error(Errc::kNotFound, "unknown term '" + std::string(term) + "'");
  return it->second;
}

const EdgeStats* FPGraph::find_edge(std::string_view from, std::string_view to) const {
  const auto it = edges_.find(EdgeKey{std::string(from), std::string(to)});
  return it == edges_.end() ? nullptr : &it->second;
}

std::size_t FPGraph::association_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const auto& kv) { return kv.second.is_association; }));
}

bool FPGraph::operator==(const FPGraph& other) const {
  return sigma_ == other.sigma_ && nodes_ == other.nodes_ && edges_ == other.edges_ && unmatched_ == other.unmatched_;
}

json FPGraph::snapshot() const {
  json nodes = json::array();
  for (const auto& [term, n] : nodes_) {
    nodes.push_back({{"term", term}, {"data_list", std::vector<std::string>(n.data_list.begin(), n.data_list.end())}});
  }
  json edges = json::array();
  for (const auto& [key, e] : edges_) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"frequency", e.frequency}, {"association", e.is_association}});
  }
  json unmatched = json::array();
  for (const auto& t : unmatched_) unmatched.push_back({{"question", t.target}, {"answer_keywords", t.prerequisites}});
  return {{"sigma", sigma_}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"unmatched", std::move(unmatched)}};
}

std::string FPGraph::snapshot_text() const { return snapshot().dump(2) + "\n"; }

FPGraph FPGraph::from_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("snapshot is not valid JSON: ") + e.what());
  }
  return restore(doc);
}

FPGraph FPGraph::restore(const json& doc) {
  if (!doc.is_object()) invalid("snapshot must be a JSON object");
  if (!doc.contains("sigma") || !doc["sigma"].is_number_integer() || doc["sigma"].get<std::int64_t>() < 1) {
    invalid("sigma: expected a positive integer");
  }
  FPGraph g(doc["sigma"].get<std::uint64_t>());

  const auto array_field = [&](const char* name) -> const json& {
    if (!doc.contains(name) || !doc[name].is_array()) invalid(std::string(name) + ": expected an array");
    return doc[name];
  };

  const json& nodes = array_field("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto where = "nodes[" + std::to_string(i) + "]";
    const json& n = nodes[i];
    if (!n.is_object() || !n.contains("term")) invalid(where + ": expected {\"term\", \"data_list\"}");
    const auto term = require_term(n["term"], where + ".term");
    if (term != kRootTerm && g.contains(term)) invalid(where + ": duplicate node '" + term + "'");
    g.ensure_node(term);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto where = "nodes[" + std::to_string(i) + "].data_list";
    const json& n = nodes[i];
    const auto term = n["term"].get<std::string>();
    if (!n.contains("data_list")) continue;
    if (!n["data_list"].is_array()) invalid(where + ": expected an array");
    auto& node = g.nodes_.at(term);
    for (const auto& member : n["data_list"]) {
      const auto target = require_term(member, where);
      if (target == term) invalid(where + ": node '" + term + "' lists itself");
      if (term == kRootTerm) invalid(where + ": Root's data list must be empty");
      if (!g.contains(target)) invalid(where + ": unknown term '" + target + "'");
      node.data_list.insert(target);
    }
  }

  const json& edges = array_field("edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto where = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e.contains("frequency")) {
      invalid(where + ": expected {\"from\", \"to\", \"frequency\", \"association\"}");
    }
    const auto from = require_term(e["from"], where + ".from");
    const auto to = require_term(e["to"], where + ".to");
    if (!g.contains(from)) invalid(where + ": dangling endpoint '" + from + "'");
    if (!g.contains(to)) invalid(where + ": dangling endpoint '" + to + "'");
    if (from == to) invalid(where + ": self-loop on '" + from + "'");
    if (to == kRootTerm) invalid(where + ": Root cannot have in-edges");
    if (!e["frequency"].is_number_integer() || e["frequency"].get<std::int64_t>() < 1) {
      invalid(where + ": frequency must be an integer >= 1");
    }
    bool assoc = false;
    if (e.contains("association")) {
      if (!e["association"].is_boolean()) invalid(where + ".association: expected a boolean");
      assoc = e["association"].get<bool>();
    }
    const auto [it, inserted] =
        g.edges_.try_emplace(EdgeKey{from, to}, EdgeStats{from, to, e["frequency"].get<std::uint64_t>(), assoc});
    if (!inserted) invalid(where + ": duplicate edge '" + from + "' -> '" + to + "'");
    g.in_edges_[to].insert(from);
  }

  if (doc.contains("unmatched")) {
    if (!doc["unmatched"].is_array()) invalid("unmatched: expected an array");
    for (std::size_t i = 0; i < doc["unmatched"].size(); ++i) {
      const auto where = "unmatched[" + std::to_string(i) + "]";
      const json& u = doc["unmatched"][i];
      if (!u.is_object() || !u.contains("question")) invalid(where + ": expected {\"question\", \"answer_keywords\"}");
      Transaction t;
      t.kind = TransactionKind::kQA;
      t.target = require_term(u["question"], where + ".question");
      if (u.contains("answer_keywords")) {
        if (!u["answer_keywords"].is_array()) invalid(where + ".answer_keywords: expected an array");
        for (const auto& kw : u["answer_keywords"]) t.prerequisites.push_back(require_term(kw, where + ".answer_keywords"));
      }
      g.unmatched_.push_back(std::move(t));
    }
  }

  // Every node must hang off Root.
  std::map<std::string_view, std::vector<std::string_view>> out_edges;
  for (const auto& [key, e] : g.edges_) out_edges[e.from].push_back(e.to);
  std::set<std::string_view> seen{kRootTerm};
  std::deque<std::string_view> queue{kRootTerm};
  while (!queue.empty()) {
    const auto cur = queue.front();
    queue.pop_front();
    for (const auto next : out_edges[cur]) {
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  for (const auto& [term, n] : g.nodes_) {
    if (!seen.contains(term)) invalid("nodes: '" + term + "' is not reachable from Root");
  }
  return g;
}

std::string FPGraph::to_dot() const {
  std::ostringstream out;
  out << "digraph fpgraph {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box];\n";
  for (const auto& [term, n] : nodes_) {
    out << "  " << dot_quote(term);
    if (term == kRootTerm) out << " [label=\"Root\", shape=ellipse]";
    out << ";\n";
  }
  for (const auto& [key, e] : edges_) {
    out << "  " << dot_quote(e.from) << " -> " << dot_quote(e.to) << " [label=\"" << e.frequency << "\"";
    if (e.is_association) out << ", style=bold, penwidth=2";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace learnpath
