#pragma once

#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dmc/errors.hpp"
#include "dmc/forest.hpp"
#include "dmc/graph.hpp"

namespace dmc {

// Graph file: one "v <id>" line per vertex, then one "e <id> <id>" line per
// undirected edge. Forest file: one "n <node-id> <parent-id|->" line per
// node, "-" marking a root. '#' starts a comment in both. Serialization is
// canonical (sorted ids), so parse(serialize(x)) == x.

namespace detail {

inline bool valid_token(const std::string& t) {
  if (t.empty()) return false;
  for (unsigned char c : t) {
    if (c <= 0x20 || c >= 0x7F) return false;
  }
  return true;
}

struct LineLexer {
  std::istringstream in;
  std::size_t lineno = 0;

  explicit LineLexer(const std::string& text) : in(text) {}

  // Next non-empty, non-comment line split into tokens; empty result = EOF.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      std::istringstream ls(line);
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (!toks.empty()) return toks;
    }
    return {};
  }
};

}  // namespace detail

inline PpiGraph parse_graph(const std::string& text) {
  detail::LineLexer lex(text);
  PpiGraph g;
  for (auto toks = lex.next(); !toks.empty(); toks = lex.next()) {
    try {
      if (toks[0] == "v" && toks.size() == 2) {
        if (!detail::valid_token(toks[1])) {
          throw Error(ErrorCode::parse_error, "bad vertex id");
        }
        g.add_vertex(toks[1]);
      } else if (toks[0] == "e" && toks.size() == 3) {
        g.add_edge(toks[1], toks[2]);
      } else {
        throw Error(ErrorCode::parse_error, "expected 'v <id>' or 'e <id> <id>'");
      }
    } catch (const Error& e) {
      throw ParseError(lex.lineno, e.what());
    }
  }
  return g;
}

inline std::string serialize_graph(const PpiGraph& g) {
  std::string out;
  for (const auto& v : g.vertices()) {
    out += "v " + v + "\n";
  }
  for (const auto& [a, b] : g.edges()) {
    out += "e " + a + " " + b + "\n";
  }
  return out;
}

inline DuplicationForest parse_forest(const std::string& text) {
  detail::LineLexer lex(text);
  // two passes: declare nodes, then wire parents, so line order is free
  std::vector<std::pair<std::string, std::string>> rows;  // (node, parent or "-")
  std::map<std::string, std::size_t> row_line;
  for (auto toks = lex.next(); !toks.empty(); toks = lex.next()) {
    if (toks[0] != "n" || toks.size() != 3) {
      throw ParseError(lex.lineno, "expected 'n <node-id> <parent-id|->'");
    }
    if (!detail::valid_token(toks[1]) || !detail::valid_token(toks[2])) {
      throw ParseError(lex.lineno, "bad node id");
    }
    if (row_line.contains(toks[1])) {
      throw ParseError(lex.lineno, "duplicate node: " + toks[1]);
    }
    row_line[toks[1]] = lex.lineno;
    rows.emplace_back(toks[1], toks[2]);
  }
  DuplicationForest f;
  for (const auto& [id, parent] : rows) f.add_root(id);
  for (const auto& [id, parent] : rows) {
    if (parent == "-") continue;
    if (!f.has_node(parent)) {
      throw ParseError(row_line[id], "unknown parent: " + parent);
    }
    f.attach(id, parent);
  }
  for (const auto& [id, n] : f.nodes()) {
    if (!n.children.empty() && n.children.size() != 2) {
      throw ParseError(row_line[id], "node " + id + " has " +
                                         std::to_string(n.children.size()) +
                                         " children (need 0 or 2)");
    }
  }
  return f;
}

inline std::string serialize_forest(const DuplicationForest& f) {
  std::string out;
  for (const auto& [id, n] : f.nodes()) {
    out += "n " + id + " " + (n.parent ? *n.parent : "-") + "\n";
  }
  return out;
}

}  // namespace dmc
