#include "netest/digraph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include "netest/error.hpp"

namespace netest {

namespace {

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool reversed,
               std::vector<std::size_t>& offsets,
               std::vector<NodeIndex>& adjacency) {
  offsets.assign(n + 1, 0);
  for (const auto& [s, t] : edges) ++offsets[(reversed ? t : s) + 1];
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
  adjacency.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  // Edges are sorted by (source, target), so forward lists come out sorted;
  // reverse lists are sorted by source because sources are visited in order.
  for (const auto& [s, t] : edges) {
    if (reversed) {
      adjacency[cursor[t]++] = s;
    } else {
      adjacency[cursor[s]++] = t;
    }
  }
}

}  // namespace

Digraph::Digraph(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  for (const auto& [s, t] : edges_) {
    if (s >= node_count_ || t >= node_count_) {
      throw Error(ErrorKind::kInvalidInput,
                  "edge (" + std::to_string(s) + ", " + std::to_string(t) +
                      ") out of range for " + std::to_string(node_count_) +
                      " nodes");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  auto last = std::unique(edges_.begin(), edges_.end());
  duplicates_ = static_cast<std::size_t>(edges_.end() - last);
  edges_.erase(last, edges_.end());
  build_csr(node_count_, edges_, false, out_offsets_, out_targets_);
  build_csr(node_count_, edges_, true, in_offsets_, in_sources_);
}

std::span<const NodeIndex> Digraph::successors(NodeIndex v) const {
  return {out_targets_.data() + out_offsets_[v],
          out_offsets_[v + 1] - out_offsets_[v]};
}

std::span<const NodeIndex> Digraph::predecessors(NodeIndex v) const {
  return {in_sources_.data() + in_offsets_[v],
          in_offsets_[v + 1] - in_offsets_[v]};
}

bool Digraph::has_edge(NodeIndex source, NodeIndex target) const {
  if (source >= node_count_) return false;
  auto succ = successors(source);
  return std::binary_search(succ.begin(), succ.end(), target);
}

SccDecomposition scc_decompose(const Digraph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) {
    throw Error(ErrorKind::kInvalidInput,
                "cannot decompose an empty graph into SCCs");
  }
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> index(n, kUnvisited), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeIndex> stack;
  std::vector<std::size_t> raw_component(n, kUnvisited);
  std::size_t raw_count = 0;
  std::size_t next_index = 0;

  // Explicit DFS frames: (node, position in its successor list).
  std::vector<std::pair<NodeIndex, std::size_t>> frames;
  for (NodeIndex root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      auto succ = g.successors(v);
      if (pos < succ.size()) {
        NodeIndex w = succ[pos++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      NodeIndex done = v;
      frames.pop_back();
      if (lowlink[done] == index[done]) {
        NodeIndex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          raw_component[w] = raw_count;
        } while (w != done);
        ++raw_count;
      }
      if (!frames.empty()) {
        NodeIndex parent = frames.back().first;
        lowlink[parent] = std::min(lowlink[parent], lowlink[done]);
      }
    }
  }

  // Renumber by smallest contained node.
  std::vector<std::size_t> renumber(raw_count, kUnvisited);
  SccDecomposition dec;
  dec.component_of.resize(n);
  for (NodeIndex v = 0; v < n; ++v) {
    std::size_t& id = renumber[raw_component[v]];
    if (id == kUnvisited) {
      id = dec.components.size();
      dec.components.emplace_back();
    }
    dec.component_of[v] = id;
    dec.components[id].push_back(v);
  }

  for (const auto& [s, t] : g.edges()) {
    std::size_t cs = dec.component_of[s], ct = dec.component_of[t];
    if (cs != ct) dec.condensation_edges.emplace_back(cs, ct);
  }
  std::sort(dec.condensation_edges.begin(), dec.condensation_edges.end());
  dec.condensation_edges.erase(
      std::unique(dec.condensation_edges.begin(), dec.condensation_edges.end()),
      dec.condensation_edges.end());

  dec.parent_flags.assign(dec.components.size(), true);
  for (const auto& [cs, ct] : dec.condensation_edges) {
    dec.parent_flags[cs] = false;
  }
  return dec;
}

std::vector<std::size_t> parent_sccs(const SccDecomposition& dec) {
  std::vector<std::size_t> parents;
  for (std::size_t k = 0; k < dec.parent_flags.size(); ++k) {
    if (dec.parent_flags[k]) parents.push_back(k);
  }
  return parents;
}

bool is_strongly_connected(const Digraph& g) {
  return scc_decompose(g).component_count() == 1;
}

Digraph condensation_graph(const SccDecomposition& dec) {
  return Digraph(dec.component_count(), dec.condensation_edges);
}

namespace {

std::vector<NodeIndex> traverse(const Digraph& g,
                                std::span<const NodeIndex> seeds,
                                bool backwards) {
  const std::size_t n = g.node_count();
  std::vector<bool> seen(n, false);
  std::vector<NodeIndex> work;
  for (NodeIndex t : seeds) {
    if (t >= n) {
      throw Error(ErrorKind::kInvalidInput,
                  "node " + std::to_string(t) + " out of range");
    }
    if (!seen[t]) {
      seen[t] = true;
      work.push_back(t);
    }
  }
  while (!work.empty()) {
    NodeIndex v = work.back();
    work.pop_back();
    for (NodeIndex u : backwards ? g.predecessors(v) : g.successors(v)) {
      if (!seen[u]) {
        seen[u] = true;
        work.push_back(u);
      }
    }
  }
  std::vector<NodeIndex> out;
  for (NodeIndex v = 0; v < n; ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<NodeIndex> reverse_reachable(const Digraph& g,
                                         std::span<const NodeIndex> targets) {
  return traverse(g, targets, true);
}

std::vector<NodeIndex> forward_reachable(const Digraph& g,
                                         std::span<const NodeIndex> sources) {
  return traverse(g, sources, false);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits on blanks, remembering 1-based columns.
std::vector<std::pair<std::string_view, std::size_t>> tokenize(
    std::string_view line) {
  std::vector<std::pair<std::string_view, std::size_t>> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    if (i >= line.size() || line[i] == '#') break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r') {
      ++i;
    }
    tokens.emplace_back(line.substr(start, i - start), start + 1);
  }
  return tokens;
}

std::size_t parse_index(std::string_view token, const std::string& source,
                        std::size_t line, std::size_t column) {
  std::size_t value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(source, line, column,
                     "expected a non-negative integer, got '" +
                         std::string(token) + "'");
  }
  return value;
}

}  // namespace

Digraph read_edge_list(std::istream& in, const std::string& source_name) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t nodes = 0;
  std::vector<Edge> edges;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tokens = tokenize(raw);
    if (!have_header) {
      if (tokens.size() != 2 || tokens[0].first != "nodes") {
        throw ParseError(source_name, line_no, tokens[0].second,
                         "expected header 'nodes <n>'");
      }
      nodes = parse_index(tokens[1].first, source_name, line_no,
                          tokens[1].second);
      if (nodes == 0) {
        throw ParseError(source_name, line_no, tokens[1].second,
                         "node count must be positive");
      }
      have_header = true;
      continue;
    }
    if (tokens.size() != 2) {
      throw ParseError(source_name, line_no, tokens.front().second,
                       "expected 'source target'");
    }
    std::size_t s = parse_index(tokens[0].first, source_name, line_no,
                                tokens[0].second);
    std::size_t t = parse_index(tokens[1].first, source_name, line_no,
                                tokens[1].second);
    if (s >= nodes) {
      throw ParseError(source_name, line_no, tokens[0].second,
                       "node index " + std::to_string(s) + " >= " +
                           std::to_string(nodes));
    }
    if (t >= nodes) {
      throw ParseError(source_name, line_no, tokens[1].second,
                       "node index " + std::to_string(t) + " >= " +
                           std::to_string(nodes));
    }
    edges.emplace_back(s, t);
  }
  if (!have_header) {
    throw ParseError(source_name, line_no, 0, "missing 'nodes <n>' header");
  }
  return Digraph(nodes, std::move(edges));
}

Digraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, 0, "cannot open file");
  return read_edge_list(in, path);
}

void write_edge_list(std::ostream& out, const Digraph& g) {
  out << "nodes " << g.node_count() << '\n';
  for (const auto& [s, t] : g.edges()) out << s << ' ' << t << '\n';
}

}  // namespace netest
