#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace netest {

using NodeIndex = std::size_t;
using Edge = std::pair<NodeIndex, NodeIndex>;

/// Immutable directed graph with sorted, deduplicated edges.
///
/// Self-loops are kept as ordinary edges. Out- and in-adjacency are both
/// stored so forward and reverse traversals are linear in the edge count.
class Digraph {
 public:
  Digraph() = default;

  /// Throws Error(kInvalidInput) when an endpoint is out of range.
  /// Repeated edges collapse to one; the number dropped is kept.
  Digraph(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t duplicate_edges_dropped() const noexcept { return duplicates_; }

  /// Sorted lexicographically by (source, target).
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const NodeIndex> successors(NodeIndex v) const;
  std::span<const NodeIndex> predecessors(NodeIndex v) const;

  bool has_edge(NodeIndex source, NodeIndex target) const;

 private:
  std::size_t node_count_ = 0;
  std::size_t duplicates_ = 0;
  std::vector<Edge> edges_;
  // CSR layout: offsets have node_count_ + 1 entries.
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<NodeIndex> out_targets_, in_sources_;
};

struct SccDecomposition {
  /// Each component's nodes in ascending order. Components are ordered by
  /// their smallest node.
  std::vector<std::vector<NodeIndex>> components;
  std::vector<std::size_t> component_of;
  /// Edges of the condensation DAG, sorted, no duplicates, no self-loops.
  std::vector<Edge> condensation_edges;
  /// True for components without outgoing condensation edges (sinks).
  std::vector<bool> parent_flags;

  std::size_t component_count() const noexcept { return components.size(); }
  std::size_t node_count() const noexcept { return component_of.size(); }
};

/// Tarjan's algorithm, iterative. Throws Error(kInvalidInput) on an empty
/// graph.
SccDecomposition scc_decompose(const Digraph& g);

/// Indices of the parent (sink) components, ascending.
std::vector<std::size_t> parent_sccs(const SccDecomposition& dec);

bool is_strongly_connected(const Digraph& g);

/// Condensation as a standalone digraph over component indices.
Digraph condensation_graph(const SccDecomposition& dec);

/// All nodes that reach at least one target (targets included), ascending.
std::vector<NodeIndex> reverse_reachable(const Digraph& g,
                                         std::span<const NodeIndex> targets);

/// Nodes reachable from the sources (sources included), ascending.
std::vector<NodeIndex> forward_reachable(const Digraph& g,
                                         std::span<const NodeIndex> sources);

/// Reads the edge-list text format:
///
///   # comment
///   nodes 4
///   0 1
///   2 2
///
/// The `nodes` header must precede every edge line. Throws ParseError with
/// the offending line and column.
Digraph read_edge_list(std::istream& in, const std::string& source_name);
Digraph read_edge_list_file(const std::string& path);

void write_edge_list(std::ostream& out, const Digraph& g);

}  // namespace netest
