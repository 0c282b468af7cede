#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "netest/sysmodel.hpp"

namespace netest {

/// Symmetric link costs between agents; +inf means no feasible link.
/// The diagonal is ignored.
struct CommunicationCosts {
  Eigen::MatrixXd eta;

  std::size_t agent_count() const noexcept {
    return static_cast<std::size_t>(eta.rows());
  }
};

struct SymmetryCheck {
  bool symmetric = true;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
};

/// |eta(i,j) - eta(j,i)| <= tol * max(1, |eta(i,j)|) for all i < j.
/// Infinite entries must match exactly.
SymmetryCheck check_symmetric(const Eigen::MatrixXd& eta, double tol = 1e-9);

struct Link {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  double cost = 0.0;

  friend bool operator==(const Link&, const Link&) = default;
};

struct NetworkDesign {
  std::size_t agent_count = 0;
  /// Sorted by (a, b).
  std::vector<Link> edges;
  /// Sum of edge costs accumulated in (a, b) order.
  double total_cost = 0.0;
  bool connected = false;
  /// Connected components of the finite-cost graph (each ascending).
  std::vector<std::vector<std::size_t>> components;
};

/// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::size_t set_count() const noexcept { return sets_; }

 private:
  std::vector<std::size_t> parent_, size_;
  std::size_t sets_;
};

/// Kruskal over finite links, ties broken by (a, b). Throws
/// Error(kUnsupportedStructure) for asymmetric costs and Error(kInfeasible)
/// listing the components when the finite-cost graph is disconnected.
NetworkDesign minimum_spanning_tree(const CommunicationCosts& costs);

/// Minimum spanning forest: one tree per finite-cost component.
NetworkDesign minimum_spanning_forest(const CommunicationCosts& costs);

inline constexpr std::size_t kBruteForceTreeLimit = 7;

/// Exhaustive minimum over all labeled spanning trees via Pruefer
/// sequences. Keeps the first strict minimum in enumeration order.
NetworkDesign brute_force_mst(const CommunicationCosts& costs);

/// Decodes a Pruefer sequence over n >= 2 labels into n - 1 edges (a < b).
std::vector<std::pair<std::size_t, std::size_t>> pruefer_decode(
    const std::vector<std::size_t>& sequence, std::size_t n);

/// Symmetric network pattern: both directions of every link plus the full
/// diagonal.
StructuredMatrix tree_to_network(const NetworkDesign& design,
                                 std::size_t agent_count);

}  // namespace netest
