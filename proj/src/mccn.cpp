#include "netest/mccn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "netest/error.hpp"
#include "netest/mcss.hpp"

namespace netest {

SymmetryCheck check_symmetric(const Eigen::MatrixXd& eta, double tol) {
  if (eta.rows() != eta.cols()) {
    throw Error(ErrorKind::kInvalidInput,
                "communication cost matrix must be square");
  }
  SymmetryCheck out;
  const auto n = eta.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double x = eta(i, j), y = eta(j, i);
      bool ok;
      if (std::isinf(x) || std::isinf(y)) {
        ok = x == y;
      } else {
        ok = std::abs(x - y) <= tol * std::max(1.0, std::abs(x));
      }
      if (!ok) {
        out.symmetric = false;
        out.first_violation = {static_cast<std::size_t>(i),
                               static_cast<std::size_t>(j)};
        return out;
      }
    }
  }
  return out;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  --sets_;
  return true;
}

namespace {

void validate_costs(const CommunicationCosts& costs) {
  const auto& eta = costs.eta;
  if (eta.rows() == 0 || eta.rows() != eta.cols()) {
    throw Error(ErrorKind::kInvalidInput,
                "communication cost matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < eta.rows(); ++i) {
    for (Eigen::Index j = 0; j < eta.cols(); ++j) {
      if (i == j) continue;
      if (std::isnan(eta(i, j)) || eta(i, j) < 0.0) {
        throw Error(ErrorKind::kInvalidInput,
                    "communication cost (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") must be >= 0 or inf");
      }
    }
  }
  auto sym = check_symmetric(eta);
  if (!sym.symmetric) {
    throw Error(
        ErrorKind::kUnsupportedStructure,
        "communication costs are asymmetric at (" +
            std::to_string(sym.first_violation->first) + ", " +
            std::to_string(sym.first_violation->second) +
            "); the directed minimum-cost network problem is NP-hard and "
            "only bidirectional links are supported");
  }
}

double link_cost(const Eigen::MatrixXd& eta, std::size_t a, std::size_t b) {
  return eta(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
}

std::vector<std::vector<std::size_t>> finite_components(
    const Eigen::MatrixXd& eta) {
  const auto n = static_cast<std::size_t>(eta.rows());
  DisjointSets sets(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (std::isfinite(link_cost(eta, a, b))) sets.unite(a, b);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> group_of_root(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t root = sets.find(v);
    if (group_of_root[root] == n) {
      group_of_root[root] = groups.size();
      groups.emplace_back();
    }
    groups[group_of_root[root]].push_back(v);
  }
  return groups;
}

void finalize(NetworkDesign& design) {
  std::sort(design.edges.begin(), design.edges.end(),
            [](const Link& x, const Link& y) {
              return std::pair(x.a, x.b) < std::pair(y.a, y.b);
            });
  design.total_cost = 0.0;
  for (const auto& e : design.edges) design.total_cost += e.cost;
}

NetworkDesign kruskal(const CommunicationCosts& costs) {
  const auto& eta = costs.eta;
  const std::size_t n = costs.agent_count();
  std::vector<Link> candidates;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double c = link_cost(eta, a, b);
      if (std::isfinite(c)) candidates.push_back({a, b, c});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Link& x, const Link& y) {
              if (x.cost != y.cost) return x.cost < y.cost;
              return std::pair(x.a, x.b) < std::pair(y.a, y.b);
            });
  NetworkDesign design;
  design.agent_count = n;
  DisjointSets sets(n);
  for (const auto& link : candidates) {
    if (sets.unite(link.a, link.b)) {
      design.edges.push_back(link);
      if (sets.set_count() == 1) break;
    }
  }
  design.components = finite_components(eta);
  design.connected = design.components.size() == 1;
  finalize(design);
  return design;
}

std::string describe_components(
    const std::vector<std::vector<std::size_t>>& groups) {
  std::string out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g) out += " ";
    out += "{";
    for (std::size_t k = 0; k < groups[g].size(); ++k) {
      if (k) out += ",";
      out += std::to_string(groups[g][k]);
    }
    out += "}";
  }
  return out;
}

}  // namespace

NetworkDesign minimum_spanning_tree(const CommunicationCosts& costs) {
  validate_costs(costs);
  NetworkDesign design = kruskal(costs);
  if (!design.connected) {
    throw Error(ErrorKind::kInfeasible,
                "finite-cost communication graph is disconnected; components " +
                    describe_components(design.components) +
                    " (use the spanning-forest mode)");
  }
  return design;
}

NetworkDesign minimum_spanning_forest(const CommunicationCosts& costs) {
  validate_costs(costs);
  return kruskal(costs);
}

std::vector<std::pair<std::size_t, std::size_t>> pruefer_decode(
    const std::vector<std::size_t>& sequence, std::size_t n) {
  std::vector<std::size_t> degree(n, 1);
  for (std::size_t x : sequence) ++degree[x];
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t x : sequence) {
    std::size_t leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(std::min(leaf, x), std::max(leaf, x));
    --degree[leaf];
    --degree[x];
  }
  std::size_t u = n, w = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] == 1) {
      (u == n ? u : w) = v;
    }
  }
  edges.emplace_back(u, w);
  std::sort(edges.begin(), edges.end());
  return edges;
}

NetworkDesign brute_force_mst(const CommunicationCosts& costs) {
  validate_costs(costs);
  const std::size_t n = costs.agent_count();
  if (n > kBruteForceTreeLimit) {
    throw Error(ErrorKind::kSizeGuard,
                "brute-force spanning tree limited to N <= 7, got " +
                    std::to_string(n));
  }
  NetworkDesign best;
  best.agent_count = n;
  best.components = finite_components(costs.eta);
  best.connected = best.components.size() == 1;
  if (!best.connected) {
    throw Error(ErrorKind::kInfeasible,
                "finite-cost communication graph is disconnected");
  }
  if (n == 1) return best;

  best.total_cost = kInfiniteCost;
  std::vector<std::size_t> seq(n - 2, 0);
  while (true) {
    auto edges = pruefer_decode(seq, n);
    double total = 0.0;
    for (const auto& [a, b] : edges) total += link_cost(costs.eta, a, b);
    if (std::isfinite(total) && total < best.total_cost) {
      best.total_cost = total;
      best.edges.clear();
      for (const auto& [a, b] : edges) {
        best.edges.push_back({a, b, link_cost(costs.eta, a, b)});
      }
    }
    // Odometer increment over {0..n-1}^(n-2).
    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  return best;
}

StructuredMatrix tree_to_network(const NetworkDesign& design,
                                 std::size_t agent_count) {
  std::vector<Position> positions;
  for (std::size_t i = 0; i < agent_count; ++i) positions.push_back({i, i});
  for (const auto& e : design.edges) {
    if (e.a >= agent_count || e.b >= agent_count) {
      throw Error(ErrorKind::kInvalidInput,
                  "link endpoint outside the agent range");
    }
    positions.push_back({e.a, e.b});
    positions.push_back({e.b, e.a});
  }
  return StructuredMatrix(agent_count, agent_count, std::move(positions));
}

}  // namespace netest
