#include "netest/mcss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "netest/error.hpp"

namespace netest {

void MeasurementCosts::validate() const {
  if (delta.rows() == 0 || delta.cols() == 0) {
    throw Error(ErrorKind::kInvalidInput, "measurement cost matrix is empty");
  }
  for (Eigen::Index i = 0; i < delta.rows(); ++i) {
    for (Eigen::Index j = 0; j < delta.cols(); ++j) {
      const double c = delta(i, j);
      if (std::isnan(c) || c < 0.0) {
        throw Error(ErrorKind::kInvalidInput,
                    "measurement cost (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") must be >= 0 or inf");
      }
    }
  }
}

ReducedCosts reduce_costs(const MeasurementCosts& costs,
                          const SccDecomposition& dec,
                          const ReduceOptions& options) {
  costs.validate();
  const std::size_t agents = costs.agent_count();
  const std::size_t n = costs.state_count();
  if (n != dec.node_count()) {
    throw Error(ErrorKind::kInvalidInput,
                "measurement costs cover " + std::to_string(n) +
                    " states, system has " + std::to_string(dec.node_count()));
  }
  ReducedCosts out;
  out.parent_components = parent_sccs(dec);
  const std::size_t parents = out.parent_components.size();
  const bool surplus_ok = options.allow_extra_agents && agents > parents;
  if (agents != parents && !surplus_ok) {
    throw Error(ErrorKind::kInvalidInput,
                "agent-count mismatch: " + std::to_string(agents) +
                    " agents, " + std::to_string(parents) +
                    " parent SCCs (minimum agent count is " +
                    std::to_string(parents) + ")");
  }
  out.padded_columns = agents - parents;
  out.delta_cap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(agents),
                                        static_cast<Eigen::Index>(agents));
  out.argmin_state.assign(agents, std::vector<std::size_t>(agents, kNoState));

  for (std::size_t j = 0; j < parents; ++j) {
    const auto& members = dec.components[out.parent_components[j]];
    bool any_finite = false;
    for (std::size_t i = 0; i < agents; ++i) {
      double best = kInfiniteCost;
      std::size_t arg = members.front();
      for (std::size_t m : members) {  // ascending, so ties keep the smallest
        const double c = costs.delta(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(m));
        if (c < best) {
          best = c;
          arg = m;
        }
      }
      out.delta_cap(static_cast<Eigen::Index>(i),
                    static_cast<Eigen::Index>(j)) = best;
      out.argmin_state[i][j] = arg;
      any_finite = any_finite || std::isfinite(best);
    }
    if (!any_finite) {
      throw Error(ErrorKind::kInfeasible,
                  "parent SCC " + std::to_string(out.parent_components[j]) +
                      " cannot be measured by any agent (all costs infinite)");
    }
  }
  return out;
}

Eigen::MatrixXi Assignment::z() const {
  const auto n = static_cast<Eigen::Index>(column_of_row.size());
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, static_cast<Eigen::Index>(column_of_row[static_cast<std::size_t>(i)])) =
        1;
  }
  return m;
}

double permutation_cost(const Eigen::MatrixXd& cost,
                        const std::vector<std::size_t>& perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    total += cost(static_cast<Eigen::Index>(i),
                  static_cast<Eigen::Index>(perm[i]));
  }
  return total;
}

namespace {

void require_square_costs(const Eigen::MatrixXd& cost) {
  if (cost.rows() == 0 || cost.rows() != cost.cols()) {
    throw Error(ErrorKind::kInvalidInput,
                "assignment cost matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      if (std::isnan(cost(i, j)) || cost(i, j) == -kInfiniteCost) {
        throw Error(ErrorKind::kInvalidInput,
                    "assignment cost matrix has NaN or -inf entries");
      }
    }
  }
}

double cost_scale(const Eigen::MatrixXd& cost) {
  double scale = 1.0;
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      if (std::isfinite(cost(i, j))) {
        scale = std::max(scale, std::abs(cost(i, j)));
      }
    }
  }
  return scale;
}

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ", ";
    out += std::to_string(values[k]);
  }
  return out;
}

// Re-routes the optimal matching, row by row, onto the smallest tight
// column that still admits a perfect matching on tight cells.
void lexicographic_refine(const Eigen::MatrixXd& cost, Assignment& a) {
  const std::size_t n = a.size();
  const double tol = 1e-11 * cost_scale(cost);
  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c =
          cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::isfinite(c) &&
          c - a.row_potential[i] - a.column_potential[j] <= tol) {
        tight[i].push_back(j);
      }
    }
  }
  std::vector<std::size_t>& col_of_row = a.column_of_row;
  std::vector<std::size_t> row_of_col(n);
  for (std::size_t i = 0; i < n; ++i) row_of_col[col_of_row[i]] = i;

  struct Frame {
    std::size_t row;
    std::size_t cursor;
    std::size_t via_col;
  };
  std::vector<Frame> frames;
  std::vector<bool> visited(n);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : tight[i]) {
      if (j >= col_of_row[i]) break;
      const std::size_t owner = row_of_col[j];
      if (owner < i) continue;  // locked
      const std::size_t freed = col_of_row[i];
      // Alternating path: owner gives up j and must end up on `freed`.
      std::fill(visited.begin(), visited.end(), false);
      visited[j] = true;
      frames.assign(1, Frame{owner, 0, j});
      bool found = false;
      while (!frames.empty() && !found) {
        Frame& top = frames.back();
        if (top.cursor == tight[top.row].size()) {
          frames.pop_back();
          continue;
        }
        const std::size_t c = tight[top.row][top.cursor++];
        if (visited[c]) continue;
        visited[c] = true;
        if (c == freed) {
          frames.push_back(Frame{n, 0, c});  // sentinel carrying the last column
          found = true;
          break;
        }
        const std::size_t next = row_of_col[c];
        if (next <= i) continue;
        frames.push_back(Frame{next, 0, c});
      }
      if (!found) continue;
      // frames[k].row takes frames[k + 1].via_col.
      for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
        const std::size_t row = frames[k].row;
        const std::size_t col = frames[k + 1].via_col;
        col_of_row[row] = col;
        row_of_col[col] = row;
      }
      col_of_row[i] = j;
      row_of_col[j] = i;
      break;
    }
  }
}

}  // namespace

Assignment hungarian(const Eigen::MatrixXd& cost) {
  require_square_costs(cost);
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  // 1-based rows/columns; column 0 is the virtual start of each search.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInfiniteCost);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      double delta = kInfiniteCost;
      std::size_t j1 = kNone;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double c = cost(static_cast<Eigen::Index>(i0 - 1),
                              static_cast<Eigen::Index>(j - 1));
        if (std::isfinite(c)) {
          const double reduced = c - u[i0] - v[j];
          if (reduced < minv[j]) {
            minv[j] = reduced;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == kNone) {
        // Rows in the search tree reach only the used columns: Hall violation.
        std::vector<std::size_t> rows, cols;
        for (std::size_t j = 0; j <= n; ++j) {
          if (!used[j]) continue;
          rows.push_back(row_of[j] - 1);
          if (j > 0) cols.push_back(j - 1);
        }
        std::sort(rows.begin(), rows.end());
        throw Error(ErrorKind::kInfeasible,
                    "no finite-cost assignment: rows [" + join(rows) +
                        "] have finite costs only in columns [" + join(cols) +
                        "]");
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment result;
  result.column_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    result.column_of_row[row_of[j] - 1] = j - 1;
  }
  result.row_potential.assign(u.begin() + 1, u.end());
  result.column_potential.assign(v.begin() + 1, v.end());
  lexicographic_refine(cost, result);
  result.total_cost = permutation_cost(cost, result.column_of_row);
  return result;
}

DualCheck check_dual_certificate(const Eigen::MatrixXd& cost,
                                 const Assignment& assignment, double tol) {
  const std::size_t n = assignment.size();
  const double abs_tol = tol * cost_scale(cost);
  DualCheck check;
  check.feasible = true;
  check.complementary = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c =
          cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (!std::isfinite(c)) continue;
      const double slack =
          c - assignment.row_potential[i] - assignment.column_potential[j];
      if (slack < -abs_tol) {
        check.feasible = false;
        check.worst_violation = std::max(check.worst_violation, -slack);
      }
      if (assignment.column_of_row[i] == j && std::abs(slack) > abs_tol) {
        check.complementary = false;
        check.worst_violation = std::max(check.worst_violation, std::abs(slack));
      }
    }
  }
  return check;
}

BruteForceAssignment brute_force_assignment(const Eigen::MatrixXd& cost) {
  require_square_costs(cost);
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  if (n > kBruteForceAssignmentLimit) {
    throw Error(ErrorKind::kSizeGuard,
                "brute-force assignment limited to N <= 9, got " +
                    std::to_string(n));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  BruteForceAssignment best;
  best.cost = kInfiniteCost;
  do {
    const double c = permutation_cost(cost, perm);
    if (std::isfinite(c) && c < best.cost) {
      best.cost = c;
      best.column_of_row = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best.column_of_row.empty()) {
    throw Error(ErrorKind::kInfeasible, "every permutation has infinite cost");
  }
  return best;
}

MeasurementStructure assignment_to_measurement(const Assignment& z,
                                               const ReducedCosts& reduced,
                                               std::size_t state_count) {
  std::vector<Position> positions;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::size_t state = reduced.argmin_state[i][z.column_of_row[i]];
    if (state != kNoState) positions.push_back({i, state});
  }
  return StructuredMatrix(z.size(), state_count, std::move(positions));
}

}  // namespace netest
