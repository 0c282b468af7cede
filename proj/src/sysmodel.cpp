#include "netest/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "netest/error.hpp"

namespace netest {

StructuredMatrix::StructuredMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<Position> positions,
                                   std::vector<double> weights)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorKind::kInvalidInput,
                "structured matrix dimensions must be positive");
  }
  if (!weights.empty() && weights.size() != positions.size()) {
    throw Error(ErrorKind::kInvalidInput,
                "weights must match positions one to one");
  }
  for (const auto& p : positions) {
    if (p.row >= rows || p.col >= cols) {
      throw Error(ErrorKind::kInvalidInput,
                  "position (" + std::to_string(p.row) + ", " +
                      std::to_string(p.col) + ") outside " +
                      std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return positions[a] < positions[b];
  });
  for (std::size_t k : order) {
    if (!positions_.empty() && positions_.back() == positions[k]) continue;
    positions_.push_back(positions[k]);
    if (!weights.empty()) weights_.push_back(weights[k]);
  }
}

StructuredMatrix StructuredMatrix::identity(std::size_t n) {
  std::vector<Position> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = {i, i};
  return StructuredMatrix(n, n, std::move(diag));
}

bool StructuredMatrix::contains(std::size_t row, std::size_t col) const {
  return std::binary_search(positions_.begin(), positions_.end(),
                            Position{row, col});
}

std::vector<std::size_t> StructuredMatrix::row_support(std::size_t row) const {
  auto lo = std::lower_bound(positions_.begin(), positions_.end(),
                             Position{row, 0});
  std::vector<std::size_t> cols;
  for (auto it = lo; it != positions_.end() && it->row == row; ++it) {
    cols.push_back(it->col);
  }
  return cols;
}

StructuredMatrix StructuredMatrix::pattern() const {
  StructuredMatrix copy = *this;
  copy.weights_.clear();
  return copy;
}

StructuredMatrix StructuredMatrix::with_diagonal() const {
  if (!is_square()) {
    throw Error(ErrorKind::kInvalidInput, "with_diagonal needs a square matrix");
  }
  std::vector<Position> all(positions_.begin(), positions_.end());
  for (std::size_t i = 0; i < rows_; ++i) all.push_back({i, i});
  return StructuredMatrix(rows_, cols_, std::move(all));
}

Eigen::MatrixXd StructuredMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(cols_));
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    m(static_cast<Eigen::Index>(positions_[k].row),
      static_cast<Eigen::Index>(positions_[k].col)) =
        weights_.empty() ? 1.0 : weights_[k];
  }
  return m;
}

namespace {

void require_square(const StructuredMatrix& m, const char* what) {
  if (!m.is_square()) {
    throw Error(ErrorKind::kInvalidInput,
                std::string(what) + " must be square, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

Digraph system_digraph(const StructuredMatrix& a_pattern) {
  require_square(a_pattern, "system pattern");
  std::vector<Edge> edges;
  edges.reserve(a_pattern.nonzeros());
  for (const auto& p : a_pattern.positions()) edges.emplace_back(p.col, p.row);
  return Digraph(a_pattern.rows(), std::move(edges));
}

StructuredMatrix pattern_from_digraph(const Digraph& g) {
  std::vector<Position> positions;
  positions.reserve(g.edge_count());
  for (const auto& [s, t] : g.edges()) positions.push_back({t, s});
  return StructuredMatrix(g.node_count(), g.node_count(), std::move(positions));
}

std::vector<std::size_t> missing_self_loops(const StructuredMatrix& a_pattern) {
  require_square(a_pattern, "system pattern");
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < a_pattern.rows(); ++i) {
    if (!a_pattern.contains(i, i)) missing.push_back(i);
  }
  return missing;
}

bool is_self_damped(const StructuredMatrix& a_pattern) {
  return missing_self_loops(a_pattern).empty();
}

void ContinuousSystem::validate() const {
  if (a_bar.rows() == 0 || a_bar.rows() != a_bar.cols()) {
    throw Error(ErrorKind::kInvalidInput,
                "continuous system matrix must be square and non-empty");
  }
  if (!a_bar.allFinite()) {
    throw Error(ErrorKind::kInvalidInput,
                "continuous system matrix has non-finite entries");
  }
  if (!(sample_time > 0.0) || !std::isfinite(sample_time)) {
    throw Error(ErrorKind::kInvalidInput,
                "sample time must be positive and finite");
  }
}

Eigen::MatrixXd euler_discretize(const ContinuousSystem& sys) {
  sys.validate();
  const auto n = sys.a_bar.rows();
  return Eigen::MatrixXd::Identity(n, n) + sys.sample_time * sys.a_bar;
}

namespace {

Eigen::MatrixXd tustin_left_factor(const ContinuousSystem& sys) {
  const auto n = sys.a_bar.rows();
  return Eigen::MatrixXd::Identity(n, n) - 0.5 * sys.sample_time * sys.a_bar;
}

}  // namespace

double tustin_condition(const ContinuousSystem& sys) {
  sys.validate();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(tustin_left_factor(sys));
  const double rcond = lu.rcond();
  if (!(rcond > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / rcond;
}

Eigen::MatrixXd tustin_discretize(const ContinuousSystem& sys) {
  sys.validate();
  const auto n = sys.a_bar.rows();
  Eigen::MatrixXd left = tustin_left_factor(sys);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(left);
  // PartialPivLU does not flag singularity itself; a zero pivot shows up as
  // a vanishing reciprocal condition estimate.
  const double rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    throw Error(ErrorKind::kSingular,
                "I - (T/2) A is singular for T = " +
                    std::to_string(sys.sample_time) +
                    " (reciprocal condition " + std::to_string(rcond) + ")");
  }
  Eigen::MatrixXd right =
      Eigen::MatrixXd::Identity(n, n) + 0.5 * sys.sample_time * sys.a_bar;
  return lu.solve(right);
}

StructuredMatrix structure_of(const Eigen::MatrixXd& m, double tol) {
  if (!(tol >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "tolerance must be non-negative");
  }
  std::vector<Position> positions;
  std::vector<double> weights;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > tol) {
        positions.push_back(
            {static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
        weights.push_back(m(i, j));
      }
    }
  }
  return StructuredMatrix(static_cast<std::size_t>(m.rows()),
                          static_cast<std::size_t>(m.cols()),
                          std::move(positions), std::move(weights));
}

double relative_structure_tolerance(const Eigen::MatrixXd& m,
                                    double relative_tol) {
  if (m.size() == 0) return 0.0;
  return relative_tol * m.cwiseAbs().maxCoeff();
}

StructuredMatrix kronecker_pattern(const StructuredMatrix& outer,
                                   const StructuredMatrix& inner) {
  const std::size_t r = inner.rows(), c = inner.cols();
  std::vector<Position> positions;
  positions.reserve(outer.nonzeros() * inner.nonzeros());
  for (const auto& o : outer.positions()) {
    for (const auto& p : inner.positions()) {
      positions.push_back({o.row * r + p.row, o.col * c + p.col});
    }
  }
  return StructuredMatrix(outer.rows() * r, outer.cols() * c,
                          std::move(positions));
}

std::vector<std::vector<std::size_t>> agent_neighborhoods(
    const StructuredMatrix& u_pattern) {
  require_square(u_pattern, "network pattern");
  std::vector<std::vector<std::size_t>> hood(u_pattern.rows());
  for (std::size_t i = 0; i < u_pattern.rows(); ++i) hood[i].push_back(i);
  for (const auto& p : u_pattern.positions()) {
    if (p.row != p.col) hood[p.row].push_back(p.col);
  }
  for (auto& h : hood) std::sort(h.begin(), h.end());
  return hood;
}

NetworkedStructure build_networked_structure(
    const StructuredMatrix& a_pattern,
    const MeasurementStructure& measurements,
    const StructuredMatrix& u_pattern) {
  require_square(a_pattern, "system pattern");
  require_square(u_pattern, "network pattern");
  const std::size_t n = a_pattern.rows();
  const std::size_t agents = u_pattern.rows();
  if (measurements.cols() != n) {
    throw Error(ErrorKind::kInvalidInput,
                "measurement rows span " + std::to_string(measurements.cols()) +
                    " states, system has " + std::to_string(n));
  }
  if (measurements.rows() != agents) {
    throw Error(ErrorKind::kInvalidInput,
                "measurement structure has " +
                    std::to_string(measurements.rows()) +
                    " agents, network has " + std::to_string(agents));
  }

  NetworkedStructure out;
  out.kron_pattern = kronecker_pattern(u_pattern, a_pattern);

  std::vector<std::vector<std::size_t>> support(agents);
  for (std::size_t j = 0; j < agents; ++j) {
    support[j] = measurements.row_support(j);
  }
  std::vector<Position> dc;
  auto hoods = agent_neighborhoods(u_pattern);
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t j : hoods[i]) {
      for (std::size_t a : support[j]) {
        for (std::size_t b : support[j]) {
          dc.push_back({i * n + a, i * n + b});
        }
      }
    }
  }
  out.dc_pattern = StructuredMatrix(agents * n, agents * n, std::move(dc));
  return out;
}

}  // namespace netest
