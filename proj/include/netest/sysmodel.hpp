#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "netest/digraph.hpp"

namespace netest {

struct Position {
  std::size_t row = 0;
  std::size_t col = 0;

  friend auto operator<=>(const Position&, const Position&) = default;
};

/// Sparsity pattern with optional per-entry weights.
///
/// Positions are kept sorted row-major and unique. Weights, when present,
/// run parallel to positions; the 0-1 interpretation ignores them.
class StructuredMatrix {
 public:
  StructuredMatrix() = default;

  /// Throws Error(kInvalidInput) for zero dimensions or out-of-range
  /// positions. Duplicate positions collapse (first weight wins).
  StructuredMatrix(std::size_t rows, std::size_t cols,
                   std::vector<Position> positions,
                   std::vector<double> weights = {});

  static StructuredMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  std::size_t nonzeros() const noexcept { return positions_.size(); }

  std::span<const Position> positions() const noexcept { return positions_; }
  bool has_weights() const noexcept { return !weights_.empty(); }
  std::span<const double> weights() const noexcept { return weights_; }

  bool contains(std::size_t row, std::size_t col) const;

  /// Column indices present in one row, ascending.
  std::vector<std::size_t> row_support(std::size_t row) const;

  /// Same pattern, weights dropped.
  StructuredMatrix pattern() const;

  /// Pattern with every (i,i) added. Requires a square matrix.
  StructuredMatrix with_diagonal() const;

  /// Dense 0-1 (or weighted, when weights exist) matrix.
  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const StructuredMatrix& a,
                         const StructuredMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Position> positions_;
  std::vector<double> weights_;
};

/// Measurement structure: one row per agent over the n states.
using MeasurementStructure = StructuredMatrix;

/// System digraph of a square pattern: entry (i, j) means state j drives
/// state i, giving edge j -> i.
Digraph system_digraph(const StructuredMatrix& a_pattern);

/// Inverse of system_digraph: edge s -> t becomes entry (t, s).
StructuredMatrix pattern_from_digraph(const Digraph& g);

bool is_self_damped(const StructuredMatrix& a_pattern);

/// Diagonal positions absent from a square pattern.
std::vector<std::size_t> missing_self_loops(const StructuredMatrix& a_pattern);

struct ContinuousSystem {
  Eigen::MatrixXd a_bar;
  double sample_time = 0.0;

  /// Throws Error(kInvalidInput) unless a_bar is square and non-empty, its
  /// entries finite, and sample_time positive and finite.
  void validate() const;
};

/// I + T * A_bar.
Eigen::MatrixXd euler_discretize(const ContinuousSystem& sys);

/// (I - T/2 A_bar)^{-1} (I + T/2 A_bar), via partially pivoted LU.
/// Throws Error(kSingular) when the left factor is singular to working
/// precision.
Eigen::MatrixXd tustin_discretize(const ContinuousSystem& sys);

/// Estimated 1-norm condition number of I - T/2 A_bar (infinity if
/// singular).
double tustin_condition(const ContinuousSystem& sys);

inline constexpr double kTustinConditionWarning = 1e12;
inline constexpr double kDefaultRelativeStructureTolerance = 1e-9;

/// Positions where |m(i,j)| > tol, weighted by the entries.
StructuredMatrix structure_of(const Eigen::MatrixXd& m, double tol);

/// Absolute tolerance relative_tol * max|m|.
double relative_structure_tolerance(
    const Eigen::MatrixXd& m,
    double relative_tol = kDefaultRelativeStructureTolerance);

struct NetworkedStructure {
  /// Pattern of U (x) A, size (N n) x (N n).
  StructuredMatrix kron_pattern;
  /// Block-diagonal pattern of D_C; block i is the union over j in N_i of
  /// the patterns of C_j^T C_j. Agent i is always in its own neighborhood.
  StructuredMatrix dc_pattern;
};

/// Kronecker product of two patterns.
StructuredMatrix kronecker_pattern(const StructuredMatrix& outer,
                                   const StructuredMatrix& inner);

/// Neighborhoods read from u_pattern: j in N_i iff U(i,j) present, plus i.
std::vector<std::vector<std::size_t>> agent_neighborhoods(
    const StructuredMatrix& u_pattern);

NetworkedStructure build_networked_structure(
    const StructuredMatrix& a_pattern,
    const MeasurementStructure& measurements,
    const StructuredMatrix& u_pattern);

}  // namespace netest
