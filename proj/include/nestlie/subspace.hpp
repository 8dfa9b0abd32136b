#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "nestlie/nest.hpp"

namespace nestlie {

// Column-major vectorization of an n x n operator into C^{n^2}. The trace
// inner product <S, T> = tr(T^* S) becomes the standard inner product on the
// vectorized images, so orthonormal columns below are orthonormal operators
// in the Frobenius geometry.
Vector vectorize(const Matrix& t);
Matrix unvectorize(const Vector& v, int n);

// A linear subspace of the n x n operators, stored as an n^2 x d matrix of
// orthonormal basis columns plus the tolerance it was built with. A stored
// tolerance of 0 means "default policy": membership thresholds fall back to
// 1e-9 and rank decisions are relative to the largest singular value.
class OperatorSubspace {
 public:
  static constexpr double kDefaultTol = 1e-9;

  OperatorSubspace(int matrix_dim, Eigen::MatrixXcd orthonormal_basis, double tol);
  static OperatorSubspace zero(int matrix_dim, double tol = 0.0);
  static OperatorSubspace full(int matrix_dim, double tol = 0.0);
  // Exact 0/1 basis from a list of (row, col) matrix-unit positions. The
  // positions must be distinct; columns are sorted by vectorized index.
  static OperatorSubspace from_units(int matrix_dim,
                                     std::vector<std::pair<int, int>> units,
                                     double tol = 0.0);

  int matrix_dim() const { return n_; }
  Eigen::Index dim() const { return basis_.cols(); }
  double tol() const { return tol_; }
  double membership_tol() const { return tol_ > kDefaultTol ? tol_ : kDefaultTol; }
  const Eigen::MatrixXcd& basis() const { return basis_; }
  Matrix basis_matrix(Eigen::Index j) const;
  std::vector<Matrix> basis_matrices() const;

 private:
  int n_;
  Eigen::MatrixXcd basis_;
  double tol_;
};

// Orthonormal span of the given operators. Rank rule: keep singular values
// sigma > max(tol, 1e-9 * sigma_max). Implemented as a streaming QR of the
// generator stack followed by one small SVD of the triangular factor, so the
// kept singular values are those of the full stack and the result is
// deterministic for a fixed generator order.
OperatorSubspace span_of(const std::vector<Matrix>& generators, int matrix_dim,
                         double tol = 0.0);
// Convenience overload; requires a non-empty generator list to infer n.
OperatorSubspace span_of(const std::vector<Matrix>& generators, double tol = 0.0);

// Residual distance from t to the subspace: || t - B B^* t ||_F.
double residual_norm(const OperatorSubspace& s, const Matrix& t);
// One residual per column of the n^2 x k block (vectorized operators).
Eigen::VectorXd residual_norms(const OperatorSubspace& s,
                               const Eigen::MatrixXcd& columns);

// residual <= max(tol, 1e-9) * max(1, ||t||_F).
bool contains(const OperatorSubspace& s, const Matrix& t);
// Every basis element of b lies in a (threshold from a).
bool includes(const OperatorSubspace& a, const OperatorSubspace& b);
bool equal(const OperatorSubspace& a, const OperatorSubspace& b);

OperatorSubspace sum(const OperatorSubspace& a, const OperatorSubspace& b);
// Intersection via the nullspace of the stacked basis [A, -B].
OperatorSubspace intersect(const OperatorSubspace& a, const OperatorSubspace& b);

using MatrixMap = std::function<Matrix(const Matrix&)>;

// Smallest subspace containing the seed and invariant under the given linear
// maps: fixpoint iteration, applying the maps only to the directions that
// were new in the previous round. Terminates after at most n^2 growth steps.
OperatorSubspace close_under(const OperatorSubspace& seed,
                             const std::vector<MatrixMap>& maps);

// Streaming builder behind span_of; exposed so other modules can feed long
// generator streams without materializing them.
class SpanBuilder {
 public:
  explicit SpanBuilder(int matrix_dim);
  void add(const Matrix& t);
  void add_column(const Eigen::VectorXcd& v);
  // Orthonormal basis after applying the rank rule. Callable once.
  Eigen::MatrixXcd finish(double tol);

 private:
  void flush();
  int n_;
  Eigen::Index ambient_;
  Eigen::MatrixXcd r_;  // current triangular factor of the adjoint stack
  std::vector<Eigen::VectorXcd> pending_;
};

}  // namespace nestlie
