#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace nestlie {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// A finite nest on C^n: the chain of coordinate projections
//   0 = P_0 < P_1 < ... < P_m = I
// encoded by its rank boundaries 0 = b_0 < b_1 < ... < b_m = n.
// P_k projects onto the span of the first b_k standard basis vectors.
// Atom k (1 <= k <= m) is the coordinate range [b_{k-1}, b_k).
class Nest {
 public:
  Nest(int dimension, std::vector<int> boundaries);

  int dimension() const { return dim_; }
  int length() const { return static_cast<int>(boundaries_.size()) - 1; }
  const std::vector<int>& boundaries() const { return boundaries_; }
  int boundary(int k) const;

  int atom_count() const { return length(); }
  // [b_{k-1}, b_k) for 1 <= k <= atom_count().
  std::pair<int, int> atom_range(int k) const;
  // The atom index (1-based) containing coordinate 0 <= c < n.
  int atom_of(int coordinate) const;

 private:
  int dim_;
  std::vector<int> boundaries_;
};

// The matrix unit E_{ij} (1 at row i, column j; 0-based indices).
Matrix matrix_unit(int n, int i, int j);

// P_k as an n x n matrix (diagonal 0/1).
Matrix nest_projection(const Nest& nest, int k);

// Index of the immediate predecessor: k - 1 for k >= 1; predecessor(0) = 0.
int predecessor(const Nest& nest, int k);

// Matrix units E_{ij} with atom(i) <= atom(j), in row-major (i outer) order.
// These span the nest algebra T(N) = { T : (I - P_k) T P_k = 0 for all k }.
std::vector<Matrix> algebra_basis(const Nest& nest);

// Matrix units E_{ij} with atom(i) == atom(j); they span the diagonal
// D(N) = T(N) cap T(N)*.
std::vector<Matrix> diagonal_basis(const Nest& nest);

// The conditional expectation onto D(N): zero every entry whose row and
// column lie in different atoms. Equals sum_k A_k T A_k over atom
// projections A_k; trace-preserving, idempotent, contractive.
Matrix expectation(const Nest& nest, const Matrix& t);

struct VectorProjections {
  int p;     // least k with P_k z = z
  int phat;  // greatest k with P_k z = 0
};

// Exact support computations (no tolerance): for z = 0 returns {0, m}.
VectorProjections vector_projections(const Nest& nest, const Vector& z);

// The rank-one operator x (x) y : z -> <z, x> y, whose matrix is y x^*.
Matrix rank_one(const Vector& x, const Vector& y);

// Whether x (x) y lies in T(N): P_y^- x = 0 and P_y y = y, where P_y is the
// least nest projection fixing y. Zero x or y gives the zero operator
// (trivially inside).
bool rank_one_in_algebra(const Nest& nest, const Vector& x, const Vector& y);

struct RankOneProfile {
  Vector x;
  Vector y;
  int p_y;     // least k with P_k y = y
  int phat_x;  // greatest k with P_k x = 0
};

RankOneProfile rank_one_profile(const Nest& nest, Vector x, Vector y);

// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const Matrix& t);
void require_finite(const Vector& v);

}  // namespace nestlie
