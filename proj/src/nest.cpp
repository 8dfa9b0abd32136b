#include "nestlie/nest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nestlie {

Nest::Nest(int dimension, std::vector<int> boundaries)
    : dim_(dimension), boundaries_(std::move(boundaries)) {
  if (dim_ < 1) throw std::invalid_argument("nest: dimension must be >= 1");
  if (boundaries_.size() < 2)
    throw std::invalid_argument("nest: need at least boundaries {0, n}");
  if (boundaries_.front() != 0)
    throw std::invalid_argument("nest: first boundary must be 0");
  if (boundaries_.back() != dim_)
    throw std::invalid_argument("nest: last boundary must equal the dimension");
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (boundaries_[i] <= boundaries_[i - 1])
      throw std::invalid_argument("nest: boundaries must be strictly increasing");
  }
}

int Nest::boundary(int k) const {
  if (k < 0 || k > length())
    throw std::out_of_range("nest: projection index " + std::to_string(k) +
                            " outside 0.." + std::to_string(length()));
  return boundaries_[static_cast<std::size_t>(k)];
}

std::pair<int, int> Nest::atom_range(int k) const {
  if (k < 1 || k > atom_count())
    throw std::out_of_range("nest: atom index " + std::to_string(k) +
                            " outside 1.." + std::to_string(atom_count()));
  return {boundaries_[static_cast<std::size_t>(k - 1)],
          boundaries_[static_cast<std::size_t>(k)]};
}

int Nest::atom_of(int coordinate) const {
  if (coordinate < 0 || coordinate >= dim_)
    throw std::out_of_range("nest: coordinate out of range");
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), coordinate);
  return static_cast<int>(it - boundaries_.begin());
}

Matrix matrix_unit(int n, int i, int j) {
  if (n < 1 || i < 0 || i >= n || j < 0 || j >= n)
    throw std::out_of_range("matrix_unit: index out of range");
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = Complex(1.0, 0.0);
  return e;
}

Matrix nest_projection(const Nest& nest, int k) {
  const int b = nest.boundary(k);
  Matrix p = Matrix::Zero(nest.dimension(), nest.dimension());
  for (int i = 0; i < b; ++i) p(i, i) = Complex(1.0, 0.0);
  return p;
}

int predecessor(const Nest& nest, int k) {
  if (k < 0 || k > nest.length())
    throw std::out_of_range("predecessor: index out of range");
  return k > 0 ? k - 1 : 0;
}

std::vector<Matrix> algebra_basis(const Nest& nest) {
  const int n = nest.dimension();
  std::vector<Matrix> basis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (nest.atom_of(i) <= nest.atom_of(j)) basis.push_back(matrix_unit(n, i, j));
  return basis;
}

std::vector<Matrix> diagonal_basis(const Nest& nest) {
  const int n = nest.dimension();
  std::vector<Matrix> basis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (nest.atom_of(i) == nest.atom_of(j)) basis.push_back(matrix_unit(n, i, j));
  return basis;
}

Matrix expectation(const Nest& nest, const Matrix& t) {
  const int n = nest.dimension();
  if (t.rows() != n || t.cols() != n)
    throw std::invalid_argument("expectation: operator size does not match the nest");
  require_finite(t);
  Matrix r = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (nest.atom_of(i) == nest.atom_of(j)) r(i, j) = t(i, j);
  return r;
}

VectorProjections vector_projections(const Nest& nest, const Vector& z) {
  const int n = nest.dimension();
  if (z.size() != n)
    throw std::invalid_argument("vector_projections: vector size does not match the nest");
  require_finite(z);
  int first = -1;
  int last = -1;
  for (int i = 0; i < n; ++i) {
    if (z(i) != Complex(0.0, 0.0)) {
      if (first < 0) first = i;
      last = i;
    }
  }
  const int m = nest.length();
  if (first < 0) return {0, m};
  // Least k with b_k >= last+1; greatest k with b_k <= first.
  VectorProjections out{m, 0};
  for (int k = 0; k <= m; ++k) {
    if (nest.boundary(k) >= last + 1) {
      out.p = k;
      break;
    }
  }
  for (int k = m; k >= 0; --k) {
    if (nest.boundary(k) <= first) {
      out.phat = k;
      break;
    }
  }
  return out;
}

Matrix rank_one(const Vector& x, const Vector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("rank_one: vector sizes differ");
  require_finite(x);
  require_finite(y);
  return y * x.adjoint();
}

bool rank_one_in_algebra(const Nest& nest, const Vector& x, const Vector& y) {
  const int n = nest.dimension();
  if (x.size() != n || y.size() != n)
    throw std::invalid_argument("rank_one_in_algebra: vector size does not match the nest");
  require_finite(x);
  require_finite(y);
  if (x.isZero(0.0) || y.isZero(0.0)) return true;
  const int p_y = vector_projections(nest, y).p;
  const int cut = nest.boundary(predecessor(nest, p_y));
  return x.head(cut).isZero(0.0);
}

RankOneProfile rank_one_profile(const Nest& nest, Vector x, Vector y) {
  const int n = nest.dimension();
  if (x.size() != n || y.size() != n)
    throw std::invalid_argument("rank_one_profile: vector size does not match the nest");
  const int p_y = vector_projections(nest, y).p;
  const int phat_x = vector_projections(nest, x).phat;
  return {std::move(x), std::move(y), p_y, phat_x};
}

void require_finite(const Matrix& t) {
  if (!t.allFinite())
    throw std::invalid_argument("operator has non-finite entries");
}

void require_finite(const Vector& v) {
  if (!v.allFinite())
    throw std::invalid_argument("vector has non-finite entries");
}

}  // namespace nestlie
