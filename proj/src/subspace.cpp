#include "nestlie/subspace.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace nestlie {

namespace {

constexpr double kRankRel = 1e-9;
constexpr Eigen::Index kChunk = 256;

double effective_tol(double tol) {
  return tol > OperatorSubspace::kDefaultTol ? tol : OperatorSubspace::kDefaultTol;
}

}  // namespace

Vector vectorize(const Matrix& t) {
  return Eigen::Map<const Vector>(t.data(), t.size());
}

Matrix unvectorize(const Vector& v, int n) {
  if (v.size() != Eigen::Index(n) * n)
    throw std::invalid_argument("unvectorize: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

OperatorSubspace::OperatorSubspace(int matrix_dim, Eigen::MatrixXcd orthonormal_basis,
                                   double tol)
    : n_(matrix_dim), basis_(std::move(orthonormal_basis)), tol_(tol) {
  if (n_ < 1) throw std::invalid_argument("subspace: matrix dimension must be >= 1");
  if (tol_ < 0.0) throw std::invalid_argument("subspace: tolerance must be >= 0");
  if (basis_.rows() != Eigen::Index(n_) * n_)
    throw std::invalid_argument("subspace: basis row count must be n^2");
}

OperatorSubspace OperatorSubspace::zero(int matrix_dim, double tol) {
  return OperatorSubspace(matrix_dim,
                          Eigen::MatrixXcd(Eigen::Index(matrix_dim) * matrix_dim, 0), tol);
}

OperatorSubspace OperatorSubspace::full(int matrix_dim, double tol) {
  const Eigen::Index nn = Eigen::Index(matrix_dim) * matrix_dim;
  return OperatorSubspace(matrix_dim, Eigen::MatrixXcd::Identity(nn, nn), tol);
}

OperatorSubspace OperatorSubspace::from_units(int matrix_dim,
                                              std::vector<std::pair<int, int>> units,
                                              double tol) {
  const Eigen::Index nn = Eigen::Index(matrix_dim) * matrix_dim;
  std::vector<Eigen::Index> idx;
  idx.reserve(units.size());
  for (auto [i, j] : units) {
    if (i < 0 || i >= matrix_dim || j < 0 || j >= matrix_dim)
      throw std::out_of_range("from_units: unit index out of range");
    idx.push_back(Eigen::Index(j) * matrix_dim + i);
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw std::invalid_argument("from_units: duplicate unit");
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(nn, Eigen::Index(idx.size()));
  for (Eigen::Index c = 0; c < basis.cols(); ++c) basis(idx[std::size_t(c)], c) = 1.0;
  return OperatorSubspace(matrix_dim, std::move(basis), tol);
}

Matrix OperatorSubspace::basis_matrix(Eigen::Index j) const {
  if (j < 0 || j >= dim()) throw std::out_of_range("basis_matrix: index out of range");
  return unvectorize(basis_.col(j), n_);
}

std::vector<Matrix> OperatorSubspace::basis_matrices() const {
  std::vector<Matrix> out;
  out.reserve(std::size_t(dim()));
  for (Eigen::Index j = 0; j < dim(); ++j) out.push_back(basis_matrix(j));
  return out;
}

SpanBuilder::SpanBuilder(int matrix_dim)
    : n_(matrix_dim), ambient_(Eigen::Index(matrix_dim) * matrix_dim), r_(0, ambient_) {
  if (matrix_dim < 1) throw std::invalid_argument("span: matrix dimension must be >= 1");
}

void SpanBuilder::add(const Matrix& t) {
  if (t.rows() != n_ || t.cols() != n_)
    throw std::invalid_argument("span: generator size mismatch");
  require_finite(t);
  add_column(vectorize(t));
}

void SpanBuilder::add_column(const Eigen::VectorXcd& v) {
  if (v.size() != ambient_) throw std::invalid_argument("span: column size mismatch");
  pending_.push_back(v);
  if (Eigen::Index(pending_.size()) >= kChunk) flush();
}

void SpanBuilder::flush() {
  if (pending_.empty()) return;
  const Eigen::Index extra = Eigen::Index(pending_.size());
  Eigen::MatrixXcd stack(r_.rows() + extra, ambient_);
  stack.topRows(r_.rows()) = r_;
  for (Eigen::Index i = 0; i < extra; ++i)
    stack.row(r_.rows() + i) = pending_[std::size_t(i)].adjoint();
  pending_.clear();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stack);
  const Eigen::Index keep = std::min(stack.rows(), ambient_);
  r_ = Eigen::MatrixXcd(qr.matrixQR()
                            .topRows(keep)
                            .template triangularView<Eigen::Upper>());
}

Eigen::MatrixXcd SpanBuilder::finish(double tol) {
  flush();
  if (r_.rows() == 0) return Eigen::MatrixXcd(ambient_, 0);
  // Columns of the original stack are rows of r_ conjugated; the singular
  // values of r_ equal those of the full generator stack.  Jacobi SVD, not
  // the divide-and-conquer one: the latter returns non-finite output for
  // some of the exactly-degenerate spectra these stacks produce.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r_.adjoint(), Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Eigen::MatrixXcd(ambient_, 0);
  const double cutoff = std::max(tol, kRankRel * sv(0));
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

OperatorSubspace span_of(const std::vector<Matrix>& generators, int matrix_dim,
                         double tol) {
  if (tol < 0.0) throw std::invalid_argument("span: tolerance must be >= 0");
  SpanBuilder builder(matrix_dim);
  for (const auto& g : generators) builder.add(g);
  return OperatorSubspace(matrix_dim, builder.finish(tol), tol);
}

OperatorSubspace span_of(const std::vector<Matrix>& generators, double tol) {
  if (generators.empty())
    throw std::invalid_argument("span: cannot infer dimension from an empty list");
  return span_of(generators, int(generators.front().rows()), tol);
}

Eigen::VectorXd residual_norms(const OperatorSubspace& s,
                               const Eigen::MatrixXcd& columns) {
  if (columns.rows() != s.basis().rows())
    throw std::invalid_argument("residual: column size mismatch");
  if (s.dim() == 0) return columns.colwise().norm();
  Eigen::MatrixXcd coeff = s.basis().adjoint() * columns;
  Eigen::MatrixXcd resid = columns - s.basis() * coeff;
  return resid.colwise().norm();
}

double residual_norm(const OperatorSubspace& s, const Matrix& t) {
  if (t.rows() != s.matrix_dim() || t.cols() != s.matrix_dim())
    throw std::invalid_argument("residual: operator size mismatch");
  require_finite(t);
  return residual_norms(s, vectorize(t))(0);
}

bool contains(const OperatorSubspace& s, const Matrix& t) {
  const double scale = std::max(1.0, t.norm());
  return residual_norm(s, t) <= s.membership_tol() * scale;
}

bool includes(const OperatorSubspace& a, const OperatorSubspace& b) {
  if (a.matrix_dim() != b.matrix_dim())
    throw std::invalid_argument("includes: matrix dimensions differ");
  if (b.dim() == 0) return true;
  // Basis columns are unit norm, so the membership scale factor is 1.
  return (residual_norms(a, b.basis()).array() <= a.membership_tol()).all();
}

bool equal(const OperatorSubspace& a, const OperatorSubspace& b) {
  return includes(a, b) && includes(b, a);
}

OperatorSubspace sum(const OperatorSubspace& a, const OperatorSubspace& b) {
  if (a.matrix_dim() != b.matrix_dim())
    throw std::invalid_argument("sum: matrix dimensions differ");
  const double tol = std::max(a.tol(), b.tol());
  SpanBuilder builder(a.matrix_dim());
  for (Eigen::Index j = 0; j < a.dim(); ++j) builder.add_column(a.basis().col(j));
  for (Eigen::Index j = 0; j < b.dim(); ++j) builder.add_column(b.basis().col(j));
  return OperatorSubspace(a.matrix_dim(), builder.finish(tol), tol);
}

OperatorSubspace intersect(const OperatorSubspace& a, const OperatorSubspace& b) {
  if (a.matrix_dim() != b.matrix_dim())
    throw std::invalid_argument("intersect: matrix dimensions differ");
  const double tol = std::max(a.tol(), b.tol());
  const Eigen::Index da = a.dim();
  const Eigen::Index db = b.dim();
  if (da == 0 || db == 0) return OperatorSubspace::zero(a.matrix_dim(), tol);
  Eigen::MatrixXcd stacked(a.basis().rows(), da + db);
  stacked.leftCols(da) = a.basis();
  stacked.rightCols(db) = -b.basis();
  // Null vectors (u; v) of [A, -B] give intersection elements A u = B v.
  // Work on the adjoint so the null directions appear as left singular
  // vectors; FullU also exposes the exact-null block when da+db > n^2.
  // Jacobi SVD for the same degenerate-spectrum robustness as in finish().
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked.adjoint(), Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double sv_max = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = std::max(tol, kRankRel * std::max(sv_max, 1.0));
  SpanBuilder builder(a.matrix_dim());
  for (Eigen::Index j = 0; j < svd.matrixU().cols(); ++j) {
    if (j < sv.size() && sv(j) > cutoff) continue;
    builder.add_column(a.basis() * svd.matrixU().col(j).head(da));
  }
  return OperatorSubspace(a.matrix_dim(), builder.finish(effective_tol(tol)), tol);
}

OperatorSubspace close_under(const OperatorSubspace& seed,
                             const std::vector<MatrixMap>& maps) {
  const int n = seed.matrix_dim();
  const Eigen::Index full_dim = Eigen::Index(n) * n;
  const double span_tol = effective_tol(seed.tol());
  Eigen::MatrixXcd current = seed.basis();
  Eigen::MatrixXcd frontier = current;
  while (frontier.cols() > 0 && current.cols() < full_dim) {
    SpanBuilder builder(n);
    for (Eigen::Index j = 0; j < current.cols(); ++j)
      builder.add_column(current.col(j));
    for (Eigen::Index j = 0; j < frontier.cols(); ++j) {
      const Matrix f = unvectorize(frontier.col(j), n);
      for (const auto& map : maps) {
        Matrix img = map(f);
        if (img.rows() != n || img.cols() != n)
          throw std::invalid_argument("close_under: map changed the operator size");
        builder.add_column(vectorize(img));
      }
    }
    Eigen::MatrixXcd next = builder.finish(span_tol);
    if (next.cols() <= current.cols()) break;
    // New directions: the compression of (I - P_current) to span(next) is a
    // projection, so the residual block has singular values 0 and 1 exactly;
    // cutting at 1/2 separates them robustly.
    Eigen::MatrixXcd resid = next - current * (current.adjoint() * next);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(resid, Eigen::ComputeThinU);
    Eigen::Index fresh = 0;
    while (fresh < svd.singularValues().size() && svd.singularValues()(fresh) > 0.5)
      ++fresh;
    frontier = svd.matrixU().leftCols(fresh);
    current = std::move(next);
  }
  return OperatorSubspace(n, std::move(current), seed.tol());
}

}  // namespace nestlie
