#include "nestlie/lie.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace nestlie {

namespace {

constexpr double kFloor = 1e-9;

void check_operator_size(const OperatorSubspace& s, const Nest& nest,
                         const char* where) {
  if (s.matrix_dim() != nest.dimension())
    throw std::invalid_argument(std::string(where) +
                                ": subspace and nest dimensions differ");
}

std::vector<MatrixMap> bracket_maps(const Nest& nest) {
  const int n = nest.dimension();
  std::vector<MatrixMap> maps;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (nest.atom_of(u) > nest.atom_of(v)) continue;
      maps.push_back([n, u, v](const Matrix& t) {
        Matrix img = Matrix::Zero(n, n);
        img.col(v) += t.col(u);  // T E_uv
        img.row(u) -= t.row(v);  // - E_uv T
        return img;
      });
    }
  return maps;
}

// Worst constraint violation over a stream of candidate members of `space`:
// excess = residual - tol * max(1, norm). Returns the worst excess and fills
// witness/residual for the worst column.
class MembershipAudit {
 public:
  MembershipAudit(const OperatorSubspace& space, bool stop_early)
      : space_(space),
        stop_early_(stop_early),
        block_(space.basis().rows(), kChunk) {}

  // Returns false when stop_early and a violation is already known.
  bool offer(const Matrix& candidate) {
    block_.col(filled_++) = vectorize(candidate);
    if (filled_ == kChunk) drain();
    return !(stop_early_ && failed_);
  }

  void drain() {
    if (filled_ == 0) return;
    const auto cols = block_.leftCols(filled_);
    const Eigen::VectorXd resid = residual_norms(space_, cols);
    const Eigen::VectorXd norms = cols.colwise().norm();
    const double tol = space_.membership_tol();
    for (Eigen::Index c = 0; c < filled_; ++c) {
      const double excess = resid(c) - tol * std::max(1.0, norms(c));
      if (excess > worst_excess_) {
        worst_excess_ = excess;
        worst_residual_ = resid(c);
        witness_ = unvectorize(block_.col(c), space_.matrix_dim());
      }
      if (resid(c) > max_residual_) max_residual_ = resid(c);
      if (excess > 0.0) failed_ = true;
    }
    filled_ = 0;
  }

  bool ok() {
    drain();
    return !failed_;
  }
  double worst_residual() const { return worst_residual_; }
  double max_residual() const { return max_residual_; }
  const std::optional<Matrix>& witness() const { return witness_; }

 private:
  static constexpr Eigen::Index kChunk = 1024;
  const OperatorSubspace& space_;
  bool stop_early_;
  Eigen::MatrixXcd block_;
  Eigen::Index filled_ = 0;
  bool failed_ = false;
  double worst_excess_ = -1.0;
  double worst_residual_ = 0.0;
  double max_residual_ = 0.0;
  std::optional<Matrix> witness_;
};

bool audit_brackets(const OperatorSubspace& l, const Nest& nest,
                    MembershipAudit& audit) {
  const int n = nest.dimension();
  for (Eigen::Index c = 0; c < l.dim(); ++c) {
    const Matrix b = l.basis_matrix(c);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (nest.atom_of(u) > nest.atom_of(v)) continue;
        Matrix img = Matrix::Zero(n, n);
        img.col(v) += b.col(u);
        img.row(u) -= b.row(v);
        if (!audit.offer(img)) return false;
      }
  }
  return audit.ok();
}

KDecomposition k_decompose_impl(const OperatorSubspace& l, const Nest& nest) {
  const int n = nest.dimension();
  const int m = nest.length();
  const double span_tol = std::max(l.tol(), kFloor);
  const std::vector<Matrix> lbasis = l.basis_matrices();
  SpanBuilder kv_b(n), kl_b(n), kd_b(n), kdelta_b(n);
  for (int k = 1; k < m; ++k) {
    const int b = nest.boundary(k);
    SpanBuilder lower_b(n);
    for (const auto& t : lbasis) {
      Matrix upper = Matrix::Zero(n, n);
      upper.topRightCorner(b, n - b) = t.topRightCorner(b, n - b);
      kv_b.add(upper);
      Matrix lower = Matrix::Zero(n, n);
      lower.bottomLeftCorner(n - b, b) = t.bottomLeftCorner(n - b, b);
      kl_b.add(lower);
      lower_b.add(lower);
    }
    // P T(N) P-perp is the full upper corner, so corner units times a basis
    // of the lower compression span the two mixed parts.
    const Eigen::MatrixXcd low = lower_b.finish(span_tol);
    for (Eigen::Index c = 0; c < low.cols(); ++c) {
      const Matrix a = unvectorize(low.col(c), n);
      for (int i = 0; i < b; ++i)
        for (int j = b; j < n; ++j) {
          Matrix kd = Matrix::Zero(n, n);
          kd.row(i) = a.row(j);  // E_ij a
          kd_b.add(kd);
          Matrix kdel = Matrix::Zero(n, n);
          kdel.col(j) = a.col(i);  // a E_ij
          kdelta_b.add(kdel);
        }
    }
  }
  OperatorSubspace k_v(n, kv_b.finish(span_tol), l.tol());
  OperatorSubspace k_l(n, kl_b.finish(span_tol), l.tol());
  OperatorSubspace k_d(n, kd_b.finish(span_tol), l.tol());
  OperatorSubspace k_delta(n, kdelta_b.finish(span_tol), l.tol());
  OperatorSubspace k_total = sum(sum(k_v, k_l), sum(k_d, k_delta));
  return {std::move(k_v), std::move(k_l), std::move(k_d), std::move(k_delta),
          std::move(k_total)};
}

DiagonalConstraintAlgebra diagonal_algebra_impl(const OperatorSubspace& kspace,
                                                const Nest& nest) {
  const int n = nest.dimension();
  const int m = nest.length();
  const NestMap phi = phi_of(kspace, nest);
  std::vector<DiagonalBand> bands;
  for (int k = 1; k <= m; ++k)
    if (phi(k) < predecessor(nest, k))
      bands.push_back({k, nest.boundary(phi(k)), nest.boundary(k)});

  // Unknowns: the diagonal-block entries (column-major within each atom
  // block), then one scalar per band. Each band forces every atom block it
  // covers to equal lambda * identity.
  std::vector<int> offset(std::size_t(m) + 1, 0);
  int entry_count = 0;
  for (int a = 1; a <= m; ++a) {
    offset[std::size_t(a)] = entry_count;
    const auto [lo, hi] = nest.atom_range(a);
    entry_count += (hi - lo) * (hi - lo);
  }
  const int band_count = int(bands.size());

  int row_count = 0;
  for (const auto& band : bands)
    for (int a = 1; a <= m; ++a) {
      const auto [lo, hi] = nest.atom_range(a);
      if (lo >= band.lo && hi <= band.hi) row_count += (hi - lo) * (hi - lo);
    }

  Eigen::MatrixXd null_basis;
  if (row_count == 0) {
    null_basis = Eigen::MatrixXd::Identity(entry_count + band_count,
                                           entry_count + band_count);
  } else {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(row_count, entry_count + band_count);
    int r = 0;
    for (int bidx = 0; bidx < band_count; ++bidx)
      for (int a = 1; a <= m; ++a) {
        const auto [lo, hi] = nest.atom_range(a);
        if (lo < bands[std::size_t(bidx)].lo || hi > bands[std::size_t(bidx)].hi)
          continue;
        const int s = hi - lo;
        for (int jj = 0; jj < s; ++jj)
          for (int ii = 0; ii < s; ++ii) {
            c(r, offset[std::size_t(a)] + jj * s + ii) = 1.0;
            if (ii == jj) c(r, entry_count + bidx) = -1.0;
            ++r;
          }
      }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? kFloor * std::max(sv(0), 1.0) : kFloor;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    null_basis = svd.matrixV().rightCols(svd.matrixV().cols() - rank);
  }

  std::vector<Matrix> members;
  for (Eigen::Index col = 0; col < null_basis.cols(); ++col) {
    Matrix t = Matrix::Zero(n, n);
    for (int a = 1; a <= m; ++a) {
      const auto [lo, hi] = nest.atom_range(a);
      const int s = hi - lo;
      for (int jj = 0; jj < s; ++jj)
        for (int ii = 0; ii < s; ++ii)
          t(lo + ii, lo + jj) =
              null_basis(offset[std::size_t(a)] + jj * s + ii, col);
    }
    members.push_back(std::move(t));
  }
  const double span_tol = std::max(kspace.tol(), kFloor);
  SpanBuilder builder(n);
  for (const auto& t : members) builder.add(t);
  OperatorSubspace space(n, builder.finish(span_tol), kspace.tol());
  return {std::move(space), std::move(bands)};
}

ClauseResult inclusion_clause(std::string name, const OperatorSubspace& big,
                              const OperatorSubspace& small) {
  ClauseResult result{std::move(name), true, 0.0, std::nullopt};
  if (small.dim() == 0) return result;
  const Eigen::VectorXd resid = residual_norms(big, small.basis());
  Eigen::Index worst = 0;
  result.residual = resid.maxCoeff(&worst);
  if (result.residual > big.membership_tol()) {
    result.passed = false;
    result.witness = small.basis_matrix(worst);
  }
  return result;
}

}  // namespace

OperatorSubspace lie_closure(const OperatorSubspace& seed, const Nest& nest) {
  check_operator_size(seed, nest, "lie_closure");
  return close_under(seed, bracket_maps(nest));
}

bool is_lie_closed(const OperatorSubspace& l, const Nest& nest) {
  check_operator_size(l, nest, "is_lie_closed");
  const int n = nest.dimension();
  if (l.dim() == Eigen::Index(n) * n) return true;
  MembershipAudit audit(l, /*stop_early=*/true);
  return audit_brackets(l, nest, audit);
}

bool corner_compress_check(const OperatorSubspace& l, const Nest& nest) {
  check_operator_size(l, nest, "corner_compress_check");
  if (!is_lie_closed(l, nest))
    throw std::invalid_argument("corner_compress_check: L is not commutator-closed");
  const int n = nest.dimension();
  MembershipAudit audit(l, /*stop_early=*/true);
  for (int k = 0; k <= nest.length(); ++k) {
    const int b = nest.boundary(k);
    for (Eigen::Index c = 0; c < l.dim(); ++c) {
      const Matrix t = l.basis_matrix(c);
      Matrix upper = Matrix::Zero(n, n);
      upper.topRightCorner(b, n - b) = t.topRightCorner(b, n - b);
      Matrix lower = Matrix::Zero(n, n);
      lower.bottomLeftCorner(n - b, b) = t.bottomLeftCorner(n - b, b);
      if (!audit.offer(upper) || !audit.offer(lower)) return false;
    }
  }
  return audit.ok();
}

Dichotomy dichotomy_check(const OperatorSubspace& l, const Nest& nest, int k) {
  check_operator_size(l, nest, "dichotomy_check");
  nest.boundary(k);  // range check
  if (!is_lie_closed(l, nest))
    throw std::invalid_argument("dichotomy_check: L is not commutator-closed");
  const int m = nest.length();
  if (k == 0 || k == m) return Dichotomy::lower_zero;
  const int n = nest.dimension();
  const int b = nest.boundary(k);
  const double span_tol = std::max(l.tol(), kFloor);
  SpanBuilder lower_b(n), upper_b(n);
  for (Eigen::Index c = 0; c < l.dim(); ++c) {
    const Matrix t = l.basis_matrix(c);
    Matrix lower = Matrix::Zero(n, n);
    lower.bottomLeftCorner(n - b, b) = t.bottomLeftCorner(n - b, b);
    lower_b.add(lower);
    Matrix upper = Matrix::Zero(n, n);
    upper.topRightCorner(b, n - b) = t.topRightCorner(b, n - b);
    upper_b.add(upper);
  }
  if (lower_b.finish(span_tol).cols() == 0) return Dichotomy::lower_zero;
  OperatorSubspace upper(n, upper_b.finish(span_tol), l.tol());
  if (equal(upper, corner_subspace(nest, {k, k}))) return Dichotomy::upper_full;
  return Dichotomy::violation;
}

KDecomposition k_decompose(const OperatorSubspace& l, const Nest& nest) {
  check_operator_size(l, nest, "k_decompose");
  if (!is_lie_closed(l, nest))
    throw std::invalid_argument("k_decompose: L is not commutator-closed");
  return k_decompose_impl(l, nest);
}

DiagonalConstraintAlgebra diagonal_algebra(const OperatorSubspace& k,
                                           const Nest& nest) {
  check_operator_size(k, nest, "diagonal_algebra");
  if (!is_bimodule(k, nest))
    throw std::invalid_argument("diagonal_algebra: K is not a bimodule");
  return diagonal_algebra_impl(k, nest);
}

CommutatorWitness commutator_into(const OperatorSubspace& k, const Nest& nest,
                                  const OperatorSubspace& l) {
  check_operator_size(k, nest, "commutator_into");
  check_operator_size(l, nest, "commutator_into");
  const int n = nest.dimension();
  const double tol = l.membership_tol();
  CommutatorWitness witness{true, Matrix(), Matrix(), 0.0};
  for (Eigen::Index c = 0; c < k.dim(); ++c) {
    const Matrix b = k.basis_matrix(c);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (nest.atom_of(u) > nest.atom_of(v)) continue;
        Matrix img = Matrix::Zero(n, n);
        img.col(v) += b.col(u);
        img.row(u) -= b.row(v);
        const double resid = residual_norm(l, img);
        if (resid > witness.residual) witness.residual = resid;
        if (resid > tol * std::max(1.0, img.norm())) {
          witness.ok = false;
          witness.k_elem = b;
          witness.g_elem = matrix_unit(n, u, v);
          witness.residual = resid;
          return witness;
        }
      }
  }
  return witness;
}

VerificationReport verify_structure_theorem(const std::vector<Matrix>& seed,
                                            const Nest& nest, double tol) {
  const int n = nest.dimension();
  const OperatorSubspace seed_span = span_of(seed, n, tol);
  OperatorSubspace l = lie_closure(seed_span, nest);
  OperatorSubspace j = largest_bimodule(l, nest);
  KDecomposition kd = k_decompose_impl(l, nest);
  DiagonalConstraintAlgebra dk = diagonal_algebra_impl(kd.k_total, nest);

  std::vector<ClauseResult> clauses;
  clauses.push_back(inclusion_clause("j_subseteq_l", l, j));
  clauses.push_back(
      inclusion_clause("l_subseteq_k_plus_dk", sum(kd.k_total, dk.space), l));
  {
    const CommutatorWitness cw = commutator_into(kd.k_total, nest, l);
    ClauseResult clause{"commutator_in_l", cw.ok, cw.residual, std::nullopt};
    if (!cw.ok) {
      Matrix img = cw.k_elem * cw.g_elem - cw.g_elem * cw.k_elem;
      clause.witness = std::move(img);
    }
    clauses.push_back(std::move(clause));
  }
  clauses.push_back(inclusion_clause("kv_subseteq_j", j, kd.k_v));
  {
    ClauseResult clause{"k_is_bimodule", true, 0.0, std::nullopt};
    if (!is_bimodule(kd.k_total, nest)) {
      clause.passed = false;
      MembershipAudit audit(kd.k_total, /*stop_early=*/false);
      const int dim = nest.dimension();
      for (Eigen::Index c = 0; c < kd.k_total.dim(); ++c) {
        const Matrix b = kd.k_total.basis_matrix(c);
        for (int u = 0; u < dim; ++u)
          for (int v = 0; v < dim; ++v) {
            if (nest.atom_of(u) > nest.atom_of(v)) continue;
            Matrix left = Matrix::Zero(dim, dim);
            left.row(u) = b.row(v);
            audit.offer(left);
            Matrix right = Matrix::Zero(dim, dim);
            right.col(v) = b.col(u);
            audit.offer(right);
          }
      }
      audit.ok();
      clause.residual = audit.worst_residual();
      clause.witness = audit.witness();
    }
    clauses.push_back(std::move(clause));
  }
  {
    MembershipAudit audit(dk.space, /*stop_early=*/false);
    for (Eigen::Index i = 0; i < dk.space.dim(); ++i) {
      const Matrix bi = dk.space.basis_matrix(i);
      audit.offer(bi.adjoint());
      for (Eigen::Index jj = 0; jj < dk.space.dim(); ++jj)
        audit.offer(bi * dk.space.basis_matrix(jj));
    }
    const bool ok = audit.ok();
    ClauseResult clause{"dk_closed", ok, ok ? audit.max_residual() : audit.worst_residual(),
                        std::nullopt};
    if (!ok) clause.witness = audit.witness();
    clauses.push_back(std::move(clause));
  }

  VerificationReport report{
      true,
      std::move(clauses),
      l.dim(),
      j.dim(),
      kd.k_v.dim(),
      kd.k_l.dim(),
      kd.k_d.dim(),
      kd.k_delta.dim(),
      kd.k_total.dim(),
      dk.space.dim(),
      includes(kd.k_total, j),
      includes(kd.k_total, l),
  };
  for (const auto& clause : report.clauses)
    if (!clause.passed) report.all_passed = false;
  return report;
}

bool lie_ideal_refinement_check(const OperatorSubspace& l, const Nest& nest) {
  check_operator_size(l, nest, "lie_ideal_refinement_check");
  std::vector<std::pair<int, int>> upper_units;
  for (int i = 0; i < nest.dimension(); ++i)
    for (int j = 0; j < nest.dimension(); ++j)
      if (nest.atom_of(i) <= nest.atom_of(j)) upper_units.emplace_back(i, j);
  const OperatorSubspace algebra =
      OperatorSubspace::from_units(nest.dimension(), std::move(upper_units), l.tol());
  if (!includes(algebra, l))
    throw std::invalid_argument("lie_ideal_refinement_check: L is not inside T(N)");
  const KDecomposition kd = k_decompose(l, nest);
  const OperatorSubspace j = largest_bimodule(l, nest);
  return kd.k_l.dim() == 0 && kd.k_d.dim() == 0 && kd.k_delta.dim() == 0 &&
         includes(j, kd.k_total) && includes(l, j);
}

bool band_annihilation_check(const OperatorSubspace& l, const Nest& nest) {
  check_operator_size(l, nest, "band_annihilation_check");
  const KDecomposition kd = k_decompose(l, nest);
  const NestMap phi = phi_of(kd.k_total, nest);
  const double thr = std::max(l.tol(), kFloor);
  for (int k = 1; k <= nest.length(); ++k) {
    for (int q = phi(k) + 1; q < k; ++q) {
      const int row_lo = nest.boundary(phi(k));
      const int row_hi = nest.boundary(q);
      const int col_lo = row_hi;
      const int col_hi = nest.boundary(k);
      for (Eigen::Index c = 0; c < l.dim(); ++c) {
        const Matrix t = l.basis_matrix(c);
        if (t.block(row_lo, col_lo, row_hi - row_lo, col_hi - col_lo).norm() > thr)
          return false;
      }
    }
  }
  return true;
}

}  // namespace nestlie
