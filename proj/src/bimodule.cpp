#include "nestlie/bimodule.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace nestlie {

namespace {

std::vector<std::pair<int, int>> corner_units(const Nest& nest, CornerBlock block) {
  const int rows = nest.boundary(block.q);
  const int col0 = nest.boundary(block.p);
  std::vector<std::pair<int, int>> units;
  for (int i = 0; i < rows; ++i)
    for (int j = col0; j < nest.dimension(); ++j) units.emplace_back(i, j);
  return units;
}

void check_operator_size(const OperatorSubspace& m, const Nest& nest,
                         const char* where) {
  if (m.matrix_dim() != nest.dimension())
    throw std::invalid_argument(std::string(where) +
                                ": subspace and nest dimensions differ");
}

}  // namespace

NestMap::NestMap(const Nest& nest, std::vector<int> table) : table_(std::move(table)) {
  const int m = nest.length();
  if (int(table_.size()) != m + 1)
    throw std::invalid_argument("nest map: table must have length m+1");
  if (table_[0] != 0) throw std::invalid_argument("nest map: phi(0) must be 0");
  for (int k = 0; k <= m; ++k) {
    if (table_[std::size_t(k)] < 0 || table_[std::size_t(k)] > m)
      throw std::invalid_argument("nest map: value out of range");
    if (k > 0 && table_[std::size_t(k)] < table_[std::size_t(k - 1)])
      throw std::invalid_argument("nest map: table must be nondecreasing");
  }
}

int NestMap::operator()(int k) const {
  if (k < 0 || k >= int(table_.size()))
    throw std::out_of_range("nest map: index out of range");
  return table_[std::size_t(k)];
}

OperatorSubspace corner_subspace(const Nest& nest, CornerBlock block) {
  nest.boundary(block.q);
  nest.boundary(block.p);
  return OperatorSubspace::from_units(nest.dimension(), corner_units(nest, block));
}

bool corner_contained(const OperatorSubspace& m, const Nest& nest, CornerBlock block) {
  check_operator_size(m, nest, "corner_contained");
  const int n = nest.dimension();
  for (auto [i, j] : corner_units(nest, block))
    if (!contains(m, matrix_unit(n, i, j))) return false;
  return true;
}

bool in_c_of_m(const OperatorSubspace& m, const Nest& nest, const Vector& x,
               const Vector& y) {
  check_operator_size(m, nest, "in_c_of_m");
  const auto profile = rank_one_profile(nest, x, y);
  return corner_contained(m, nest, {profile.p_y, profile.phat_x});
}

OperatorSubspace largest_bimodule(const OperatorSubspace& m, const Nest& nest) {
  check_operator_size(m, nest, "largest_bimodule");
  const int n = nest.dimension();
  const int len = nest.length();
  std::vector<bool> mask(std::size_t(n) * n, false);
  for (int q = 0; q <= len; ++q)
    for (int p = 0; p <= len; ++p)
      if (corner_contained(m, nest, {q, p}))
        for (auto [i, j] : corner_units(nest, {q, p}))
          mask[std::size_t(j) * n + i] = true;
  std::vector<std::pair<int, int>> units;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (mask[std::size_t(j) * n + i]) units.emplace_back(i, j);
  return OperatorSubspace::from_units(n, std::move(units), m.tol());
}

NestMap phi_of(const OperatorSubspace& m, const Nest& nest) {
  check_operator_size(m, nest, "phi_of");
  const int len = nest.length();
  std::vector<int> table(std::size_t(len) + 1, 0);
  for (int k = 1; k <= len; ++k) {
    int best = 0;
    for (int r = 0; r < k; ++r)
      for (int q = len; q > best; --q)
        if (corner_contained(m, nest, {q, r})) {
          best = q;
          break;
        }
    table[std::size_t(k)] = best;
  }
  return NestMap(nest, std::move(table));
}

OperatorSubspace bimodule_from_table(const Nest& nest, const std::vector<int>& table) {
  const int len = nest.length();
  if (int(table.size()) != len + 1)
    throw std::invalid_argument("bimodule_from_table: table must have length m+1");
  for (int v : table)
    if (v < 0 || v > len)
      throw std::invalid_argument("bimodule_from_table: value out of range");
  if (table[0] != 0)
    throw std::invalid_argument("bimodule_from_table: phi(0) must be 0");
  const int n = nest.dimension();
  std::vector<std::pair<int, int>> units;
  for (int j = 0; j < n; ++j) {
    // Row cap for column j: min over k with j < b_k of b_{phi(k)}.
    int cap = n;
    for (int k = 0; k <= len; ++k)
      if (j < nest.boundary(k))
        cap = std::min(cap, nest.boundary(table[std::size_t(k)]));
    for (int i = 0; i < cap; ++i) units.emplace_back(i, j);
  }
  return OperatorSubspace::from_units(n, std::move(units));
}

OperatorSubspace bimodule_from_map(const Nest& nest, const NestMap& map) {
  if (map.length() != nest.length())
    throw std::invalid_argument("bimodule_from_map: map length does not match the nest");
  return bimodule_from_table(nest, map.table());
}

OperatorSubspace bimodule_closure(const OperatorSubspace& m, const Nest& nest) {
  check_operator_size(m, nest, "bimodule_closure");
  const int n = nest.dimension();
  std::vector<MatrixMap> maps;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (nest.atom_of(u) > nest.atom_of(v)) continue;
      maps.push_back([n, u, v](const Matrix& t) {
        Matrix img = Matrix::Zero(n, n);
        img.row(u) = t.row(v);  // E_uv T
        return img;
      });
      maps.push_back([n, u, v](const Matrix& t) {
        Matrix img = Matrix::Zero(n, n);
        img.col(v) = t.col(u);  // T E_uv
        return img;
      });
    }
  return close_under(m, maps);
}

bool is_bimodule(const OperatorSubspace& m, const Nest& nest) {
  check_operator_size(m, nest, "is_bimodule");
  const int n = nest.dimension();
  if (m.dim() == Eigen::Index(n) * n) return true;
  const Eigen::Index chunk = 1024;
  Eigen::MatrixXcd images(Eigen::Index(n) * n, chunk);
  Eigen::Index filled = 0;
  auto flush_ok = [&]() {
    if (filled == 0) return true;
    const auto block = images.leftCols(filled);
    const Eigen::VectorXd resid = residual_norms(m, block);
    const Eigen::VectorXd norms = block.colwise().norm();
    filled = 0;
    return (resid.array() <=
            m.membership_tol() * norms.array().max(1.0))
        .all();
  };
  for (Eigen::Index c = 0; c < m.dim(); ++c) {
    const Matrix b = m.basis_matrix(c);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (nest.atom_of(u) > nest.atom_of(v)) continue;
        Matrix left = Matrix::Zero(n, n);
        left.row(u) = b.row(v);
        images.col(filled++) = vectorize(left);
        if (filled == chunk && !flush_ok()) return false;
        Matrix right = Matrix::Zero(n, n);
        right.col(v) = b.col(u);
        images.col(filled++) = vectorize(right);
        if (filled == chunk && !flush_ok()) return false;
      }
  }
  return flush_ok();
}

std::pair<bool, bool> rank_one_membership_check(const OperatorSubspace& v,
                                                const Nest& nest, const Vector& x,
                                                const Vector& y) {
  check_operator_size(v, nest, "rank_one_membership_check");
  if (!is_bimodule(v, nest))
    throw std::invalid_argument("rank_one_membership_check: subspace is not a bimodule");
  const bool direct = contains(v, rank_one(x, y));
  const bool corner = in_c_of_m(v, nest, x, y);
  return {direct, corner};
}

}  // namespace nestlie
