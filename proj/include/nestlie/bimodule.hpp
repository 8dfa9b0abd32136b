#pragma once

#include <utility>
#include <vector>

#include "nestlie/nest.hpp"
#include "nestlie/subspace.hpp"

namespace nestlie {

// The corner P_q B(H) (I - P_p): operators supported on rows < b_q and
// columns >= b_p.
struct CornerBlock {
  int q;
  int p;
};

// An order-preserving self-map of the nest, stored as the table
// phi(0), ..., phi(m) with phi(0) = 0 and phi nondecreasing.
class NestMap {
 public:
  NestMap(const Nest& nest, std::vector<int> table);
  int operator()(int k) const;
  const std::vector<int>& table() const { return table_; }
  int length() const { return static_cast<int>(table_.size()) - 1; }

 private:
  std::vector<int> table_;
};

// Exact unit-pattern span of the corner block.
OperatorSubspace corner_subspace(const Nest& nest, CornerBlock block);

// Whether every matrix unit of the corner lies in M (empty corners are
// trivially contained).
bool corner_contained(const OperatorSubspace& m, const Nest& nest, CornerBlock block);

// Whether the rank-one operator x (x) y generates a corner inside M:
// P_y B(H) (I - Phat_x) is contained in M.
bool in_c_of_m(const OperatorSubspace& m, const Nest& nest, const Vector& x,
               const Vector& y);

// The largest T(N)-bimodule contained in M: the span of the union of all
// corner blocks contained in M. Contains every bimodule contained in M.
OperatorSubspace largest_bimodule(const OperatorSubspace& m, const Nest& nest);

// The order homomorphism of M: phi(k) is the largest q such that some corner
// P_q B(H) (I - P_r) with r < k is contained in M; phi(0) = 0.
NestMap phi_of(const OperatorSubspace& m, const Nest& nest);

// The bimodule determined by a nest map: the span of the units E_{ij} with
// (j < b_k implies i < b_{phi(k)}) for every k.
OperatorSubspace bimodule_from_map(const Nest& nest, const NestMap& map);
// Same construction from a raw table, without the monotonicity requirement
// (the resulting pattern is still a bimodule).
OperatorSubspace bimodule_from_table(const Nest& nest, const std::vector<int>& table);

// Smallest bimodule containing M: closure under left/right multiplication by
// the nest-algebra matrix units.
OperatorSubspace bimodule_closure(const OperatorSubspace& m, const Nest& nest);

// One-round bimodule test: G b and b G stay in M for every basis element b
// and every algebra unit G. Equivalent to equal(bimodule_closure(M), M).
bool is_bimodule(const OperatorSubspace& m, const Nest& nest);

// For a bimodule V: (rank-one is in V, corner P_y B(H) (I - Phat_x) is in V).
// The two agree on every pair; exposed as a pair for the cross-check tests.
// Throws std::invalid_argument if V is not a bimodule.
std::pair<bool, bool> rank_one_membership_check(const OperatorSubspace& v,
                                                const Nest& nest, const Vector& x,
                                                const Vector& y);

}  // namespace nestlie
