#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nestlie/bimodule.hpp"
#include "nestlie/nest.hpp"
#include "nestlie/subspace.hpp"

namespace nestlie {

// Smallest subspace containing the seed and closed under commutators with
// T(N): fixpoint of T -> [T, G] over the algebra matrix units G.
OperatorSubspace lie_closure(const OperatorSubspace& seed, const Nest& nest);

// One-round check that L is already commutator-closed. Equivalent to
// equal(lie_closure(L), L).
bool is_lie_closed(const OperatorSubspace& l, const Nest& nest);

// For every nest projection P, the compressions P L P-perp and P-perp L P
// stay inside L (they do for any commutator-closed L; the compressions are
// iterated-bracket polynomials).
bool corner_compress_check(const OperatorSubspace& l, const Nest& nest);

enum class Dichotomy { lower_zero, upper_full, violation };

// For 0 < k < m: either the lower compression P-perp L P vanishes, or the
// upper compression P L P-perp is the full corner. k = 0 or k = m is
// vacuously lower_zero. violation signals a numerical-rank failure, not a
// mathematical outcome.
Dichotomy dichotomy_check(const OperatorSubspace& l, const Nest& nest, int k);

struct KDecomposition {
  OperatorSubspace k_v;      // span of P T P-perp
  OperatorSubspace k_l;      // span of P-perp T P
  OperatorSubspace k_d;      // span of P S P-perp T P,  S in T(N)
  OperatorSubspace k_delta;  // span of P-perp T P S P-perp, S in T(N)
  OperatorSubspace k_total;  // sum of the four parts
};

// The bimodule K(L) generated by the off-diagonal compressions of L over the
// strict nest projections. Requires L commutator-closed.
KDecomposition k_decompose(const OperatorSubspace& l, const Nest& nest);

// A diagonal band [b_{phi(k)}, b_k) on which members of the constraint
// algebra act as a scalar; recorded whenever phi(k) < predecessor(k).
struct DiagonalBand {
  int k;
  int lo;
  int hi;
};

struct DiagonalConstraintAlgebra {
  OperatorSubspace space;
  std::vector<DiagonalBand> bands;
};

// D_K: block-diagonal operators T with T (P - phi(P)) = lambda (P - phi(P))
// for every nest projection P whose phi-image falls strictly below its
// predecessor. Encoded as a homogeneous linear system over the diagonal-block
// entries plus one scalar per band; solved by nullspace extraction. Requires
// K to be a bimodule.
DiagonalConstraintAlgebra diagonal_algebra(const OperatorSubspace& k, const Nest& nest);

struct CommutatorWitness {
  bool ok;
  Matrix k_elem;   // offending basis element of K (when !ok)
  Matrix g_elem;   // offending algebra unit (when !ok)
  double residual;
};

// [B, G] lies in L for every basis element B of K and algebra unit G.
CommutatorWitness commutator_into(const OperatorSubspace& k, const Nest& nest,
                                  const OperatorSubspace& l);

struct ClauseResult {
  std::string name;
  bool passed;
  double residual;                 // worst membership residual observed
  std::optional<Matrix> witness;   // offending operator when !passed
};

struct VerificationReport {
  bool all_passed;
  std::vector<ClauseResult> clauses;
  Eigen::Index dim_l, dim_j;
  Eigen::Index dim_k_v, dim_k_l, dim_k_d, dim_k_delta, dim_k;
  Eigen::Index dim_dk;
  bool j_included_in_k;  // informational; false in general
  bool l_included_in_k;
};

// Full pipeline over a seed: L = lie_closure(span(seed)), J = largest
// bimodule in L, K = k_decompose, D_K = diagonal_algebra(K). Clauses:
//   j_subseteq_l          J is contained in L
//   l_subseteq_k_plus_dk  L is contained in K + D_K
//   commutator_in_l       [K, T(N)] stays in L
//   kv_subseteq_j         the upper compression part lies in J
//   k_is_bimodule         K is a T(N)-bimodule
//   dk_closed             D_K is closed under products and adjoints
// Failures are reported with witnesses, never thrown.
VerificationReport verify_structure_theorem(const std::vector<Matrix>& seed,
                                            const Nest& nest, double tol = 0.0);

// For L inside T(N) (a Lie ideal): K(L) reduces to its upper part and
// K(L) is contained in J(L) which is contained in L.
bool lie_ideal_refinement_check(const OperatorSubspace& l, const Nest& nest);

// For every k with phi(k) < k and every q strictly between phi(k) and k, the
// band (P_q - P_phi(k)) T (P_k - P_q) vanishes on L, where phi is the order
// homomorphism of K(L).
bool band_annihilation_check(const OperatorSubspace& l, const Nest& nest);

}  // namespace nestlie
