#pragma once

#include <vector>

#include "flatcheck/jetgeom/jet.hpp"
#include "flatcheck/jetgeom/rank.hpp"
#include "flatcheck/sysdsl/system.hpp"

namespace flatcheck {

// Prolonged system on X^(j):
//   g0 = f d/dx + sum_i sum_{k<j_i} u_i^(k+1) d/du_i^(k),  g_i = d/du_i^(j_i).
// Caches ad-powers; one instance per task.
class ProlongedSystem {
 public:
  ProlongedSystem(const SystemDef& sys, MultiIndex j);

  const SystemDef& system() const { return *sys_; }
  const MultiIndex& j() const { return j_; }
  const JetSpace& space() const { return space_; }
  int n() const { return sys_->n(); }
  int m() const { return sys_->m(); }

  const VectorField& g0() const { return g0_; }
  VectorField g(int i) const { return VectorField::coord(VarRef::input(i, j_[i])); }
  VectorField ad(const VectorField& v) const { return lie_bracket(g0_, v); }

  // ad_{g0}^k g_i and ad_{g0}^k d/du_i^(0), memoised.
  VectorField ad_g(int i, int k);
  VectorField ad_u0(int i, int k);

  // G_k = span{ad^l g_i : l <= k}
  Distribution G(int k);
  // Gamma_k = {d/du_p^(j_p - l) : l = 0..min(k, j_p - 1)}
  Distribution Gamma(int k) const;
  // Delta_k = {ad^(l - j_p) d/du_p^(0) : l = j_p..k}
  Distribution Delta(int k);

 private:
  const SystemDef* sys_;
  MultiIndex j_;
  JetSpace space_;
  VectorField g0_;
  std::vector<std::vector<VectorField>> ad_g_;
  std::vector<std::vector<VectorField>> ad_u0_;
};

struct DecompositionResult {
  bool ok = false;
  int rank_g = 0;
  int rank_gamma = 0;
  int rank_delta = 0;
};

// G_k = Gamma_k (+) Delta_k: equal spans and direct sum.
DecompositionResult decomposition_check(ProlongedSystem& ps, int k, RankEngine& eng);

// gamma_1 = (-1)^(j_i+1) df/du_i,  gamma_{k+1} = L_{g0} gamma_k - (df/dx) gamma_k.
std::vector<Expr> gamma_sequence(ProlongedSystem& ps, int i, int k);
VectorField gamma_field(ProlongedSystem& ps, int i, int k);

struct BracketComparison {
  bool identity_ok = false;    // ad^k g_i = (-1)^k d/du_i^(j_i - k), k <= j_i
  bool membership_ok = false;  // difference at order j_i + nu lies in G^(0)_{j_i + nu - 1}
};

// Requires every G_k^(0) to be involutive (PreconditionNotMet otherwise).
BracketComparison bracket_comparison_check(const SystemDef& sys, const MultiIndex& j, int i, int nu,
                                           RankEngine& eng);

}  // namespace flatcheck
