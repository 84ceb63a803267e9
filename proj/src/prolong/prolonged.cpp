#include "flatcheck/prolong/prolonged.hpp"

#include "flatcheck/errors.hpp"

namespace flatcheck {

ProlongedSystem::ProlongedSystem(const SystemDef& sys, MultiIndex j)
    : sys_(&sys), j_(std::move(j)), space_(sys.n(), j_) {
  if (j_.size() != sys.m()) throw Error(ErrorKind::InvalidArgument, "prolongation length differs from m");
  for (int i = 0; i < sys.n(); ++i) g0_.set(VarRef::state(i), sys.drift[size_t(i)]);
  for (int i = 0; i < sys.m(); ++i)
    for (int k = 0; k < j_[i]; ++k) g0_.set(VarRef::input(i, k), Expr::var(VarRef::input(i, k + 1)));
  ad_g_.resize(size_t(sys.m()));
  ad_u0_.resize(size_t(sys.m()));
}

VectorField ProlongedSystem::ad_g(int i, int k) {
  auto& memo = ad_g_[size_t(i)];
  if (memo.empty()) memo.push_back(g(i));
  while (int(memo.size()) <= k) memo.push_back(ad(memo.back()));
  return memo[size_t(k)];
}

VectorField ProlongedSystem::ad_u0(int i, int k) {
  auto& memo = ad_u0_[size_t(i)];
  if (memo.empty()) memo.push_back(VectorField::coord(VarRef::input(i, 0)));
  while (int(memo.size()) <= k) memo.push_back(ad(memo.back()));
  return memo[size_t(k)];
}

Distribution ProlongedSystem::G(int k) {
  Distribution d;
  for (int l = 0; l <= k; ++l)
    for (int i = 0; i < m(); ++i) d.add(ad_g(i, l));
  return d;
}

Distribution ProlongedSystem::Gamma(int k) const {
  Distribution d;
  for (int p = 0; p < m(); ++p)
    for (int l = 0; l <= std::min(k, j_[p] - 1); ++l) d.add(VectorField::coord(VarRef::input(p, j_[p] - l)));
  return d;
}

Distribution ProlongedSystem::Delta(int k) {
  Distribution d;
  for (int p = 0; p < m(); ++p)
    for (int l = j_[p]; l <= k; ++l) d.add(ad_u0(p, l - j_[p]));
  return d;
}

DecompositionResult decomposition_check(ProlongedSystem& ps, int k, RankEngine& eng) {
  DecompositionResult r;
  Distribution g = ps.G(k), gamma = ps.Gamma(k), delta = ps.Delta(k);
  const JetSpace& sp = ps.space();
  r.rank_g = eng.rank(g, sp);
  r.rank_gamma = eng.rank(gamma, sp);
  r.rank_delta = eng.rank(delta, sp);
  Distribution sum = join(gamma, delta);
  auto ssum = eng.span(sum, sp);
  auto sg = eng.span(g, sp);
  bool direct = ssum.rank() == r.rank_gamma + r.rank_delta;
  bool same = ssum.rank() == r.rank_g;
  for (const auto& v : g.gens) same = same && ssum.contains(v);
  for (const auto& v : sum.gens) same = same && sg.contains(v);
  r.ok = direct && same;
  return r;
}

std::vector<Expr> gamma_sequence(ProlongedSystem& ps, int i, int k) {
  const SystemDef& sys = ps.system();
  int n = sys.n();
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "gamma index starts at 1");
  std::vector<Expr> gam(static_cast<size_t>(n));
  Expr sign = ((ps.j()[i] + 1) % 2 == 0) ? Expr(1) : Expr(-1);
  VarRef u = VarRef::input(i, 0);
  for (int r = 0; r < n; ++r) gam[size_t(r)] = sign * diff(sys.drift[size_t(r)], u);
  for (int step = 1; step < k; ++step) {
    std::vector<Expr> next(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) {
      Expr acc = ps.g0().apply(gam[size_t(r)]);
      for (int c = 0; c < n; ++c) {
        if (gam[size_t(c)].is_zero()) continue;
        Expr d = diff(sys.drift[size_t(r)], VarRef::state(c));
        if (!d.is_zero()) acc -= d * gam[size_t(c)];
      }
      next[size_t(r)] = acc;
    }
    gam = std::move(next);
  }
  return gam;
}

VectorField gamma_field(ProlongedSystem& ps, int i, int k) {
  auto g = gamma_sequence(ps, i, k);
  VectorField f;
  for (int r = 0; r < ps.n(); ++r) f.set(VarRef::state(r), g[size_t(r)]);
  return f;
}

BracketComparison bracket_comparison_check(const SystemDef& sys, const MultiIndex& j, int i, int nu,
                                           RankEngine& eng) {
  ProlongedSystem p0(sys, MultiIndex::zeros(sys.m()));
  int prev = -1;
  for (int k = 0; k <= sys.n(); ++k) {
    Distribution g = p0.G(k);
    if (!eng.is_involutive(g, p0.space()))
      throw Error(ErrorKind::PreconditionNotMet, "G_" + std::to_string(k) + " is not involutive");
    int r = eng.rank(g, p0.space());
    if (r == prev) break;
    prev = r;
  }

  ProlongedSystem pj(sys, j);
  BracketComparison out;
  out.identity_ok = true;
  for (int k = 0; k <= j[i]; ++k) {
    VectorField expect = VectorField::coord(VarRef::input(i, j[i] - k));
    if (k % 2) expect = -expect;
    out.identity_ok = out.identity_ok && pj.ad_g(i, k) == expect;
  }
  VectorField lhs = pj.ad_g(i, j[i] + nu);
  VectorField rhs = p0.ad_g(i, nu);
  if (j[i] % 2) rhs = -rhs;
  VectorField d = lhs - rhs;
  Distribution level = p0.G(j[i] + nu - 1);
  out.membership_ok = eng.contains(level, d, pj.space());
  return out;
}

}  // namespace flatcheck
