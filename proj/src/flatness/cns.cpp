#include "flatcheck/errors.hpp"
#include "flatcheck/flatness/flatness.hpp"

namespace flatcheck {

std::vector<int> brunovsky_indices(const std::vector<int>& ranks, int m) {
  std::vector<int> rho;
  for (size_t k = 0; k < ranks.size(); ++k) rho.push_back(k == 0 ? ranks[0] : ranks[k] - ranks[k - 1]);
  std::vector<int> kappa;
  for (int i = 1; i <= m; ++i) {
    int c = 0;
    for (int r : rho) c += r >= i ? 1 : 0;
    kappa.push_back(c);
  }
  return kappa;
}

StaticResult static_linearizable(const SystemDef& sys, RankEngine& eng) {
  StaticResult out;
  ProlongedSystem ps(sys, MultiIndex::zeros(sys.m()));
  int full = sys.n() + sys.m();
  for (int k = 0; k <= sys.n(); ++k) {
    Distribution g = ps.G(k);
    auto ce = eng.involutivity_counterexample(g, ps.space());
    if (ce && out.all_involutive) {
      out.all_involutive = false;
      out.first_noninvolutive = k;
      out.witness = *ce;
    }
    int r = eng.rank(g, ps.space());
    if (!out.ranks.empty() && r == out.ranks.back()) break;
    out.ranks.push_back(r);
    if (r == full) break;
  }
  out.k_star = int(out.ranks.size()) - 1;
  out.kappa = brunovsky_indices(out.ranks, sys.m());
  out.linearizable = out.all_involutive && !out.ranks.empty() && out.ranks.back() == full;
  return out;
}

CnsResult cns_check(const SystemDef& sys, const MultiIndex& j, RankEngine& eng, int max_k) {
  CnsResult out;
  ProlongedSystem ps(sys, j);
  const JetSpace& sp = ps.space();
  int full = sp.dim();
  int limit = max_k > 0 ? max_k : sys.n() + int(j.total()) + 1;

  bool g_inv = true;
  for (int k = 0; k <= limit; ++k) {
    Distribution g = ps.G(k);
    int r = eng.rank(g, sp);
    if (!out.g_ranks.empty() && r == out.g_ranks.back()) break;
    out.g_ranks.push_back(r);
    g_inv = g_inv && eng.is_involutive(g, sp);
    if (r == full) break;
  }
  out.k_star = int(out.g_ranks.size()) - 1;
  out.kappa = brunovsky_indices(out.g_ranks, sys.m());
  out.g_route_ok = g_inv && out.g_ranks.back() == full;

  auto names = [&](const VectorField& a, const VectorField& b) {
    return "[" + to_string(a, sys.namer()) + ", " + to_string(b, sys.namer()) + "]";
  };
  for (int k = 0; k <= out.k_star; ++k) {
    Distribution delta = ps.Delta(k), gamma = ps.Gamma(k);
    auto sd = eng.span(delta, sp);
    out.delta_ranks.push_back(sd.rank());
    out.gamma_ranks.push_back(eng.rank(gamma, sp));
    if (out.violation) continue;
    auto ce = eng.involutivity_counterexample(delta, sp);
    if (ce) {
      out.violation = CnsViolation{"i", k, "Delta_" + std::to_string(k) + " not involutive: " +
                                               names(delta.gens[size_t(ce->first)], delta.gens[size_t(ce->second)])};
      continue;
    }
    for (const auto& a : gamma.gens) {
      for (const auto& b : delta.gens)
        if (!sd.contains(lie_bracket(a, b))) {
          out.violation = CnsViolation{"ii", k, "[Gamma_" + std::to_string(k) + ", Delta_" + std::to_string(k) +
                                                    "] not in Delta_" + std::to_string(k) + ": " + names(a, b)};
          break;
        }
      if (out.violation) break;
    }
  }
  if (!out.violation) {
    int rd = out.delta_ranks.back(), rg = out.gamma_ranks.back();
    if (rd != sys.n() + sys.m() || rg != int(j.total()))
      out.violation = CnsViolation{"iii", out.k_star,
                                   "rank Delta = " + std::to_string(rd) + ", rank Gamma = " + std::to_string(rg)};
  }
  out.ok = !out.violation;
  return out;
}

}  // namespace flatcheck
