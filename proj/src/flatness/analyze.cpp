#include <algorithm>
#include <chrono>
#include <numeric>

#include "flatcheck/errors.hpp"
#include "flatcheck/flatness/flatness.hpp"

namespace flatcheck {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::P2Flat: return "p2_flat";
    case Verdict::NotP2Flat: return "not_p2_flat";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<int> sorted_components(const MultiIndex& j) {
  std::vector<int> s = j.v;
  std::sort(s.begin(), s.end());
  return s;
}

// |j|, then the sorted vector, then j itself.
bool better(const MultiIndex& a, const MultiIndex& b) {
  if (a.total() != b.total()) return a.total() < b.total();
  auto sa = sorted_components(a), sb = sorted_components(b);
  if (sa != sb) return sa < sb;
  return a.v < b.v;
}

struct InitOutcome {
  InitTrace trace;
  bool budget = false;
};

// Prolongations j >= start on the prolonged channels, components <= cap, by |j| then lex.
std::vector<MultiIndex> upward_candidates(const MultiIndex& start, const std::vector<int>& channels, int cap,
                                          size_t limit) {
  std::vector<MultiIndex> all;
  MultiIndex cur = start;
  while (all.size() < limit * 4) {
    all.push_back(cur);
    int pos = int(channels.size()) - 1;
    while (pos >= 0) {
      int q = channels[size_t(pos)];
      if (cur[q] < cap) {
        ++cur[q];
        break;
      }
      cur[q] = start[q];
      --pos;
    }
    if (pos < 0) break;
  }
  std::stable_sort(all.begin(), all.end(), better);
  if (all.size() > limit) all.resize(limit);
  return all;
}

InitOutcome run_initialization(const SystemDef& sys, const Initialization& init, RankEngine& eng, int max_prolong,
                               int max_k, std::vector<std::string>& warnings) {
  InitOutcome out;
  out.trace.init = init;
  SigmaSearch search(sys, init, eng, max_prolong);
  std::vector<int> channels;
  for (int i = 0; i < sys.m(); ++i)
    if (std::find(init.kept.begin(), init.kept.end(), i) == init.kept.end()) channels.push_back(i);

  MultiIndex J = MultiIndex::zeros(sys.m());
  for (int q : channels) J[q] = search.lower_bound();
  int prev_rank = -1;
  bool converged = false;
  for (int k = 1; k <= max_k; ++k) {
    SigmaValue sd = search.sigma_delta(k);
    SigmaValue sg = search.sigma_gamma_delta(k);
    SigmaStep step;
    step.k = k;
    step.sigma_delta = sd.shown;
    step.sigma_gamma_delta = sg.shown;
    for (const auto& l : search.box(k))
      if (search.delta_involutive(l, k) && search.gamma_delta_ok(l, k)) {
        step.witness_l = l;
        break;
      }
    out.trace.steps.push_back(step);
    if (sd.empty) {
      MultiIndex top = search.box(k).back();
      out.trace.outcome = "failed";
      out.trace.certificate = "Delta_" + std::to_string(k) + " is not involutive for any l in the box (l_q in [" +
                              std::to_string(search.lower_bound()) + ", " + std::to_string(search.box_limit(k)) +
                              "]); e.g. l = " + top.str() + ": " + search.delta_witness(top, k);
      return out;
    }
    if (sg.empty) {
      out.trace.outcome = "failed";
      out.trace.certificate = "[Gamma_" + std::to_string(k) + ", Delta_" + std::to_string(k) +
                              "] is not contained in Delta_" + std::to_string(k) + " for any l in the box";
      return out;
    }
    MultiIndex next = cmax(J, cmax(sd.effective, sg.effective));
    bool changed = next != J;
    J = next;
    for (int q : channels)
      if (J[q] > max_prolong) {
        out.trace.outcome = "budget";
        out.trace.certificate = "required prolongation " + J.str() + " exceeds max_prolong";
        out.budget = true;
        return out;
      }
    ProlongedSystem& ps = search.prolonged(J);
    if (changed) prev_rank = eng.rank(ps.G(k - 1), ps.space());
    int r = eng.rank(ps.G(k), ps.space());
    if (!changed && r == prev_rank) {
      converged = true;
      break;
    }
    prev_rank = r;
    if (k > sys.n() + int(J.total()) + 1) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    out.trace.outcome = "budget";
    out.trace.certificate = "k budget exhausted before the filtrations stabilised";
    out.budget = true;
    return out;
  }

  CnsResult c = cns_check(sys, J, eng);
  if (c.ok) {
    out.trace.outcome = "success";
    out.trace.j = J;
    return out;
  }
  if (c.violation && c.violation->condition == "iii") {
    out.trace.outcome = "failed";
    out.trace.certificate = "filtration stabilises below full rank: " + c.violation->detail;
    return out;
  }
  warnings.push_back(init.str(sys) + ": componentwise minimum " + J.str() +
                     " does not satisfy the conditions; searching upward");
  for (const auto& cand : upward_candidates(J, channels, max_prolong, 256)) {
    if (cand == J) continue;
    if (cns_check(sys, cand, eng).ok) {
      out.trace.outcome = "success";
      out.trace.j = cand;
      return out;
    }
  }
  out.trace.outcome = "failed";
  out.trace.certificate = "no prolongation above " + J.str() + " within the box satisfies the conditions";
  return out;
}

}  // namespace

namespace {

// Exact rank of d at the point given by atoms; -1 when a denominator vanishes.
int rank_at(const Distribution& d, const JetSpace& sp, const AtomFn& atoms) {
  std::vector<std::vector<Rational>> rows;
  try {
    for (const auto& v : d.gens) {
      std::vector<Rational> row(size_t(sp.dim()), Rational(0));
      for (const auto& [c, e] : v.components()) row[size_t(sp.index_of(c))] = eval_at(e, atoms);
      rows.push_back(std::move(row));
    }
  } catch (const Error&) {
    return -1;
  }
  return exact_rank(std::move(rows), sp.dim());
}

// A variable in which f is linear and which appears in no trig atom.
std::optional<VarRef> linear_var(const Poly& f) {
  for (const auto& v : f.vars()) {
    if (v.is_trig() || f.has_var(v.sin()) || f.has_var(v.cos())) continue;
    if (f.degree_in(v) == 1) return v;
  }
  return std::nullopt;
}

// Rank of some level drops at a sampled point where f = 0. Factors that cannot be
// solved for a linear variable are kept.
bool drops_rank(const Poly& f, ProlongedSystem& ps, int k_star, RankEngine& eng) {
  auto v = linear_var(f);
  if (!v) return true;
  auto c = coeffs_in(f, *v);
  Sampler& smp = eng.sampler();
  for (int s = 0; s < eng.options().samples; ++s) {
    AtomFn base = smp.atoms(s, 0);
    Rational a = eval_poly(c[1], base), b = eval_poly(c[0], base);
    if (sgn(a) == 0) continue;
    Rational root = -b / a;
    AtomFn on = [&](const VarRef& x) { return x == *v ? root : base(x); };
    bool valid = true, drop = false;
    for (int k = 0; k <= k_star && valid; ++k) {
      Distribution g = ps.G(k);
      int generic = rank_at(g, ps.space(), base);
      int at = rank_at(g, ps.space(), on);
      if (generic < 0 || at < 0) valid = false;
      else if (at < generic) drop = true;
    }
    if (valid) return drop;
  }
  return true;
}

}  // namespace

std::vector<Poly> singular_factors(const SystemDef& sys, const MultiIndex& j, int k_star, RankEngine& eng) {
  ProlongedSystem ps(sys, j);
  std::vector<Poly> out;
  for (int k = 0; k <= k_star; ++k) {
    SymbolicRank sr = symbolic_rank(ps.G(k).gens, ps.space());
    for (const auto& p : sr.pivots)
      for (const auto& f : split_factors(p)) {
        bool param_only = true;
        for (const auto& v : f.vars()) param_only = param_only && v.kind == VarKind::Param;
        if (param_only) continue;
        if (std::find(out.begin(), out.end(), f) != out.end()) continue;
        if (drops_rank(f, ps, k_star, eng)) out.push_back(f);
      }
  }
  return out;
}

AnalysisReport analyze(const SystemDef& sys, const AnalysisOptions& opts) {
  validate(sys);
  AnalysisReport rep;
  rep.seed = opts.seed;
  rep.timings = opts.timings;
  RankOptions ro;
  ro.seed = opts.seed;
  ro.samples = opts.samples;
  RankEngine eng(ro);
  int n = sys.n(), m = sys.m();
  int max_prolong = opts.max_prolong > 0 ? opts.max_prolong : 2 * n;
  int max_k = opts.max_k > 0 ? opts.max_k : n + m * max_prolong + 2;

  auto finish_flat = [&](const MultiIndex& j) {
    auto t0 = Clock::now();
    CnsResult c = cns_check(sys, j, eng);
    rep.verdict = Verdict::P2Flat;
    rep.j_min = j;
    rep.k_star = c.k_star;
    rep.kappa = c.kappa;
    std::vector<int> perm(static_cast<size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return j[a] < j[b]; });
    for (int p : perm) rep.input_permutation.push_back(p + 1);
    if (!c.g_route_ok) rep.warnings.push_back("G-filtration cross-check disagrees with the Gamma/Delta conditions");
    rep.timings_ms["verify"] = ms_since(t0);

    t0 = Clock::now();
    auto factors = singular_factors(sys, j, c.k_star, eng);
    auto base = sys.base_point(*std::max_element(j.v.begin(), j.v.end()));
    AtomFn atoms = half_angle_atoms(base);
    for (const auto& f : factors) {
      rep.singular_locus.push_back(to_string(f, sys.namer()));
      try {
        if (sgn(eval_poly(f, atoms)) == 0)
          rep.warnings.push_back("base point lies on the singular factor " + to_string(f, sys.namer()));
      } catch (const Error&) {
      }
    }
    std::sort(rep.singular_locus.begin(), rep.singular_locus.end());
    rep.timings_ms["singular_locus"] = ms_since(t0);

    if (opts.search_outputs) {
      t0 = Clock::now();
      auto ys = search_flat_outputs(sys, j, opts.ansatz_degree, eng);
      if (ys) rep.flat_outputs = *ys;
      else rep.warnings.push_back("no flat output found with ansatz degree " + std::to_string(opts.ansatz_degree));
      rep.timings_ms["flat_outputs"] = ms_since(t0);
    }
  };

  auto t0 = Clock::now();
  StaticResult st = static_linearizable(sys, eng);
  rep.timings_ms["static"] = ms_since(t0);
  if (st.linearizable) {
    rep.reason = "static feedback linearizable";
    finish_flat(MultiIndex::zeros(m));
    return rep;
  }
  if (m == 1) {
    rep.verdict = Verdict::NotP2Flat;
    rep.reason = "single input system that is not static feedback linearizable";
    return rep;
  }
  if (st.all_involutive) {
    rep.verdict = Verdict::NotP2Flat;
    rep.reason = "every G_k involutive but rank stops at " + std::to_string(st.ranks.back()) + " < " +
                 std::to_string(n + m) + ": no prolongation is strongly controllable";
    return rep;
  }

  t0 = Clock::now();
  auto inits = initializations(sys, eng);
  std::optional<MultiIndex> best;
  bool any_budget = false;
  for (const auto& init : inits) {
    InitOutcome o = run_initialization(sys, init, eng, max_prolong, max_k, rep.warnings);
    any_budget = any_budget || o.budget;
    if (o.trace.j && (!best || better(*o.trace.j, *best))) best = o.trace.j;
    rep.traces.push_back(std::move(o.trace));
  }
  rep.timings_ms["search"] = ms_since(t0);

  if (best) {
    rep.reason = "pure prolongation " + best->str() + " satisfies the necessary and sufficient conditions";
    finish_flat(*best);
    return rep;
  }
  if (inits.empty()) {
    rep.verdict = Verdict::NotP2Flat;
    rep.reason = "no initialization with an involutive H_1";
    return rep;
  }
  if (any_budget) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "search budget exhausted for at least one initialization";
    return rep;
  }
  rep.verdict = Verdict::NotP2Flat;
  rep.reason = "every initialization fails with a certificate";
  return rep;
}

}  // namespace flatcheck
