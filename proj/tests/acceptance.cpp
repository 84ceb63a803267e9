#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "flatcheck/errors.hpp"
#include "flatcheck/flatness/flatness.hpp"
#include "oracle.hpp"
#include "run.hpp"
#include "support.hpp"

using namespace flatcheck;

namespace {

// Collects failed checks of one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int failed = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<void(Check&)>& body) {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    std::ostringstream os;
    os << "took " << secs << " s, limit " << limit_s << " s";
    c.failures.push_back(os.str());
  }
  bool ok = c.failures.empty();
  if (!ok) ++failed;
  std::printf("%s %d %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), secs);
  for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
}

SystemDef fx(const std::string& name) { return load_system(test::fixture(name + ".flt")); }

std::set<std::string> strings(const SystemDef& s, const std::vector<Expr>& ys) {
  std::set<std::string> out;
  for (const auto& y : ys) out.insert(s.str(y));
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void expect_report(Check& c, const AnalysisReport& r, const MultiIndex& j, int k_star, std::vector<int> kappa) {
  c.expect(r.verdict == Verdict::P2Flat, std::string("verdict ") + verdict_name(r.verdict));
  c.expect(r.j_min == j, "j_min " + r.j_min.str());
  if (k_star >= 0) c.expect(r.k_star == k_star, "k_star " + std::to_string(r.k_star));
  c.expect(r.kappa == kappa, "kappa mismatch");
}

// Every boxed prolongation of the non-kept channels leaves Delta_2 non-involutive.
void expect_delta2_fails(Check& c, const SystemDef& s, int kept, RankEngine& eng) {
  for (auto v : {StartVariant::Standard, StartVariant::Eager}) {
    SigmaSearch search(s, Initialization{{kept}, v}, eng, 2 * s.n());
    for (const auto& l : search.box(2))
      c.expect(!search.delta_involutive(l, 2), "Delta_2 involutive at l = " + l.str());
  }
}

}  // namespace

int main() {
  criterion(1, "chained system", 60, [](Check& c) {
    SystemDef s = fx("chained");
    AnalysisReport r = analyze(s);
    expect_report(c, r, MultiIndex({4, 0}), 7, {8, 4});
    RankEngine eng;
    c.expect(verify_flat_output(s, MultiIndex({4, 0}), s.flat_outputs, eng).ok, "published flat output rejected");
    c.expect(contains(r.singular_locus, "u1''"), "u1'' missing from the singular locus");
  });

  criterion(2, "driftless bilinear system", 30, [](Check& c) {
    SystemDef s = fx("driftless");
    AnalysisReport r = analyze(s);
    expect_report(c, r, MultiIndex({2, 0}), -1, {4, 4});
    RankEngine eng;
    ProlongedSystem ps(s, MultiIndex({2, 0}));
    c.expect(ps.space().dim() == 8 && eng.rank(ps.G(3), ps.space()) == 8, "G_3 is not the full tangent space");
    c.expect(verify_flat_output(s, MultiIndex({2, 0}), s.flat_outputs, eng).ok, "(x1, x2) rejected");
    expect_delta2_fails(c, s, 0, eng);
  });

  criterion(3, "CLM example", 60, [](Check& c) {
    SystemDef s = fx("clm");
    AnalysisReport r = analyze(s);
    expect_report(c, r, MultiIndex({0, 3}), 4, {5, 4});
    c.expect(strings(s, r.flat_outputs) == strings(s, s.flat_outputs), "ansatz search missed (x4, x1 - u2*x2)");
    for (const char* e : {"u2", "u2' - 1"}) {
      std::string f = s.str(parse_expr(e, s));
      c.expect(!contains(r.singular_locus, f), f + " reported as singular");
    }
  });

  criterion(4, "pendulum", 60, [](Check& c) {
    SystemDef s = fx("pendulum");
    AnalysisReport r = analyze(s);
    c.expect(r.verdict == Verdict::NotP2Flat, std::string("verdict ") + verdict_name(r.verdict));
    c.expect(!r.traces.empty(), "no initializations");
    for (const auto& t : r.traces) {
      c.expect(t.outcome == "failed", t.init.str(s) + " outcome " + t.outcome);
      c.expect(t.certificate.find("Delta_2") != std::string::npos, t.init.str(s) + " certificate: " + t.certificate);
    }
    RankEngine eng;
    for (int kept = 0; kept < 2; ++kept) expect_delta2_fails(c, s, kept, eng);
  });

  criterion(5, "3-input example", 60, [](Check& c) {
    SystemDef s = fx("three_input");
    AnalysisReport r = analyze(s);
    expect_report(c, r, MultiIndex({1, 0, 0}), -1, r.kappa);
    c.expect(strings(s, r.flat_outputs) == std::set<std::string>{"x1", "x2", "x4"}, "flat outputs differ");
    RankEngine eng;
    c.expect(verify_flat_output(s, r.j_min, s.flat_outputs, eng).ok, "(x1, x4, x2) rejected");
  });

  criterion(6, "bound audits", 300, [](Check& c) {
    for (const char* f : {"chained", "driftless", "clm", "three_input", "linear_chain"}) {
      SystemDef s = fx(f);
      AnalysisReport r = analyze(s);
      if (r.verdict != Verdict::P2Flat) {
        c.expect(false, std::string(f) + " not flat");
        continue;
      }
      int n = s.n(), m = s.m(), jt = int(r.j_min.total());
      c.expect(r.k_star <= n + jt, std::string(f) + ": k_star above n + |j|");
      RankEngine eng;
      ProlongedSystem ps(s, r.j_min);
      if (eng.rank(ps.Delta(r.k_star), ps.space()) == n + m) {
        int jmax = *std::max_element(r.j_min.v.begin(), r.j_min.v.end());
        c.expect(r.k_star >= jmax, std::string(f) + ": k_star below max j");
        c.expect(r.k_star * m >= n + jt, std::string(f) + ": k_star below (n + |j|) / m");
      }
      int sum = 0;
      for (int k : r.kappa) sum += k;
      c.expect(sum == n + m + jt, std::string(f) + ": kappa sum");
      c.expect(r.kappa[0] == r.k_star + 1, std::string(f) + ": kappa_1 != k_star + 1");
    }
  });

  criterion(7, "property suites", 300, [](Check& c) {
    test::Gen gen(7);
    RankEngine eng;
    for (int t = 0; t < 200; ++t) {
      JetSpace sp(gen.uniform(1, 4), gen.index(gen.uniform(1, 3), 2));
      VectorField a = gen.field(sp, 2, 2, 2), b = gen.field(sp, 2, 2, 2), d = gen.field(sp, 2, 2, 2);
      c.expect(lie_bracket(a, b) == -lie_bracket(b, a), "antisymmetry case " + std::to_string(t));
      VectorField jac = lie_bracket(a, lie_bracket(b, d)) + lie_bracket(b, lie_bracket(d, a)) +
                        lie_bracket(d, lie_bracket(a, b));
      c.expect(jac.is_zero(), "Jacobi case " + std::to_string(t));
    }
    for (int t = 0; t < 200; ++t) {
      int n = gen.uniform(1, 4), m = gen.uniform(1, std::min(n, 3));
      SystemDef s = gen.system(n, m);
      MultiIndex j = gen.index(m, 3);
      ProlongedSystem ps(s, j);
      std::string tag = " case " + std::to_string(t);
      for (int i = 0; i < m; ++i) {
        for (int k = 0; k <= j[i]; ++k) {
          VectorField e = VectorField::coord(VarRef::input(i, j[i] - k));
          c.expect(ps.ad_g(i, k) == (k % 2 ? -e : e), "coordinate identity" + tag);
        }
        for (int k = 1; k <= 3; ++k) {
          VectorField lhs = ps.ad_g(i, j[i] + k), rhs = ps.ad_u0(i, k);
          c.expect(lhs == (j[i] % 2 ? -rhs : rhs), "vertical identity" + tag);
          c.expect(is_vertical(lhs, cmin(j, MultiIndex(std::vector<int>(size_t(m), k - 1)))), "verticality" + tag);
          VectorField gamma = gamma_field(ps, i, k);
          c.expect(gamma == lhs, "gamma recursion" + tag);
        }
      }
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          for (int k = 0; k < j[p]; ++k)
            for (int r = 0; k + r + j[q] < j[p] + j[q] + 1; ++r)
              c.expect(lie_bracket(VectorField::coord(VarRef::input(p, j[p] - k)), ps.ad_u0(q, r)).is_zero(),
                       "vanishing bracket" + tag);
      for (int k = 0; k <= n + int(j.total()); ++k)
        c.expect(decomposition_check(ps, k, eng).ok, "decomposition" + tag + " k " + std::to_string(k));
    }
  });

  criterion(8, "oracle equivalence", 300, [](Check& c) {
    RankEngine eng;
    int matrices = 0;
    for (const char* f : {"chained", "driftless", "clm", "pendulum", "three_input", "linear_chain", "uncontrollable"}) {
      SystemDef s = fx(f);
      AnalysisReport r = analyze(s);
      std::vector<MultiIndex> js{MultiIndex::zeros(s.m())};
      if (r.verdict == Verdict::P2Flat) js.push_back(r.j_min);
      for (const auto& j : js) {
        ProlongedSystem ps(s, j);
        if (ps.space().dim() > 12) continue;
        for (int k = 0; k <= ps.space().dim(); ++k) {
          for (const Distribution& d : {ps.G(k), ps.Delta(k), ps.Gamma(k)}) {
            int sampled = eng.rank(d, ps.space());
            int symbolic = symbolic_rank(d.gens, ps.space()).rank;
            ++matrices;
            c.expect(sampled == symbolic, std::string(f) + " j " + j.str() + " k " + std::to_string(k));
          }
        }
      }
    }
    c.expect(matrices > 0, "no matrices compared");
    test::Gen gen(8);
    for (int t = 0; t < 100; ++t) {
      JetSpace sp(gen.uniform(1, 4), gen.index(gen.uniform(1, 3), 2));
      VectorField v = gen.field(sp, gen.uniform(1, 4), 3, 3), w = gen.field(sp, gen.uniform(1, 4), 3, 3);
      c.expect(lie_bracket(v, w) == test::oracle_bracket(v, w, sp), "bracket oracle case " + std::to_string(t));
    }
  });

  criterion(9, "deterministic JSON", 300, [](Check& c) {
    for (const char* f : {"chained", "driftless", "clm", "pendulum", "three_input", "linear_chain", "uncontrollable"}) {
      std::string args = "analyze \"" + test::fixture(std::string(f) + ".flt") + "\" --json --seed 1";
      auto a = test::run_cli(args), b = test::run_cli(args);
      c.expect(!a.out.empty() && a.out == b.out, std::string(f) + " output differs between runs");
    }
  });

  return failed ? 1 : 0;
}
