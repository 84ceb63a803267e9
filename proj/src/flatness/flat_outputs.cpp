#include <algorithm>
#include <numeric>

#include "flatcheck/errors.hpp"
#include "flatcheck/flatness/flatness.hpp"

namespace flatcheck {

namespace {

// Gradient of y over the coordinates of the space, as a field (only its rank matters).
VectorField gradient(const Expr& y, const JetSpace& sp) {
  VectorField f;
  for (const auto& c : sp.coords()) f.set(c, diff(y, c));
  return f;
}

bool lives_on(const Expr& y, const JetSpace& sp) {
  for (const auto& v : y.vars()) {
    VarRef b = v.base();
    if (b.kind == VarKind::Param) continue;
    if (!sp.contains(b)) return false;
  }
  return true;
}

// Derivatives y, L_g0 y, ..., L_g0^(count-1) y.
std::vector<Expr> derivatives(const Expr& y, const VectorField& g0, int count) {
  std::vector<Expr> out;
  Expr cur = y;
  for (int r = 0; r < count; ++r) {
    out.push_back(cur);
    if (r + 1 < count) cur = g0.apply(cur);
  }
  return out;
}

// L_g y = 0 for g in G_{kappa-2}, and L_g y != 0 for some g in G_{kappa-1}.
bool relative_degree_ok(ProlongedSystem& ps, const Expr& y, int kappa) {
  for (int k = 0; k <= kappa - 2; ++k)
    for (int i = 0; i < ps.m(); ++i)
      if (!ps.ad_g(i, k).apply(y).is_zero()) return false;
  for (int i = 0; i < ps.m(); ++i)
    if (!ps.ad_g(i, kappa - 1).apply(y).is_zero()) return true;
  return false;
}

std::vector<int> sorted_kappa(const SystemDef& sys, const MultiIndex& j, RankEngine& eng) {
  CnsResult c = cns_check(sys, j, eng);
  std::vector<int> k = c.kappa;
  std::sort(k.begin(), k.end());
  return k;
}

Poly lcm(const Poly& a, const Poly& b) {
  Poly g = gcd(a, b);
  auto q = exact_div(b, g);
  if (!q) return a * b;
  return a * *q;
}

// Basis of {c : sum c_a L_g M_a = 0 for every g}; columns ordered as given.
std::vector<std::vector<Rational>> nullspace(const std::vector<Poly>& monos, const std::vector<VectorField>& fields) {
  size_t cols = monos.size();
  std::vector<std::vector<Rational>> rows;
  for (const auto& g : fields) {
    std::vector<Expr> ls;
    Poly den(1);
    for (const auto& mo : monos) {
      ls.push_back(g.apply(Expr(mo)));
      if (!ls.back().is_zero()) den = lcm(den, ls.back().den());
    }
    std::map<Monomial, std::vector<Rational>, MonoGreater> eqs;
    for (size_t a = 0; a < cols; ++a) {
      if (ls[a].is_zero()) continue;
      auto q = exact_div(den, ls[a].den());
      if (!q) throw Error(ErrorKind::InvalidArgument, "denominator does not divide common multiple");
      Poly num = ls[a].num() * *q;
      for (const auto& [mono, coef] : num.terms()) {
        auto& row = eqs[mono];
        if (row.empty()) row.assign(cols, Rational(0));
        row[a] += coef;
      }
    }
    for (auto& [mono, row] : eqs) rows.push_back(std::move(row));
  }

  // Reduced row echelon form.
  std::vector<int> pivot_col;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows.size(); ++c) {
    size_t p = r;
    while (p < rows.size() && sgn(rows[p][c]) == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    Rational inv = 1 / rows[r][c];
    for (auto& x : rows[r]) x *= inv;
    for (size_t o = 0; o < rows.size(); ++o) {
      if (o == r || sgn(rows[o][c]) == 0) continue;
      Rational f = rows[o][c];
      for (size_t cc = c; cc < cols; ++cc) rows[o][cc] -= f * rows[r][cc];
    }
    pivot_col.push_back(int(c));
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[size_t(c)] = true;
  std::vector<std::vector<Rational>> basis;
  for (size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[f] = 1;
    for (size_t i = 0; i < pivot_col.size(); ++i) v[size_t(pivot_col[i])] = -rows[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

// Monomials of degree 1..degree over the atoms, highest degree first; sin atoms stay linear.
std::vector<Poly> ansatz_monomials(const std::vector<VarRef>& atoms, int degree) {
  std::vector<Monomial> all{Monomial()};
  std::vector<Monomial> frontier{Monomial()};
  for (int d = 1; d <= degree; ++d) {
    std::vector<Monomial> next;
    for (const auto& mo : frontier) {
      size_t start = 0;
      if (!mo.is_one()) {
        VarRef last = mo.factors().back().var;
        start = size_t(std::find(atoms.begin(), atoms.end(), last) - atoms.begin());
      }
      for (size_t a = start; a < atoms.size(); ++a) {
        Monomial nm = mo * Monomial::of(atoms[a]);
        if (nm.has_sin_square()) continue;
        next.push_back(nm);
      }
    }
    frontier = next;
    all.insert(all.end(), next.begin(), next.end());
  }
  std::vector<Poly> out;
  for (auto it = all.rbegin(); it != all.rend(); ++it)
    if (!it->is_one()) out.push_back(Poly::monomial(*it, 1));
  std::stable_sort(out.begin(), out.end(),
                   [](const Poly& a, const Poly& b) { return a.total_degree() > b.total_degree(); });
  return out;
}

struct Candidate {
  Expr y;
  unsigned degree;
  size_t terms;
  std::string text;
};

}  // namespace

VerifyResult verify_flat_output(const SystemDef& sys, const MultiIndex& j, const std::vector<Expr>& ys,
                                RankEngine& eng) {
  VerifyResult out;
  if (int(ys.size()) != sys.m()) {
    out.reason = "expected " + std::to_string(sys.m()) + " outputs, got " + std::to_string(ys.size());
    return out;
  }
  ProlongedSystem ps(sys, j);
  const JetSpace& sp = ps.space();
  for (size_t i = 0; i < ys.size(); ++i)
    if (!lives_on(ys[i], sp)) {
      out.reason = "output " + std::to_string(i + 1) + " depends on variables outside X^" + j.str();
      return out;
    }
  CnsResult c = cns_check(sys, j, eng);
  if (!c.ok) {
    out.reason = "prolongation " + j.str() + " does not satisfy the conditions";
    return out;
  }
  std::vector<int> kappa = c.kappa;
  std::sort(kappa.begin(), kappa.end());
  do {
    bool ok = true;
    for (size_t i = 0; i < ys.size() && ok; ++i) ok = kappa[i] >= 1 && relative_degree_ok(ps, ys[i], kappa[i]);
    if (!ok) continue;
    Distribution jac;
    for (size_t i = 0; i < ys.size(); ++i)
      for (const auto& d : derivatives(ys[i], ps.g0(), kappa[i])) jac.gens.push_back(gradient(d, sp));
    int r = eng.rank(jac, sp);
    if (r == sp.dim()) {
      out.ok = true;
      out.kappa = kappa;
      return out;
    }
  } while (std::next_permutation(kappa.begin(), kappa.end()));
  out.reason = "no assignment of the indices gives annihilation, nondegeneracy and a full rank Jacobian";
  return out;
}

std::optional<std::vector<Expr>> search_flat_outputs(const SystemDef& sys, const MultiIndex& j, int degree,
                                                     RankEngine& eng) {
  ProlongedSystem ps(sys, j);
  const JetSpace& sp = ps.space();
  std::vector<int> kappa = sorted_kappa(sys, j, eng);
  std::reverse(kappa.begin(), kappa.end());
  if (kappa.empty() || kappa.back() < 1) return std::nullopt;

  std::vector<VarRef> atoms;
  std::set<VarRef> trig_bases;
  for (const auto& f : sys.drift)
    for (const auto& v : f.vars())
      if (v.is_trig()) trig_bases.insert(v.base());
  for (const auto& c : sp.coords()) {
    atoms.push_back(c);
    if (trig_bases.count(c)) {
      atoms.push_back(c.sin());
      atoms.push_back(c.cos());
    }
  }
  std::sort(atoms.begin(), atoms.end());
  std::vector<Poly> monos = ansatz_monomials(atoms, degree);
  auto nm = sys.namer();

  std::map<int, std::vector<Candidate>> pool;
  for (int kv : kappa) {
    if (pool.count(kv)) continue;
    std::vector<VectorField> fields;
    for (int k = 0; k <= kv - 2; ++k)
      for (int i = 0; i < ps.m(); ++i) fields.push_back(ps.ad_g(i, k));
    auto basis = nullspace(monos, fields);
    std::vector<Candidate> cands;
    for (auto& v : basis) {
      // Scale so the first nonzero coefficient in low-degree order is 1.
      for (size_t a = monos.size(); a-- > 0;)
        if (sgn(v[a]) != 0) {
          Rational s = 1 / v[a];
          for (auto& x : v) x *= s;
          break;
        }
      Poly p;
      for (size_t a = 0; a < monos.size(); ++a)
        if (sgn(v[a]) != 0) p += monos[a].scaled(v[a]);
      if (p.is_zero()) continue;
      Expr y(p);
      if (!relative_degree_ok(ps, y, kv)) continue;
      cands.push_back({y, p.total_degree(), p.size(), to_string(y, nm)});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.degree != b.degree) return a.degree < b.degree;
      if (a.terms != b.terms) return a.terms < b.terms;
      return a.text < b.text;
    });
    pool[kv] = std::move(cands);
  }

  // Depth-first assignment of candidates to the slots; every partial Jacobian must keep full row rank.
  std::vector<Expr> chosen;
  std::vector<std::string> chosen_text;
  Distribution jac;
  long budget = 20000;
  std::function<bool(size_t)> dfs = [&](size_t slot) -> bool {
    if (slot == kappa.size()) return eng.rank(jac, sp) == sp.dim();
    for (const auto& c : pool[kappa[slot]]) {
      if (--budget < 0) return false;
      if (std::find(chosen_text.begin(), chosen_text.end(), c.text) != chosen_text.end()) continue;
      size_t before = jac.gens.size();
      for (const auto& d : derivatives(c.y, ps.g0(), kappa[slot])) jac.gens.push_back(gradient(d, sp));
      if (eng.rank(jac, sp) == int(jac.gens.size())) {
        chosen.push_back(c.y);
        chosen_text.push_back(c.text);
        if (dfs(slot + 1)) return true;
        chosen.pop_back();
        chosen_text.pop_back();
      }
      jac.gens.resize(before);
    }
    return false;
  };
  if (!dfs(0)) return std::nullopt;
  return chosen;
}

}  // namespace flatcheck
