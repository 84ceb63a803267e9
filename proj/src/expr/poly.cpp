#include "flatcheck/expr/poly.hpp"

#include <algorithm>

#include "flatcheck/errors.hpp"

namespace flatcheck {

std::string default_name(const VarRef& v) {
  switch (v.kind) {
    case VarKind::State:
      return "x" + std::to_string(v.index + 1);
    case VarKind::Input:
      return "u" + std::to_string(v.index + 1) + std::string(v.order, '\'');
    case VarKind::Param:
      return "p" + std::to_string(v.index + 1);
  }
  return "?";
}

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::DenominatorVanishes: return "DenominatorVanishes";
    case ErrorKind::UnsupportedTrigComposition: return "UnsupportedTrigComposition";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UndeclaredIdentifier: return "UndeclaredIdentifier";
    case ErrorKind::DuplicateEquation: return "DuplicateEquation";
    case ErrorKind::MissingEquation: return "MissingEquation";
    case ErrorKind::HigherInputDerivativeInDrift: return "HigherInputDerivativeInDrift";
    case ErrorKind::InvalidSystem: return "InvalidSystem";
    case ErrorKind::IterationBudgetExceeded: return "IterationBudgetExceeded";
    case ErrorKind::SamplingExhausted: return "SamplingExhausted";
    case ErrorKind::PreconditionNotMet: return "PreconditionNotMet";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

// ---- Monomial

Monomial Monomial::of(VarRef v, unsigned e) {
  Monomial m;
  if (e > 0) m.f_.push_back({v, e});
  return m;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (const auto& f : f_) d += f.exp;
  return d;
}

unsigned Monomial::exponent(VarRef v) const {
  for (const auto& f : f_)
    if (f.var == v) return f.exp;
  return 0;
}

bool Monomial::has_sin_square() const {
  for (const auto& f : f_)
    if (f.var.trig == Trig::Sin && f.exp >= 2) return true;
  return false;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.f_.reserve(f_.size() + o.f_.size());
  size_t i = 0, j = 0;
  while (i < f_.size() || j < o.f_.size()) {
    if (j == o.f_.size() || (i < f_.size() && f_[i].var < o.f_[j].var)) {
      r.f_.push_back(f_[i++]);
    } else if (i == f_.size() || o.f_[j].var < f_[i].var) {
      r.f_.push_back(o.f_[j++]);
    } else {
      r.f_.push_back({f_[i].var, f_[i].exp + o.f_[j].exp});
      ++i;
      ++j;
    }
  }
  return r;
}

bool Monomial::divides(const Monomial& o) const {
  size_t j = 0;
  for (const auto& f : f_) {
    while (j < o.f_.size() && o.f_[j].var < f.var) ++j;
    if (j == o.f_.size() || o.f_[j].var != f.var || o.f_[j].exp < f.exp) return false;
  }
  return true;
}

Monomial Monomial::quotient_of(const Monomial& o) const {
  Monomial r;
  size_t i = 0;
  for (const auto& g : o.f_) {
    while (i < f_.size() && f_[i].var < g.var) ++i;
    unsigned e = g.exp;
    if (i < f_.size() && f_[i].var == g.var) e -= f_[i].exp;
    if (e > 0) r.f_.push_back({g.var, e});
  }
  return r;
}

Monomial Monomial::without(VarRef v) const {
  Monomial r;
  for (const auto& f : f_)
    if (f.var != v) r.f_.push_back(f);
  return r;
}

Monomial Monomial::with_exponent(VarRef v, unsigned e) const {
  Monomial r = without(v);
  if (e == 0) return r;
  auto it = std::lower_bound(r.f_.begin(), r.f_.end(), v,
                             [](const Factor& f, const VarRef& x) { return f.var < x; });
  r.f_.insert(it, {v, e});
  return r;
}

bool operator==(const Monomial& a, const Monomial& b) {
  if (a.f_.size() != b.f_.size()) return false;
  for (size_t i = 0; i < a.f_.size(); ++i)
    if (a.f_[i].var != b.f_[i].var || a.f_[i].exp != b.f_[i].exp) return false;
  return true;
}

int grlex_cmp(const Monomial& a, const Monomial& b) {
  unsigned da = a.degree(), db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  size_t i = 0, j = 0;
  while (i < fa.size() && j < fb.size()) {
    if (fa[i].var == fb[j].var) {
      if (fa[i].exp != fb[j].exp) return fa[i].exp < fb[j].exp ? -1 : 1;
      ++i;
      ++j;
    } else if (fa[i].var < fb[j].var) {
      return 1;
    } else {
      return -1;
    }
  }
  if (i < fa.size()) return 1;
  if (j < fb.size()) return -1;
  return 0;
}

// ---- Poly

namespace {

using TermMap = std::map<Monomial, Rational, MonoGreater>;

void accumulate(TermMap& acc, const Monomial& m, const Rational& c) {
  auto [it, inserted] = acc.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) acc.erase(it);
  }
}

// sin^e = sin^(e mod 2) * (1 - cos^2)^(e div 2), applied until no square remains.
void accumulate_reduced(TermMap& acc, const Monomial& m, const Rational& c) {
  for (const auto& f : m.factors()) {
    if (f.var.trig == Trig::Sin && f.exp >= 2) {
      VarRef cv = f.var.cos();
      Monomial lower = m.with_exponent(f.var, f.exp - 2);
      accumulate_reduced(acc, lower, c);
      Monomial withcos = lower.with_exponent(cv, lower.exponent(cv) + 2);
      accumulate_reduced(acc, withcos, -c);
      return;
    }
  }
  accumulate(acc, m, c);
}

}  // namespace

Poly::Poly(const Rational& c) {
  if (sgn(c) != 0) t_.push_back({Monomial(), c});
}

Poly Poly::var(VarRef v, unsigned e) { return monomial(Monomial::of(v, e), 1); }

Poly Poly::monomial(const Monomial& m, const Rational& c) {
  Poly p;
  if (sgn(c) == 0) return p;
  if (m.has_sin_square()) {
    TermMap acc;
    accumulate_reduced(acc, m, c);
    return from_map(std::move(acc));
  }
  p.t_.push_back({m, c});
  return p;
}

Poly Poly::from_map(TermMap&& m) {
  Poly p;
  p.t_.reserve(m.size());
  for (auto& [mono, c] : m)
    if (sgn(c) != 0) p.t_.emplace_back(mono, std::move(c));
  return p;
}

Rational Poly::constant_value() const {
  if (t_.empty()) return 0;
  if (!t_.back().first.is_one()) return 0;
  return t_.back().second;
}

bool Poly::is_one() const { return t_.size() == 1 && t_[0].first.is_one() && t_[0].second == 1; }

unsigned Poly::total_degree() const { return t_.empty() ? 0 : t_.front().first.degree(); }

unsigned Poly::degree_in(VarRef v) const {
  unsigned d = 0;
  for (const auto& [m, c] : t_) d = std::max(d, m.exponent(v));
  return d;
}

bool Poly::has_var(VarRef v) const {
  for (const auto& [m, c] : t_)
    if (m.exponent(v) > 0) return true;
  return false;
}

bool Poly::has_sin() const {
  for (const auto& [m, c] : t_)
    for (const auto& f : m.factors())
      if (f.var.trig == Trig::Sin) return true;
  return false;
}

std::set<VarRef> Poly::vars() const {
  std::set<VarRef> s;
  for (const auto& [m, c] : t_)
    for (const auto& f : m.factors()) s.insert(f.var);
  return s;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.t_) c = -c;
  return r;
}

Poly Poly::operator+(const Poly& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  Poly r;
  r.t_.reserve(t_.size() + o.t_.size());
  size_t i = 0, j = 0;
  while (i < t_.size() || j < o.t_.size()) {
    int cmp;
    if (i == t_.size()) cmp = -1;
    else if (j == o.t_.size()) cmp = 1;
    else cmp = grlex_cmp(t_[i].first, o.t_[j].first);
    if (cmp > 0) {
      r.t_.push_back(t_[i++]);
    } else if (cmp < 0) {
      r.t_.push_back(o.t_[j++]);
    } else {
      Rational c = t_[i].second + o.t_[j].second;
      if (sgn(c) != 0) r.t_.emplace_back(t_[i].first, std::move(c));
      ++i;
      ++j;
    }
  }
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return Poly();
  if (is_constant()) return o.scaled(t_[0].second);
  if (o.is_constant()) return scaled(o.t_[0].second);
  TermMap acc;
  bool need_reduce = has_sin() && o.has_sin();
  for (const auto& [ma, ca] : t_)
    for (const auto& [mb, cb] : o.t_) {
      Monomial m = ma * mb;
      Rational c = ca * cb;
      if (need_reduce && m.has_sin_square()) accumulate_reduced(acc, m, c);
      else accumulate(acc, m, c);
    }
  return from_map(std::move(acc));
}

Poly mul_free(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.is_constant()) return b.scaled(a.lead_coeff());
  if (b.is_constant()) return a.scaled(b.lead_coeff());
  TermMap acc;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) accumulate(acc, ma * mb, ca * cb);
  return Poly::from_map(std::move(acc));
}

Poly Poly::scaled(const Rational& c) const {
  if (sgn(c) == 0) return Poly();
  Poly r = *this;
  for (auto& [m, k] : r.t_) k *= c;
  return r;
}

Poly Poly::times(const Monomial& mono) const {
  if (mono.is_one()) return *this;
  Poly r;
  r.t_.reserve(t_.size());
  for (const auto& [m, c] : t_) r.t_.emplace_back(m * mono, c);
  if (mono.has_sin_square() || has_sin()) {
    bool sq = false;
    for (const auto& [m, c] : r.t_) sq = sq || m.has_sin_square();
    if (sq) {
      TermMap acc;
      for (const auto& [m, c] : r.t_) accumulate_reduced(acc, m, c);
      return from_map(std::move(acc));
    }
  }
  return r;
}

Poly Poly::pow(unsigned e) const {
  Poly r(1), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.t_.size() != b.t_.size()) return false;
  for (size_t i = 0; i < a.t_.size(); ++i)
    if (!(a.t_[i].first == b.t_[i].first) || a.t_[i].second != b.t_[i].second) return false;
  return true;
}

Poly diff(const Poly& p, VarRef v) {
  VarRef sv = v.sin(), cv = v.cos();
  TermMap acc;
  for (const auto& [m, c] : p.terms()) {
    for (const auto& f : m.factors()) {
      if (f.var.base() != v) continue;
      Monomial lower = m.with_exponent(f.var, f.exp - 1);
      Rational k = c * f.exp;
      if (f.var.trig == Trig::None) {
        accumulate_reduced(acc, lower, k);
      } else if (f.var.trig == Trig::Sin) {
        // d sin = cos
        accumulate_reduced(acc, lower.with_exponent(cv, lower.exponent(cv) + 1), k);
      } else if (f.var.trig == Trig::Cos) {
        // d cos = -sin
        accumulate_reduced(acc, lower.with_exponent(sv, lower.exponent(sv) + 1), -k);
      }
    }
  }
  return Poly::from_map(std::move(acc));
}

std::vector<Poly> coeffs_in(const Poly& p, VarRef v) {
  std::vector<TermMap> parts(p.degree_in(v) + 1);
  for (const auto& [m, c] : p.terms()) accumulate(parts[m.exponent(v)], m.without(v), c);
  std::vector<Poly> out;
  out.reserve(parts.size());
  for (auto& tm : parts) out.push_back(Poly::from_map(std::move(tm)));
  return out;
}

Poly from_coeffs(const std::vector<Poly>& cs, VarRef v) {
  TermMap acc;
  for (size_t d = 0; d < cs.size(); ++d)
    for (const auto& [m, c] : cs[d].terms()) accumulate(acc, d ? m * Monomial::of(v, d) : m, c);
  return Poly::from_map(std::move(acc));
}

Poly monic(const Poly& p) {
  if (p.is_zero()) return p;
  return p.scaled(1 / p.lead_coeff());
}

std::optional<Poly> exact_div(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw Error(ErrorKind::DivisionByZero, "polynomial division by zero");
  if (a.is_zero()) return Poly();
  if (b.is_constant()) return a.scaled(1 / b.lead_coeff());
  const Monomial& lb = b.lead_mono();
  Rational inv = 1 / b.lead_coeff();
  if (b.size() == 1) {
    std::vector<Term> q;
    for (const auto& [m, c] : a.terms()) {
      if (!lb.divides(m)) return std::nullopt;
      q.emplace_back(lb.quotient_of(m), c * inv);
    }
    TermMap acc;
    for (auto& [m, c] : q) acc.emplace(std::move(m), std::move(c));
    return Poly::from_map(std::move(acc));
  }
  TermMap rem(a.terms().begin(), a.terms().end());
  TermMap quo;
  while (!rem.empty()) {
    auto it = rem.begin();
    if (!lb.divides(it->first)) return std::nullopt;
    Monomial qm = lb.quotient_of(it->first);
    Rational qc = it->second * inv;
    for (const auto& [m, c] : b.terms()) accumulate(rem, m * qm, -(c * qc));
    accumulate(quo, qm, qc);
  }
  return Poly::from_map(std::move(quo));
}

// ---- gcd via subresultant PRS in R[v], R = Q[remaining variables]

namespace {

using UPoly = std::vector<Poly>;  // coefficients in R, index = degree

void trim(UPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

Poly content(const UPoly& p) {
  Poly g;
  for (const auto& c : p) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? monic(c) : gcd(g, c);
    if (g.is_constant()) return Poly(1);
  }
  return g;
}

UPoly div_coeffs(const UPoly& p, const Poly& d) {
  UPoly r;
  r.reserve(p.size());
  for (const auto& c : p) {
    auto q = exact_div(c, d);
    if (!q) throw Error(ErrorKind::InvalidArgument, "inexact coefficient division in gcd");
    r.push_back(std::move(*q));
  }
  return r;
}

// lc(b)^(deg a - deg b + 1) * a mod b
UPoly prem(UPoly a, const UPoly& b) {
  size_t db = b.size() - 1;
  const Poly& lcb = b.back();
  int e = int(a.size()) - int(db);
  while (!a.empty() && a.size() - 1 >= db) {
    Poly lt = a.back();
    size_t s = a.size() - 1 - db;
    for (auto& c : a) c = mul_free(c, lcb);
    for (size_t i = 0; i <= db; ++i) a[i + s] = a[i + s] - mul_free(lt, b[i]);
    trim(a);
    --e;
  }
  if (e > 0) {
    Poly f = lcb;
    Poly pw(1);
    for (int i = 0; i < e; ++i) pw = mul_free(pw, f);
    for (auto& c : a) c = mul_free(c, pw);
  }
  return a;
}

Poly pow_free(const Poly& p, unsigned e) {
  Poly r(1);
  for (unsigned i = 0; i < e; ++i) r = mul_free(r, p);
  return r;
}

Poly content_in(const Poly& p, VarRef v) {
  UPoly c = coeffs_in(p, v);
  return content(c);
}

Poly monomial_gcd(const Poly& mono, const Poly& p) {
  Monomial g = mono.lead_mono();
  for (const auto& [m, c] : p.terms()) {
    Monomial ng;
    for (const auto& f : g.factors()) {
      unsigned e = std::min(f.exp, m.exponent(f.var));
      if (e) ng = ng * Monomial::of(f.var, e);
    }
    g = ng;
    if (g.is_one()) break;
  }
  return Poly::monomial(g, 1);
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return monic(b);
  if (b.is_zero()) return monic(a);
  if (a.is_constant() || b.is_constant()) return Poly(1);
  if (a.size() == 1) return monomial_gcd(a, b);
  if (b.size() == 1) return monomial_gcd(b, a);
  if (monic(a) == monic(b)) return monic(a);

  VarRef v;
  bool found = false;
  for (const auto* p : {&a, &b})
    for (const auto& [m, c] : p->terms())
      if (!m.is_one() && (!found || m.factors().front().var < v)) {
        v = m.factors().front().var;
        found = true;
      }
  if (!a.has_var(v)) return gcd(a, content_in(b, v));
  if (!b.has_var(v)) return gcd(content_in(a, v), b);

  UPoly ua = coeffs_in(a, v), ub = coeffs_in(b, v);
  Poly ca = content(ua), cb = content(ub);
  Poly d = gcd(ca, cb);
  ua = div_coeffs(ua, ca);
  ub = div_coeffs(ub, cb);
  if (ua.size() < ub.size()) std::swap(ua, ub);

  Poly g(1), h(1);
  while (true) {
    unsigned delta = unsigned(ua.size() - ub.size());
    UPoly r = prem(ua, ub);
    if (r.empty()) break;
    if (r.size() == 1) {
      ub = UPoly{Poly(1)};
      break;
    }
    ua = ub;
    ub = div_coeffs(r, mul_free(g, pow_free(h, delta)));
    g = ua.back();
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      auto q = exact_div(pow_free(g, delta), pow_free(h, delta - 1));
      if (!q) throw Error(ErrorKind::InvalidArgument, "inexact subresultant step");
      h = *q;
    }
  }
  Poly cpp = content(ub);
  UPoly pp = div_coeffs(ub, cpp);
  return monic(mul_free(d, from_coeffs(pp, v)));
}

}  // namespace flatcheck
