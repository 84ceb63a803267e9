#include "flatcheck/expr/expr.hpp"

#include <cmath>

#include "flatcheck/errors.hpp"

namespace flatcheck {

namespace {

std::optional<VarRef> first_sin(const Poly& p) {
  std::optional<VarRef> best;
  for (const auto& [m, c] : p.terms())
    for (const auto& f : m.factors())
      if (f.var.trig == Trig::Sin && (!best || f.var < *best)) best = f.var;
  return best;
}

// Numerator split by its sin-atom monomial: num = sum_k part_k * k.
std::vector<Poly> sin_parts(const Poly& p) {
  std::map<Monomial, std::map<Monomial, Rational, MonoGreater>, MonoGreater> groups;
  for (const auto& [m, c] : p.terms()) {
    Monomial s, rest;
    for (const auto& f : m.factors()) {
      if (f.var.trig == Trig::Sin) s = s * Monomial::of(f.var, f.exp);
      else rest = rest * Monomial::of(f.var, f.exp);
    }
    groups[s].emplace(rest, c);
  }
  std::vector<Poly> out;
  for (auto& [s, tm] : groups) out.push_back(Poly::from_map(std::move(tm)));
  return out;
}

Poly monomial_gcd_with(const Monomial& d, const Poly& n) {
  Monomial g = d;
  for (const auto& [m, c] : n.terms()) {
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

Expr Expr::var(VarRef v) { return Expr(Poly::var(v)); }

Expr Expr::fraction(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw Error(ErrorKind::DivisionByZero, "zero denominator");
  Expr e;
  if (num.is_zero()) return e;
  Poly n = num, d = den;
  while (auto s = first_sin(d)) {
    std::vector<Poly> cs = coeffs_in(d, *s);
    Poly conj = cs[0] - (cs.size() > 1 ? cs[1] * Poly::var(*s) : Poly());
    n = n * conj;
    d = d * conj;
  }
  if (d.is_constant()) {
    e.num_ = n.scaled(1 / d.lead_coeff());
    return e;
  }
  Poly g;
  if (d.size() == 1) {
    g = monomial_gcd_with(d.lead_mono(), n);
  } else {
    g = monic(d);
    for (const auto& part : sin_parts(n)) {
      g = gcd(g, part);
      if (g.is_constant()) break;
    }
  }
  if (!g.is_constant()) {
    auto qn = exact_div(n, g);
    auto qd = exact_div(d, g);
    if (!qn || !qd) throw Error(ErrorKind::InvalidArgument, "gcd does not divide");
    n = std::move(*qn);
    d = std::move(*qd);
  }
  Rational lc = d.lead_coeff();
  e.num_ = n.scaled(1 / lc);
  e.den_ = d.scaled(1 / lc);
  return e;
}

std::set<VarRef> Expr::vars() const {
  auto s = num_.vars();
  auto t = den_.vars();
  s.insert(t.begin(), t.end());
  return s;
}

Expr Expr::operator-() const {
  Expr r = *this;
  r.num_ = -r.num_;
  return r;
}

Expr Expr::operator+(const Expr& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (den_.is_one() && o.den_.is_one()) return Expr(num_ + o.num_);
  if (den_ == o.den_) return fraction(num_ + o.num_, den_);
  return fraction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Expr Expr::operator-(const Expr& o) const { return *this + (-o); }

Expr Expr::operator*(const Expr& o) const {
  if (is_zero() || o.is_zero()) return Expr();
  if (den_.is_one() && o.den_.is_one()) return Expr(num_ * o.num_);
  return fraction(num_ * o.num_, den_ * o.den_);
}

Expr Expr::operator/(const Expr& o) const {
  if (o.is_zero()) throw Error(ErrorKind::DivisionByZero, "division by the zero expression");
  if (is_zero()) return Expr();
  if (o.is_constant()) {
    Expr r = *this;
    r.num_ = num_.scaled(1 / o.num_.lead_coeff());
    return r;
  }
  return fraction(num_ * o.den_, den_ * o.num_);
}

Expr Expr::pow(unsigned e) const {
  Expr r(1), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

Expr diff(const Expr& e, VarRef v) {
  Poly dn = diff(e.num(), v);
  if (e.den().is_one()) return Expr(dn);
  Poly dd = diff(e.den(), v);
  if (dd.is_zero()) return Expr::fraction(dn, e.den());
  return Expr::fraction(dn * e.den() - e.num() * dd, e.den() * e.den());
}

Rational eval_poly(const Poly& p, const AtomFn& atom) {
  std::map<VarRef, Rational> cache;
  Rational acc = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational t = c;
    for (const auto& f : m.factors()) {
      auto it = cache.find(f.var);
      if (it == cache.end()) it = cache.emplace(f.var, atom(f.var)).first;
      for (unsigned i = 0; i < f.exp; ++i) t *= it->second;
    }
    acc += t;
  }
  return acc;
}

Rational eval_at(const Expr& e, const AtomFn& atom) {
  Rational d = eval_poly(e.den(), atom);
  if (sgn(d) == 0) throw Error(ErrorKind::DenominatorVanishes, "denominator vanishes at the point");
  return eval_poly(e.num(), atom) / d;
}

AtomFn half_angle_atoms(const std::map<VarRef, Rational>& point) {
  return [&point](const VarRef& v) -> Rational {
    VarRef key = v.is_trig() ? v.half_tan() : v;
    auto it = point.find(key);
    if (it == point.end()) throw Error(ErrorKind::MissingValue, "no value for " + default_name(v.base()));
    const Rational& t = it->second;
    if (v.trig == Trig::Sin) return 2 * t / (1 + t * t);
    if (v.trig == Trig::Cos) return (1 - t * t) / (1 + t * t);
    return t;
  };
}

Rational eval_at(const Expr& e, const std::map<VarRef, Rational>& point) {
  return eval_at(e, half_angle_atoms(point));
}

double eval_double(const Expr& e, const std::map<VarRef, double>& point) {
  auto val = [&](const VarRef& v) {
    auto it = point.find(v.base());
    if (it == point.end()) throw Error(ErrorKind::MissingValue, "no value for " + default_name(v.base()));
    if (v.trig == Trig::Sin) return std::sin(it->second);
    if (v.trig == Trig::Cos) return std::cos(it->second);
    return it->second;
  };
  auto ev = [&](const Poly& p) {
    double acc = 0;
    for (const auto& [m, c] : p.terms()) {
      double t = c.get_d();
      for (const auto& f : m.factors()) t *= std::pow(val(f.var), double(f.exp));
      acc += t;
    }
    return acc;
  };
  return ev(e.num()) / ev(e.den());
}

namespace {

Expr substitute_poly(const Poly& p, const std::map<VarRef, Expr>& sub) {
  Expr acc;
  for (const auto& [m, c] : p.terms()) {
    Expr t(c);
    for (const auto& f : m.factors()) {
      Expr base;
      if (f.var.is_trig()) {
        auto it = sub.find(f.var.base());
        if (it == sub.end()) {
          base = Expr::var(f.var);
        } else {
          const Expr& s = it->second;
          bool single = s.den().is_one() && s.num().size() == 1 && s.num().lead_coeff() == 1 &&
                        s.num().lead_mono().factors().size() == 1 &&
                        s.num().lead_mono().factors()[0].exp == 1 &&
                        !s.num().lead_mono().factors()[0].var.is_trig();
          if (!single)
            throw Error(ErrorKind::UnsupportedTrigComposition,
                        "trig argument " + default_name(f.var.base()) + " substituted by a non-variable");
          base = Expr::var(s.num().lead_mono().factors()[0].var.with_trig(f.var.trig));
        }
      } else {
        auto it = sub.find(f.var);
        base = it == sub.end() ? Expr::var(f.var) : it->second;
      }
      t = t * base.pow(f.exp);
    }
    acc = acc + t;
  }
  return acc;
}

}  // namespace

Expr substitute(const Expr& e, const std::map<VarRef, Expr>& sub) {
  Expr n = substitute_poly(e.num(), sub);
  if (e.den().is_one()) return n;
  return n / substitute_poly(e.den(), sub);
}

std::string rational_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

namespace {

std::string atom_string(const VarRef& v, const NameFn& name) {
  if (v.trig == Trig::Sin) return "sin(" + name(v.base()) + ")";
  if (v.trig == Trig::Cos) return "cos(" + name(v.base()) + ")";
  return name(v);
}

std::string mono_string(const Monomial& m, const NameFn& name) {
  std::string s;
  for (const auto& f : m.factors()) {
    if (!s.empty()) s += "*";
    s += atom_string(f.var, name);
    if (f.exp > 1) s += "^" + std::to_string(f.exp);
  }
  return s;
}

}  // namespace

std::string to_string(const Poly& p, const NameFn& name) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Rational a = abs(c);
    bool neg = sgn(c) < 0;
    if (first) s += neg ? "-" : "";
    else s += neg ? " - " : " + ";
    first = false;
    if (m.is_one()) {
      s += rational_string(a);
    } else {
      if (a != 1) s += rational_string(a) + "*";
      s += mono_string(m, name);
    }
  }
  return s;
}

std::string to_string(const Expr& e, const NameFn& name) {
  std::string n = to_string(e.num(), name);
  if (e.den().is_one()) return n;
  if (e.num().size() > 1) n = "(" + n + ")";
  const Poly& d = e.den();
  std::string ds = to_string(d, name);
  bool bare = d.size() == 1 && d.lead_coeff() == 1 && d.lead_mono().factors().size() == 1;
  if (!bare) ds = "(" + ds + ")";
  return n + "/" + ds;
}

}  // namespace flatcheck
