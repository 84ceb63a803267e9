#pragma once

#include <functional>
#include <map>
#include <string>

#include "flatcheck/expr/poly.hpp"

namespace flatcheck {

// Exact rational function. Canonical: den has no sin atom, gcd(num parts, den) = 1,
// leading coefficient of den is 1, sin-degree of num <= 1.
class Expr {
 public:
  Expr() : den_(1) {}
  Expr(const Rational& c) : num_(c), den_(1) {}  // NOLINT
  Expr(long c) : num_(c), den_(1) {}  // NOLINT
  Expr(const Poly& p) : num_(p), den_(1) {}  // NOLINT
  static Expr var(VarRef v);
  static Expr fraction(const Poly& num, const Poly& den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }
  Rational constant_value() const { return num_.constant_value(); }
  std::set<VarRef> vars() const;

  Expr operator-() const;
  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator*(const Expr& o) const;
  Expr operator/(const Expr& o) const;
  Expr pow(unsigned e) const;
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  friend bool operator==(const Expr& a, const Expr& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  Poly num_;
  Poly den_;
};

inline Expr operator+(long a, const Expr& b) { return Expr(a) + b; }
inline Expr operator-(long a, const Expr& b) { return Expr(a) - b; }
inline Expr operator*(long a, const Expr& b) { return Expr(a) * b; }
inline Expr operator/(long a, const Expr& b) { return Expr(a) / b; }

Expr diff(const Expr& e, VarRef v);

// Value of an atom (plain variable or trig atom) at a point.
using AtomFn = std::function<Rational(const VarRef&)>;

// Throws DenominatorVanishes when the denominator is zero at the point.
Rational eval_at(const Expr& e, const AtomFn& atom);
Rational eval_poly(const Poly& p, const AtomFn& atom);

// Point keyed by plain variables; trig atoms of theta are read through the
// half-angle value stored under theta.half_tan().
Rational eval_at(const Expr& e, const std::map<VarRef, Rational>& point);
AtomFn half_angle_atoms(const std::map<VarRef, Rational>& point);

// Floating evaluation with trig atoms taken as sin/cos of the base value.
double eval_double(const Expr& e, const std::map<VarRef, double>& point);

Expr substitute(const Expr& e, const std::map<VarRef, Expr>& sub);

std::string to_string(const Poly& p, const NameFn& name);
std::string to_string(const Expr& e, const NameFn& name);
inline std::string to_string(const Expr& e) { return to_string(e, default_name); }

std::string rational_string(const Rational& q);

}  // namespace flatcheck
