#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "flatcheck/expr/var_ref.hpp"

namespace flatcheck {

using Rational = mpq_class;

struct Factor {
  VarRef var;
  unsigned exp;
};

// Power product; factors sorted by variable, exponents positive.
class Monomial {
 public:
  Monomial() = default;
  static Monomial of(VarRef v, unsigned e = 1);

  const std::vector<Factor>& factors() const { return f_; }
  bool is_one() const { return f_.empty(); }
  unsigned degree() const;
  unsigned exponent(VarRef v) const;
  bool has_sin_square() const;

  Monomial operator*(const Monomial& o) const;
  bool divides(const Monomial& o) const;
  // Requires divides(o).
  Monomial quotient_of(const Monomial& o) const;
  Monomial without(VarRef v) const;
  Monomial with_exponent(VarRef v, unsigned e) const;

  friend bool operator==(const Monomial& a, const Monomial& b);

 private:
  std::vector<Factor> f_;
};

// Graded lexicographic; the smallest VarRef is the most significant.
int grlex_cmp(const Monomial& a, const Monomial& b);

struct MonoGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return grlex_cmp(a, b) > 0; }
};

using Term = std::pair<Monomial, Rational>;

// Sparse polynomial over Q; terms strictly decreasing in grlex. Products
// rewrite sin^2 -> 1 - cos^2 so each sin atom has degree <= 1.
class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c);  // NOLINT
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT
  static Poly var(VarRef v, unsigned e = 1);
  static Poly monomial(const Monomial& m, const Rational& c);
  static Poly from_map(std::map<Monomial, Rational, MonoGreater>&& m);

  const std::vector<Term>& terms() const { return t_; }
  size_t size() const { return t_.size(); }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].first.is_one()); }
  Rational constant_value() const;
  bool is_one() const;
  const Monomial& lead_mono() const { return t_.front().first; }
  const Rational& lead_coeff() const { return t_.front().second; }
  unsigned total_degree() const;
  unsigned degree_in(VarRef v) const;
  bool has_var(VarRef v) const;
  bool has_sin() const;
  std::set<VarRef> vars() const;

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly scaled(const Rational& c) const;
  Poly times(const Monomial& m) const;
  Poly pow(unsigned e) const;
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

 private:
  std::vector<Term> t_;
};

// Partial derivative; trig atoms of v follow the chain rule.
Poly diff(const Poly& p, VarRef v);

// Polynomial product without the sin^2 rewrite (gcd works in the free ring).
Poly mul_free(const Poly& a, const Poly& b);

// Exact quotient a / b in the free polynomial ring, nullopt if b does not divide a.
std::optional<Poly> exact_div(const Poly& a, const Poly& b);

// Monic gcd over Q (trig atoms treated as independent variables).
Poly gcd(const Poly& a, const Poly& b);

// Coefficients of p as a polynomial in v, index = degree.
std::vector<Poly> coeffs_in(const Poly& p, VarRef v);
Poly from_coeffs(const std::vector<Poly>& c, VarRef v);

// p divided by its leading coefficient.
Poly monic(const Poly& p);

}  // namespace flatcheck
