#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "flatcheck/jetgeom/jet.hpp"

namespace flatcheck::test {

// Independent dense polynomial oracle: exponent vector over the space coordinates.
using Dense = std::map<std::vector<unsigned>, Rational>;

inline Dense to_dense(const Expr& e, const JetSpace& sp) {
  if (!e.is_polynomial()) throw std::invalid_argument("oracle needs polynomial components");
  Dense d;
  for (const auto& [m, c] : e.num().terms()) {
    std::vector<unsigned> ex(size_t(sp.dim()), 0);
    for (const auto& f : m.factors()) ex[size_t(sp.index_of(f.var))] += f.exp;
    d[ex] += c;
  }
  return d;
}

inline Dense dense_mul(const Dense& a, const Dense& b) {
  Dense r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<unsigned> e = ea;
      for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      r[e] += ca * cb;
    }
  return r;
}

inline Dense dense_diff(const Dense& a, size_t var) {
  Dense r;
  for (const auto& [e, c] : a) {
    if (e[var] == 0) continue;
    std::vector<unsigned> d = e;
    d[var] -= 1;
    r[d] += c * Rational(e[var]);
  }
  return r;
}

inline void dense_add(Dense& a, const Dense& b, int sign) {
  for (const auto& [e, c] : b) a[e] += sign > 0 ? c : Rational(-c);
}

inline Expr from_dense(const Dense& d, const JetSpace& sp) {
  Poly p;
  for (const auto& [e, c] : d) {
    if (sgn(c) == 0) continue;
    Poly t(c);
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = t * Poly::var(sp.coords()[i], e[i]);
    p += t;
  }
  return Expr(p);
}

inline VectorField oracle_bracket(const VectorField& v, const VectorField& w, const JetSpace& sp) {
  size_t d = size_t(sp.dim());
  std::vector<Dense> vd(d), wd(d);
  for (size_t i = 0; i < d; ++i) {
    vd[i] = to_dense(v.component(sp.coords()[i]), sp);
    wd[i] = to_dense(w.component(sp.coords()[i]), sp);
  }
  VectorField out;
  for (size_t i = 0; i < d; ++i) {
    Dense acc;
    for (size_t j = 0; j < d; ++j) {
      dense_add(acc, dense_mul(vd[j], dense_diff(wd[i], j)), 1);
      dense_add(acc, dense_mul(wd[j], dense_diff(vd[i], j)), -1);
    }
    out.set(sp.coords()[i], from_dense(acc, sp));
  }
  return out;
}

}  // namespace flatcheck::test
