#pragma once

#include <random>
#include <string>
#include <vector>

#include "flatcheck/flatness/flatness.hpp"
#include "flatcheck/sysdsl/system.hpp"

namespace flatcheck::test {

inline Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

inline std::string fixture(const std::string& name) { return std::string(FLATCHECK_FIXTURES) + "/" + name; }

// Fixed-seed generator for property cases.
class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[size_t(uniform(0, int(v.size()) - 1))];
  }

  // Sparse polynomial with small integer coefficients over vars, total degree <= deg.
  Poly poly(const std::vector<VarRef>& vars, int terms, int deg) {
    Poly p;
    for (int t = 0; t < terms; ++t) {
      Poly m(uniform(-3, 3));
      int d = uniform(0, deg);
      for (int e = 0; e < d; ++e) m *= Poly::var(pick(vars));
      p += m;
    }
    return p;
  }

  // Control-affine-in-nothing random drift f(x, u) on n states and m inputs.
  SystemDef system(int n, int m, int deg = 2) {
    SystemDef s;
    s.name = "random";
    for (int i = 0; i < n; ++i) s.states.push_back("x" + std::to_string(i + 1));
    for (int i = 0; i < m; ++i) s.inputs.push_back("u" + std::to_string(i + 1));
    std::vector<VarRef> vars;
    for (int i = 0; i < n; ++i) vars.push_back(VarRef::state(i));
    for (int i = 0; i < m; ++i) vars.push_back(VarRef::input(i, 0));
    for (int i = 0; i < n; ++i) s.drift.push_back(Expr(poly(vars, uniform(1, 3), deg)));
    return s;
  }

  MultiIndex index(int m, int hi) {
    MultiIndex j = MultiIndex::zeros(m);
    for (int i = 0; i < m; ++i) j[i] = uniform(0, hi);
    return j;
  }

  // Random polynomial field on the space.
  VectorField field(const JetSpace& sp, int comps, int terms, int deg) {
    VectorField v;
    for (int c = 0; c < comps; ++c) {
      VarRef at = pick(sp.coords());
      v.set(at, v.component(at) + Expr(poly(sp.coords(), terms, deg)));
    }
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace flatcheck::test
