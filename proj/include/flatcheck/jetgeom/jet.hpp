#pragma once

#include <climits>
#include <string>
#include <unordered_map>
#include <vector>

#include "flatcheck/expr/expr.hpp"

namespace flatcheck {

// Per-input derivative orders. kInf marks "no admissible value".
struct MultiIndex {
  static constexpr int kInf = INT_MAX;
  std::vector<int> v;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> c) : v(std::move(c)) {}
  static MultiIndex zeros(int m) { return MultiIndex(std::vector<int>(size_t(m), 0)); }

  int size() const { return int(v.size()); }
  int operator[](int i) const { return v[size_t(i)]; }
  int& operator[](int i) { return v[size_t(i)]; }
  long total() const;
  bool has_inf() const;
  bool leq(const MultiIndex& o) const;
  std::string str() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.v == b.v; }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return a.v != b.v; }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.v < b.v; }
};

MultiIndex cmin(const MultiIndex& a, const MultiIndex& b);
MultiIndex cmax(const MultiIndex& a, const MultiIndex& b);

// Coordinates x_1..x_n, then u_i^(0..j_i) for each input.
class JetSpace {
 public:
  JetSpace(int n, MultiIndex j);
  int n() const { return n_; }
  int m() const { return j_.size(); }
  const MultiIndex& orders() const { return j_; }
  int dim() const { return int(coords_.size()); }
  const std::vector<VarRef>& coords() const { return coords_; }
  bool contains(const VarRef& v) const;
  // -1 if v is not a coordinate.
  int index_of(const VarRef& v) const;

 private:
  int n_;
  MultiIndex j_;
  std::vector<VarRef> coords_;
};

// Sparse vector field, components keyed by coordinate.
class VectorField {
 public:
  VectorField() = default;
  static VectorField coord(VarRef v);

  const std::vector<std::pair<VarRef, Expr>>& components() const { return c_; }
  Expr component(VarRef v) const;
  void set(VarRef v, const Expr& e);
  bool is_zero() const { return c_.empty(); }

  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField operator-() const;
  VectorField scaled(const Expr& f) const;

  // Lie derivative L_v f.
  Expr apply(const Expr& f) const;

  friend bool operator==(const VectorField& a, const VectorField& b);
  friend bool operator!=(const VectorField& a, const VectorField& b) { return !(a == b); }

 private:
  std::vector<std::pair<VarRef, Expr>> c_;
};

VectorField lie_bracket(const VectorField& v, const VectorField& w);
// ad_v^k w; ad^0 = w.
VectorField ad_pow(const VectorField& v, const VectorField& w, int k);

std::string to_string(const VectorField& v, const NameFn& name);

// Coefficients live only on d/dx and depend on x, params and u_i^(k), k <= bound_i.
bool is_vertical(const VectorField& v, const MultiIndex& bound);

struct Distribution {
  std::vector<VectorField> gens;  // zero fields are never stored

  Distribution() = default;
  explicit Distribution(const std::vector<VectorField>& g) {
    for (const auto& f : g) add(f);
  }
  void add(const VectorField& f) {
    if (!f.is_zero()) gens.push_back(f);
  }
  size_t size() const { return gens.size(); }
};

Distribution join(const Distribution& a, const Distribution& b);

}  // namespace flatcheck
