#include "flatcheck/jetgeom/jet.hpp"

#include <algorithm>
#include <map>

#include "flatcheck/errors.hpp"

namespace flatcheck {

long MultiIndex::total() const {
  long s = 0;
  for (int x : v) s += x;
  return s;
}

bool MultiIndex::has_inf() const { return std::find(v.begin(), v.end(), kInf) != v.end(); }

bool MultiIndex::leq(const MultiIndex& o) const {
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] > o.v[i]) return false;
  return true;
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i] == kInf ? "inf" : std::to_string(v[i]);
  }
  return s + ")";
}

MultiIndex cmin(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r = a;
  for (size_t i = 0; i < r.v.size(); ++i) r.v[i] = std::min(a.v[i], b.v[i]);
  return r;
}

MultiIndex cmax(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r = a;
  for (size_t i = 0; i < r.v.size(); ++i) r.v[i] = std::max(a.v[i], b.v[i]);
  return r;
}

JetSpace::JetSpace(int n, MultiIndex j) : n_(n), j_(std::move(j)) {
  for (int i = 0; i < n; ++i) coords_.push_back(VarRef::state(i));
  for (int i = 0; i < j_.size(); ++i)
    for (int k = 0; k <= j_[i]; ++k) coords_.push_back(VarRef::input(i, k));
}

bool JetSpace::contains(const VarRef& v) const { return index_of(v) >= 0; }

int JetSpace::index_of(const VarRef& v) const {
  if (v.is_trig()) return -1;
  if (v.kind == VarKind::State) return v.index < n_ ? v.index : -1;
  if (v.kind != VarKind::Input || v.index >= m() || v.order > j_[v.index]) return -1;
  int off = n_;
  for (int i = 0; i < v.index; ++i) off += j_[i] + 1;
  return off + v.order;
}

VectorField VectorField::coord(VarRef v) {
  VectorField f;
  f.c_.emplace_back(v, Expr(1));
  return f;
}

Expr VectorField::component(VarRef v) const {
  auto it = std::lower_bound(c_.begin(), c_.end(), v, [](const auto& p, const VarRef& x) { return p.first < x; });
  if (it != c_.end() && it->first == v) return it->second;
  return Expr();
}

void VectorField::set(VarRef v, const Expr& e) {
  auto it = std::lower_bound(c_.begin(), c_.end(), v, [](const auto& p, const VarRef& x) { return p.first < x; });
  bool present = it != c_.end() && it->first == v;
  if (e.is_zero()) {
    if (present) c_.erase(it);
  } else if (present) {
    it->second = e;
  } else {
    c_.insert(it, {v, e});
  }
}

VectorField VectorField::operator+(const VectorField& o) const {
  VectorField r;
  size_t i = 0, j = 0;
  while (i < c_.size() || j < o.c_.size()) {
    if (j == o.c_.size() || (i < c_.size() && c_[i].first < o.c_[j].first)) {
      r.c_.push_back(c_[i++]);
    } else if (i == c_.size() || o.c_[j].first < c_[i].first) {
      r.c_.push_back(o.c_[j++]);
    } else {
      Expr s = c_[i].second + o.c_[j].second;
      if (!s.is_zero()) r.c_.emplace_back(c_[i].first, s);
      ++i;
      ++j;
    }
  }
  return r;
}

VectorField VectorField::operator-() const {
  VectorField r = *this;
  for (auto& [v, e] : r.c_) e = -e;
  return r;
}

VectorField VectorField::operator-(const VectorField& o) const { return *this + (-o); }

VectorField VectorField::scaled(const Expr& f) const {
  VectorField r;
  if (f.is_zero()) return r;
  for (const auto& [v, e] : c_) r.c_.emplace_back(v, e * f);
  return r;
}

Expr VectorField::apply(const Expr& f) const {
  Expr acc;
  for (const auto& [v, e] : c_) {
    Expr d = diff(f, v);
    if (!d.is_zero()) acc += e * d;
  }
  return acc;
}

bool operator==(const VectorField& a, const VectorField& b) {
  if (a.c_.size() != b.c_.size()) return false;
  for (size_t i = 0; i < a.c_.size(); ++i)
    if (a.c_[i].first != b.c_[i].first || a.c_[i].second != b.c_[i].second) return false;
  return true;
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  // [v,w]_i = v(w_i) - w(v_i)
  std::map<VarRef, Expr> acc;
  for (const auto& [i, wi] : w.components()) {
    Expr t = v.apply(wi);
    if (!t.is_zero()) acc[i] += t;
  }
  for (const auto& [i, vi] : v.components()) {
    Expr t = w.apply(vi);
    if (!t.is_zero()) acc[i] -= t;
  }
  VectorField r;
  for (const auto& [i, e] : acc) r.set(i, e);
  return r;
}

VectorField ad_pow(const VectorField& v, const VectorField& w, int k) {
  VectorField r = w;
  for (int i = 0; i < k && !r.is_zero(); ++i) r = lie_bracket(v, r);
  return r;
}

std::string to_string(const VectorField& f, const NameFn& name) {
  if (f.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [v, e] : f.components()) {
    std::string d = "d/d" + name(v);
    const Poly& n = e.num();
    bool single = e.is_polynomial() && n.size() == 1;
    if (single) {
      bool neg = sgn(n.lead_coeff()) < 0;
      Expr a = neg ? -e : e;
      s += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
      s += a.is_constant() && a.constant_value() == 1 ? d : to_string(a, name) + "*" + d;
    } else {
      s += first ? "" : " + ";
      s += "(" + to_string(e, name) + ")*" + d;
    }
    first = false;
  }
  return s;
}

bool is_vertical(const VectorField& f, const MultiIndex& bound) {
  for (const auto& [v, e] : f.components()) {
    if (v.kind != VarKind::State) return false;
    for (const auto& x : e.vars()) {
      if (x.kind != VarKind::Input) continue;
      if (x.index >= bound.size() || x.order > bound[x.index]) return false;
    }
  }
  return true;
}

Distribution join(const Distribution& a, const Distribution& b) {
  Distribution r = a;
  for (const auto& g : b.gens) r.add(g);
  return r;
}

}  // namespace flatcheck
