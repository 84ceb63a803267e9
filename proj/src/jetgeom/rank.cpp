#include "flatcheck/jetgeom/rank.hpp"

#include <algorithm>
#include <tuple>

#include "flatcheck/errors.hpp"

namespace flatcheck {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Rational Sampler::base_value(int sample, int attempt, const VarRef& v) {
  uint64_t h = splitmix64(seed_);
  h = splitmix64(h ^ (uint64_t(sample) * 0x100000001B3ull));
  h = splitmix64(h ^ (uint64_t(attempt) * 0xC2B2AE3D27D4EB4Full));
  h = splitmix64(h ^ v.key());
  long num = long(h & 0xFFFF) + 1;
  if (h & 0x10000) num = -num;
  long den = long((h >> 20) % 61) + 1;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational Sampler::value(int sample, int attempt, const VarRef& atom) {
  auto key = std::make_tuple(sample, attempt, atom.key());
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Rational r;
  if (atom.trig == Trig::Sin || atom.trig == Trig::Cos) {
    Rational t = base_value(sample, attempt, atom.half_tan());
    r = atom.trig == Trig::Sin ? Rational(2 * t / (1 + t * t)) : Rational((1 - t * t) / (1 + t * t));
  } else {
    r = base_value(sample, attempt, atom);
  }
  cache_.emplace(key, r);
  return r;
}

AtomFn Sampler::atoms(int sample, int attempt) {
  return [this, sample, attempt](const VarRef& v) { return value(sample, attempt, v); };
}

void Echelon::reduce(std::vector<Rational>& row) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    int p = pivots_[i];
    if (sgn(row[size_t(p)]) == 0) continue;
    Rational f = row[size_t(p)];
    const auto& r = rows_[i];
    for (int c = 0; c < cols_; ++c)
      if (sgn(r[size_t(c)]) != 0) row[size_t(c)] -= f * r[size_t(c)];
  }
}

bool Echelon::insert(std::vector<Rational> row) {
  reduce(row);
  int p = -1;
  for (int c = 0; c < cols_; ++c)
    if (sgn(row[size_t(c)]) != 0) {
      p = c;
      break;
    }
  if (p < 0) return false;
  Rational inv = 1 / row[size_t(p)];
  for (auto& x : row) x *= inv;
  rows_.push_back(std::move(row));
  pivots_.push_back(p);
  return true;
}

bool Echelon::in_span(std::vector<Rational> row) const {
  reduce(row);
  for (const auto& x : row)
    if (sgn(x) != 0) return false;
  return true;
}

int exact_rank(std::vector<std::vector<Rational>> rows, int cols) {
  Echelon e(cols);
  for (auto& r : rows) e.insert(std::move(r));
  return e.rank();
}

SymbolicRank symbolic_rank(const std::vector<VectorField>& gens, const JetSpace& space) {
  size_t R = gens.size(), C = size_t(space.dim());
  std::vector<std::vector<Expr>> M(R, std::vector<Expr>(C));
  for (size_t r = 0; r < R; ++r)
    for (const auto& [v, e] : gens[r].components()) {
      int c = space.index_of(v);
      if (c < 0) throw Error(ErrorKind::InvalidArgument, "field component outside the jet space");
      M[r][size_t(c)] = e;
    }
  SymbolicRank out;
  std::vector<bool> used(C, false);
  Expr prev(1);
  for (size_t step = 0; step < R; ++step) {
    // Simplest nonzero entry first so pivots stay small.
    std::tuple<int, size_t, unsigned, size_t, size_t> best{2, 0, 0, 0, 0};
    bool found = false;
    for (size_t r = step; r < R; ++r)
      for (size_t c = 0; c < C; ++c) {
        if (used[c] || M[r][c].is_zero()) continue;
        const Expr& e = M[r][c];
        auto key = std::make_tuple(e.is_constant() ? 0 : 1, e.num().size() + e.den().size(),
                                   e.num().total_degree() + e.den().total_degree(), r, c);
        if (!found || key < best) {
          best = key;
          found = true;
        }
      }
    if (!found) break;
    size_t pr = std::get<3>(best), pc = std::get<4>(best);
    std::swap(M[step], M[pr]);
    Expr p = M[step][pc];
    for (size_t r = step + 1; r < R; ++r) {
      Expr a = M[r][pc];
      for (size_t c = 0; c < C; ++c) {
        if (used[c] || c == pc) continue;
        Expr t = p * M[r][c];
        if (!a.is_zero() && !M[step][c].is_zero()) t -= a * M[step][c];
        M[r][c] = prev.is_constant() && prev.constant_value() == 1 ? t : t / prev;
      }
      M[r][pc] = Expr();
    }
    used[pc] = true;
    prev = p;
    out.pivots.push_back(p);
    ++out.rank;
  }
  return out;
}

std::vector<Poly> split_factors(const Expr& e) {
  std::vector<Poly> out;
  auto push = [&](const Poly& f) {
    if (f.is_constant()) return;
    Poly mf = monic(f);
    if (std::find(out.begin(), out.end(), mf) == out.end()) out.push_back(mf);
  };
  for (const Poly* p : {&e.num(), &e.den()}) {
    if (p->is_constant()) continue;
    Monomial g = p->terms().front().first;
    for (const auto& [m, c] : p->terms()) {
      Monomial ng;
      for (const auto& f : g.factors()) {
        unsigned x = std::min(f.exp, m.exponent(f.var));
        if (x) ng = ng * Monomial::of(f.var, x);
      }
      g = ng;
    }
    for (const auto& f : g.factors()) push(Poly::var(f.var));
    auto rest = exact_div(*p, Poly::monomial(g, 1));
    if (rest) push(*rest);
  }
  return out;
}

std::vector<Rational> RankEngine::evaluate(const VectorField& v, const JetSpace& space, int sample, int attempt) {
  std::vector<Rational> row(size_t(space.dim()));
  AtomFn atoms = sampler_.atoms(sample, attempt);
  for (const auto& [var, e] : v.components()) {
    int c = space.index_of(var);
    if (c < 0) throw Error(ErrorKind::InvalidArgument, "field component outside the jet space");
    row[size_t(c)] = eval_at(e, atoms);
  }
  return row;
}

RankEngine::Span RankEngine::span(const Distribution& d, const JetSpace& space) {
  Span s;
  s.eng_ = this;
  s.space_ = &space;
  for (int smp = 0; smp < opts_.samples; ++smp) {
    bool ok = false;
    for (int att = 0; att < opts_.max_resample && !ok; ++att) {
      try {
        Echelon e(space.dim());
        for (const auto& g : d.gens) e.insert(evaluate(g, space, smp, att));
        s.ech_.push_back(std::move(e));
        s.attempts_.push_back(att);
        ok = true;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::DenominatorVanishes) throw;
      }
    }
    if (!ok) throw Error(ErrorKind::SamplingExhausted, "every resample hit a vanishing denominator");
    s.rank_ = std::max(s.rank_, s.ech_.back().rank());
  }
  return s;
}

bool RankEngine::Span::contains(const VectorField& v) {
  if (v.is_zero()) return true;
  bool tested = false;
  for (size_t smp = 0; smp < ech_.size(); ++smp) {
    if (ech_[smp].rank() != rank_) continue;
    std::vector<Rational> row;
    try {
      row = eng_->evaluate(v, *space_, int(smp), attempts_[smp]);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::DenominatorVanishes) throw;
      continue;
    }
    tested = true;
    if (!ech_[smp].in_span(std::move(row))) return false;
  }
  if (!tested) throw Error(ErrorKind::SamplingExhausted, "membership test found no usable sample");
  return true;
}

int RankEngine::rank(const Distribution& d, const JetSpace& space) { return span(d, space).rank(); }

RankCertificate RankEngine::generic_rank(const Distribution& d, const JetSpace& space,
                                         const std::map<VarRef, Rational>* base_point) {
  RankCertificate cert;
  Span s = span(d, space);
  cert.rank = s.rank();
  for (size_t i = 0; i < s.ech_.size(); ++i)
    if (s.ech_[i].rank() == cert.rank) {
      cert.sample = int(i);
      cert.attempt = s.attempts_[i];
      break;
    }
  std::optional<SymbolicRank> sym;
  if (opts_.symbolic_check && space.dim() <= opts_.symbolic_max_dim) {
    sym = symbolic_rank(d.gens, space);
    cert.symbolic_rank = sym->rank;
    cert.rank = std::max(cert.rank, sym->rank);
  }
  if (base_point) {
    try {
      AtomFn atoms = half_angle_atoms(*base_point);
      Echelon e(space.dim());
      for (const auto& g : d.gens) {
        std::vector<Rational> row(size_t(space.dim()));
        for (const auto& [var, ex] : g.components()) row[size_t(space.index_of(var))] = eval_at(ex, atoms);
        e.insert(std::move(row));
      }
      cert.base_point_rank = e.rank();
    } catch (const Error&) {
      // trig at a non-zero angle or a pole at the base point: no base rank
    }
    if (cert.base_point_rank && *cert.base_point_rank < cert.rank) {
      if (!sym) sym = symbolic_rank(d.gens, space);
      AtomFn atoms = half_angle_atoms(*base_point);
      for (const auto& p : sym->pivots)
        for (const auto& f : split_factors(p)) {
          try {
            if (sgn(eval_poly(f, atoms)) == 0 &&
                std::find(cert.singular_factors.begin(), cert.singular_factors.end(), f) ==
                    cert.singular_factors.end())
              cert.singular_factors.push_back(f);
          } catch (const Error&) {
          }
        }
    }
  }
  return cert;
}

bool RankEngine::contains(const Distribution& d, const VectorField& v, const JetSpace& space) {
  return span(d, space).contains(v);
}

std::optional<std::pair<int, int>> RankEngine::involutivity_counterexample(const Distribution& d,
                                                                           const JetSpace& space) {
  Span s = span(d, space);
  if (s.rank() == space.dim()) return std::nullopt;
  for (size_t a = 0; a < d.gens.size(); ++a)
    for (size_t b = a + 1; b < d.gens.size(); ++b)
      if (!s.contains(lie_bracket(d.gens[a], d.gens[b]))) return std::make_pair(int(a), int(b));
  return std::nullopt;
}

Distribution RankEngine::involutive_closure(const Distribution& d, const JetSpace& space, int budget) {
  Distribution cur = d;
  for (int round = 0; round < budget; ++round) {
    Span s = span(cur, space);
    if (s.rank() == space.dim()) return cur;
    bool added = false;
    size_t count = cur.gens.size();
    for (size_t a = 0; a < count; ++a)
      for (size_t b = a + 1; b < count; ++b) {
        VectorField br = lie_bracket(cur.gens[a], cur.gens[b]);
        if (!s.contains(br)) {
          cur.add(br);
          s = span(cur, space);
          added = true;
        }
      }
    if (!added) return cur;
  }
  throw Error(ErrorKind::IterationBudgetExceeded, "involutive closure did not stabilise");
}

}  // namespace flatcheck
