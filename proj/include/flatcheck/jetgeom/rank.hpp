#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "flatcheck/jetgeom/jet.hpp"

namespace flatcheck {

struct RankOptions {
  uint64_t seed = 0;
  int samples = 5;
  int max_resample = 32;
  // Fraction-free symbolic elimination alongside sampling for dim <= symbolic_max_dim.
  bool symbolic_check = false;
  int symbolic_max_dim = 12;
};

// Deterministic pseudo-random rational points. A variable gets the same value
// at a given (sample, attempt) whatever space it is evaluated in.
class Sampler {
 public:
  explicit Sampler(uint64_t seed) : seed_(seed) {}
  Rational value(int sample, int attempt, const VarRef& atom);
  AtomFn atoms(int sample, int attempt);
  uint64_t seed() const { return seed_; }

 private:
  Rational base_value(int sample, int attempt, const VarRef& v);
  uint64_t seed_;
  std::map<std::tuple<int, int, uint64_t>, Rational> cache_;
};

// Row echelon form over Q; reduce() tests span membership.
class Echelon {
 public:
  explicit Echelon(int cols) : cols_(cols) {}
  // Returns true if the row was independent (and kept).
  bool insert(std::vector<Rational> row);
  bool in_span(std::vector<Rational> row) const;
  int rank() const { return int(rows_.size()); }

 private:
  void reduce(std::vector<Rational>& row) const;
  int cols_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<int> pivots_;
};

int exact_rank(std::vector<std::vector<Rational>> rows, int cols);

struct SymbolicRank {
  int rank = 0;
  std::vector<Expr> pivots;  // successive Bareiss pivots (leading minors)
};

// Fraction-free (Bareiss) elimination with exact zero tests.
SymbolicRank symbolic_rank(const std::vector<VectorField>& gens, const JetSpace& space);

struct RankCertificate {
  int rank = 0;
  int sample = -1;   // sample index that attained the rank
  int attempt = 0;
  std::optional<int> symbolic_rank;
  std::optional<int> base_point_rank;
  // Factors of the Bareiss pivots that vanish at the base point (set only
  // when the base point rank is lower than the generic rank).
  std::vector<Poly> singular_factors;
};

// Nonconstant factors of an expression: one per variable in the monomial
// content, plus the monic remainder of numerator and denominator.
std::vector<Poly> split_factors(const Expr& e);

class RankEngine {
 public:
  explicit RankEngine(RankOptions opts = {}) : opts_(opts), sampler_(opts.seed) {}
  const RankOptions& options() const { return opts_; }
  Sampler& sampler() { return sampler_; }

  int rank(const Distribution& d, const JetSpace& space);
  RankCertificate generic_rank(const Distribution& d, const JetSpace& space,
                               const std::map<VarRef, Rational>* base_point = nullptr);

  // Evaluated rows of d at every sample, for repeated membership queries.
  class Span {
   public:
    int rank() const { return rank_; }
    bool contains(const VectorField& v);

   private:
    friend class RankEngine;
    RankEngine* eng_ = nullptr;
    const JetSpace* space_ = nullptr;
    int rank_ = 0;
    std::vector<Echelon> ech_;
    std::vector<int> attempts_;
  };
  Span span(const Distribution& d, const JetSpace& space);

  bool contains(const Distribution& d, const VectorField& v, const JetSpace& space);
  // First non-contained bracket in lexicographic pair order.
  std::optional<std::pair<int, int>> involutivity_counterexample(const Distribution& d, const JetSpace& space);
  bool is_involutive(const Distribution& d, const JetSpace& space) {
    return !involutivity_counterexample(d, space);
  }
  // Adds brackets until involutive; throws IterationBudgetExceeded.
  Distribution involutive_closure(const Distribution& d, const JetSpace& space, int budget = 64);

  // Row of v at (sample, attempt); throws DenominatorVanishes.
  std::vector<Rational> evaluate(const VectorField& v, const JetSpace& space, int sample, int attempt);

 private:
  RankOptions opts_;
  Sampler sampler_;
};

}  // namespace flatcheck
