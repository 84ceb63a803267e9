#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flatcheck/prolong/prolonged.hpp"

namespace flatcheck {

struct AnalysisOptions {
  uint64_t seed = 0;
  int samples = 5;
  int max_k = 0;          // 0: n + m * max_prolong + 2
  int max_prolong = 0;    // 0: 2n
  int ansatz_degree = 2;
  bool search_outputs = true;
  bool timings = false;
};

struct StaticResult {
  bool linearizable = false;
  bool all_involutive = true;   // every G_k^(0) involutive up to stabilisation
  int first_noninvolutive = -1;
  std::pair<int, int> witness{-1, -1};
  std::vector<int> ranks;       // rank G_k^(0)
  int k_star = -1;
  std::vector<int> kappa;
};

// Every G_k^(0) involutive and rank n + m reached for some k <= n.
StaticResult static_linearizable(const SystemDef& sys, RankEngine& eng);

// rho_0 = ranks[0], rho_k = ranks[k] - ranks[k-1]; kappa_i = #{l : rho_l >= i}.
std::vector<int> brunovsky_indices(const std::vector<int>& ranks, int m);

struct CnsViolation {
  std::string condition;  // "i", "ii" or "iii"
  int k = -1;
  std::string detail;
};

struct CnsResult {
  bool ok = false;
  std::optional<CnsViolation> violation;
  int k_star = -1;
  std::vector<int> g_ranks;     // rank G_k^(j), k = 0..k_star+1
  std::vector<int> delta_ranks;
  std::vector<int> gamma_ranks;
  std::vector<int> kappa;
  // Independent route: all G_k^(j) involutive and full rank reached.
  bool g_route_ok = false;
};

CnsResult cns_check(const SystemDef& sys, const MultiIndex& j, RankEngine& eng, int max_k = 0);

enum class StartVariant { Standard, Eager };

// Channels in `kept` stay unprolonged; H_1 = {d/du_p, ad d/du_p : p in kept}.
struct Initialization {
  std::vector<int> kept;
  StartVariant variant = StartVariant::Standard;
  std::string str(const SystemDef& sys) const;
};

// Admissible initializations (H_1 involutive), in deterministic order.
std::vector<Initialization> initializations(const SystemDef& sys, RankEngine& eng);

struct SigmaValue {
  MultiIndex shown;      // 0 on unconstrained or kept channels, kInf if nothing qualifies
  MultiIndex effective;  // componentwise min of the qualifying set (lower bound when unconstrained)
  bool unconstrained = false;
  bool empty = false;
};

// Sigma search for one initialization over the box
// l_q in [lb, max(k+1, 2k+1, max_prolong)] on the prolonged channels.
class SigmaSearch {
 public:
  SigmaSearch(const SystemDef& sys, Initialization init, RankEngine& eng, int max_prolong);

  const Initialization& init() const { return init_; }
  int lower_bound() const { return init_.variant == StartVariant::Standard ? 2 : 1; }
  int box_limit(int k) const;
  // Distinct representatives of the box at step k (components clamped at 2k+1).
  std::vector<MultiIndex> box(int k) const;

  bool delta_involutive(const MultiIndex& l, int k);
  bool gamma_delta_ok(const MultiIndex& l, int k);
  SigmaValue sigma_delta(int k);
  SigmaValue sigma_gamma_delta(int k);
  ProlongedSystem& prolonged(const MultiIndex& l);

  // Readable witness that Delta_k^(l) is not involutive.
  std::string delta_witness(const MultiIndex& l, int k);

 private:
  MultiIndex clamp(const MultiIndex& l, int k) const;
  SigmaValue sigma(int k, bool gamma);

  const SystemDef* sys_;
  Initialization init_;
  RankEngine* eng_;
  int max_prolong_;
  std::vector<int> prolonged_channels_;
  std::map<MultiIndex, std::unique_ptr<ProlongedSystem>> systems_;
  std::map<std::pair<MultiIndex, int>, bool> delta_memo_;
  std::map<std::pair<MultiIndex, int>, bool> gd_memo_;
};

enum class Verdict { P2Flat, NotP2Flat, Inconclusive };
const char* verdict_name(Verdict v);

struct SigmaStep {
  int k = 0;
  MultiIndex sigma_delta;
  MultiIndex sigma_gamma_delta;
  std::optional<MultiIndex> witness_l;
};

struct InitTrace {
  Initialization init;
  std::vector<SigmaStep> steps;
  std::string outcome;  // "success", "failed", "budget"
  std::optional<MultiIndex> j;
  std::string certificate;
};

struct AnalysisReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  MultiIndex j_min;
  std::vector<int> input_permutation;  // 1-based, sorts j_min ascending
  int k_star = -1;
  std::vector<int> kappa;
  std::vector<Expr> flat_outputs;
  std::vector<InitTrace> traces;
  std::vector<std::string> singular_locus;
  std::vector<std::string> warnings;
  uint64_t seed = 0;
  std::map<std::string, double> timings_ms;
  bool timings = false;
};

AnalysisReport analyze(const SystemDef& sys, const AnalysisOptions& opts = {});

struct VerifyResult {
  bool ok = false;
  std::vector<int> kappa;       // kappa assigned to each output, in output order
  std::string reason;
};

// Annihilation <G_k, dy_i> = 0 (k <= kappa_i - 2), nondegeneracy at kappa_i - 1,
// and generic full rank of the Jacobian of (y_i, ..., y_i^(kappa_i - 1)).
VerifyResult verify_flat_output(const SystemDef& sys, const MultiIndex& j, const std::vector<Expr>& ys,
                                RankEngine& eng);

// Polynomial ansatz of total degree <= degree over X^(j); outputs ordered by kappa (descending).
std::optional<std::vector<Expr>> search_flat_outputs(const SystemDef& sys, const MultiIndex& j, int degree,
                                                     RankEngine& eng);

// Nonconstant Bareiss pivot factors of G_k^(j), k <= k_star, kept when the rank
// of some G_k^(j) drops at a sampled point of the factor's zero set.
std::vector<Poly> singular_factors(const SystemDef& sys, const MultiIndex& j, int k_star, RankEngine& eng);

}  // namespace flatcheck
