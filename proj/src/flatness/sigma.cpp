#include <algorithm>

#include "flatcheck/errors.hpp"
#include "flatcheck/flatness/flatness.hpp"

namespace flatcheck {

std::string Initialization::str(const SystemDef& sys) const {
  std::string s = "keep {";
  for (size_t i = 0; i < kept.size(); ++i) s += (i ? "," : "") + sys.inputs[size_t(kept[i])];
  s += "}";
  s += variant == StartVariant::Standard ? " standard" : " eager";
  return s;
}

std::vector<Initialization> initializations(const SystemDef& sys, RankEngine& eng) {
  std::vector<Initialization> out;
  int m = sys.m();
  ProlongedSystem p0(sys, MultiIndex::zeros(m));
  std::vector<std::vector<int>> subsets;
  for (int size = 1; size < m; ++size)
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      if (__builtin_popcount(mask) != size) continue;
      std::vector<int> s;
      for (int i = 0; i < m; ++i)
        if (mask & (1u << i)) s.push_back(i);
      subsets.push_back(s);
    }
  std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  for (const auto& s : subsets) {
    Distribution h;
    for (int p : s) {
      h.add(p0.ad_u0(p, 0));
      h.add(p0.ad_u0(p, 1));
    }
    if (!eng.is_involutive(h, p0.space())) continue;
    out.push_back({s, StartVariant::Standard});
    out.push_back({s, StartVariant::Eager});
  }
  return out;
}

SigmaSearch::SigmaSearch(const SystemDef& sys, Initialization init, RankEngine& eng, int max_prolong)
    : sys_(&sys), init_(std::move(init)), eng_(&eng), max_prolong_(max_prolong) {
  for (int i = 0; i < sys.m(); ++i)
    if (std::find(init_.kept.begin(), init_.kept.end(), i) == init_.kept.end()) prolonged_channels_.push_back(i);
}

int SigmaSearch::box_limit(int k) const { return std::max({k + 1, 2 * k + 1, max_prolong_}); }

MultiIndex SigmaSearch::clamp(const MultiIndex& l, int k) const {
  // Beyond 2k+1 neither Delta_k nor the [Gamma_k, Delta_k] condition depends on l_q.
  MultiIndex r = l;
  for (int q : prolonged_channels_) r[q] = std::min(r[q], 2 * k + 1);
  return r;
}

std::vector<MultiIndex> SigmaSearch::box(int k) const {
  int lo = lower_bound();
  int hi = std::min(box_limit(k), 2 * k + 1);
  std::vector<MultiIndex> out;
  if (hi < lo) hi = lo;
  MultiIndex cur = MultiIndex::zeros(sys_->m());
  for (int q : prolonged_channels_) cur[q] = lo;
  while (true) {
    out.push_back(cur);
    int pos = int(prolonged_channels_.size()) - 1;
    while (pos >= 0) {
      int q = prolonged_channels_[size_t(pos)];
      if (cur[q] < hi) {
        ++cur[q];
        break;
      }
      cur[q] = lo;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

ProlongedSystem& SigmaSearch::prolonged(const MultiIndex& l) {
  auto it = systems_.find(l);
  if (it == systems_.end()) it = systems_.emplace(l, std::make_unique<ProlongedSystem>(*sys_, l)).first;
  return *it->second;
}

bool SigmaSearch::delta_involutive(const MultiIndex& l, int k) {
  MultiIndex c = clamp(l, k);
  auto key = std::make_pair(c, k);
  auto it = delta_memo_.find(key);
  if (it != delta_memo_.end()) return it->second;
  ProlongedSystem& ps = prolonged(c);
  bool ok = eng_->is_involutive(ps.Delta(k), ps.space());
  delta_memo_[key] = ok;
  return ok;
}

bool SigmaSearch::gamma_delta_ok(const MultiIndex& l, int k) {
  MultiIndex c = clamp(l, k);
  auto key = std::make_pair(c, k);
  auto it = gd_memo_.find(key);
  if (it != gd_memo_.end()) return it->second;
  ProlongedSystem& ps = prolonged(c);
  Distribution delta = ps.Delta(k), gamma = ps.Gamma(k);
  auto span = eng_->span(delta, ps.space());
  bool ok = true;
  for (const auto& a : gamma.gens) {
    for (const auto& b : delta.gens)
      if (!span.contains(lie_bracket(a, b))) {
        ok = false;
        break;
      }
    if (!ok) break;
  }
  gd_memo_[key] = ok;
  return ok;
}

SigmaValue SigmaSearch::sigma(int k, bool gamma) {
  std::vector<MultiIndex> reps = box(k);
  std::vector<MultiIndex> sat;
  for (const auto& l : reps)
    if (gamma ? gamma_delta_ok(l, k) : delta_involutive(l, k)) sat.push_back(l);
  SigmaValue out;
  int m = sys_->m();
  out.shown = MultiIndex::zeros(m);
  out.effective = MultiIndex::zeros(m);
  if (sat.empty()) {
    out.empty = true;
    for (int q : prolonged_channels_) out.shown[q] = out.effective[q] = MultiIndex::kInf;
    return out;
  }
  MultiIndex mn = sat.front();
  for (const auto& l : sat) mn = cmin(mn, l);
  out.effective = mn;
  out.unconstrained = sat.size() == reps.size();
  if (!out.unconstrained) out.shown = mn;
  return out;
}

SigmaValue SigmaSearch::sigma_delta(int k) { return sigma(k, false); }
SigmaValue SigmaSearch::sigma_gamma_delta(int k) { return sigma(k, true); }

std::string SigmaSearch::delta_witness(const MultiIndex& l, int k) {
  ProlongedSystem& ps = prolonged(clamp(l, k));
  Distribution d = ps.Delta(k);
  auto ce = eng_->involutivity_counterexample(d, ps.space());
  if (!ce) return "";
  auto nm = sys_->namer();
  const auto& a = d.gens[size_t(ce->first)];
  const auto& b = d.gens[size_t(ce->second)];
  return "[" + to_string(a, nm) + ", " + to_string(b, nm) + "] = " + to_string(lie_bracket(a, b), nm);
}

}  // namespace flatcheck
