#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "flatcheck/errors.hpp"
#include "flatcheck/flatness/flatness.hpp"
#include "flatcheck/sysdsl/system.hpp"

using namespace flatcheck;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitFlat = 0;
constexpr int kExitNotFlat = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;

struct Config {
  std::string command;
  std::string path;
  uint64_t seed = 0;
  int samples = 5;
  int max_k = 0;
  int max_prolong = 0;
  int ansatz_degree = 2;
  bool json = false;
  bool trace = false;
  bool timings = false;
  std::string prolong;
  std::vector<std::string> fields;
  int pow = 1;
};

Json index_json(const MultiIndex& j) {
  Json a = Json::array();
  for (int c : j.v) {
    if (c == MultiIndex::kInf) a.push_back("inf");
    else a.push_back(c);
  }
  return a;
}

std::string index_text(const MultiIndex& j) {
  std::string s = "(";
  for (size_t i = 0; i < j.v.size(); ++i) {
    if (i) s += ",";
    s += j.v[i] == MultiIndex::kInf ? "inf" : std::to_string(j.v[i]);
  }
  return s + ")";
}

MultiIndex parse_prolong(const std::string& text, int m) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    int x = -1;
    try {
      x = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || x < 0) throw Error(ErrorKind::InvalidArgument, "bad --prolong component '" + item + "'");
    v.push_back(x);
  }
  if (int(v.size()) != m)
    throw Error(ErrorKind::InvalidArgument, "--prolong needs " + std::to_string(m) + " components");
  return MultiIndex(v);
}

Json report_json(const SystemDef& sys, const AnalysisReport& r) {
  auto nm = sys.namer();
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  bool flat = r.verdict == Verdict::P2Flat;
  j["j_min"] = flat ? index_json(r.j_min) : Json();
  j["input_permutation"] = flat ? Json(r.input_permutation) : Json();
  j["k_star"] = flat ? Json(r.k_star) : Json();
  j["kappa"] = flat ? Json(r.kappa) : Json();
  Json outs = Json::array();
  for (const auto& y : r.flat_outputs) outs.push_back(to_string(y, nm));
  j["flat_outputs"] = outs;
  Json trace = Json::array();
  for (const auto& t : r.traces)
    for (const auto& s : t.steps) {
      Json e;
      e["init"] = t.init.str(sys);
      e["k"] = s.k;
      e["sigma_delta"] = index_json(s.sigma_delta);
      e["sigma_gamma_delta"] = index_json(s.sigma_gamma_delta);
      e["witness_l"] = s.witness_l ? index_json(*s.witness_l) : Json();
      trace.push_back(e);
    }
  j["sigma_trace"] = trace;
  Json inits = Json::array();
  for (const auto& t : r.traces) {
    Json e;
    e["init"] = t.init.str(sys);
    e["outcome"] = t.outcome;
    e["j"] = t.j ? index_json(*t.j) : Json();
    e["certificate"] = t.certificate;
    inits.push_back(e);
  }
  j["initializations"] = inits;
  j["reason"] = r.reason;
  j["singular_locus"] = r.singular_locus;
  j["warnings"] = r.warnings;
  j["seed"] = r.seed;
  if (r.timings) {
    Json t = Json::object();
    for (const auto& [k, v] : r.timings_ms) t[k] = v;
    j["timings_ms"] = t;
  } else {
    j["timings_ms"] = Json();
  }
  return j;
}

void report_text(const SystemDef& sys, const AnalysisReport& r, bool trace, std::ostream& os) {
  auto nm = sys.namer();
  os << "system " << sys.name << " (n=" << sys.n() << ", m=" << sys.m() << ")\n";
  for (const auto& t : r.traces) {
    os << "initialization " << t.init.str(sys) << ": " << t.outcome;
    if (t.j) os << " j=" << index_text(*t.j);
    os << "\n";
    if (trace)
      for (const auto& s : t.steps) {
        os << "  k=" << s.k << " sigma_delta=" << index_text(s.sigma_delta)
           << " sigma_gamma_delta=" << index_text(s.sigma_gamma_delta);
        if (s.witness_l) os << " witness l=" << index_text(*s.witness_l);
        os << "\n";
      }
    if (!t.certificate.empty()) os << "  " << t.certificate << "\n";
  }
  os << "verdict: " << verdict_name(r.verdict) << "\n";
  os << "reason: " << r.reason << "\n";
  if (r.verdict == Verdict::P2Flat) {
    os << "j_min: " << index_text(r.j_min) << "\n";
    os << "k_star: " << r.k_star << "\n";
    os << "kappa:";
    for (int k : r.kappa) os << " " << k;
    os << "\n";
    for (const auto& y : r.flat_outputs) os << "flat output: " << to_string(y, nm) << "\n";
    for (const auto& f : r.singular_locus) os << "singular factor: " << f << "\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  if (r.timings)
    for (const auto& [k, v] : r.timings_ms) os << "time " << k << ": " << v << " ms\n";
}

AnalysisOptions options(const Config& c) {
  AnalysisOptions o;
  o.seed = c.seed;
  o.samples = c.samples;
  o.max_k = c.max_k;
  o.max_prolong = c.max_prolong;
  o.ansatz_degree = c.ansatz_degree;
  o.timings = c.timings;
  return o;
}

int cmd_analyze(const Config& c, const SystemDef& sys) {
  AnalysisReport r = analyze(sys, options(c));
  if (c.json) std::cout << report_json(sys, r).dump(2) << "\n";
  else report_text(sys, r, c.trace, std::cout);
  switch (r.verdict) {
    case Verdict::P2Flat: return kExitFlat;
    case Verdict::NotP2Flat: return kExitNotFlat;
    case Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

int cmd_verify(const Config& c, const SystemDef& sys) {
  if (sys.flat_outputs.empty()) {
    std::cerr << c.path << ": no flatoutput line\n";
    return kExitUsage;
  }
  MultiIndex j;
  if (!c.prolong.empty()) {
    j = parse_prolong(c.prolong, sys.m());
  } else {
    AnalysisOptions o = options(c);
    o.search_outputs = false;
    AnalysisReport r = analyze(sys, o);
    if (r.verdict != Verdict::P2Flat) {
      std::cerr << "no pure prolongation found: " << r.reason << "\n";
      return r.verdict == Verdict::NotP2Flat ? kExitNotFlat : kExitInconclusive;
    }
    j = r.j_min;
  }
  RankOptions ro;
  ro.seed = c.seed;
  ro.samples = c.samples;
  RankEngine eng(ro);
  VerifyResult v = verify_flat_output(sys, j, sys.flat_outputs, eng);
  if (c.json) {
    Json out;
    out["ok"] = v.ok;
    out["j"] = index_json(j);
    out["kappa"] = v.ok ? Json(v.kappa) : Json();
    out["reason"] = v.reason;
    out["seed"] = c.seed;
    std::cout << out.dump(2) << "\n";
  } else if (v.ok) {
    std::cout << "flat output verified at j=" << index_text(j) << ", kappa:";
    for (int k : v.kappa) std::cout << " " << k;
    std::cout << "\n";
  } else {
    std::cout << "rejected at j=" << index_text(j) << ": " << v.reason << "\n";
  }
  return v.ok ? kExitFlat : kExitNotFlat;
}

VectorField named_field(ProlongedSystem& ps, const std::string& name) {
  if (name == "g0") return ps.g0();
  if (name.size() > 1 && name[0] == 'g') {
    size_t used = 0;
    int i = -1;
    try {
      i = std::stoi(name.substr(1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used + 1 == name.size() && i >= 1 && i <= ps.m()) return ps.g(i - 1);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown field '" + name + "' (use g0, g1 .. g" + std::to_string(ps.m()) + ")");
}

int cmd_bracket(const Config& c, const SystemDef& sys) {
  if (c.fields.size() != 2) throw Error(ErrorKind::InvalidArgument, "bracket takes two fields");
  if (c.pow < 0) throw Error(ErrorKind::InvalidArgument, "--pow must be nonnegative");
  MultiIndex j = c.prolong.empty() ? MultiIndex::zeros(sys.m()) : parse_prolong(c.prolong, sys.m());
  ProlongedSystem ps(sys, j);
  VectorField v = named_field(ps, c.fields[0]);
  VectorField w = named_field(ps, c.fields[1]);
  VectorField r = ad_pow(v, w, c.pow);
  std::string text = r.is_zero() ? "0" : to_string(r, sys.namer());
  if (c.json) {
    Json out;
    out["field"] = text;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << text << "\n";
  }
  return 0;
}

int cmd_lint(const Config& c, const SystemDef& sys) {
  if (c.json) {
    Json out;
    out["system"] = sys.name;
    out["n"] = sys.n();
    out["m"] = sys.m();
    out["flat_outputs"] = sys.flat_outputs.size();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << sys.name << ": n=" << sys.n() << " m=" << sys.m() << " ok\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  if (const char* env = std::getenv("FLATCHECK_SEED")) {
    try {
      c.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "FLATCHECK_SEED is not an integer\n";
      return kExitUsage;
    }
  }
  CLI::App app{"Flatness by pure prolongation checker"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* s) {
    s->add_option("file", c.path, "system description (.flt)")->required();
    s->add_flag("--json", c.json, "JSON output");
    s->add_option("--seed", c.seed, "sampling seed");
    s->add_option("--samples", c.samples, "sample points per rank test")->check(CLI::PositiveNumber);
    s->add_option("--max-k", c.max_k, "filtration depth cap")->check(CLI::PositiveNumber);
    s->add_option("--max-prolong", c.max_prolong, "prolongation box cap")->check(CLI::PositiveNumber);
    s->add_option("--ansatz-degree", c.ansatz_degree, "flat output ansatz degree")->check(CLI::PositiveNumber);
    s->add_option("--prolong", c.prolong, "prolongation j1,j2,...");
    s->add_flag("--trace", c.trace, "print the sigma trace");
    s->add_flag("--timings", c.timings, "report phase timings");
  };
  for (const char* name : {"analyze", "verify", "lint"}) common(app.add_subcommand(name));
  CLI::App* br = app.add_subcommand("bracket", "ad-power of two fields");
  common(br);
  br->add_option("fields", c.fields, "two of g0, g1 .. gm")->expected(2);
  br->add_option("--pow", c.pow, "ad power (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  c.command = app.get_subcommands().front()->get_name();

  SystemDef sys;
  try {
    sys = load_system(c.path);
    validate(sys);
  } catch (const ParseError& e) {
    std::cerr << c.path << ":" << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << c.path << ": " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (c.command == "analyze") return cmd_analyze(c, sys);
    if (c.command == "verify") return cmd_verify(c, sys);
    if (c.command == "bracket") return cmd_bracket(c, sys);
    return cmd_lint(c, sys);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::InvalidArgument) return kExitUsage;
    return kExitInconclusive;
  }
}
