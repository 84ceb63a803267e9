#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flatcheck/expr/expr.hpp"

namespace flatcheck {

// Control-affine system xdot = f(x, u, params) read from a .flt file.
struct SystemDef {
  std::string name = "system";
  std::vector<std::string> states;
  std::vector<std::string> inputs;
  std::vector<std::string> params;  // sorted by name; VarRef::param(i) indexes this
  std::vector<std::optional<Rational>> param_values;
  std::vector<Expr> drift;          // drift[i] = xdot_i
  std::vector<Expr> flat_outputs;   // optional candidate outputs
  std::map<VarRef, Rational> point; // explicit base point entries

  int n() const { return int(states.size()); }
  int m() const { return int(inputs.size()); }

  std::string var_name(const VarRef& v) const;
  NameFn namer() const;
  // Resolves x1, u1, u1'', eps ... ; nullopt if undeclared.
  std::optional<VarRef> resolve(const std::string& ident) const;

  // Base point: states and inputs 0, params their declared value (1 otherwise),
  // then the explicit point lines. Trig bases at 0 get half-angle 0.
  std::map<VarRef, Rational> base_point(int max_order) const;

  std::string str(const Expr& e) const { return to_string(e, namer()); }

  // DSL text that parses back to an identical system.
  std::string render() const;
};

SystemDef parse_system(const std::string& text);
SystemDef load_system(const std::string& path);

// Expression in the vocabulary of sys. Input derivatives (u1') are
// accepted only when allow_input_derivatives is set.
Expr parse_expr(const std::string& text, const SystemDef& sys, bool allow_input_derivatives = true);

// Throws InvalidSystem unless 1 <= n, 1 <= m <= n, names unique, drift complete.
void validate(const SystemDef& sys);

}  // namespace flatcheck
