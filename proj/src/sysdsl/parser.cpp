#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "flatcheck/errors.hpp"
#include "flatcheck/sysdsl/system.hpp"

namespace flatcheck {

std::string SystemDef::var_name(const VarRef& v) const {
  switch (v.kind) {
    case VarKind::State:
      if (v.index < n()) return states[v.index];
      break;
    case VarKind::Input:
      if (v.index < m()) return inputs[v.index] + std::string(v.order, '\'');
      break;
    case VarKind::Param:
      if (v.index < int(params.size())) return params[v.index];
      break;
  }
  return default_name(v);
}

NameFn SystemDef::namer() const {
  return [this](const VarRef& v) { return var_name(v); };
}

std::optional<VarRef> SystemDef::resolve(const std::string& ident) const {
  size_t primes = 0;
  while (primes < ident.size() && ident[ident.size() - 1 - primes] == '\'') ++primes;
  std::string base = ident.substr(0, ident.size() - primes);
  for (int i = 0; i < m(); ++i)
    if (inputs[i] == base) return VarRef::input(i, int(primes));
  if (primes) return std::nullopt;
  for (int i = 0; i < n(); ++i)
    if (states[i] == base) return VarRef::state(i);
  for (size_t i = 0; i < params.size(); ++i)
    if (params[i] == base) return VarRef::param(int(i));
  return std::nullopt;
}

std::map<VarRef, Rational> SystemDef::base_point(int max_order) const {
  std::map<VarRef, Rational> p;
  for (int i = 0; i < n(); ++i) p[VarRef::state(i)] = 0;
  for (int i = 0; i < m(); ++i)
    for (int k = 0; k <= max_order; ++k) p[VarRef::input(i, k)] = 0;
  for (size_t i = 0; i < params.size(); ++i)
    p[VarRef::param(int(i))] = param_values[i] ? *param_values[i] : Rational(1);
  for (const auto& [v, q] : point) p[v] = q;
  std::vector<VarRef> bases;
  for (const auto& [v, q] : p)
    if (sgn(q) == 0) bases.push_back(v);
  for (const auto& v : bases) p[v.half_tan()] = 0;
  return p;
}

std::string SystemDef::render() const {
  std::ostringstream os;
  auto nm = namer();
  os << "system " << name << "\n";
  os << "state";
  for (const auto& s : states) os << " " << s;
  os << "\ninput";
  for (const auto& u : inputs) os << " " << u;
  os << "\n";
  for (size_t i = 0; i < params.size(); ++i) {
    os << "param " << params[i];
    if (param_values[i]) os << " = " << rational_string(*param_values[i]);
    os << "\n";
  }
  for (int i = 0; i < n(); ++i) os << "dot " << states[i] << " = " << to_string(drift[i], nm) << "\n";
  if (!flat_outputs.empty()) {
    os << "flatoutput ";
    for (size_t i = 0; i < flat_outputs.size(); ++i) os << (i ? ", " : "") << to_string(flat_outputs[i], nm);
    os << "\n";
  }
  for (const auto& [v, q] : point) os << "point " << var_name(v) << " = " << rational_string(q) << "\n";
  return os.str();
}

namespace {

enum class Tok { Ident, Number, Op, End };

struct Token {
  Tok kind;
  std::string text;
  int col;
};

std::vector<Token> lex(const std::string& line, int lineno) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    int col = int(i) + 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      while (j < line.size() && line[j] == '\'') ++j;
      out.push_back({Tok::Ident, line.substr(i, j - i), col});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back({Tok::Number, line.substr(i, j - i), col});
      i = j;
    } else if (std::string("+-*/^()=,").find(c) != std::string::npos) {
      out.push_back({Tok::Op, std::string(1, c), col});
      ++i;
    } else {
      throw ParseError(ErrorKind::SyntaxError, lineno, col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", int(line.size()) + 1});
  return out;
}

class Cursor {
 public:
  Cursor(std::vector<Token> toks, int lineno) : t_(std::move(toks)), line_(lineno) {}
  const Token& peek() const { return t_[i_]; }
  Token next() { return t_[i_ == t_.size() - 1 ? i_ : i_++]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool accept_op(const std::string& op) {
    if (peek().kind == Tok::Op && peek().text == op) {
      ++i_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of line" : "'" + t.text + "'";
    throw ParseError(ErrorKind::SyntaxError, line_, t.col, "expected " + expected + ", got " + got);
  }
  void expect_op(const std::string& op) {
    if (!accept_op(op)) fail("'" + op + "'");
  }
  Token expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(what);
    return next();
  }
  int line() const { return line_; }

 private:
  std::vector<Token> t_;
  size_t i_ = 0;
  int line_;
};

Rational parse_rational(Cursor& c) {
  bool neg = c.accept_op("-");
  Token num = c.expect(Tok::Number, "rational literal");
  Rational q(num.text);
  if (c.accept_op("/")) {
    Token den = c.expect(Tok::Number, "denominator");
    Rational d(den.text);
    if (sgn(d) == 0) throw ParseError(ErrorKind::DivisionByZero, c.line(), den.col, "zero denominator");
    q /= d;
  }
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

class ExprParser {
 public:
  ExprParser(Cursor& c, const SystemDef& sys, bool allow_derivs) : c_(c), sys_(sys), derivs_(allow_derivs) {}

  Expr expr() {
    Expr e = term();
    while (true) {
      if (c_.accept_op("+")) e = e + term();
      else if (c_.accept_op("-")) e = e - term();
      else return e;
    }
  }

 private:
  Expr term() {
    Expr e = unary();
    while (true) {
      if (c_.accept_op("*")) {
        e = e * unary();
      } else if (c_.peek().kind == Tok::Op && c_.peek().text == "/") {
        int col = c_.next().col;
        Expr d = unary();
        if (d.is_zero()) throw ParseError(ErrorKind::DivisionByZero, c_.line(), col, "division by zero");
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (c_.accept_op("-")) return -unary();
    return power();
  }

  Expr power() {
    Expr b = atom();
    if (c_.accept_op("^")) {
      Token e = c_.expect(Tok::Number, "nonnegative integer exponent");
      b = b.pow(unsigned(std::stoul(e.text)));
    }
    return b;
  }

  Expr atom() {
    const Token& t = c_.peek();
    if (t.kind == Tok::Number) return Expr(Rational(c_.next().text));
    if (t.kind == Tok::Op && t.text == "(") {
      c_.next();
      Expr e = expr();
      c_.expect_op(")");
      return e;
    }
    if (t.kind == Tok::Ident) {
      Token id = c_.next();
      if (id.text == "sin" || id.text == "cos") {
        c_.expect_op("(");
        int col = c_.peek().col;
        Expr arg = expr();
        c_.expect_op(")");
        const Poly& p = arg.num();
        bool plain = arg.den().is_one() && p.size() == 1 && p.lead_coeff() == 1 &&
                     p.lead_mono().factors().size() == 1 && p.lead_mono().factors()[0].exp == 1 &&
                     !p.lead_mono().factors()[0].var.is_trig();
        if (!plain)
          throw ParseError(ErrorKind::UnsupportedTrigComposition, c_.line(), col,
                           "trig argument must be a single variable");
        VarRef v = p.lead_mono().factors()[0].var;
        return Expr::var(id.text == "sin" ? v.sin() : v.cos());
      }
      auto v = sys_.resolve(id.text);
      if (!v) throw ParseError(ErrorKind::UndeclaredIdentifier, c_.line(), id.col, "undeclared '" + id.text + "'");
      if (v->kind == VarKind::Input && v->order > 0 && !derivs_)
        throw ParseError(ErrorKind::HigherInputDerivativeInDrift, c_.line(), id.col,
                         "input derivative '" + id.text + "' in drift");
      return Expr::var(*v);
    }
    c_.fail("expression");
  }

  Cursor& c_;
  const SystemDef& sys_;
  bool derivs_;
};

bool valid_ident(const std::string& s) {
  return !s.empty() && s.back() != '\'' && s != "sin" && s != "cos";
}

}  // namespace

Expr parse_expr(const std::string& text, const SystemDef& sys, bool allow_input_derivatives) {
  Cursor c(lex(text, 1), 1);
  ExprParser p(c, sys, allow_input_derivatives);
  Expr e = p.expr();
  if (!c.at_end()) c.fail("operator or end of expression");
  return e;
}

void validate(const SystemDef& sys) {
  if (sys.n() < 1) throw Error(ErrorKind::InvalidSystem, "no states declared");
  if (sys.m() < 1) throw Error(ErrorKind::InvalidSystem, "no inputs declared");
  if (sys.m() > sys.n()) throw Error(ErrorKind::InvalidSystem, "more inputs than states");
  std::set<std::string> seen;
  for (const auto* names : {&sys.states, &sys.inputs, &sys.params})
    for (const auto& s : *names)
      if (!seen.insert(s).second) throw Error(ErrorKind::InvalidSystem, "name '" + s + "' declared twice");
  if (int(sys.drift.size()) != sys.n()) throw Error(ErrorKind::MissingEquation, "drift incomplete");
}

SystemDef parse_system(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) lines.push_back(l);
  }
  SystemDef sys;
  std::set<std::string> names;
  struct ParamDecl {
    std::string name;
    std::optional<Rational> value;
  };
  std::vector<ParamDecl> params;
  bool any = false;

  auto declare = [&](const Token& t, int lineno) {
    if (!valid_ident(t.text)) throw ParseError(ErrorKind::SyntaxError, lineno, t.col, "expected identifier");
    if (!names.insert(t.text).second)
      throw ParseError(ErrorKind::InvalidSystem, lineno, t.col, "name '" + t.text + "' declared twice");
  };

  // Declarations first so equations may appear anywhere.
  for (size_t li = 0; li < lines.size(); ++li) {
    int lineno = int(li) + 1;
    Cursor c(lex(lines[li], lineno), lineno);
    if (c.at_end()) continue;
    any = true;
    Token kw = c.expect(Tok::Ident, "keyword");
    if (kw.text == "system") {
      sys.name = c.expect(Tok::Ident, "system name").text;
      if (!c.at_end()) c.fail("end of line");
    } else if (kw.text == "state" || kw.text == "input") {
      if (c.at_end()) c.fail("identifier");
      while (!c.at_end()) {
        Token t = c.expect(Tok::Ident, "identifier");
        declare(t, lineno);
        (kw.text == "state" ? sys.states : sys.inputs).push_back(t.text);
      }
    } else if (kw.text == "param") {
      Token t = c.expect(Tok::Ident, "identifier");
      declare(t, lineno);
      ParamDecl d{t.text, std::nullopt};
      if (c.accept_op("=")) d.value = parse_rational(c);
      if (!c.at_end()) c.fail("end of line");
      params.push_back(d);
    } else if (kw.text != "dot" && kw.text != "flatoutput" && kw.text != "point") {
      throw ParseError(ErrorKind::SyntaxError, lineno, kw.col,
                       "expected one of system, state, input, param, dot, flatoutput, point");
    }
  }
  if (!any) throw ParseError(ErrorKind::SyntaxError, 1, 1, "expected a system description, got empty input");

  std::sort(params.begin(), params.end(), [](const ParamDecl& a, const ParamDecl& b) { return a.name < b.name; });
  for (auto& p : params) {
    sys.params.push_back(p.name);
    sys.param_values.push_back(p.value);
  }

  std::vector<std::optional<Expr>> drift(sys.states.size());
  for (size_t li = 0; li < lines.size(); ++li) {
    int lineno = int(li) + 1;
    Cursor c(lex(lines[li], lineno), lineno);
    if (c.at_end()) continue;
    Token kw = c.next();
    if (kw.text == "dot") {
      Token t = c.expect(Tok::Ident, "state name");
      auto v = sys.resolve(t.text);
      if (!v || v->kind != VarKind::State)
        throw ParseError(ErrorKind::UndeclaredIdentifier, lineno, t.col, "'" + t.text + "' is not a state");
      if (drift[v->index])
        throw ParseError(ErrorKind::DuplicateEquation, lineno, kw.col, "second equation for '" + t.text + "'");
      c.expect_op("=");
      ExprParser p(c, sys, false);
      drift[v->index] = p.expr();
      if (!c.at_end()) c.fail("operator or end of line");
    } else if (kw.text == "flatoutput") {
      do {
        ExprParser p(c, sys, true);
        sys.flat_outputs.push_back(p.expr());
      } while (c.accept_op(","));
      if (!c.at_end()) c.fail("',' or end of line");
    } else if (kw.text == "point") {
      Token t = c.expect(Tok::Ident, "identifier");
      auto v = sys.resolve(t.text);
      if (!v) throw ParseError(ErrorKind::UndeclaredIdentifier, lineno, t.col, "undeclared '" + t.text + "'");
      c.expect_op("=");
      sys.point[*v] = parse_rational(c);
      if (!c.at_end()) c.fail("end of line");
    }
  }

  if (sys.states.empty()) throw ParseError(ErrorKind::InvalidSystem, 1, 1, "no states declared");
  if (sys.inputs.empty()) throw ParseError(ErrorKind::InvalidSystem, 1, 1, "no inputs declared");
  if (sys.m() > sys.n()) throw ParseError(ErrorKind::InvalidSystem, 1, 1, "more inputs than states");
  for (size_t i = 0; i < drift.size(); ++i) {
    if (!drift[i])
      throw ParseError(ErrorKind::MissingEquation, int(lines.size()), 1, "no equation for '" + sys.states[i] + "'");
    sys.drift.push_back(*drift[i]);
  }
  return sys;
}

SystemDef load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

}  // namespace flatcheck
