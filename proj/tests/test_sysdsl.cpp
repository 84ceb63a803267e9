#include <gtest/gtest.h>

#include <cctype>
#include <fstream>
#include <sstream>

#include "flatcheck/errors.hpp"
#include "flatcheck/sysdsl/system.hpp"
#include "support.hpp"

using namespace flatcheck;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    SystemDef s = parse_system(text);
    validate(s);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return ErrorKind::InvalidArgument;
}

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Token {
  size_t pos, len;
  std::string text;
};

// Lexical tokens outside comments.
std::vector<Token> tokens(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t b = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      while (i < s.size() && s[i] == '\'') ++i;
      out.push_back({b, i - b, s.substr(b, i - b)});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t b = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({b, i - b, s.substr(b, i - b)});
    } else {
      out.push_back({i, 1, std::string(1, c)});
      ++i;
    }
  }
  return out;
}

bool opens_expression(const std::string& t) { return t == "=" || t == "," || t == "("; }

}  // namespace

TEST(Parse, ChainedFixture) {
  SystemDef s = load_system(test::fixture("chained.flt"));
  EXPECT_EQ(s.n(), 6);
  EXPECT_EQ(s.m(), 2);
  EXPECT_EQ(s.name, "chained");
  EXPECT_EQ(s.str(s.drift[5]), "u1*u2");
  ASSERT_EQ(s.flat_outputs.size(), 2u);
  EXPECT_EQ(s.flat_outputs[1], parse_expr("x3 - x22*u1 + x21*u1'", s));
}

TEST(Parse, PendulumHasTrigAndParams) {
  SystemDef s = load_system(test::fixture("pendulum.flt"));
  EXPECT_EQ(s.n(), 6);
  EXPECT_EQ(s.m(), 2);
  ASSERT_EQ(s.params.size(), 1u);
  EXPECT_EQ(s.params[0], "eps");
  bool trig = false;
  for (const auto& v : s.drift[5].vars()) trig = trig || v.is_trig();
  EXPECT_TRUE(trig);
}

TEST(Parse, Errors) {
  EXPECT_EQ(kind_of("system a\nstate x1 x2\ninput u\ndot x1 = x2\n"), ErrorKind::MissingEquation);
  EXPECT_EQ(kind_of("system a\nstate x1\ninput u\ndot x1 = u\ndot x1 = u\n"), ErrorKind::DuplicateEquation);
  EXPECT_EQ(kind_of("system a\nstate x1\ninput u\ndot x1 = v\n"), ErrorKind::UndeclaredIdentifier);
  EXPECT_EQ(kind_of("system a\nstate x1\ninput u\ndot x1 = u'\n"), ErrorKind::HigherInputDerivativeInDrift);
  EXPECT_EQ(kind_of("system a\nstate x1\ninput u\ndot x1 = u +\n"), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of("system a\nstate x1\ninput u\ndot x1 = sin(u + x1)\n"), ErrorKind::UnsupportedTrigComposition);
  EXPECT_EQ(kind_of(""), ErrorKind::SyntaxError);
}

TEST(Parse, SyntaxErrorPosition) {
  try {
    parse_system("system a\nstate x1\ninput u\ndot x1 = u * * x1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.col(), 14);
  }
}

TEST(Parse, PrecedenceAndPowers) {
  SystemDef s = parse_system("system a\nstate x y\ninput u\ndot x = -x^2\ndot y = 2/3*u - (x - y)^2\n");
  Expr x = Expr::var(VarRef::state(0)), y = Expr::var(VarRef::state(1));
  EXPECT_EQ(s.drift[0], -(x * x));
  EXPECT_EQ(s.drift[1], Expr(Rational(2, 3)) * Expr::var(VarRef::input(0, 0)) - (x - y) * (x - y));
}

TEST(Parse, RoundTripRandomSystems) {
  test::Gen gen(21);
  for (int t = 0; t < 200; ++t) {
    int n = gen.uniform(1, 4), m = gen.uniform(1, n);
    SystemDef s = gen.system(n, m);
    if (gen.coin()) {
      s.params = {"a", "b"};
      s.param_values = {test::q(gen.uniform(1, 9), gen.uniform(1, 4)), std::nullopt};
      s.drift[0] = s.drift[0] * Expr::var(VarRef::param(0)) + Expr::var(VarRef::param(1));
    }
    SystemDef r = parse_system(s.render());
    EXPECT_EQ(r.states, s.states);
    EXPECT_EQ(r.inputs, s.inputs);
    EXPECT_EQ(r.params, s.params);
    EXPECT_EQ(r.param_values, s.param_values);
    ASSERT_EQ(r.drift.size(), s.drift.size());
    for (size_t i = 0; i < s.drift.size(); ++i) EXPECT_EQ(r.drift[i], s.drift[i]) << s.render();
    EXPECT_EQ(r.render(), s.render());
  }
}

// Every single-token deletion is rejected, except deletions that turn a binary minus
// into a unary one, drop a unary minus, or strip sin/cos off a parenthesised
// argument: those leave a well-formed file.
TEST(Parse, TokenDeletionIsRejected) {
  for (const char* f : {"chained.flt", "driftless.flt", "clm.flt", "pendulum.flt", "three_input.flt"}) {
    std::string text = read(test::fixture(f));
    auto toks = tokens(text);
    for (size_t i = 0; i < toks.size(); ++i) {
      std::string mutated = text;
      mutated.replace(toks[i].pos, toks[i].len, std::string(toks[i].len, ' '));
      std::string prev = i ? toks[i - 1].text : "";
      std::string next = i + 1 < toks.size() ? toks[i + 1].text : "";
      bool unary_minus = toks[i].text == "-" && opens_expression(prev);
      bool minus_becomes_unary = opens_expression(prev) && next == "-";
      bool trig_name = (toks[i].text == "sin" || toks[i].text == "cos") && next == "(";
      bool ok = true;
      try {
        validate(parse_system(mutated));
      } catch (const Error&) {
        ok = false;
      }
      if (ok)
        EXPECT_TRUE(unary_minus || minus_becomes_unary || trig_name)
            << f << ": deleting token " << i << " '" << toks[i].text << "' still parses";
    }
  }
}
