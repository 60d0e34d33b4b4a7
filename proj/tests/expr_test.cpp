#include "localfrac/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace localfrac;
using expr::Bindings;
using expr::Expression;
using expr::parse;

namespace {

// 5-point central finite difference, the independent check on diff().
double fd_derivative(const Expression& e, double t) {
  const double h = 1e-3 * std::max(1.0, std::abs(t));
  return (e.eval(t - 2 * h) - 8 * e.eval(t - h) + 8 * e.eval(t + h) - e.eval(t + 2 * h)) /
         (12 * h);
}

const std::vector<std::string>& corpus() {
  static const std::vector<std::string> c = {
      "t",       "t^2",       "t^3",          "t^0.5",  "sin(t)", "cos(t)",
      "exp(t)",  "ln(t)",     "1/(1+t^2)",    "t*sin(t)", "exp(-t)", "7"};
  return c;
}

struct Uniform {
  std::mt19937_64 rng;
  explicit Uniform(std::uint64_t seed) : rng(seed) {}
  double operator()(double lo, double hi) {
    return lo + (rng() >> 11) * 0x1.0p-53 * (hi - lo);
  }
};

}  // namespace

TEST(Parse, GrammarBasics) {
  EXPECT_EQ(parse("t^2 + sin(t)").render(), "t^2+sin(t)");
  EXPECT_DOUBLE_EQ(parse("t^2").eval(3.0), 9.0);
  EXPECT_DOUBLE_EQ(parse("ln(t)").eval(1.0), 0.0);
  EXPECT_DOUBLE_EQ(parse(" 2 * t + 1 ").eval(4.0), 9.0);
  EXPECT_DOUBLE_EQ(parse("2^3^2").eval(1.0), 512.0);    // right-assoc
  EXPECT_DOUBLE_EQ(parse("-t^2").eval(3.0), -9.0);      // ^ binds tighter than unary -
  EXPECT_DOUBLE_EQ(parse("(-2)^2").eval(1.0), 4.0);
  EXPECT_DOUBLE_EQ(parse("2*-3").eval(1.0), -6.0);
  const Expression e = parse("exp(t^-0.5)");
  EXPECT_NEAR(e.eval(4.0), std::exp(std::pow(4.0, -0.5)), 1e-15);
}

TEST(Parse, ErrorsCarryOffsets) {
  try {
    parse("3*");
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 2u);
  }
  try {
    parse("sin(t");
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 5u);
  }
  try {
    parse("2 + foo(t)");
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 4u);  // start of the unknown identifier
    EXPECT_NE(err.expected().find("foo"), std::string::npos);
  }
  EXPECT_THROW(parse("t+"), ParseError);
  EXPECT_THROW(parse("(t"), ParseError);
  EXPECT_THROW(parse("t)"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("x+1"), ParseError);  // x not admitted by default
}

TEST(Parse, ExtraVariables) {
  constexpr std::string_view vars[] = {"t", "x"};
  const Expression e = parse("x*t + x^2", vars);
  EXPECT_DOUBLE_EQ(e.eval(Bindings{{"t", 2.0}, {"x", 3.0}}), 15.0);
  EXPECT_THROW(e.eval(5.0), DomainError);  // x unbound
}

TEST(Eval, DomainErrorsIdentifyNode) {
  EXPECT_THROW(parse("1/t").eval(0.0), DomainError);
  EXPECT_THROW(parse("ln(t)").eval(0.0), DomainError);
  EXPECT_THROW(parse("ln(t-2)").eval(1.0), DomainError);
  EXPECT_THROW(parse("sqrt(t)").eval(-1.0), DomainError);
  EXPECT_THROW(parse("t^-1").eval(0.0), DomainError);
  try {
    parse("(t+1)/(t-3)").eval(3.0);
    FAIL();
  } catch (const DomainError& err) {
    EXPECT_NE(std::string(err.what()).find("t-3"), std::string::npos);
  }
}

TEST(Diff, PowerProductChainRules) {
  EXPECT_EQ(parse("t^3").diff().render(), "3*t^2");
  EXPECT_EQ(parse("sin(t)*t").diff().render(), "cos(t)*t+sin(t)");
  const Expression d = parse("exp(t^-0.5)").diff();
  // exp(t^-0.5) * (-0.5) * t^-1.5
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const double want = std::exp(std::pow(t, -0.5)) * -0.5 * std::pow(t, -1.5);
    EXPECT_NEAR(d.eval(t), want, 1e-12 * std::abs(want));
  }
}

TEST(Diff, UnsupportedForms) {
  EXPECT_THROW(parse("t^t").diff(), UnsupportedFormError);
  EXPECT_THROW(parse("2^sin(t)").diff(), UnsupportedFormError);
  EXPECT_NO_THROW(parse("t^2").diff());
  // |t|' = t/|t| * 1 -> division by zero exactly at 0
  EXPECT_THROW(parse("abs(t)").diff().eval(0.0), DomainError);
  EXPECT_DOUBLE_EQ(parse("abs(t)").diff().eval(2.0), 1.0);
  EXPECT_DOUBLE_EQ(parse("abs(t)").diff().eval(-2.0), -1.0);
}

TEST(Diff, OtherVariablesAreConstants) {
  constexpr std::string_view vars[] = {"t", "eps", "alpha"};
  const Expression p = parse("t + eps*t^(1-alpha)", vars);
  const Expression dp = p.diff("eps");
  EXPECT_DOUBLE_EQ(dp.eval(Bindings{{"t", 4.0}, {"alpha", 0.5}}), 2.0);  // t^0.5
  // exponent depending on the diff variable is refused
  EXPECT_THROW(p.diff("alpha"), UnsupportedFormError);
}

TEST(Diff, MatchesFiniteDifferencesOnCorpus) {
  Uniform u(987654321);
  int checked = 0;
  while (checked < 200) {
    for (const std::string& src : corpus()) {
      const Expression e = parse(src);
      const Expression de = e.diff();
      const double t = u(0.3, 4.0);
      const double got = de.eval(t);
      const double want = fd_derivative(e, t);
      EXPECT_NEAR(got, want, 1e-6 * std::max(1.0, std::abs(want)))
          << src << " at t = " << t;
      ++checked;
    }
  }
}

TEST(Diff, IsPurelyStructural) {
  // differentiating a form whose evaluation would fail must not throw
  const Expression e = parse("ln(t-10)/t");
  EXPECT_NO_THROW(e.diff());
  EXPECT_THROW(e.eval(1.0), DomainError);
}

TEST(Render, RoundTripsThroughParser) {
  Uniform u(13579);
  for (const std::string& src : corpus()) {
    const Expression e = parse(src);
    const Expression d = e.diff();
    const Expression e2 = parse(e.render());
    const Expression d2 = parse(d.render());
    for (int i = 0; i < 20; ++i) {
      const double t = u(0.3, 4.0);
      EXPECT_DOUBLE_EQ(e.eval(t), e2.eval(t)) << src;
      EXPECT_DOUBLE_EQ(d.eval(t), d2.eval(t)) << "d/dt " << src;
    }
  }
  // negative-literal exponents and bases survive a round trip
  const Expression tricky = expr::pow(Expression::constant(-2.0), 2.0) *
                            expr::pow(Expression::variable("t"), -0.5);
  const Expression back = parse(tricky.render());
  EXPECT_DOUBLE_EQ(tricky.eval(4.0), back.eval(4.0));
}

TEST(Substitute, ComposesTrees) {
  const Expression f = parse("sin(t)");
  const Expression g = parse("t^2");
  const Expression fg = f.substitute("t", g);
  EXPECT_NEAR(fg.eval(2.0), std::sin(4.0), 1e-15);
  EXPECT_EQ(fg.render(), "sin(t^2)");
}

TEST(Simplify, LightRulesKeepTreesSmall) {
  EXPECT_EQ(parse("t").diff().render(), "1");
  EXPECT_EQ(parse("7").diff().render(), "0");
  EXPECT_EQ((Expression::constant(0.0) * parse("exp(t)")).render(), "0");
  EXPECT_EQ((parse("t^2") + Expression::constant(0.0)).render(), "t^2");
  EXPECT_EQ((Expression::constant(1.0) * parse("cos(t)")).render(), "cos(t)");
  EXPECT_EQ(parse("2*3").render(), "6");
}
