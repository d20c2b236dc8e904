#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "plevy/error.hpp"
#include "plevy/expression.hpp"

using namespace plevy;

TEST(Expression, SpecExamples) {
  EXPECT_NEAR(Expression::parse("cos(pi*x)")(1.0), -1.0, 1e-15);
  EXPECT_EQ(Expression::parse("2^3^2")(0.0), 512.0);
  EXPECT_EQ(Expression::parse("max(0,1-abs(x))")(0.25), 0.75);
}

TEST(Expression, Precedence) {
  EXPECT_EQ(Expression::parse("-2^2")(0.0), -4.0);
  EXPECT_EQ(Expression::parse("2*3+4")(0.0), 10.0);
  EXPECT_EQ(Expression::parse("2+3*4")(0.0), 14.0);
  EXPECT_EQ(Expression::parse("(2+3)*4")(0.0), 20.0);
  EXPECT_EQ(Expression::parse("8/4/2")(0.0), 1.0);
  EXPECT_EQ(Expression::parse("2^-1")(0.0), 0.5);
  EXPECT_EQ(Expression::parse("  1 +\t x ")(2.0), 3.0);
  EXPECT_EQ(Expression::parse("1e-3*1e3")(0.0), 1.0);
}

TEST(Expression, TwoVariables) {
  const auto e = Expression::parse("x*y + min(x,y)");
  EXPECT_EQ(e(2.0, 3.0), 8.0);
  EXPECT_EQ(e.arity(), 2);
  EXPECT_EQ(Expression::parse("sqrt(x)").arity(), 1);
  EXPECT_EQ(Expression::parse("exp(1)").arity(), 0);
}

TEST(Expression, ParseErrorsCarryOffset) {
  for (const char* bad : {"", "1+", "sin(", "foo(x)", "2**3", "(1", "1)", "x y", "max(1)"}) {
    try {
      Expression::parse(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Parse) << bad;
    }
  }
  try {
    Expression::parse("1 + * 2");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos) << e.what();
  }
}

TEST(Expression, DivisionByZeroIsEvaluationError) {
  const auto e = Expression::parse("1/x");
  EXPECT_EQ(e(4.0), 0.25);
  try {
    e(0.0);
    ADD_FAILURE();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::Evaluation);
  }
}

TEST(Expression, DerivativesMatchFiniteDifferences) {
  const char* cases[] = {"sin(x)*exp(-x^2)", "x^3 - 2*x", "sqrt(1+x^2)", "cos(pi*x)^2", "max(0,1-x^2)^3",
                         "abs(x-0.1)*x", "x/(1+x^2)"};
  for (const char* c : cases) {
    const auto e = Expression::parse(c);
    const auto de = e.derivative(0);
    for (double x : {-0.73, -0.2, 0.35, 0.81}) {
      const double h = 1e-6;
      const double fd = (e(x + h) - e(x - h)) / (2 * h);
      EXPECT_NEAR(de(x), fd, 1e-6 * std::max(1.0, std::abs(fd))) << c << " at " << x;
    }
  }
}

TEST(Expression, PartialDerivativeInY) {
  const auto e = Expression::parse("x^2*y + sin(y)");
  EXPECT_NEAR(e.derivative(1)(2.0, 0.0), 4.0 + 1.0, 1e-14);
  EXPECT_NEAR(e.derivative(0)(2.0, 3.0), 12.0, 1e-14);
}

TEST(Expression, Deterministic) {
  const auto a = Expression::parse("sin(3*x)+x^2.5");
  const auto b = Expression::parse("sin(3*x)+x^2.5");
  for (double x : {0.1, 0.2, 0.7}) EXPECT_EQ(a(x), b(x));
}
