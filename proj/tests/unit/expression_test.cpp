#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "sepkit/expression.hpp"

using sepkit::Complex;
using sepkit::HolomorphicFunction;
using sepkit::ParseError;
using sepkit::pi;

namespace {

// Power series of cosh, summed until the terms stop mattering.
Complex cosh_series(Complex w) {
  Complex sum = 0.0, term = 1.0;
  for (int k = 0; k < 60; ++k) {
    sum += term;
    term *= w * w / static_cast<double>((2 * k + 1) * (2 * k + 2));
  }
  return sum;
}

Complex central_difference(const HolomorphicFunction& f, Complex z, double h) {
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

const std::vector<std::string>& builtin_functions() {
  static const std::vector<std::string> fs = {
      "cosh(z-0.5)", "sinh(z)", "cos(z)", "sin(z)", "exp(z)", "tanh(z)", "tan(z)", "log(z)",
      "z^3 - 2*z + i", "(z+1)/(z-2)", "exp(-z^2/8)*sin(z)", "cosh(z)^2 - sinh(z)^2"};
  return fs;
}

// Points closer than this to a pole or the log branch point are skipped.
bool near_singularity(const std::string& f, Complex z) {
  auto near = [&](Complex s) { return std::abs(z - s) < 0.1; };
  if (f.find("log") != std::string::npos && (std::abs(z) < 0.1 ||
                                             (z.real() < 0.0 && std::abs(z.imag()) < 0.1))) {
    return true;
  }
  if (f == "tan(z)") {
    for (int k = -3; k <= 3; ++k) {
      if (near(Complex{(k + 0.5) * pi, 0.0})) return true;
    }
  }
  if (f == "tanh(z)") {
    for (int k = -3; k <= 3; ++k) {
      if (near(Complex{0.0, (k + 0.5) * pi})) return true;
    }
  }
  if (f == "(z+1)/(z-2)" && near(Complex{2.0, 0.0})) return true;
  return false;
}

}  // namespace

TEST(Parse, CoshFixtureEvaluatesToOneAtItsShift) {
  const auto f = HolomorphicFunction::parse("cosh(z-0.5)");
  const Complex v = f(Complex{0.5, 0.0});
  EXPECT_EQ(v, Complex(1.0, 0.0));
}

TEST(Parse, IdentityReturnsItsArgument) {
  const auto f = HolomorphicFunction::parse("z");
  EXPECT_EQ(f(Complex{2.0, 3.0}), Complex(2.0, 3.0));
}

TEST(Parse, UnbalancedParenthesisReportsPosition) {
  try {
    HolomorphicFunction::parse("cosh(z-");
    FAIL() << "expected a syntax error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
    EXPECT_EQ(e.position(), 7u);
  }
}

TEST(Parse, ImplicitMultiplicationIsRejected) {
  try {
    HolomorphicFunction::parse("2z");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
    EXPECT_EQ(e.position(), 1u);
  }
}

TEST(Parse, UnknownIdentifier) {
  try {
    HolomorphicFunction::parse("sqrt(z)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::UnknownIdentifier);
    EXPECT_EQ(e.position(), 0u);
  }
  EXPECT_THROW(HolomorphicFunction::parse("w + 1"), ParseError);
  EXPECT_THROW(HolomorphicFunction::parse("Z"), ParseError);  // case-sensitive
}

TEST(Parse, ExponentMustBeAnUnsignedIntegerLiteral) {
  for (const char* text : {"z^0.5", "z^-1", "z^z", "z^(2)"}) {
    try {
      HolomorphicFunction::parse(text);
      FAIL() << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.kind(), ParseError::Kind::NonIntegerExponent) << text;
    }
  }
  EXPECT_EQ(HolomorphicFunction::parse("z^0")(Complex{3.0, 4.0}), Complex(1.0, 0.0));
}

TEST(Parse, EmptyAndWhitespaceInputFail) {
  EXPECT_THROW(HolomorphicFunction::parse(""), ParseError);
  EXPECT_THROW(HolomorphicFunction::parse("   "), ParseError);
  EXPECT_THROW(HolomorphicFunction::parse("z +"), ParseError);
  EXPECT_THROW(HolomorphicFunction::parse("cosh z"), ParseError);
  EXPECT_THROW(HolomorphicFunction::parse("1.e"), ParseError);
}

TEST(Parse, PrecedenceAndAssociativity) {
  const Complex z{0.3, -0.7};
  auto at = [&](const char* text) { return HolomorphicFunction::parse(text)(z); };
  EXPECT_NEAR(std::abs(at("1 - 2 - 3") - Complex(-4.0)), 0.0, 0.0);
  EXPECT_NEAR(std::abs(at("8 / 4 / 2") - Complex(1.0)), 0.0, 0.0);
  EXPECT_NEAR(std::abs(at("2 + 3*z^2") - (2.0 + 3.0 * z * z)), 0.0, 1e-15);
  // Unary minus binds tighter than ^ in this grammar: -z^2 is (-z)^2.
  EXPECT_NEAR(std::abs(at("-z^2") - z * z), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at("0-z^2") + z * z), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at("2*pi*i") - Complex(0.0, 2.0 * pi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at("e") - Complex(std::exp(1.0))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at("1.5e2 + .25") - Complex(150.25)), 0.0, 1e-12);
}

TEST(Evaluate, CoshVanishesAtTheCentersBySeries) {
  const auto f = HolomorphicFunction::parse("cosh(z-0.5)");
  const Complex z{0.5, pi / 2.0};
  EXPECT_LT(std::abs(f(z)), 1e-12);
  EXPECT_LT(std::abs(f(z) - cosh_series(z - 0.5)), 1e-14);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const Complex p{u(rng), u(rng)};
    const Complex ref = cosh_series(p - 0.5);
    EXPECT_LT(std::abs(f(p) - ref), 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Evaluate, SquareOfOnePlusI) {
  EXPECT_EQ(HolomorphicFunction::parse("z^2")(Complex{1.0, 1.0}), Complex(0.0, 2.0));
}

TEST(Evaluate, LogAtZeroIsADomainError) {
  const auto f = HolomorphicFunction::parse("log(z)");
  EXPECT_THROW(f(Complex{0.0, 0.0}), sepkit::DomainError);
  EXPECT_NEAR(f(Complex{-1.0, 0.0}).imag(), pi, 1e-15);  // principal branch
}

TEST(Evaluate, NonFiniteResultsSignal) {
  EXPECT_THROW(HolomorphicFunction::parse("exp(z)")(Complex{1000.0, 0.0}), sepkit::OverflowError);
  EXPECT_THROW(HolomorphicFunction::parse("1/z")(Complex{0.0, 0.0}), sepkit::OverflowError);
}

TEST(Evaluate, RepeatedCallsAreBitIdentical) {
  const auto f = HolomorphicFunction::parse("exp(-z^2/4)*sin(2*z) + log(z)");
  const Complex z{0.37, -1.21};
  const Complex first = f(z);
  for (int k = 0; k < 100; ++k) {
    const Complex again = f(z);
    EXPECT_EQ(std::memcmp(&first, &again, sizeof first), 0);
  }
}

TEST(Derivative, SpecExamples) {
  const auto f = HolomorphicFunction::parse("cosh(z-0.5)");
  EXPECT_EQ(f.first_derivative(Complex{0.5, 0.0}), Complex(0.0, 0.0));
  const Complex c{0.5, pi / 2.0};
  const Complex d = f.first_derivative(c);
  EXPECT_LT(std::abs(d - Complex(0.0, 1.0)), 1e-15);
  const Complex fd = central_difference(f, c, 1e-5);
  EXPECT_LT(std::abs(d - fd) / std::abs(d), 1e-8);

  const auto g = HolomorphicFunction::parse("z^2");
  EXPECT_EQ(g.first_derivative(Complex{1.0, 1.0}), Complex(2.0, 2.0));
}

TEST(Derivative, OrderArgumentIsChecked) {
  const auto f = HolomorphicFunction::parse("z^3");
  EXPECT_THROW(f.derivative(3), sepkit::InvalidArgument);
  EXPECT_THROW(f.derivative(0), sepkit::InvalidArgument);
}

TEST(Derivative, SecondIsDerivativeOfFirst) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& text : builtin_functions()) {
    const auto f = HolomorphicFunction::parse(text);
    const auto d1 = f.derivative(1).derivative(1);
    const auto d2 = f.derivative(2);
    for (int k = 0; k < 50; ++k) {
      const Complex z{u(rng), u(rng)};
      if (near_singularity(text, z)) continue;
      const Complex a = d1(z), b = d2(z);
      EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a))) << text;
    }
  }
}

TEST(Derivative, AgreesWithFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const auto& text : builtin_functions()) {
    const auto f = HolomorphicFunction::parse(text);
    int checked = 0;
    for (int attempt = 0; attempt < 10000 && checked < 100; ++attempt) {
      const Complex z{u(rng), u(rng)};
      if (near_singularity(text, z)) continue;
      Complex exact;
      try {
        exact = f.first_derivative(z);
      } catch (const sepkit::Error&) {
        continue;
      }
      if (std::abs(exact) <= 1e-3) continue;
      const Complex fd = central_difference(f, z, 1e-6);
      EXPECT_LT(std::abs(fd - exact) / std::abs(exact), 1e-6) << text << " at " << z;
      ++checked;
    }
  }
}

TEST(SecondTimeDerivative, SpecExamples) {
  const auto f = HolomorphicFunction::parse("cosh(z-0.5)");
  const Complex a = sepkit::second_time_derivative(f, Complex{2.0, 0.0});
  EXPECT_NEAR(a.real(), std::sinh(1.5) * std::cosh(1.5), 1e-13);
  EXPECT_EQ(a.imag(), 0.0);
  EXPECT_GT(a.real(), 0.0);
  EXPECT_LT(std::abs(sepkit::second_time_derivative(f, Complex{0.5, pi / 2.0})), 1e-15);

  const auto g = HolomorphicFunction::parse("z");
  EXPECT_EQ(sepkit::second_time_derivative(g, Complex{3.0, 0.0}), Complex(3.0, 0.0));
}

TEST(CauchyRiemann, SpecExamples) {
  const auto f = HolomorphicFunction::parse("cosh(z-0.5)");
  auto [r1, r2] = sepkit::cauchy_riemann_residual(f, Complex{1.0, 1.0}, 1e-5);
  EXPECT_LT(r1, 1e-6);
  EXPECT_LT(r2, 1e-6);

  const auto id = HolomorphicFunction::parse("z");
  std::tie(r1, r2) = sepkit::cauchy_riemann_residual(id, Complex{-3.0, 7.0}, 1e-5);
  EXPECT_LT(r1, 1e-10);
  EXPECT_LT(r2, 1e-10);

  const auto ex = HolomorphicFunction::parse("exp(z)");
  std::tie(r1, r2) = sepkit::cauchy_riemann_residual(ex, Complex{0.0, 0.0}, 1e-4);
  EXPECT_LT(r1, 1e-7);
  EXPECT_LT(r2, 1e-7);
}

TEST(CauchyRiemann, StepMustBePositive) {
  const auto f = HolomorphicFunction::parse("z");
  EXPECT_THROW(sepkit::cauchy_riemann_residual(f, Complex{}, 0.0), sepkit::InvalidArgument);
}

TEST(CauchyRiemann, HoldsForEveryBuiltinAtRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const auto& text : builtin_functions()) {
    const auto f = HolomorphicFunction::parse(text);
    int checked = 0;
    while (checked < 1000) {
      const Complex z{u(rng), u(rng)};
      if (near_singularity(text, z)) continue;
      const auto [r1, r2] = sepkit::cauchy_riemann_residual(f, z, 1e-5);
      EXPECT_LT(r1, 1e-5) << text << " at " << z;
      EXPECT_LT(r2, 1e-5) << text << " at " << z;
      ++checked;
    }
  }
}

TEST(Printing, RoundTripPreservesValues) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& text : builtin_functions()) {
    const auto f = HolomorphicFunction::parse(text);
    const auto g = HolomorphicFunction::parse(f.to_string());
    EXPECT_EQ(g.to_string(), f.to_string()) << text;
    for (int k = 0; k < 100; ++k) {
      const Complex z{u(rng), u(rng)};
      if (near_singularity(text, z)) continue;
      const Complex a = f(z), b = g(z);
      EXPECT_LE(std::abs(a - b), 1e-14 * std::max(1.0, std::abs(a))) << f.to_string();
    }
  }
}

TEST(Printing, DerivativeTreesReparse) {
  const auto f = HolomorphicFunction::parse("tan(z)*log(z+3)");
  const auto d = f.derivative(2);
  const auto again = HolomorphicFunction::parse(d.to_string());
  const Complex z{0.4, 0.2};
  EXPECT_LE(std::abs(d(z) - again(z)), 1e-13 * std::abs(d(z)));
}

TEST(Metadata, EntireAndBranchCutFlags) {
  EXPECT_TRUE(HolomorphicFunction::parse("cosh(z-0.5)").is_entire());
  EXPECT_FALSE(HolomorphicFunction::parse("cosh(z-0.5)").has_branch_cut());
  EXPECT_TRUE(HolomorphicFunction::parse("log(z)").has_branch_cut());
  EXPECT_FALSE(HolomorphicFunction::parse("log(z)").is_entire());
  EXPECT_FALSE(HolomorphicFunction::parse("1/z").is_entire());
  EXPECT_EQ(HolomorphicFunction::parse("z +  1").source(), "z +  1");
}
