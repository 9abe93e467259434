#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "sepkit/orbit.hpp"
#include "sepkit/winding.hpp"

using namespace sepkit;

namespace {

std::vector<Complex> circle(int n, double radius = 1.0, int turns = 1, Complex c = {}) {
  std::vector<Complex> pts;
  for (int k = 0; k < n; ++k) pts.push_back(c + std::polar(radius, two_pi * turns * k / n));
  return pts;
}

// Signed crossings of the ray {p + s, s > 0}: upward edges count +1,
// downward edges -1 (half-open rule on the y coordinate).
int crossing_number(const std::vector<Complex>& poly, Complex p) {
  int w = 0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Complex a = poly[k], b = poly[(k + 1) % poly.size()];
    const double cross = (b.real() - a.real()) * (p.imag() - a.imag()) -
                         (p.real() - a.real()) * (b.imag() - a.imag());
    if (a.imag() <= p.imag() && b.imag() > p.imag() && cross > 0) ++w;
    if (a.imag() > p.imag() && b.imag() <= p.imag() && cross < 0) --w;
  }
  return w;
}

// Angle accumulation on a 10x refined polygon.
double dense_turns(const std::vector<Complex>& poly, Complex p) {
  double total = 0.0;
  Complex prev = poly.front() - p;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Complex a = poly[k], b = poly[(k + 1) % poly.size()];
    for (int j = 1; j <= 10; ++j) {
      const Complex cur = a + (b - a) * (j / 10.0) - p;
      total += std::atan2((std::conj(prev) * cur).imag(), (std::conj(prev) * cur).real());
      prev = cur;
    }
  }
  return total / two_pi;
}

std::vector<Complex> random_star(std::mt19937_64& rng, Complex c) {
  std::uniform_int_distribution<int> count(3, 40);
  std::uniform_real_distribution<double> angle(0.0, two_pi), radius(0.3, 2.0);
  std::vector<double> th(count(rng));
  for (auto& t : th) t = angle(rng);
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  std::vector<Complex> pts;
  for (const double t : th) pts.push_back(c + std::polar(radius(rng), t));
  return pts;
}

// Star-shaped about its center (hence simple) when no angular gap reaches pi.
bool simple_star(const std::vector<Complex>& poly, Complex c) {
  std::vector<double> th;
  for (const Complex p : poly) th.push_back(std::arg(p - c));
  std::sort(th.begin(), th.end());
  double gap = th.front() + two_pi - th.back();
  for (std::size_t k = 1; k < th.size(); ++k) gap = std::max(gap, th[k] - th[k - 1]);
  return gap < pi - 1e-6;
}

double distance_to_polygon(const std::vector<Complex>& poly, Complex p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < poly.size(); ++k) {
    d = std::min(d, detail::distance_to_segment(p, poly[k], poly[(k + 1) % poly.size()]));
  }
  return d;
}

const HolomorphicFunction& cosh_fixture() {
  static const auto f = HolomorphicFunction::parse("cosh(z-0.5)");
  return f;
}

}  // namespace

TEST(ClosedCurve, RejectsInvalidPointLists) {
  EXPECT_THROW(ClosedCurve({Complex{0, 0}, Complex{1, 0}}), InvalidArgument);
  EXPECT_THROW(ClosedCurve({Complex{0, 0}, Complex{1, 0}, Complex{1, 0}}), InvalidArgument);
  EXPECT_THROW(ClosedCurve({Complex{0, 0}, Complex{1, 0}, Complex{0, 0}}), InvalidArgument);
  EXPECT_THROW(ClosedCurve({Complex{0, 0}, Complex{1, 0}, Complex{std::nan(""), 0}}),
               InvalidArgument);
}

TEST(WindingNumber, UnitCircleExamples) {
  const ClosedCurve c(circle(64));
  EXPECT_EQ(winding_number(c, Complex{0.0, 0.0}), 1);
  EXPECT_EQ(winding_number(c.reversed(), Complex{0.0, 0.0}), -1);
  EXPECT_EQ(winding_number(c, Complex{3.0, 0.0}), 0);
}

TEST(WindingNumber, PointOnCurveIsAnError) {
  const ClosedCurve c(circle(64));
  try {
    winding_number(c, c[5]);
    FAIL();
  } catch (const MethodError& e) {
    EXPECT_EQ(e.code(), "PointOnCurve");
  }
  EXPECT_THROW(winding_number(c, 0.5 * (c[0] + c[1])), MethodError);
}

TEST(WindingNumber, AmbiguousWindingSurfaces) {
  EXPECT_NO_THROW(detail::round_turns(1.05));
  EXPECT_NO_THROW(detail::round_turns(-0.92));
  try {
    detail::round_turns(0.5);
    FAIL();
  } catch (const MethodError& e) {
    EXPECT_EQ(e.code(), "AmbiguousWinding");
  }
  EXPECT_THROW(detail::round_turns(1.2), MethodError);
}

TEST(WindingNumber, AgreesWithBruteForceOnRandomStarPolygons) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int interior = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Complex c{u(rng) / 3.0, u(rng) / 3.0};
    const auto poly = random_star(rng, c);
    if (poly.size() < 3) continue;
    const ClosedCurve curve(poly);
    // Half of the probes at the star center (always interior).
    const Complex p = trial % 2 == 0 ? c : Complex{u(rng), u(rng)};
    if (distance_to_polygon(poly, p) < 1e-6) continue;
    const int expected = crossing_number(poly, p);
    EXPECT_EQ(winding_number(curve, p), expected) << "trial " << trial;
    EXPECT_NEAR(winding_angle(curve, p), dense_turns(poly, p), 1e-9);
    interior += expected != 0;
  }
  EXPECT_GT(interior, 500);
}

TEST(WindingNumber, InvariantUnderCyclicRotation) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto poly = random_star(rng, Complex{});
    if (poly.size() < 3) continue;
    const int w = winding_number(ClosedCurve(poly), Complex{});
    for (std::size_t shift = 1; shift < poly.size(); ++shift) {
      std::rotate(poly.begin(), poly.begin() + 1, poly.end());
      EXPECT_EQ(winding_number(ClosedCurve(poly), Complex{}), w);
    }
  }
}

TEST(WindingNumber, DoubleTraversalCountsTwice) {
  const ClosedCurve c(circle(128, 1.0, 2));
  EXPECT_EQ(winding_number(c, Complex{}), 2);
}

TEST(TangentWinding, CircleExamples) {
  const ClosedCurve ccw(circle(64));
  EXPECT_EQ(tangent_winding(ccw), 1);
  EXPECT_EQ(tangent_winding(ccw.reversed()), -1);
  const ClosedCurve twice(circle(128, 1.0, 2));
  EXPECT_EQ(tangent_winding(twice), 2);
}

TEST(TangentWinding, SimplePolygonsTurnOnce) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto poly = random_star(rng, Complex{});
    if (poly.size() < 3 || !simple_star(poly, Complex{})) continue;
    const ClosedCurve c(poly);
    EXPECT_EQ(tangent_winding(c), 1);
    EXPECT_EQ(tangent_winding(c.reversed()), -1);
  }
}

TEST(OrbitIndex, CoshCentersHaveOppositeIndices) {
  const Complex top{0.5, pi / 2.0}, bottom{0.5, -pi / 2.0};
  const auto a = orbit_index(cosh_fixture(), Complex{0.5, pi / 2.0 + 0.3}, top);
  ASSERT_TRUE(a.periodic()) << a.note;
  EXPECT_EQ(a.index, 1);
  EXPECT_NEAR(a.period, two_pi, 1e-7);
  EXPECT_EQ(a.center, top);

  const auto b = orbit_index(cosh_fixture(), Complex{0.5, -(pi / 2.0 + 0.3)}, bottom);
  ASSERT_TRUE(b.periodic()) << b.note;
  EXPECT_EQ(b.index, -1);

  const auto c = classify_orbit(cosh_fixture(), Complex{0.5, pi / 2.0 - 0.4}, top);
  ASSERT_TRUE(c.periodic());
  EXPECT_EQ(c.index, 1);
}

TEST(OrbitIndex, CanonicalRotation) {
  const auto f = HolomorphicFunction::parse("i*z");
  const auto o = orbit_index(f, Complex{1.0, 0.0}, Complex{});
  ASSERT_TRUE(o.periodic());
  EXPECT_EQ(o.index, 1);
  EXPECT_NEAR(o.period, two_pi, 1e-7);
  const auto r = orbit_index(HolomorphicFunction::parse("-i*z"), Complex{1.0, 0.0}, Complex{});
  ASSERT_TRUE(r.periodic());
  EXPECT_EQ(r.index, -1);
}

TEST(OrbitIndex, ExponentialGrowthEscapes) {
  const auto o = orbit_index(HolomorphicFunction::parse("z"), Complex{1.0, 0.0}, Complex{});
  EXPECT_EQ(o.verdict, OrbitClassification::Verdict::Escaping);
  EXPECT_EQ(o.index, 0);
}

TEST(OrbitIndex, GuardRadiusTurnsLongExcursionsIntoEscapes) {
  OrbitOptions opt;
  opt.guard_radius = 0.5;
  const auto o = orbit_index(cosh_fixture(), Complex{0.5, pi / 2.0 + 1.2}, Complex{0.5, pi / 2.0},
                             {}, opt);
  EXPECT_EQ(o.verdict, OrbitClassification::Verdict::Escaping);
  EXPECT_EQ(o.termination, Termination::GuardExit);
}

TEST(OrbitIndex, FocusNeverClosesAndIsIndeterminate) {
  // z' = (-0.1 + i) z spirals into the origin.
  IntegrationSettings s;
  s.t_max = 30.0;
  const auto o = orbit_index(HolomorphicFunction::parse("(-0.1 + i)*z"), Complex{1.0, 0.0},
                             Complex{}, s);
  EXPECT_EQ(o.verdict, OrbitClassification::Verdict::Indeterminate);
  EXPECT_FALSE(o.note.empty());
}

TEST(OrbitIndex, PreconditionsAreChecked) {
  EXPECT_THROW(orbit_index(cosh_fixture(), Complex{1.0, 0.0}, Complex{0.0, 0.0}), InvalidArgument);
  const Complex c{0.5, pi / 2.0};
  EXPECT_THROW(orbit_index(cosh_fixture(), c, c), InvalidArgument);
}

TEST(OrbitIndex, TangentTurningMatchesCenterWindingOnConvexOrbits) {
  const Complex center{0.5, pi / 2.0};
  for (const double r : {0.2, 0.6, 1.0}) {
    Monitor m;
    m.closure_center = center;
    const Trajectory tr =
        integrate(cosh_fixture(), center + Complex{r, 0.0}, TimeDirection::real_time(), {}, m);
    ASSERT_EQ(tr.termination, Termination::ClosedOrbit);
    const ClosedCurve orbit = orbit_curve(tr);
    EXPECT_EQ(tangent_winding(orbit), winding_number(orbit, center));
  }
}

TEST(EnclosingOrbit, PicksTheCenterItWindsAround) {
  const std::vector<Complex> centers{{0.5, -pi / 2.0}, {0.5, pi / 2.0}};
  const EnclosedOrbit up = enclosing_orbit(cosh_fixture(), Complex{2.0, 0.5}, centers);
  ASSERT_TRUE(up.periodic) << up.note;
  EXPECT_EQ(up.center_slot, 1);
  EXPECT_EQ(up.index, 1);
  const EnclosedOrbit down = enclosing_orbit(cosh_fixture(), Complex{2.0, -0.5}, centers);
  ASSERT_TRUE(down.periodic) << down.note;
  EXPECT_EQ(down.center_slot, 0);
  EXPECT_EQ(down.index, -1);
  // On the real axis the orbit escapes.
  EXPECT_FALSE(enclosing_orbit(cosh_fixture(), Complex{2.0, 0.0}, centers).periodic);
}
