#include <cmath>

#include "doctest.h"
#include "modex/bd_metrics.hpp"
#include "modex/error.hpp"
#include "modex/rng.hpp"

using namespace modex;

namespace {

// A realistic QP sweep: rate falls and psnr falls as QP rises.
RdCurve base_curve() {
  return RdCurve{{RdPoint{8.0e6, 55.0, 9.0e5, 4.0e8},
                  RdPoint{2.0e6, 46.5, 4.0e5, 3.0e8},
                  RdPoint{6.0e5, 38.0, 1.5e5, 2.5e8},
                  RdPoint{1.5e5, 30.5, 6.0e4, 2.2e8}}};
}

RdCurve scaled_rate(const RdCurve& curve, double factor) {
  std::array<RdPoint, 4> points = curve.points();
  for (RdPoint& p : points) p.rate_bits *= factor;
  return RdCurve{points};
}

RdCurve scaled_energy(const RdCurve& curve, double factor) {
  std::array<RdPoint, 4> points = curve.points();
  for (RdPoint& p : points) p.energy *= factor;
  return RdCurve{points};
}

// Independent route: composite Simpson integration of the fitted difference
// instead of the closed-form antiderivative.
double bd_rate_via_quadrature(const RdCurve& reference, const RdCurve& test) {
  std::array<double, 4> rp{}, rl{}, tp{}, tl{};
  for (int i = 0; i < 4; ++i) {
    rp[i] = reference.points()[3 - i].psnr;
    rl[i] = std::log10(reference.points()[3 - i].rate_bits);
    tp[i] = test.points()[3 - i].psnr;
    tl[i] = std::log10(test.points()[3 - i].rate_bits);
  }
  const CubicFit fr = fit_cubic(rp, rl);
  const CubicFit ft = fit_cubic(tp, tl);
  const double lo = std::max(rp.front(), tp.front());
  const double hi = std::min(rp.back(), tp.back());

  const int intervals = 2000;  // even
  const double h = (hi - lo) / intervals;
  double sum = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double x = lo + h * i;
    const double weight = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += weight * (ft.eval(x) - fr.eval(x));
  }
  const double integral = sum * h / 3.0;
  return (std::pow(10.0, integral / (hi - lo)) - 1.0) * 100.0;
}

}  // namespace

TEST_CASE("rd curve construction") {
  CHECK_NOTHROW(base_curve());

  SUBCASE("non-monotone rate is rejected") {
    auto points = base_curve().points();
    points[2].rate_bits = points[1].rate_bits + 1.0;
    CHECK_THROWS_AS(RdCurve{points}, DegenerateFitError);
  }

  SUBCASE("non-monotone psnr is rejected") {
    auto points = base_curve().points();
    points[3].psnr = points[2].psnr;
    CHECK_THROWS_AS(RdCurve{points}, DegenerateFitError);
  }

  SUBCASE("non-positive rate or energy is rejected") {
    auto points = base_curve().points();
    points[3].rate_bits = 0.0;
    CHECK_THROWS_AS(RdCurve{points}, DegenerateFitError);
    auto points2 = base_curve().points();
    points2[0].energy = -1.0;
    CHECK_THROWS_AS(RdCurve{points2}, DegenerateFitError);
  }
}

TEST_CASE("cubic interpolation passes through its support points") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<double, 4> xs{}, ys{};
    double x = 20.0 + rng.next_real() * 10.0;
    for (int i = 0; i < 4; ++i) {
      xs[i] = x;
      x += 2.0 + rng.next_real() * 8.0;
      ys[i] = rng.next_real() * 8.0;
    }
    const CubicFit fit = fit_cubic(xs, ys);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(fit.eval(xs[i]) - ys[i]) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(fit_cubic({1, 1, 2, 3}, {0, 0, 0, 0}), DegenerateFitError);
}

TEST_CASE("bd_rate") {
  const RdCurve reference = base_curve();

  SUBCASE("identical curves give exactly zero") {
    CHECK(bd_rate(reference, reference) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("uniform rate scaling gives (c-1)*100 within 1e-6") {
    for (double c : {0.9, 0.97, 1.03, 1.1, 2.0}) {
      const RdCurve test = scaled_rate(reference, c);
      const double expected = (c - 1.0) * 100.0;  // analytic log-shift value
      CHECK(std::abs(bd_rate(reference, test) - expected) <= 1e-6);
      // Independent quadrature route agrees.
      CHECK(std::abs(bd_rate_via_quadrature(reference, test) - expected) <= 1e-5);
    }
  }

  SUBCASE("a strictly better curve scores negative") {
    CHECK(bd_rate(reference, scaled_rate(reference, 0.8)) < 0.0);
  }

  SUBCASE("swapping arguments flips the sign") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const double c = 0.5 + rng.next_real() * 1.5;
      if (std::abs(c - 1.0) < 1e-3) continue;
      const RdCurve test = scaled_rate(reference, c);
      const double forward = bd_rate(reference, test);
      const double backward = bd_rate(test, reference);
      CHECK(forward * backward < 0.0);
    }
  }

  SUBCASE("disjoint psnr ranges raise NoOverlap") {
    auto low = base_curve().points();
    for (RdPoint& p : low) p.psnr -= 40.0;
    CHECK_THROWS_AS(bd_rate(reference, RdCurve{low}), NoOverlapError);
  }
}

TEST_CASE("bd_energy") {
  const RdCurve reference = base_curve();

  SUBCASE("identical curves give exactly zero") {
    CHECK(bd_energy(reference, reference) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("3% energy reduction reads as -3% within 1e-6") {
    const RdCurve test = scaled_energy(reference, 0.97);
    CHECK(std::abs(bd_energy(reference, test) - (-3.0)) <= 1e-6);
  }

  SUBCASE("savings are negative, increases positive") {
    CHECK(bd_energy(reference, scaled_energy(reference, 0.9)) < 0.0);
    CHECK(bd_energy(reference, scaled_energy(reference, 1.1)) > 0.0);
  }
}

TEST_CASE("mean_effort_savings") {
  const RdCurve reference = base_curve();

  SUBCASE("identical curves save nothing") {
    CHECK(mean_effort_savings(reference, reference) == doctest::Approx(0.0));
  }

  SUBCASE("halved effort everywhere saves 50%") {
    auto points = reference.points();
    for (RdPoint& p : points) p.effort /= 2.0;
    CHECK(mean_effort_savings(reference, RdCurve{points}) ==
          doctest::Approx(50.0).epsilon(1e-12));
  }

  SUBCASE("one of four QPs halved saves 12.5%") {
    auto points = reference.points();
    points[2].effort /= 2.0;
    CHECK(mean_effort_savings(reference, RdCurve{points}) ==
          doctest::Approx(12.5).epsilon(1e-12));
  }

  SUBCASE("zero reference effort raises") {
    auto ref_points = reference.points();
    for (RdPoint& p : ref_points) p.effort = 0.0;
    CHECK_THROWS_AS(mean_effort_savings(RdCurve{ref_points}, reference),
                    ZeroReferenceEffortError);
  }
}
