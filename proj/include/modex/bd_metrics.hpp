#pragma once

#include <array>
#include <vector>

namespace modex {

// One QP operating point of an encoder solution.
struct RdPoint {
  double rate_bits = 0.0;  // > 0 (log-domain requirement)
  double psnr = 0.0;
  double energy = 0.0;  // > 0
  double effort = 0.0;
};

// Exactly four operating points for QPs 10/20/30/40 in ascending QP order.
// Construction rejects curves that are not strictly monotone (higher QP must
// give lower rate and lower PSNR) or have non-positive rate/energy.
class RdCurve {
 public:
  static constexpr std::array<int, 4> kQps{10, 20, 30, 40};

  explicit RdCurve(const std::array<RdPoint, 4>& points_by_ascending_qp);
  const std::array<RdPoint, 4>& points() const { return points_; }

 private:
  std::array<RdPoint, 4> points_;
};

// Cubic interpolation polynomial in a centered abscissa.
struct CubicFit {
  double center = 0.0;
  std::array<double, 4> coeff{};  // c0 + c1 t + c2 t^2 + c3 t^3, t = x - center

  double eval(double x) const;
  double integral(double lo, double hi) const;  // closed form
};

// Interpolates ys over xs (4 points each). Throws DegenerateFitError when
// abscissas repeat.
CubicFit fit_cubic(const std::array<double, 4>& xs, const std::array<double, 4>& ys);

// Average per-cent rate difference of `test` against `reference` over the
// common PSNR interval: cubic fits of log10(rate) over PSNR, closed-form
// integration, (10^mean_diff - 1) * 100. Throws NoOverlapError when the PSNR
// ranges do not intersect.
double bd_rate(const RdCurve& reference, const RdCurve& test);

// Same machinery over log10(energy).
double bd_energy(const RdCurve& reference, const RdCurve& test);

// Mean over QPs of (1 - effort_test / effort_ref) * 100. Throws
// ZeroReferenceEffortError when a reference effort is zero.
double mean_effort_savings(const RdCurve& reference, const RdCurve& test);

}  // namespace modex
