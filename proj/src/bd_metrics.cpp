#include "modex/bd_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modex/error.hpp"

namespace modex {

RdCurve::RdCurve(const std::array<RdPoint, 4>& points_by_ascending_qp)
    : points_(points_by_ascending_qp) {
  for (size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].rate_bits <= 0.0) {
      throw DegenerateFitError("rate must be positive at qp " +
                               std::to_string(kQps[i]));
    }
    if (points_[i].energy <= 0.0) {
      throw DegenerateFitError("energy must be positive at qp " +
                               std::to_string(kQps[i]));
    }
  }
  for (size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].rate_bits >= points_[i - 1].rate_bits ||
        points_[i].psnr >= points_[i - 1].psnr) {
      throw DegenerateFitError(
          "curve not monotone between qp " + std::to_string(kQps[i - 1]) +
          " and qp " + std::to_string(kQps[i]) +
          " (higher qp must lower both rate and psnr)");
    }
  }
}

double CubicFit::eval(double x) const {
  const double t = x - center;
  return coeff[0] + t * (coeff[1] + t * (coeff[2] + t * coeff[3]));
}

double CubicFit::integral(double lo, double hi) const {
  auto antiderivative = [this](double x) {
    const double t = x - center;
    return t * (coeff[0] +
                t * (coeff[1] / 2.0 + t * (coeff[2] / 3.0 + t * coeff[3] / 4.0)));
  };
  return antiderivative(hi) - antiderivative(lo);
}

CubicFit fit_cubic(const std::array<double, 4>& xs, const std::array<double, 4>& ys) {
  for (size_t i = 0; i < xs.size(); ++i) {
    for (size_t j = i + 1; j < xs.size(); ++j) {
      if (xs[i] == xs[j]) {
        throw DegenerateFitError("repeated abscissa in interpolation support");
      }
    }
  }

  CubicFit fit;
  fit.center = (xs[0] + xs[1] + xs[2] + xs[3]) / 4.0;

  // Vandermonde solve via Gaussian elimination with partial pivoting; the
  // centered abscissa keeps it well conditioned for four support points.
  double a[4][5];
  for (int r = 0; r < 4; ++r) {
    const double t = xs[r] - fit.center;
    a[r][0] = 1.0;
    a[r][1] = t;
    a[r][2] = t * t;
    a[r][3] = t * t * t;
    a[r][4] = ys[r];
  }
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) {
      throw DegenerateFitError("singular interpolation system");
    }
    if (pivot != col) std::swap(a[pivot], a[col]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  for (int i = 0; i < 4; ++i) fit.coeff[i] = a[i][4] / a[i][i];
  return fit;
}

namespace {

double bd_log_domain(const RdCurve& reference, const RdCurve& test,
                     double RdPoint::* value) {
  std::array<double, 4> ref_psnr{}, ref_log{}, test_psnr{}, test_log{};
  for (int i = 0; i < 4; ++i) {
    // Ascending PSNR order (QPs come descending in quality).
    const RdPoint& r = reference.points()[3 - i];
    const RdPoint& t = test.points()[3 - i];
    ref_psnr[i] = r.psnr;
    ref_log[i] = std::log10(r.*value);
    test_psnr[i] = t.psnr;
    test_log[i] = std::log10(t.*value);
  }

  const double lo = std::max(ref_psnr.front(), test_psnr.front());
  const double hi = std::min(ref_psnr.back(), test_psnr.back());
  if (lo >= hi) {
    throw NoOverlapError("psnr ranges do not overlap: [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
  }

  const CubicFit ref_fit = fit_cubic(ref_psnr, ref_log);
  const CubicFit test_fit = fit_cubic(test_psnr, test_log);
  const double mean_diff =
      (test_fit.integral(lo, hi) - ref_fit.integral(lo, hi)) / (hi - lo);
  return (std::pow(10.0, mean_diff) - 1.0) * 100.0;
}

}  // namespace

double bd_rate(const RdCurve& reference, const RdCurve& test) {
  return bd_log_domain(reference, test, &RdPoint::rate_bits);
}

double bd_energy(const RdCurve& reference, const RdCurve& test) {
  return bd_log_domain(reference, test, &RdPoint::energy);
}

double mean_effort_savings(const RdCurve& reference, const RdCurve& test) {
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double ref_effort = reference.points()[i].effort;
    if (ref_effort == 0.0) {
      throw ZeroReferenceEffortError("reference effort is zero at qp " +
                                     std::to_string(RdCurve::kQps[i]));
    }
    total += (1.0 - test.points()[i].effort / ref_effort) * 100.0;
  }
  return total / 4.0;
}

}  // namespace modex
