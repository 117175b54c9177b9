#pragma once

#include <cstdint>

namespace modex {

// Lagrangian rate weight: 0.85 * 2^((qp - 12) / 3). Throws OutOfRangeQpError
// outside [0, 51].
double lambda_for_qp(int qp);

struct RdCost {
  double rate_bits = 0.0;
  uint64_t distortion = 0;  // sum of squared errors
  double cost_j = 0.0;      // distortion + lambda * rate

  static RdCost make(double rate_bits, uint64_t distortion, double lambda) {
    return RdCost{rate_bits, distortion,
                  static_cast<double>(distortion) + lambda * rate_bits};
  }
};

// Bit length of the signed exp-Golomb code for v.
int signed_exp_golomb_bits(int v);

}  // namespace modex
