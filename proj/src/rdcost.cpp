#include "modex/rdcost.hpp"

#include <cmath>

#include "modex/error.hpp"

namespace modex {

double lambda_for_qp(int qp) {
  if (qp < 0 || qp > 51) {
    throw OutOfRangeQpError("qp must be in [0, 51], got " + std::to_string(qp));
  }
  return 0.85 * std::exp2((qp - 12) / 3.0);
}

int signed_exp_golomb_bits(int v) {
  unsigned code = v > 0 ? 2u * static_cast<unsigned>(v) - 1
                        : 2u * static_cast<unsigned>(-v);
  int len = 0;  // floor(log2(code + 1)) + 1
  for (unsigned n = code + 1; n > 0; n >>= 1) ++len;
  return 2 * len - 1;
}

}  // namespace modex
