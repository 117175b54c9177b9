#include "modex/residual.hpp"

#include <cmath>
#include <map>

#include "modex/error.hpp"
#include "modex/rdcost.hpp"
#include "modex/util.hpp"

namespace modex {

double quant_step(int qp) {
  if (qp < 0 || qp > 51) {
    throw OutOfRangeQpError("qp must be in [0, 51], got " + std::to_string(qp));
  }
  return std::exp2((qp - 4) / 6.0);
}

ResidualCode code_residual(const uint8_t* original, int original_stride,
                           const uint8_t* prediction, int prediction_stride,
                           int w, int h, int qp, const CodecConfig& config) {
  if (w <= 0 || h <= 0) {
    throw DimensionMismatchError("residual block dimensions must be positive");
  }
  const double q = quant_step(qp);
  const double deadzone = config.quant_deadzone;

  ResidualCode out;
  out.reconstruction.resize(static_cast<size_t>(w) * h);

  // Ordered histogram of quantized levels keeps the entropy sum order
  // deterministic.
  std::map<int, uint64_t> histogram;
  for (int y = 0; y < h; ++y) {
    const uint8_t* orig = original + static_cast<ptrdiff_t>(y) * original_stride;
    const uint8_t* pred = prediction + static_cast<ptrdiff_t>(y) * prediction_stride;
    uint8_t* recon = out.reconstruction.data() + static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const int residual = static_cast<int>(orig[x]) - static_cast<int>(pred[x]);
      const int magnitude =
          static_cast<int>(std::floor(std::abs(residual) / q + deadzone));
      const int level = residual < 0 ? -magnitude : magnitude;
      ++histogram[level];
      if (level != 0) ++out.nonzero_coeffs;
      const int dequant = static_cast<int>(std::llround(level * q));
      recon[x] = clamp_u8(static_cast<int>(pred[x]) + dequant);
    }
  }

  const double total = static_cast<double>(w) * h;
  double entropy_bits = 0.0;
  for (const auto& [level, count] : histogram) {
    entropy_bits += static_cast<double>(count) *
                    std::log2(total / static_cast<double>(count));
  }
  out.rate_bits = config.block_overhead_bits + entropy_bits;

  for (int y = 0; y < h; ++y) {
    const uint8_t* orig = original + static_cast<ptrdiff_t>(y) * original_stride;
    out.distortion += sse_rows(orig, out.reconstruction.data() + static_cast<size_t>(y) * w, w);
  }
  return out;
}

}  // namespace modex
