#pragma once

#include <cstdint>
#include <vector>

#include "modex/codec_config.hpp"

namespace modex {

// Dead-zone scalar quantization step: 2^((qp - 4) / 6).
double quant_step(int qp);

struct ResidualCode {
  double rate_bits = 0.0;        // order-0 entropy estimate + block overhead
  uint64_t distortion = 0;       // SSE(original, reconstruction)
  uint64_t nonzero_coeffs = 0;
  std::vector<uint8_t> reconstruction;  // w*h, row-major
};

// Quantizes the spatial residual original - prediction and reconstructs.
// Blocks are given as (pointer, stride) pairs over w*h samples; throws
// DimensionMismatchError for non-positive dimensions.
ResidualCode code_residual(const uint8_t* original, int original_stride,
                           const uint8_t* prediction, int prediction_stride,
                           int w, int h, int qp, const CodecConfig& config);

}  // namespace modex
