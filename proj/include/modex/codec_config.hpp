#pragma once

namespace modex {

// Tunables of the block codec. Header-bit constants keep the rate ordering
// skip < merge < inter; effort is counted in sample operations.
struct CodecConfig {
  int search_window = 8;            // full-pel motion search over +/- this range
  double skip_header_bits = 2.0;
  double merge_header_bits = 4.0;
  double inter_header_bits = 8.0;
  double intra_header_bits = 4.0;
  double split_flag_bits = 1.0;
  double block_overhead_bits = 1.0;  // per coded residual block (cbf)
  double quant_deadzone = 1.0 / 6.0;
  double guard_check_effort = 1.0;   // charged per position examined

  bool operator==(const CodecConfig&) const = default;
};

}  // namespace modex
