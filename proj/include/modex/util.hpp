#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace modex {

inline uint8_t clamp_u8(int v) {
  return static_cast<uint8_t>(std::clamp(v, 0, 255));
}

// Locale-independent shortest-round-trip formatting; used everywhere a number
// ends up in a file so reruns are byte-identical.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_u64(uint64_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Sum of squared errors between two equally sized sample rows.
inline uint64_t sse_rows(const uint8_t* a, const uint8_t* b, int n) {
  uint64_t acc = 0;
  for (int i = 0; i < n; ++i) {
    int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    acc += static_cast<uint64_t>(d * d);
  }
  return acc;
}

inline uint64_t sse_block(const uint8_t* a, int stride_a, const uint8_t* b,
                          int stride_b, int w, int h) {
  uint64_t acc = 0;
  for (int y = 0; y < h; ++y) {
    acc += sse_rows(a + static_cast<ptrdiff_t>(y) * stride_a,
                    b + static_cast<ptrdiff_t>(y) * stride_b, w);
  }
  return acc;
}

}  // namespace modex
