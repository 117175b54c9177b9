#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace modex {

// One 8-bit luma frame, row-major. Dimensions must be multiples of 8; the
// encoder pads to whole 64x64 CTUs by edge replication and reports
// distortion on the unpadded region only.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> luma;

  uint8_t at(int x, int y) const { return luma[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int x, int y) { return luma[static_cast<size_t>(y) * width + x]; }
  const uint8_t* row(int y) const { return luma.data() + static_cast<size_t>(y) * width; }
  uint8_t* row(int y) { return luma.data() + static_cast<size_t>(y) * width; }

  bool operator==(const Frame&) const = default;
};

struct Sequence {
  std::string name;
  std::vector<Frame> frames;

  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }

  bool operator==(const Sequence&) const = default;
};

// Raw file layouts: tightly packed luma planes, or planar 4:2:0 whose chroma
// planes are skipped on load (luma-only codec).
enum class RawLayout { kLumaOnly, kYuv420 };

// Throws InvalidDimensionsError unless both dimensions are positive multiples
// of 8 and at least 8.
void check_dimensions(int width, int height);

Sequence load_raw_video(const std::filesystem::path& path, int width,
                        int height, int frame_count,
                        RawLayout layout = RawLayout::kLumaOnly,
                        std::string name = "");

// Writes the luma-only layout; load_raw_video(written file) reproduces the
// sequence bitwise.
void write_raw_video(const Sequence& seq, const std::filesystem::path& path);

enum class SynthKind { kFlat, kGradient, kMovingBlock, kNoise };

SynthKind synth_kind_from_string(const std::string& s);
const char* synth_kind_name(SynthKind k);

// Deterministic function of its arguments. kMovingBlock translates a textured
// rectangle over a static background by (2,1) per frame so inter, merge and
// skip modes all have something to do.
Sequence synthesize_sequence(SynthKind kind, int width, int height,
                             int frame_count, uint64_t seed,
                             std::string name = "");

// Edge-replicating pad up to whole CTUs. Returns the frame unchanged when it
// already covers full CTUs.
Frame pad_to_ctu(const Frame& frame);

}  // namespace modex
