#include "modex/media_io.hpp"

#include <fstream>

#include "modex/error.hpp"
#include "modex/mode.hpp"
#include "modex/rng.hpp"
#include "modex/util.hpp"

namespace modex {

void check_dimensions(int width, int height) {
  if (width < 8 || height < 8 || width % 8 != 0 || height % 8 != 0) {
    throw InvalidDimensionsError("frame dimensions must be multiples of 8 and >= 8, got " +
                                 std::to_string(width) + "x" + std::to_string(height));
  }
}

namespace {

void check_frame_count(int frame_count) {
  if (frame_count < 2) {
    throw InvalidDimensionsError("a sequence needs at least 2 frames, got " +
                                 std::to_string(frame_count));
  }
}

}  // namespace

Sequence load_raw_video(const std::filesystem::path& path, int width,
                        int height, int frame_count, RawLayout layout,
                        std::string name) {
  check_dimensions(width, height);
  check_frame_count(frame_count);
  if (!std::filesystem::exists(path)) {
    throw FileNotFoundError("no such file: " + path.string());
  }

  const uint64_t luma_bytes = static_cast<uint64_t>(width) * height;
  const uint64_t chroma_bytes =
      layout == RawLayout::kYuv420 ? luma_bytes / 2 : 0;
  const uint64_t needed =
      static_cast<uint64_t>(frame_count) * (luma_bytes + chroma_bytes);
  const uint64_t actual = std::filesystem::file_size(path);
  if (actual < needed) {
    throw TruncatedInputError(path.string() + ": need " + std::to_string(needed) +
                              " bytes for " + std::to_string(frame_count) +
                              " frames, file has " + std::to_string(actual));
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError("cannot open " + path.string());

  Sequence seq;
  seq.name = name.empty() ? path.stem().string() : std::move(name);
  seq.frames.reserve(frame_count);
  for (int f = 0; f < frame_count; ++f) {
    Frame frame{width, height, std::vector<uint8_t>(luma_bytes)};
    in.read(reinterpret_cast<char*>(frame.luma.data()),
            static_cast<std::streamsize>(luma_bytes));
    if (!in) throw TruncatedInputError(path.string() + ": short read at frame " +
                                       std::to_string(f));
    if (chroma_bytes > 0) {
      in.seekg(static_cast<std::streamoff>(chroma_bytes), std::ios::cur);
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

void write_raw_video(const Sequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileNotFoundError("cannot open for writing: " + path.string());
  for (const Frame& frame : seq.frames) {
    out.write(reinterpret_cast<const char*>(frame.luma.data()),
              static_cast<std::streamsize>(frame.luma.size()));
  }
  if (!out) throw TruncatedInputError("short write to " + path.string());
}

SynthKind synth_kind_from_string(const std::string& s) {
  if (s == "flat") return SynthKind::kFlat;
  if (s == "gradient") return SynthKind::kGradient;
  if (s == "moving_block") return SynthKind::kMovingBlock;
  if (s == "noise") return SynthKind::kNoise;
  throw ConfigError("unknown synthetic sequence kind: " + s);
}

const char* synth_kind_name(SynthKind k) {
  switch (k) {
    case SynthKind::kFlat: return "flat";
    case SynthKind::kGradient: return "gradient";
    case SynthKind::kMovingBlock: return "moving_block";
    case SynthKind::kNoise: return "noise";
  }
  return "?";
}

namespace {

Frame gradient_frame(int width, int height, int t) {
  Frame frame{width, height, std::vector<uint8_t>(static_cast<size_t>(width) * height)};
  for (int y = 0; y < height; ++y) {
    uint8_t* row = frame.row(y);
    for (int x = 0; x < width; ++x) {
      int vx = width > 1 ? (x * 255) / (width - 1) : 0;
      int vy = height > 1 ? (y * 255) / (height - 1) : 0;
      row[x] = clamp_u8((vx + vy) / 2 + 2 * t);
    }
  }
  return frame;
}

}  // namespace

Sequence synthesize_sequence(SynthKind kind, int width, int height,
                             int frame_count, uint64_t seed,
                             std::string name) {
  check_dimensions(width, height);
  check_frame_count(frame_count);

  Sequence seq;
  seq.name = !name.empty()
                 ? std::move(name)
                 : std::string(synth_kind_name(kind)) + "_" + std::to_string(width) +
                       "x" + std::to_string(height) + "_s" + std::to_string(seed);
  seq.frames.reserve(frame_count);
  Rng rng(seed);

  switch (kind) {
    case SynthKind::kFlat: {
      for (int f = 0; f < frame_count; ++f) {
        seq.frames.push_back(
            Frame{width, height,
                  std::vector<uint8_t>(static_cast<size_t>(width) * height, 128)});
      }
      break;
    }
    case SynthKind::kGradient: {
      for (int f = 0; f < frame_count; ++f) {
        seq.frames.push_back(gradient_frame(width, height, f));
      }
      break;
    }
    case SynthKind::kMovingBlock: {
      // Static textured background plus a textured rectangle moving by a
      // fixed (2,1) per frame, clamped to the frame interior.
      Frame background = gradient_frame(width, height, 0);
      for (uint8_t& s : background.luma) {
        s = clamp_u8(static_cast<int>(s) + static_cast<int>(rng.next_below(9)) - 4);
      }
      const int block_w = std::min(24, width / 2);
      const int block_h = std::min(24, height / 2);
      std::vector<uint8_t> texture(static_cast<size_t>(block_w) * block_h);
      for (uint8_t& s : texture) s = static_cast<uint8_t>(rng.next_below(256));
      const int x_start = width / 8;
      const int y_start = height / 8;
      for (int f = 0; f < frame_count; ++f) {
        Frame frame = background;
        int bx = std::min(x_start + 2 * f, width - block_w);
        int by = std::min(y_start + 1 * f, height - block_h);
        for (int y = 0; y < block_h; ++y) {
          uint8_t* row = frame.row(by + y) + bx;
          const uint8_t* tex = texture.data() + static_cast<size_t>(y) * block_w;
          for (int x = 0; x < block_w; ++x) row[x] = tex[x];
        }
        seq.frames.push_back(std::move(frame));
      }
      break;
    }
    case SynthKind::kNoise: {
      for (int f = 0; f < frame_count; ++f) {
        Frame frame{width, height,
                    std::vector<uint8_t>(static_cast<size_t>(width) * height)};
        for (uint8_t& s : frame.luma) s = static_cast<uint8_t>(rng.next_below(256));
        seq.frames.push_back(std::move(frame));
      }
      break;
    }
  }
  return seq;
}

Frame pad_to_ctu(const Frame& frame) {
  const int pw = ((frame.width + kCtuSize - 1) / kCtuSize) * kCtuSize;
  const int ph = ((frame.height + kCtuSize - 1) / kCtuSize) * kCtuSize;
  if (pw == frame.width && ph == frame.height) return frame;

  Frame padded{pw, ph, std::vector<uint8_t>(static_cast<size_t>(pw) * ph)};
  for (int y = 0; y < ph; ++y) {
    const uint8_t* src = frame.row(std::min(y, frame.height - 1));
    uint8_t* dst = padded.row(y);
    for (int x = 0; x < frame.width; ++x) dst[x] = src[x];
    const uint8_t edge = src[frame.width - 1];
    for (int x = frame.width; x < pw; ++x) dst[x] = edge;
  }
  return padded;
}

}  // namespace modex
