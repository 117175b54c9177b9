#include "modex/mode.hpp"

namespace modex {

bool mode_valid_at_depth(ModeId m, int depth) {
  if (depth < 0 || depth > kMaxDepth) return false;
  int id = mode_index(m);
  if (id >= 0 && id <= 4) return true;
  if ((id >= 5 && id <= 8) || id == 10) return depth <= 2;
  if (id == 9) return depth == 3;
  return false;
}

const std::vector<ModeId>& valid_modes_at_depth(int depth) {
  static const std::vector<ModeId> upper = {
      ModeId::kIntra2Nx2N, ModeId::kInter2Nx2N, ModeId::kMerge2Nx2N,
      ModeId::kInterNx2N,  ModeId::kInter2NxN,  ModeId::kInter2NxnU,
      ModeId::kInter2NxnD, ModeId::kInternLx2N, ModeId::kInternRx2N,
      ModeId::kSplit};
  static const std::vector<ModeId> leaf = {
      ModeId::kIntra2Nx2N, ModeId::kInter2Nx2N, ModeId::kMerge2Nx2N,
      ModeId::kInterNx2N,  ModeId::kInter2NxN,  ModeId::kIntraNxN};
  return depth == kMaxDepth ? leaf : upper;
}

const char* mode_name(ModeId m) {
  switch (m) {
    case ModeId::kIntra2Nx2N: return "Intra2Nx2N";
    case ModeId::kInter2Nx2N: return "Inter2Nx2N";
    case ModeId::kMerge2Nx2N: return "Merge2Nx2N";
    case ModeId::kInterNx2N: return "InterNx2N";
    case ModeId::kInter2NxN: return "Inter2NxN";
    case ModeId::kInter2NxnU: return "Inter2NxnU";
    case ModeId::kInter2NxnD: return "Inter2NxnD";
    case ModeId::kInternLx2N: return "InternLx2N";
    case ModeId::kInternRx2N: return "InternRx2N";
    case ModeId::kIntraNxN: return "IntraNxN";
    case ModeId::kSplit: return "Split";
  }
  return "?";
}

bool mode_intra_capable(ModeId m) {
  return m == ModeId::kIntra2Nx2N || m == ModeId::kIntraNxN ||
         m == ModeId::kSplit;
}

}  // namespace modex
