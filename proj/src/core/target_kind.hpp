#pragma once

#include <cstdint>

namespace scn {

/// Supervision kind of one training target.
enum class TargetKind : uint8_t {
  semantic = 0,            // labeled surface point, class id in 1..N
  occupied_unlabeled = 1,  // surface point without a usable label
  free_space = 2,          // carved or voxel-sampled empty position
  consistency = 3,         // unlabeled position, regularizer only
};

inline const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::semantic:
      return "semantic";
    case TargetKind::occupied_unlabeled:
      return "occupied_unlabeled";
    case TargetKind::free_space:
      return "free";
    case TargetKind::consistency:
      return "consistency";
  }
  return "?";
}

}  // namespace scn
