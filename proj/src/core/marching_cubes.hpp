#pragma once

#include <array>
#include <cstdint>

#include "core/geometry.hpp"

namespace scn {

/// Classic 256-case marching cubes tables. Corner numbering:
///   0:(0,0,0) 1:(1,0,0) 2:(1,1,0) 3:(0,1,0)
///   4:(0,0,1) 5:(1,0,1) 6:(1,1,1) 7:(0,1,1)
/// Edge e connects mc_edge_corners[e][0] and [1]. A corner is "inside" when
/// its value is negative; mc case index is built as bit i set iff corner i inside.
extern const uint16_t mc_edge_table[256];
extern const int8_t mc_tri_table[256][16];
extern const int mc_edge_corners[12][2];

/// Offsets of the 8 cell corners in (x,y,z) order matching the numbering.
extern const int mc_corner_offset[8][3];

}  // namespace scn
