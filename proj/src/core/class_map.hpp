#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "core/container.hpp"

namespace scn {

constexpr uint16_t kUnlabeled = 0;

/// Maps raw dataset label ids (lower 16 bits of a label record) onto the
/// contiguous class range 1..N. Unmapped ids become kUnlabeled.
struct ClassMap {
  int n_classes = 19;
  std::map<uint32_t, uint16_t> to_class;  // ordered for stable serialization

  static ClassMap identity(int n) {
    ClassMap m;
    m.n_classes = n;
    for (int i = 1; i <= n; ++i)
      m.to_class[static_cast<uint32_t>(i)] = static_cast<uint16_t>(i);
    return m;
  }

  uint16_t lookup(uint32_t raw) const {
    auto it = to_class.find(raw & 0xffffu);
    return it == to_class.end() ? kUnlabeled : it->second;
  }

  /// First raw id mapping to `cls`, for writing label files back out.
  uint32_t raw_of(uint16_t cls) const {
    for (const auto& [raw, c] : to_class)
      if (c == cls) return raw;
    return 0;
  }
};

void class_map_to_container(const ClassMap& m, Container& c,
                            const std::string& prefix);
ClassMap class_map_from_container(const Container& c,
                                  const std::string& prefix);

}  // namespace scn
