#include "core/class_map.hpp"

#include "core/error.hpp"

namespace scn {

void class_map_to_container(const ClassMap& m, Container& c,
                            const std::string& prefix) {
  std::vector<uint32_t> raws;
  std::vector<uint16_t> classes;
  raws.reserve(m.to_class.size());
  for (const auto& [raw, cls] : m.to_class) {
    raws.push_back(raw);
    classes.push_back(cls);
  }
  c.add_u64(prefix + "n_classes", std::vector<uint64_t>{
                                      static_cast<uint64_t>(m.n_classes)});
  c.add_u32(prefix + "raw_ids", raws);
  c.add_u16(prefix + "class_ids", classes);
}

ClassMap class_map_from_container(const Container& c,
                                  const std::string& prefix) {
  ClassMap m;
  m.n_classes = static_cast<int>(c.get_scalar_u64(prefix + "n_classes"));
  auto raws = c.get_u32(prefix + "raw_ids");
  auto classes = c.get_u16(prefix + "class_ids");
  if (raws.size() != classes.size())
    fail(ErrorCode::format, "class map arrays disagree in length");
  for (size_t i = 0; i < raws.size(); ++i) {
    if (classes[i] < 1 || classes[i] > m.n_classes)
      fail(ErrorCode::data, "class map target out of range");
    m.to_class[raws[i]] = classes[i];
  }
  return m;
}

}  // namespace scn
