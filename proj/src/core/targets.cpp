#include "core/targets.hpp"

#include "core/container.hpp"
#include "core/error.hpp"

namespace scn {

size_t TargetSet::count_of(TargetKind k) const {
  size_t n = 0;
  for (const Target& t : targets)
    if (t.kind == k) ++n;
  return n;
}

namespace {

std::vector<int32_t> pack_voxels(const std::vector<VoxelIdx>& v) {
  std::vector<int32_t> out;
  out.reserve(v.size() * 3);
  for (const VoxelIdx& i : v) {
    out.push_back(i.x);
    out.push_back(i.y);
    out.push_back(i.z);
  }
  return out;
}

std::vector<VoxelIdx> unpack_voxels(const std::vector<int32_t>& v,
                                    const std::string& what) {
  if (v.size() % 3 != 0)
    fail(ErrorCode::format, "voxel index array not a multiple of 3: " + what);
  std::vector<VoxelIdx> out(v.size() / 3);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = {v[i * 3], v[i * 3 + 1], v[i * 3 + 2]};
  return out;
}

}  // namespace

void save_target_set(const TargetSet& t, const std::string& path) {
  Container c;
  c.add_string("kind", "target_set");
  std::vector<double> ext{t.extent.min_corner.x, t.extent.min_corner.y,
                          t.extent.min_corner.z, t.extent.max_corner.x,
                          t.extent.max_corner.y, t.extent.max_corner.z};
  c.add_f64("extent", ext);
  c.add_scalar_f64("voxel_edge", t.voxel_edge);

  size_t n = t.targets.size();
  std::vector<double> pos(n * 3);
  std::vector<uint8_t> kinds(n);
  std::vector<uint16_t> classes(n);
  for (size_t i = 0; i < n; ++i) {
    pos[i * 3 + 0] = t.targets[i].position.x;
    pos[i * 3 + 1] = t.targets[i].position.y;
    pos[i * 3 + 2] = t.targets[i].position.z;
    kinds[i] = static_cast<uint8_t>(t.targets[i].kind);
    classes[i] = t.targets[i].class_id;
  }
  c.add_f64("positions", pos, {n, 3});
  c.add_u8("kinds", kinds);
  c.add_u16("classes", classes);
  c.add_i32("empty_voxels", pack_voxels(t.empty_voxels));
  c.add_i32("unseen_voxels", pack_voxels(t.unseen_voxels));
  c.save(path);
}

TargetSet load_target_set(const std::string& path) {
  Container c = Container::load(path);
  if (c.get_string("kind") != "target_set")
    fail(ErrorCode::format, path + ": not a target set file");
  TargetSet t;
  auto ext = c.get_f64("extent");
  if (ext.size() != 6) fail(ErrorCode::format, path + ": bad extent");
  t.extent.min_corner = {ext[0], ext[1], ext[2]};
  t.extent.max_corner = {ext[3], ext[4], ext[5]};
  t.voxel_edge = c.get_scalar_f64("voxel_edge");
  auto pos = c.get_f64("positions");
  auto kinds = c.get_u8("kinds");
  auto classes = c.get_u16("classes");
  if (pos.size() != kinds.size() * 3 || kinds.size() != classes.size())
    fail(ErrorCode::format, path + ": target arrays disagree in length");
  t.targets.resize(kinds.size());
  for (size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] > static_cast<uint8_t>(TargetKind::consistency))
      fail(ErrorCode::data, path + ": bad target kind");
    t.targets[i].position = {pos[i * 3], pos[i * 3 + 1], pos[i * 3 + 2]};
    t.targets[i].kind = static_cast<TargetKind>(kinds[i]);
    t.targets[i].class_id = classes[i];
  }
  t.empty_voxels = unpack_voxels(c.get_i32("empty_voxels"), "empty_voxels");
  t.unseen_voxels = unpack_voxels(c.get_i32("unseen_voxels"), "unseen_voxels");
  return t;
}

}  // namespace scn
