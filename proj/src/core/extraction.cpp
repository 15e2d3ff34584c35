#include "core/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "core/error.hpp"
#include "core/marching_cubes.hpp"
#include "core/numerics.hpp"
#include "core/rng.hpp"
#include "core/threading.hpp"

namespace scn {

bool VoxelGrid::same_spec(const VoxelGrid& o) const {
  return origin.x == o.origin.x && origin.y == o.origin.y &&
         origin.z == o.origin.z && edge == o.edge && dims == o.dims;
}

void save_voxel_grid(const VoxelGrid& g, const std::string& path) {
  Container c;
  c.add_string("kind", "voxel_grid");
  std::vector<double> geo{g.origin.x, g.origin.y, g.origin.z, g.edge};
  c.add_f64("geometry", geo);
  std::vector<int32_t> dims{g.dims.x, g.dims.y, g.dims.z};
  c.add_i32("dims", dims);
  c.add_u16("labels", g.labels,
            {static_cast<uint64_t>(g.dims.x), static_cast<uint64_t>(g.dims.y),
             static_cast<uint64_t>(g.dims.z)});
  c.save(path);
}

VoxelGrid load_voxel_grid(const std::string& path) {
  Container c = Container::load(path);
  if (c.get_string("kind") != "voxel_grid")
    fail(ErrorCode::format, path + ": not a voxel grid file");
  VoxelGrid g;
  auto geo = c.get_f64("geometry");
  auto dims = c.get_i32("dims");
  if (geo.size() != 4 || dims.size() != 3)
    fail(ErrorCode::format, path + ": bad voxel grid header");
  g.origin = {geo[0], geo[1], geo[2]};
  g.edge = geo[3];
  g.dims = {dims[0], dims[1], dims[2]};
  g.labels = c.get_u16("labels");
  if (g.labels.size() != g.voxel_count())
    fail(ErrorCode::format, path + ": label count mismatch");
  return g;
}

void FieldEvaluator::probs(const Vec3& p, double* out) const {
  std::vector<double> v = predict(params_, grid_, p);
  std::copy(v.begin(), v.end(), out);
}

double FieldEvaluator::free_prob(const Vec3& p) const {
  std::vector<double> v = predict(params_, grid_, p);
  return v.back();
}

FreeSpaceGrad FieldEvaluator::free_with_grad(const Vec3& p) const {
  return free_space_with_grad(params_, grid_, p);
}

uint16_t FieldEvaluator::semantic_argmax(const Vec3& p) const {
  std::vector<double> v = predict(params_, grid_, p);
  int best = 0;
  for (int i = 1; i < n_classes(); ++i)
    if (v[i] > v[best]) best = i;
  return static_cast<uint16_t>(best + 1);
}

CornerField evaluate_corners(const FieldEvaluator& field, const Vec3& origin,
                             double edge, const VoxelIdx& dims) {
  CornerField cf;
  cf.origin = origin;
  cf.edge = edge;
  cf.vox_dims = dims;
  cf.k = field.logit_dim();
  const size_t cx = dims.x + 1, cy = dims.y + 1, cz = dims.z + 1;
  const size_t total = cx * cy * cz;
  cf.probs.assign(total * cf.k, 0.0);

  const DecoderParams& params = field.params();
  const LatentGrid& grid = field.grid();
  const int k = cf.k;
  const size_t chunk = 8192;
  for (size_t begin = 0; begin < total; begin += chunk) {
    size_t end = std::min(total, begin + chunk);
    size_t n = end - begin;
    std::vector<SupportEval> evals(n * 4);
    std::vector<double> weights(n * 4);
    for (size_t i = 0; i < n; ++i) {
      size_t flat = begin + i;
      int x = static_cast<int>(flat / (cy * cz));
      int y = static_cast<int>((flat / cz) % cy);
      int z = static_cast<int>(flat % cz);
      Vec3 p{origin.x + x * edge, origin.y + y * edge, origin.z + z * edge};
      SupportRegion region;
      try {
        region = support_region(p, grid.config);
      } catch (const Error& e) {
        fail(ErrorCode::domain,
             std::string(e.what()) +
                 " (voxel corner outside the latent footprint; inset the "
                 "voxel grid or enlarge grid.cells)");
      }
      auto entries = gather(grid, region);
      for (int s = 0; s < 4; ++s) {
        evals[i * 4 + s] = to_eval(entries[s]);
        weights[i * 4 + s] = entries[s].weight;
      }
    }
    std::vector<double> z = forward_batch(params, evals, RunMode::infer,
                                          nullptr);
    parallel_chunks(n, [&](size_t b, size_t e, int) {
      std::vector<double> prob(k);
      for (size_t i = b; i < e; ++i) {
        double* out = cf.probs.data() + (begin + i) * k;
        for (int s = 0; s < 4; ++s) {
          stable_softmax({z.data() + (i * 4 + s) * k,
                          static_cast<size_t>(k)},
                         prob);
          double w = weights[i * 4 + s];
          for (int j = 0; j < k; ++j) out[j] += w * prob[j];
        }
      }
    });
  }
  return cf;
}

VoxelGrid voxelize_from_corners(const CornerField& corners,
                                double theta_empty) {
  if (!(theta_empty > 0.0 && theta_empty < 1.0))
    fail(ErrorCode::argument, "theta_empty must be in (0,1)");
  VoxelGrid g;
  g.origin = corners.origin;
  g.edge = corners.edge;
  g.dims = corners.vox_dims;
  g.labels.assign(g.voxel_count(), 0);
  const int k = corners.k;
  const int n_sem = k - 1;
  parallel_chunks(g.voxel_count(), [&](size_t b, size_t e, int) {
    std::vector<double> mean(n_sem);
    for (size_t flat = b; flat < e; ++flat) {
      int x = static_cast<int>(flat / (static_cast<size_t>(g.dims.y) *
                                       g.dims.z));
      int y = static_cast<int>((flat / g.dims.z) % g.dims.y);
      int z = static_cast<int>(flat % g.dims.z);
      std::fill(mean.begin(), mean.end(), 0.0);
      int occupied_corners = 0;
      for (int c = 0; c < 8; ++c) {
        const double* p = corners.at(x + mc_corner_offset[c][0],
                                     y + mc_corner_offset[c][1],
                                     z + mc_corner_offset[c][2]);
        if (p[k - 1] < theta_empty) {
          ++occupied_corners;
          for (int j = 0; j < n_sem; ++j) mean[j] += p[j];
        }
      }
      if (occupied_corners == 0) continue;
      for (int j = 0; j < n_sem; ++j) mean[j] /= occupied_corners;
      int best = 0;
      for (int j = 1; j < n_sem; ++j)
        if (mean[j] > mean[best]) best = j;
      g.labels[flat] = static_cast<uint16_t>(best + 1);
    }
  });
  return g;
}

VoxelGrid voxelize(const Checkpoint& ckpt, const Vec3& origin, double edge,
                   const VoxelIdx& dims, double theta_empty) {
  FieldEvaluator field(ckpt.params, ckpt.grid);
  CornerField corners = evaluate_corners(field, origin, edge, dims);
  return voxelize_from_corners(corners, theta_empty);
}

VoxelGrid scene_truth_grid(const SyntheticScene& scene, const Vec3& origin,
                           double edge, const VoxelIdx& dims) {
  VoxelGrid g;
  g.origin = origin;
  g.edge = edge;
  g.dims = dims;
  g.labels.assign(g.voxel_count(), 0);
  // corner classes via containment (no shell)
  const size_t cx = dims.x + 1, cy = dims.y + 1, cz = dims.z + 1;
  std::vector<uint16_t> corner_cls(cx * cy * cz, 0);
  parallel_chunks(corner_cls.size(), [&](size_t b, size_t e, int) {
    for (size_t flat = b; flat < e; ++flat) {
      int x = static_cast<int>(flat / (cy * cz));
      int y = static_cast<int>((flat / cz) % cy);
      int z = static_cast<int>(flat % cz);
      Vec3 p{origin.x + x * edge, origin.y + y * edge, origin.z + z * edge};
      corner_cls[flat] = ground_truth_class(scene, p, 0.0);
    }
  });
  parallel_chunks(g.voxel_count(), [&](size_t b, size_t e, int) {
    for (size_t flat = b; flat < e; ++flat) {
      int x = static_cast<int>(flat / (static_cast<size_t>(g.dims.y) *
                                       g.dims.z));
      int y = static_cast<int>((flat / g.dims.z) % g.dims.y);
      int z = static_cast<int>(flat % g.dims.z);
      // majority class over occupied corners, smallest id wins ties
      std::unordered_map<uint16_t, int> counts;
      for (int c = 0; c < 8; ++c) {
        size_t cf = (static_cast<size_t>(x + mc_corner_offset[c][0]) * cy +
                     (y + mc_corner_offset[c][1])) *
                        cz +
                    (z + mc_corner_offset[c][2]);
        uint16_t cls = corner_cls[cf];
        if (cls > 0) ++counts[cls];
      }
      uint16_t best = 0;
      int best_count = 0;
      for (const auto& [cls, count] : counts)
        if (count > best_count || (count == best_count && cls < best)) {
          best = cls;
          best_count = count;
        }
      g.labels[flat] = best;
    }
  });
  return g;
}

// ---------------------------------------------------------------------------
// isosurface extraction

namespace {

struct MCWorkspace {
  // lazily evaluated corner values (field value minus threshold, folded into
  // the field itself) on the final-resolution grid
  std::unordered_map<uint64_t, double> values;
  const ScalarField* field = nullptr;
  SceneExtent extent;
  int final_res = 0;
  Vec3 h;  // cell size per axis

  uint64_t corner_id(int x, int y, int z) const {
    uint64_t r1 = static_cast<uint64_t>(final_res) + 1;
    return (static_cast<uint64_t>(x) * r1 + y) * r1 + z;
  }
  Vec3 corner_pos(int x, int y, int z) const {
    return {extent.min_corner.x + x * h.x, extent.min_corner.y + y * h.y,
            extent.min_corner.z + z * h.z};
  }
  double value_at(int x, int y, int z) {
    uint64_t id = corner_id(x, y, z);
    auto it = values.find(id);
    if (it != values.end()) return it->second;
    double v = (*field)(corner_pos(x, y, z));
    values.emplace(id, v);
    return v;
  }

  /// Evaluates any uncached corners from the list in parallel.
  void prefetch(const std::vector<std::array<int, 3>>& corners) {
    std::vector<std::array<int, 3>> missing;
    std::unordered_set<uint64_t> queued;
    missing.reserve(corners.size());
    for (const auto& c : corners) {
      uint64_t id = corner_id(c[0], c[1], c[2]);
      if (values.find(id) == values.end() && queued.insert(id).second)
        missing.push_back(c);
    }
    std::vector<double> out(missing.size());
    parallel_chunks(missing.size(), [&](size_t b, size_t e, int) {
      for (size_t i = b; i < e; ++i)
        out[i] = (*field)(corner_pos(missing[i][0], missing[i][1],
                                     missing[i][2]));
    });
    for (size_t i = 0; i < missing.size(); ++i)
      values.emplace(corner_id(missing[i][0], missing[i][1], missing[i][2]),
                     out[i]);
  }
};

struct Cell {
  int x, y, z;
  bool operator<(const Cell& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
  }
};

// Marching cubes over unit cells of the final grid; vertices welded by the
// global edge they sit on so shared edges produce one vertex.
TriMesh polygonize_cells(MCWorkspace& ws, std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end());
  TriMesh mesh;
  std::unordered_map<uint64_t, uint32_t> edge_vertex;
  uint64_t n_corners = static_cast<uint64_t>(ws.final_res + 1) *
                       (ws.final_res + 1) * (ws.final_res + 1);

  for (const Cell& cell : cells) {
    double v[8];
    int mask = 0;
    for (int c = 0; c < 8; ++c) {
      v[c] = ws.value_at(cell.x + mc_corner_offset[c][0],
                         cell.y + mc_corner_offset[c][1],
                         cell.z + mc_corner_offset[c][2]);
      if (v[c] < 0.0) mask |= 1 << c;
    }
    if (mask == 0 || mask == 255) continue;
    const int8_t* tris = mc_tri_table[mask];
    for (int t = 0; t < 16 && tris[t] >= 0; t += 3) {
      uint32_t ids[3];
      for (int i = 0; i < 3; ++i) {
        int e = tris[t + i];
        int ca = mc_edge_corners[e][0], cb = mc_edge_corners[e][1];
        int ax = cell.x + mc_corner_offset[ca][0];
        int ay = cell.y + mc_corner_offset[ca][1];
        int az = cell.z + mc_corner_offset[ca][2];
        int bx = cell.x + mc_corner_offset[cb][0];
        int by = cell.y + mc_corner_offset[cb][1];
        int bz = cell.z + mc_corner_offset[cb][2];
        uint64_t ida = ws.corner_id(ax, ay, az);
        uint64_t idb = ws.corner_id(bx, by, bz);
        uint64_t key = ida < idb ? ida * n_corners + idb
                                 : idb * n_corners + ida;
        auto it = edge_vertex.find(key);
        if (it == edge_vertex.end()) {
          double va = v[ca], vb = v[cb];
          double tt = va / (va - vb);
          Vec3 pa = ws.corner_pos(ax, ay, az);
          Vec3 pb = ws.corner_pos(bx, by, bz);
          Vec3 pos = pa + (pb - pa) * tt;
          it = edge_vertex
                   .emplace(key, static_cast<uint32_t>(mesh.vertices.size()))
                   .first;
          mesh.vertices.push_back(pos);
        }
        ids[i] = it->second;
      }
      if (ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2]) continue;
      Vec3 a = mesh.vertices[ids[0]], b = mesh.vertices[ids[1]],
           c = mesh.vertices[ids[2]];
      if (((b - a).cross(c - a)).norm2() == 0.0) continue;  // degenerate
      mesh.faces.push_back({ids[0], ids[1], ids[2]});
    }
  }
  return mesh;
}

bool cell_straddles(MCWorkspace& ws, int x, int y, int z, int step) {
  bool neg = false, pos = false;
  for (int c = 0; c < 8; ++c) {
    double v = ws.value_at(x + mc_corner_offset[c][0] * step,
                           y + mc_corner_offset[c][1] * step,
                           z + mc_corner_offset[c][2] * step);
    if (v < 0.0)
      neg = true;
    else
      pos = true;
  }
  return neg && pos;
}

}  // namespace

TriMesh mise_mesh_field(const ScalarField& field, const SceneExtent& extent,
                        int coarse_res, int final_res, MeshStats* stats) {
  if (coarse_res < 1 || final_res < coarse_res)
    fail(ErrorCode::argument, "resolutions must satisfy 1 <= coarse <= final");
  int ratio = final_res / coarse_res;
  if (coarse_res * ratio != final_res || (ratio & (ratio - 1)) != 0)
    fail(ErrorCode::argument,
         "final_res must be a power-of-two multiple of coarse_res");
  if (!extent.valid()) fail(ErrorCode::argument, "invalid extent");

  MCWorkspace ws;
  ws.field = &field;
  ws.extent = extent;
  ws.final_res = final_res;
  ws.h = extent.size() / static_cast<double>(final_res);

  int step = ratio;
  std::vector<Cell> active;
  {
    std::vector<std::array<int, 3>> corners;
    for (int x = 0; x <= coarse_res; ++x)
      for (int y = 0; y <= coarse_res; ++y)
        for (int z = 0; z <= coarse_res; ++z)
          corners.push_back({x * step, y * step, z * step});
    ws.prefetch(corners);
  }
  for (int x = 0; x < coarse_res; ++x)
    for (int y = 0; y < coarse_res; ++y)
      for (int z = 0; z < coarse_res; ++z)
        if (cell_straddles(ws, x * step, y * step, z * step, step))
          active.push_back({x * step, y * step, z * step});

  while (step > 1) {
    int half = step / 2;
    std::vector<std::array<int, 3>> corners;
    for (const Cell& c : active)
      for (int dx = 0; dx <= 2; ++dx)
        for (int dy = 0; dy <= 2; ++dy)
          for (int dz = 0; dz <= 2; ++dz)
            corners.push_back({c.x + dx * half, c.y + dy * half,
                               c.z + dz * half});
    ws.prefetch(corners);
    std::vector<Cell> next;
    for (const Cell& c : active)
      for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy)
          for (int dz = 0; dz < 2; ++dz) {
            int x = c.x + dx * half, y = c.y + dy * half, z = c.z + dz * half;
            if (cell_straddles(ws, x, y, z, half)) next.push_back({x, y, z});
          }
    active = std::move(next);
    step = half;
  }

  TriMesh mesh = polygonize_cells(ws, active);
  if (stats != nullptr) {
    stats->evaluations = ws.values.size();
    stats->active_cells = active.size();
  }
  return mesh;
}

TriMesh dense_mesh_field(const ScalarField& field, const SceneExtent& extent,
                         int final_res, MeshStats* stats) {
  if (final_res < 1) fail(ErrorCode::argument, "final_res must be >= 1");
  if (!extent.valid()) fail(ErrorCode::argument, "invalid extent");
  MCWorkspace ws;
  ws.field = &field;
  ws.extent = extent;
  ws.final_res = final_res;
  ws.h = extent.size() / static_cast<double>(final_res);
  {
    std::vector<std::array<int, 3>> corners;
    for (int x = 0; x <= final_res; ++x)
      for (int y = 0; y <= final_res; ++y)
        for (int z = 0; z <= final_res; ++z) corners.push_back({x, y, z});
    ws.prefetch(corners);
  }
  std::vector<Cell> cells;
  cells.reserve(static_cast<size_t>(final_res) * final_res * final_res);
  for (int x = 0; x < final_res; ++x)
    for (int y = 0; y < final_res; ++y)
      for (int z = 0; z < final_res; ++z) cells.push_back({x, y, z});
  TriMesh mesh = polygonize_cells(ws, cells);
  if (stats != nullptr) {
    stats->evaluations = ws.values.size();
    stats->active_cells = cells.size();
  }
  return mesh;
}

TriMesh mise_mesh(const Checkpoint& ckpt, const SceneExtent& extent,
                  double theta_free, int coarse_res, int final_res,
                  MeshStats* stats) {
  if (!(theta_free > 0.0 && theta_free < 1.0))
    fail(ErrorCode::argument, "theta_free must be in (0,1)");
  FieldEvaluator field(ckpt.params, ckpt.grid);
  ScalarField f = [&field, theta_free](const Vec3& p) {
    return field.free_prob(p) - theta_free;
  };
  return mise_mesh_field(f, extent, coarse_res, final_res, stats);
}

TriMesh refine_and_color(const Checkpoint& ckpt, const TriMesh& mesh,
                         double theta_free, int iters, double step) {
  FieldEvaluator field(ckpt.params, ckpt.grid);
  TriMesh out = mesh;
  parallel_chunks(out.vertices.size(), [&](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i) {
      Vec3 v = out.vertices[i];
      for (int it = 0; it < iters; ++it) {
        FreeSpaceGrad fg = field.free_with_grad(v);
        double g2 = fg.grad.norm2();
        if (std::sqrt(g2) < 1e-9) break;  // flat region, leave in place
        Vec3 next = v - fg.grad * (step * (fg.value - theta_free) / g2);
        if (!in_grid_domain(next, ckpt.grid.config)) break;
        v = next;
      }
      out.vertices[i] = v;
    }
  });
  out.face_class.assign(out.faces.size(), 0);
  parallel_chunks(out.faces.size(), [&](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i) {
      const auto& f = out.faces[i];
      Vec3 centroid = (out.vertices[f[0]] + out.vertices[f[1]] +
                       out.vertices[f[2]]) /
                      3.0;
      out.face_class[i] = field.semantic_argmax(centroid);
    }
  });
  return out;
}

std::vector<std::array<uint8_t, 3>> default_palette(int n_classes) {
  std::vector<std::array<uint8_t, 3>> pal(n_classes + 1);
  pal[0] = {128, 128, 128};
  for (int i = 1; i <= n_classes; ++i) {
    // golden-ratio hue walk keeps neighboring ids distinct
    double h = std::fmod(0.61803398875 * i, 1.0) * 6.0;
    double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h)) {
      case 0: r = 1; g = x; break;
      case 1: r = x; g = 1; break;
      case 2: g = 1; b = x; break;
      case 3: g = x; b = 1; break;
      case 4: r = x; b = 1; break;
      default: r = 1; b = x; break;
    }
    pal[i] = {static_cast<uint8_t>(55 + 200 * r),
              static_cast<uint8_t>(55 + 200 * g),
              static_cast<uint8_t>(55 + 200 * b)};
  }
  return pal;
}

void save_ply(const TriMesh& mesh, const std::string& path,
              const std::vector<std::array<uint8_t, 3>>& palette) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(ErrorCode::io, "cannot open for writing: " + path);
  f << "ply\nformat ascii 1.0\n";
  f << "element vertex " << mesh.vertices.size() << "\n";
  f << "property float x\nproperty float y\nproperty float z\n";
  f << "element face " << mesh.faces.size() << "\n";
  f << "property list uchar int vertex_indices\n";
  f << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  f << "property ushort class_id\nend_header\n";
  char buf[160];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", v.x, v.y, v.z);
    f << buf;
  }
  for (size_t i = 0; i < mesh.faces.size(); ++i) {
    uint16_t cls =
        i < mesh.face_class.size() ? mesh.face_class[i] : uint16_t{0};
    const auto& rgb = palette[cls < palette.size() ? cls : 0];
    std::snprintf(buf, sizeof(buf), "3 %u %u %u %u %u %u %u\n",
                  mesh.faces[i][0], mesh.faces[i][1], mesh.faces[i][2],
                  rgb[0], rgb[1], rgb[2], cls);
    f << buf;
  }
  if (!f) fail(ErrorCode::io, "write failed: " + path);
}

// ---------------------------------------------------------------------------
// ground segmentation image

std::vector<std::array<uint32_t, 3>> delaunay_triangulate(
    const std::vector<Vec3>& pts) {
  struct Tri {
    uint32_t a, b, c;
    double cx, cy, r2;
    bool alive = true;
  };
  size_t n = pts.size();
  if (n < 3) return {};

  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const Vec3& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double d = std::max(max_x - min_x, max_y - min_y);
  if (d <= 0) d = 1.0;
  double mx = (min_x + max_x) / 2, my = (min_y + max_y) / 2;
  std::vector<Vec3> v(pts);
  v.push_back({mx - 20 * d, my - 10 * d, 0});
  v.push_back({mx + 20 * d, my - 10 * d, 0});
  v.push_back({mx, my + 20 * d, 0});
  uint32_t s0 = static_cast<uint32_t>(n);

  auto circum = [&](Tri& t) {
    double ax = v[t.a].x, ay = v[t.a].y;
    double bx = v[t.b].x, by = v[t.b].y;
    double cx = v[t.c].x, cy = v[t.c].y;
    double dd = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if (std::abs(dd) < 1e-12) {
      t.cx = t.cy = 0;
      t.r2 = 1e300;  // degenerate, always re-triangulated away
      return;
    }
    double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by,
           c2 = cx * cx + cy * cy;
    t.cx = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / dd;
    t.cy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / dd;
    double dx = ax - t.cx, dy = ay - t.cy;
    t.r2 = dx * dx + dy * dy;
  };

  std::vector<Tri> tris;
  Tri super{s0, s0 + 1, s0 + 2, 0, 0, 0, true};
  circum(super);
  tris.push_back(super);

  for (uint32_t i = 0; i < n; ++i) {
    double px = v[i].x, py = v[i].y;
    std::vector<std::pair<uint32_t, uint32_t>> boundary;
    auto add_edge = [&boundary](uint32_t a, uint32_t b) {
      for (auto& e : boundary) {
        if ((e.first == b && e.second == a) ||
            (e.first == a && e.second == b)) {
          e.first = UINT32_MAX;  // interior edge of the cavity
          return;
        }
      }
      boundary.emplace_back(a, b);
    };
    for (Tri& t : tris) {
      if (!t.alive) continue;
      double dx = px - t.cx, dy = py - t.cy;
      if (dx * dx + dy * dy <= t.r2 + 1e-12) {
        t.alive = false;
        add_edge(t.a, t.b);
        add_edge(t.b, t.c);
        add_edge(t.c, t.a);
      }
    }
    for (const auto& e : boundary) {
      if (e.first == UINT32_MAX) continue;
      Tri t{e.first, e.second, i, 0, 0, 0, true};
      circum(t);
      tris.push_back(t);
    }
    if (tris.size() > 8 * n + 64) {
      std::vector<Tri> live;
      live.reserve(tris.size());
      for (const Tri& t : tris)
        if (t.alive) live.push_back(t);
      tris = std::move(live);
    }
  }

  std::vector<std::array<uint32_t, 3>> out;
  for (const Tri& t : tris) {
    if (!t.alive) continue;
    if (t.a >= n || t.b >= n || t.c >= n) continue;  // touches super triangle
    out.push_back({t.a, t.b, t.c});
  }
  return out;
}

GroundImage ground_image(const Checkpoint& ckpt, const PointCloud& cloud,
                         const std::set<uint16_t>& ground_classes,
                         double cell, const SceneExtent& extent,
                         uint64_t seed, size_t max_ground_points) {
  if (!(cell > 0.0)) fail(ErrorCode::argument, "cell size must be > 0");
  if (ground_classes.empty())
    fail(ErrorCode::argument, "ground class set is empty");
  FieldEvaluator field(ckpt.params, ckpt.grid);

  // segment the input points, keep predicted ground returns
  std::vector<uint16_t> cls_of(cloud.points.size(), 0);
  parallel_chunks(cloud.points.size(), [&](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i) {
      const Vec3& p = cloud.points[i].position;
      if (!in_grid_domain(p, ckpt.grid.config)) continue;
      cls_of[i] = field.semantic_argmax(p);
    }
  });
  std::vector<Vec3> ground_pts;
  for (size_t i = 0; i < cloud.points.size(); ++i)
    if (ground_classes.count(cls_of[i]) > 0)
      ground_pts.push_back(cloud.points[i].position);

  if (ground_pts.size() < 3)
    fail(ErrorCode::data,
         "ground extraction needs at least 3 predicted ground points");
  if (ground_pts.size() > max_ground_points) {
    Rng rng = Rng::stream(seed, "ground.subsample");
    for (size_t j = 0; j < max_ground_points; ++j) {
      size_t pick = j + rng.below(ground_pts.size() - j);
      std::swap(ground_pts[j], ground_pts[pick]);
    }
    ground_pts.resize(max_ground_points);
  }

  auto tris = delaunay_triangulate(ground_pts);
  if (tris.empty())
    fail(ErrorCode::data, "ground points are collinear; cannot triangulate");

  GroundImage img;
  img.min_x = extent.min_corner.x;
  img.min_y = extent.min_corner.y;
  img.cell = cell;
  img.width = static_cast<int>(std::ceil((extent.max_corner.x - img.min_x) /
                                             cell -
                                         1e-9));
  img.height = static_cast<int>(std::ceil((extent.max_corner.y - img.min_y) /
                                              cell -
                                          1e-9));
  img.pixels.assign(static_cast<size_t>(img.width) * img.height, kVoidPixel);

  parallel_chunks(tris.size(), [&](size_t tb, size_t te, int) {
    std::vector<double> prob(field.logit_dim());
    for (size_t ti = tb; ti < te; ++ti) {
      const auto& t = tris[ti];
      const Vec3 &p1 = ground_pts[t[0]], &p2 = ground_pts[t[1]],
                 &p3 = ground_pts[t[2]];
      double denom = (p2.y - p3.y) * (p1.x - p3.x) +
                     (p3.x - p2.x) * (p1.y - p3.y);
      if (std::abs(denom) < 1e-12) continue;
      double lo_x = std::min({p1.x, p2.x, p3.x});
      double hi_x = std::max({p1.x, p2.x, p3.x});
      double lo_y = std::min({p1.y, p2.y, p3.y});
      double hi_y = std::max({p1.y, p2.y, p3.y});
      int ix0 = std::max(0, static_cast<int>((lo_x - img.min_x) / cell));
      int ix1 = std::min(img.width - 1,
                         static_cast<int>((hi_x - img.min_x) / cell));
      int iy0 = std::max(0, static_cast<int>((lo_y - img.min_y) / cell));
      int iy1 = std::min(img.height - 1,
                         static_cast<int>((hi_y - img.min_y) / cell));
      for (int iy = iy0; iy <= iy1; ++iy)
        for (int ix = ix0; ix <= ix1; ++ix) {
          double x = img.min_x + (ix + 0.5) * cell;
          double y = img.min_y + (iy + 0.5) * cell;
          double l1 = ((p2.y - p3.y) * (x - p3.x) +
                       (p3.x - p2.x) * (y - p3.y)) /
                      denom;
          double l2 = ((p3.y - p1.y) * (x - p3.x) +
                       (p1.x - p3.x) * (y - p3.y)) /
                      denom;
          double l3 = 1.0 - l1 - l2;
          if (l1 < -1e-12 || l2 < -1e-12 || l3 < -1e-12) continue;
          double z = l1 * p1.z + l2 * p2.z + l3 * p3.z;
          Vec3 q{x, y, z};
          if (!in_grid_domain(q, ckpt.grid.config)) continue;
          field.probs(q, prob.data());
          uint16_t best = 0;
          double best_p = -1.0;
          for (uint16_t cls : ground_classes) {
            if (cls < 1 || cls > field.n_classes()) continue;
            if (prob[cls - 1] > best_p) {
              best_p = prob[cls - 1];
              best = cls;
            }
          }
          img.pixels[static_cast<size_t>(iy) * img.width + ix] = best;
        }
    }
  });
  return img;
}

void save_ground_image(const GroundImage& img, const std::string& prefix,
                       const std::vector<std::array<uint8_t, 3>>& palette) {
  {
    std::ofstream f(prefix + ".pgm", std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::io, "cannot open " + prefix + ".pgm");
    f << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (uint16_t p : img.pixels)
      f.put(p == kVoidPixel ? char(255) : static_cast<char>(p));
  }
  {
    std::ofstream f(prefix + ".ppm", std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::io, "cannot open " + prefix + ".ppm");
    f << "P6\n" << img.width << " " << img.height << "\n255\n";
    for (uint16_t p : img.pixels) {
      std::array<uint8_t, 3> rgb{0, 0, 0};
      if (p != kVoidPixel && p < palette.size()) rgb = palette[p];
      f.put(rgb[0]);
      f.put(rgb[1]);
      f.put(rgb[2]);
    }
  }
  {
    std::ofstream f(prefix + ".palette.txt", std::ios::trunc);
    if (!f) fail(ErrorCode::io, "cannot open " + prefix + ".palette.txt");
    f << "# class r g b (pgm stores class ids; 255 = void)\n";
    for (size_t i = 0; i < palette.size(); ++i)
      f << i << " " << int(palette[i][0]) << " " << int(palette[i][1]) << " "
        << int(palette[i][2]) << "\n";
  }
}

}  // namespace scn
