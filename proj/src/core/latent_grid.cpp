#include "core/latent_grid.hpp"

#include <cmath>

#include "core/error.hpp"

namespace scn {

void GridConfig::validate() const {
  if (!(delta > 0.0)) fail(ErrorCode::config, "grid.delta must be > 0");
  if (cells_x <= 0 || cells_y <= 0)
    fail(ErrorCode::config, "grid cell counts must be positive");
  if (cells_x % kRatio1 != 0 || cells_y % kRatio1 != 0)
    fail(ErrorCode::config, "grid cell counts must be divisible by 16");
  if (d1 <= 0 || d2 <= 0 || d3 <= 0)
    fail(ErrorCode::config, "grid feature dims must be positive");
}

LatentGrid LatentGrid::zeros(const GridConfig& cfg) {
  cfg.validate();
  LatentGrid g;
  g.config = cfg;
  g.level1.assign(g.entry_count(1) * cfg.d1, 0.0);
  g.level2.assign(g.entry_count(2) * cfg.d2, 0.0);
  g.level3.assign(g.entry_count(3) * cfg.d3, 0.0);
  return g;
}

double* LatentGrid::entry(int level, size_t flat_idx) {
  std::vector<double>& v =
      level == 1 ? level1 : (level == 2 ? level2 : level3);
  return v.data() + flat_idx * config.dim(level);
}

const double* LatentGrid::entry(int level, size_t flat_idx) const {
  const std::vector<double>& v =
      level == 1 ? level1 : (level == 2 ? level2 : level3);
  return v.data() + flat_idx * config.dim(level);
}

bool LatentGrid::all_finite() const {
  for (const auto* v : {&level1, &level2, &level3})
    for (double x : *v)
      if (!std::isfinite(x)) return false;
  return true;
}

bool in_grid_domain(const Vec3& p, const GridConfig& cfg) {
  double half = 0.5 * cfg.delta;
  double x0 = cfg.origin_x + half;
  double y0 = cfg.origin_y + half;
  double x1 = cfg.origin_x + cfg.cells_x * cfg.delta - half;
  double y1 = cfg.origin_y + cfg.cells_y * cfg.delta - half;
  return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1;
}

SupportRegion support_region(const Vec3& p, const GridConfig& cfg) {
  if (!p.finite()) fail(ErrorCode::argument, "query position must be finite");
  if (!in_grid_domain(p, cfg))
    fail(ErrorCode::domain,
         "query outside the grid footprint (inset by delta/2); pad the grid");

  // Position in units of finest cells, measured from the first cell center.
  double u = (p.x - cfg.origin_x) / cfg.delta - 0.5;
  double v = (p.y - cfg.origin_y) / cfg.delta - 0.5;
  int ix = static_cast<int>(std::floor(u));
  int iy = static_cast<int>(std::floor(v));
  double fx = u - ix;
  double fy = v - iy;

  // Containing cells at the two coarse levels follow the query position.
  auto coarse = [&](int level) {
    double e = cfg.edge(level);
    int cx = static_cast<int>(std::floor((p.x - cfg.origin_x) / e));
    int cy = static_cast<int>(std::floor((p.y - cfg.origin_y) / e));
    return std::pair<int, int>{cx, cy};
  };
  auto [c1x, c1y] = coarse(1);
  auto [c2x, c2y] = coarse(2);
  Vec3 o1 = cfg.cell_center(1, c1x, c1y);
  Vec3 o2 = cfg.cell_center(2, c2x, c2y);
  size_t flat1 = static_cast<size_t>(c1x) * cfg.ny(1) + c1y;
  size_t flat2 = static_cast<size_t>(c2x) * cfg.ny(2) + c2y;

  const double inv_d = 1.0 / cfg.delta;
  SupportRegion region;
  const int offs[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const double wx[2] = {1.0 - fx, fx};
  const double wy[2] = {1.0 - fy, fy};
  const double dwx[2] = {-inv_d, inv_d};
  const double dwy[2] = {-inv_d, inv_d};
  for (int s = 0; s < 4; ++s) {
    int ox = offs[s][0], oy = offs[s][1];
    Support& sup = region.supports[s];
    sup.fine_x = ix + ox;
    sup.fine_y = iy + oy;
    sup.flat3 = static_cast<size_t>(sup.fine_x) * cfg.ny(3) + sup.fine_y;
    sup.flat2 = flat2;
    sup.flat1 = flat1;
    sup.weight = wx[ox] * wy[oy];
    Vec3 o3 = cfg.cell_center(3, sup.fine_x, sup.fine_y);
    sup.p1 = p - o1;
    sup.p2 = p - o2;
    sup.p3 = p - o3;
    region.weight_gradients[s] = {dwx[ox] * wy[oy], wx[ox] * dwy[oy], 0.0};
  }
  return region;
}

std::array<GatherEntry, 4> gather(const LatentGrid& grid,
                                  const SupportRegion& region) {
  std::array<GatherEntry, 4> out;
  for (int s = 0; s < 4; ++s) {
    const Support& sup = region.supports[s];
    if (sup.fine_x < 0 || sup.fine_x >= grid.config.nx(3) || sup.fine_y < 0 ||
        sup.fine_y >= grid.config.ny(3))
      fail(ErrorCode::internal, "support cell out of bounds");
    out[s] = GatherEntry{grid.entry(1, sup.flat1), grid.entry(2, sup.flat2),
                         grid.entry(3, sup.flat3), sup.p1,
                         sup.p2,  sup.p3,          sup.weight,
                         sup.flat1, sup.flat2,     sup.flat3};
  }
  return out;
}

std::vector<double> compose(
    const std::vector<std::vector<double>>& per_support,
    std::span<const double> weights) {
  if (per_support.size() != weights.size() || per_support.empty())
    fail(ErrorCode::argument, "support count does not match weight count");
  size_t k = per_support.front().size();
  std::vector<double> out(k, 0.0);
  for (size_t a = 0; a < per_support.size(); ++a) {
    if (per_support[a].size() != k)
      fail(ErrorCode::argument, "support vectors must share length");
    for (size_t i = 0; i < k; ++i) out[i] += weights[a] * per_support[a][i];
  }
  return out;
}

void grid_config_to_container(const GridConfig& cfg, Container& c,
                              const std::string& prefix) {
  std::vector<double> f{cfg.delta, cfg.origin_x, cfg.origin_y};
  std::vector<int32_t> i{cfg.cells_x, cfg.cells_y, cfg.d1, cfg.d2, cfg.d3};
  c.add_f64(prefix + "float_params", f);
  c.add_i32(prefix + "int_params", i);
}

GridConfig grid_config_from_container(const Container& c,
                                      const std::string& prefix) {
  auto f = c.get_f64(prefix + "float_params");
  auto i = c.get_i32(prefix + "int_params");
  if (f.size() != 3 || i.size() != 5)
    fail(ErrorCode::format, "bad grid config block");
  GridConfig cfg;
  cfg.delta = f[0];
  cfg.origin_x = f[1];
  cfg.origin_y = f[2];
  cfg.cells_x = i[0];
  cfg.cells_y = i[1];
  cfg.d1 = i[2];
  cfg.d2 = i[3];
  cfg.d3 = i[4];
  cfg.validate();
  return cfg;
}

void save_latent_grid(const LatentGrid& grid, const std::string& path) {
  Container c;
  c.add_string("kind", "latent_grid");
  grid_config_to_container(grid.config, c, "grid.");
  auto to_f32 = [](const std::vector<double>& v) {
    std::vector<float> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
    return out;
  };
  const GridConfig& g = grid.config;
  auto add_level = [&](int level, const std::vector<double>& data) {
    auto f = to_f32(data);
    c.add_f32("level" + std::to_string(level), f,
              {static_cast<uint64_t>(g.nx(level)),
               static_cast<uint64_t>(g.ny(level)),
               static_cast<uint64_t>(g.dim(level))});
  };
  add_level(1, grid.level1);
  add_level(2, grid.level2);
  add_level(3, grid.level3);
  c.save(path);
}

LatentGrid load_latent_grid(const std::string& path) {
  Container c = Container::load(path);
  if (c.get_string("kind") != "latent_grid")
    fail(ErrorCode::format, path + ": not a latent grid file");
  LatentGrid grid = LatentGrid::zeros(grid_config_from_container(c, "grid."));
  auto fill = [&](const std::string& name, std::vector<double>& dst) {
    auto f = c.get_f32(name);
    if (f.size() != dst.size())
      fail(ErrorCode::format, path + ": level size mismatch in " + name);
    for (size_t i = 0; i < f.size(); ++i) dst[i] = f[i];
  };
  fill("level1", grid.level1);
  fill("level2", grid.level2);
  fill("level3", grid.level3);
  if (!grid.all_finite()) fail(ErrorCode::data, path + ": non-finite entries");
  return grid;
}

}  // namespace scn
