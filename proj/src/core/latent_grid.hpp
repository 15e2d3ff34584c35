#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/container.hpp"
#include "core/geometry.hpp"

namespace scn {

/// Layout of the three conditioning grids. The finest grid has cell edge
/// `delta`; the two coarser grids tile the same footprint with edges 4*delta
/// and 16*delta, so the finest cell count must divide by 16.
struct GridConfig {
  double delta = 0.32;
  int cells_x = 176;  // finest-resolution cells, divisible by 16
  int cells_y = 176;
  double origin_x = 0.0;  // grid corner (min x/y of the footprint)
  double origin_y = 0.0;
  int d1 = 256;  // conditioning widths, coarse to fine
  int d2 = 256;
  int d3 = 128;

  static constexpr int kRatio1 = 16;
  static constexpr int kRatio2 = 4;

  void validate() const;

  int nx(int level) const {
    return level == 1 ? cells_x / kRatio1
                      : (level == 2 ? cells_x / kRatio2 : cells_x);
  }
  int ny(int level) const {
    return level == 1 ? cells_y / kRatio1
                      : (level == 2 ? cells_y / kRatio2 : cells_y);
  }
  double edge(int level) const {
    return level == 1 ? kRatio1 * delta
                      : (level == 2 ? kRatio2 * delta : delta);
  }
  int dim(int level) const { return level == 1 ? d1 : (level == 2 ? d2 : d3); }

  /// Cell centers carry z = 0; the grid is a 2D layout over xy.
  Vec3 cell_center(int level, int ix, int iy) const {
    double e = edge(level);
    return {origin_x + (ix + 0.5) * e, origin_y + (iy + 0.5) * e, 0.0};
  }

  bool operator==(const GridConfig&) const = default;
};

/// Three dense 2D arrays of conditioning vectors, stored row-major with the
/// x index outermost: entry(level, ix, iy) -> dim(level) doubles.
struct LatentGrid {
  GridConfig config;
  std::vector<double> level1, level2, level3;

  static LatentGrid zeros(const GridConfig& cfg);

  size_t flat(int level, int ix, int iy) const {
    return static_cast<size_t>(ix) * config.ny(level) + iy;
  }
  double* entry(int level, size_t flat_idx);
  const double* entry(int level, size_t flat_idx) const;

  size_t entry_count(int level) const {
    return static_cast<size_t>(config.nx(level)) * config.ny(level);
  }
  bool all_finite() const;
};

/// One of up to four local functions responsible for a query position.
struct Support {
  int fine_x = 0, fine_y = 0;  // finest-level cell
  size_t flat1 = 0, flat2 = 0, flat3 = 0;
  Vec3 p1, p2, p3;  // query relative to each level's cell center
  double weight = 0.0;
};

/// The four finest cells whose centers surround the query in xy, with
/// bilinear weights summing to 1.
struct SupportRegion {
  std::array<Support, 4> supports;

  /// d(weight)/d(x,y) per support; needed for exact spatial gradients of the
  /// composed prediction.
  std::array<Vec3, 4> weight_gradients;
};

/// Computes the support region of `p`. Throws a domain error when p's xy is
/// outside the grid footprint inset by delta/2 (queries are never clamped).
SupportRegion support_region(const Vec3& p, const GridConfig& cfg);

bool in_grid_domain(const Vec3& p, const GridConfig& cfg);

/// Conditioning vectors and relative coordinates of one support, copied by
/// reference into a view.
struct GatherEntry {
  const double* c1;
  const double* c2;
  const double* c3;
  Vec3 p1, p2, p3;
  double weight;
  size_t key1, key2, key3;  // flat cell indices, stable dedupe keys
};

std::array<GatherEntry, 4> gather(const LatentGrid& grid,
                                  const SupportRegion& region);

/// f = sum_a w_a * f_a componentwise.
std::vector<double> compose(const std::vector<std::vector<double>>& per_support,
                            std::span<const double> weights);

/// Serialization. The standalone grid file stores the config header plus the
/// three arrays as row-major float32; checkpoints embed the full-precision
/// representation instead (see trainer).
void save_latent_grid(const LatentGrid& grid, const std::string& path);
LatentGrid load_latent_grid(const std::string& path);

void grid_config_to_container(const GridConfig& cfg, Container& c,
                              const std::string& prefix);
GridConfig grid_config_from_container(const Container& c,
                                      const std::string& prefix);

}  // namespace scn
