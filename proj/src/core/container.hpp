#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scn {

/// Versioned binary container: little-endian, magic "SCNCONT1", u32 format
/// version, u32 section count, then per section a length-prefixed name, a
/// dtype byte, a rank byte, u64 dims and the raw payload. All artifact files
/// (target sets, scenes, grids, checkpoints, voxel grids) use this layout.
class Container {
 public:
  enum class DType : uint8_t {
    u8 = 0,
    u16 = 1,
    u32 = 2,
    u64 = 3,
    i32 = 4,
    f32 = 5,
    f64 = 6,
  };

  struct Section {
    std::string name;
    DType dtype;
    std::vector<uint64_t> dims;
    std::vector<uint8_t> bytes;
    uint64_t element_count() const;
  };

  static constexpr uint32_t kFormatVersion = 1;

  void add_f64(const std::string& name, std::span<const double> v,
               std::vector<uint64_t> dims = {});
  void add_f32(const std::string& name, std::span<const float> v,
               std::vector<uint64_t> dims = {});
  void add_u8(const std::string& name, std::span<const uint8_t> v,
              std::vector<uint64_t> dims = {});
  void add_u16(const std::string& name, std::span<const uint16_t> v,
               std::vector<uint64_t> dims = {});
  void add_u32(const std::string& name, std::span<const uint32_t> v,
               std::vector<uint64_t> dims = {});
  void add_i32(const std::string& name, std::span<const int32_t> v,
               std::vector<uint64_t> dims = {});
  void add_u64(const std::string& name, std::span<const uint64_t> v,
               std::vector<uint64_t> dims = {});
  void add_scalar_f64(const std::string& name, double v);
  void add_scalar_u64(const std::string& name, uint64_t v);
  void add_string(const std::string& name, const std::string& v);

  bool has(const std::string& name) const;
  const Section& section(const std::string& name) const;

  std::vector<double> get_f64(const std::string& name) const;
  std::vector<float> get_f32(const std::string& name) const;
  std::vector<uint8_t> get_u8(const std::string& name) const;
  std::vector<uint16_t> get_u16(const std::string& name) const;
  std::vector<uint32_t> get_u32(const std::string& name) const;
  std::vector<int32_t> get_i32(const std::string& name) const;
  std::vector<uint64_t> get_u64(const std::string& name) const;
  double get_scalar_f64(const std::string& name) const;
  uint64_t get_scalar_u64(const std::string& name) const;
  std::string get_string(const std::string& name) const;

  const std::vector<Section>& sections() const { return sections_; }

  std::vector<uint8_t> serialize() const;
  static Container deserialize(std::span<const uint8_t> bytes,
                               const std::string& origin = "<memory>");

  void save(const std::string& path) const;
  static Container load(const std::string& path);

 private:
  void add_raw(const std::string& name, DType dtype,
               std::vector<uint64_t> dims, const void* data, size_t bytes);
  const Section& typed(const std::string& name, DType dtype) const;

  std::vector<Section> sections_;
};

}  // namespace scn
