#include "core/container.hpp"

#include <cstring>
#include <fstream>

#include "core/error.hpp"

namespace scn {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'N', 'C', 'O', 'N', 'T', '1'};

size_t dtype_size(Container::DType t) {
  switch (t) {
    case Container::DType::u8:
      return 1;
    case Container::DType::u16:
      return 2;
    case Container::DType::u32:
    case Container::DType::i32:
    case Container::DType::f32:
      return 4;
    case Container::DType::u64:
    case Container::DType::f64:
      return 8;
  }
  return 0;
}

template <typename T>
void append_pod(std::vector<uint8_t>& out, T v) {
  uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

class Reader {
 public:
  Reader(std::span<const uint8_t> data, const std::string& origin)
      : data_(data), origin_(origin) {}

  template <typename T>
  T read() {
    if (pos_ + sizeof(T) > data_.size())
      fail(ErrorCode::format, origin_ + ": truncated container");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  void read_bytes(void* dst, size_t n) {
    if (pos_ + n > data_.size())
      fail(ErrorCode::format, origin_ + ": truncated container");
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  std::span<const uint8_t> data_;
  std::string origin_;
  size_t pos_ = 0;
};

}  // namespace

uint64_t Container::Section::element_count() const {
  uint64_t n = 1;
  for (uint64_t d : dims) n *= d;
  return dims.empty() ? 0 : n;
}

void Container::add_raw(const std::string& name, DType dtype,
                        std::vector<uint64_t> dims, const void* data,
                        size_t bytes) {
  if (has(name)) fail(ErrorCode::internal, "duplicate section: " + name);
  Section s;
  s.name = name;
  s.dtype = dtype;
  s.dims = std::move(dims);
  s.bytes.resize(bytes);
  if (bytes > 0) std::memcpy(s.bytes.data(), data, bytes);
  uint64_t expect = s.element_count() * dtype_size(dtype);
  if (expect != bytes)
    fail(ErrorCode::internal, "section size mismatch: " + name);
  sections_.push_back(std::move(s));
}

#define SCN_ADD_IMPL(suffix, type, dtype_val)                               \
  void Container::add_##suffix(const std::string& name,                    \
                               std::span<const type> v,                    \
                               std::vector<uint64_t> dims) {               \
    if (dims.empty()) dims = {static_cast<uint64_t>(v.size())};            \
    add_raw(name, dtype_val, std::move(dims), v.data(),                    \
            v.size() * sizeof(type));                                      \
  }                                                                        \
  std::vector<type> Container::get_##suffix(const std::string& name)       \
      const {                                                              \
    const Section& s = typed(name, dtype_val);                             \
    std::vector<type> out(s.bytes.size() / sizeof(type));                  \
    if (!out.empty())                                                      \
      std::memcpy(out.data(), s.bytes.data(), s.bytes.size());             \
    return out;                                                            \
  }

SCN_ADD_IMPL(f64, double, DType::f64)
SCN_ADD_IMPL(f32, float, DType::f32)
SCN_ADD_IMPL(u8, uint8_t, DType::u8)
SCN_ADD_IMPL(u16, uint16_t, DType::u16)
SCN_ADD_IMPL(u32, uint32_t, DType::u32)
SCN_ADD_IMPL(i32, int32_t, DType::i32)
SCN_ADD_IMPL(u64, uint64_t, DType::u64)
#undef SCN_ADD_IMPL

void Container::add_scalar_f64(const std::string& name, double v) {
  add_f64(name, std::span<const double>(&v, 1));
}
void Container::add_scalar_u64(const std::string& name, uint64_t v) {
  add_u64(name, std::span<const uint64_t>(&v, 1));
}
void Container::add_string(const std::string& name, const std::string& v) {
  add_u8(name, std::span<const uint8_t>(
                   reinterpret_cast<const uint8_t*>(v.data()), v.size()));
}

bool Container::has(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return true;
  return false;
}

const Container::Section& Container::section(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return s;
  fail(ErrorCode::format, "missing container section: " + name);
}

const Container::Section& Container::typed(const std::string& name,
                                           DType dtype) const {
  const Section& s = section(name);
  if (s.dtype != dtype)
    fail(ErrorCode::format, "section dtype mismatch: " + name);
  return s;
}

double Container::get_scalar_f64(const std::string& name) const {
  auto v = get_f64(name);
  if (v.size() != 1) fail(ErrorCode::format, "expected scalar: " + name);
  return v[0];
}
uint64_t Container::get_scalar_u64(const std::string& name) const {
  auto v = get_u64(name);
  if (v.size() != 1) fail(ErrorCode::format, "expected scalar: " + name);
  return v[0];
}
std::string Container::get_string(const std::string& name) const {
  auto v = get_u8(name);
  return std::string(v.begin(), v.end());
}

std::vector<uint8_t> Container::serialize() const {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 8);
  append_pod<uint32_t>(out, kFormatVersion);
  append_pod<uint32_t>(out, static_cast<uint32_t>(sections_.size()));
  for (const auto& s : sections_) {
    append_pod<uint16_t>(out, static_cast<uint16_t>(s.name.size()));
    out.insert(out.end(), s.name.begin(), s.name.end());
    append_pod<uint8_t>(out, static_cast<uint8_t>(s.dtype));
    append_pod<uint8_t>(out, static_cast<uint8_t>(s.dims.size()));
    for (uint64_t d : s.dims) append_pod<uint64_t>(out, d);
    append_pod<uint64_t>(out, static_cast<uint64_t>(s.bytes.size()));
    out.insert(out.end(), s.bytes.begin(), s.bytes.end());
  }
  return out;
}

Container Container::deserialize(std::span<const uint8_t> bytes,
                                 const std::string& origin) {
  Reader r(bytes, origin);
  char magic[8];
  r.read_bytes(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    fail(ErrorCode::format, origin + ": bad magic bytes");
  uint32_t version = r.read<uint32_t>();
  if (version != kFormatVersion)
    fail(ErrorCode::format,
         origin + ": unsupported container version " + std::to_string(version));
  uint32_t count = r.read<uint32_t>();
  Container c;
  for (uint32_t i = 0; i < count; ++i) {
    Section s;
    uint16_t name_len = r.read<uint16_t>();
    s.name.resize(name_len);
    r.read_bytes(s.name.data(), name_len);
    uint8_t dt = r.read<uint8_t>();
    if (dt > static_cast<uint8_t>(DType::f64))
      fail(ErrorCode::format, origin + ": bad dtype in section " + s.name);
    s.dtype = static_cast<DType>(dt);
    uint8_t rank = r.read<uint8_t>();
    s.dims.resize(rank);
    for (auto& d : s.dims) d = r.read<uint64_t>();
    uint64_t payload = r.read<uint64_t>();
    if (payload != s.element_count() * dtype_size(s.dtype))
      fail(ErrorCode::format, origin + ": bad payload size in " + s.name);
    s.bytes.resize(payload);
    r.read_bytes(s.bytes.data(), payload);
    if (c.has(s.name))
      fail(ErrorCode::format, origin + ": duplicate section " + s.name);
    c.sections_.push_back(std::move(s));
  }
  if (!r.at_end()) fail(ErrorCode::format, origin + ": trailing bytes");
  return c;
}

void Container::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::io, "cannot open for writing: " + path);
  auto bytes = serialize();
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorCode::io, "write failed: " + path);
}

Container Container::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) fail(ErrorCode::io, "cannot open: " + path);
  std::streamsize size = f.tellg();
  f.seekg(0);
  std::vector<uint8_t> bytes(static_cast<size_t>(size));
  f.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!f) fail(ErrorCode::io, "read failed: " + path);
  return deserialize(bytes, path);
}

}  // namespace scn
