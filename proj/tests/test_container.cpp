#include <doctest.h>

#include "core/container.hpp"
#include "core/error.hpp"
#include "test_util.hpp"

using namespace scn;

TEST_CASE("container round-trips typed sections") {
  Container c;
  c.add_string("kind", "demo");
  c.add_scalar_u64("count", 42);
  c.add_scalar_f64("threshold", 0.25);
  std::vector<double> values{1.5, -2.25, 3.75};
  c.add_f64("values", values, {3});
  std::vector<int32_t> idx{-1, 0, 7};
  c.add_i32("idx", idx);

  auto bytes = c.serialize();
  Container back = Container::deserialize(bytes);
  CHECK(back.get_string("kind") == "demo");
  CHECK(back.get_scalar_u64("count") == 42);
  CHECK(back.get_scalar_f64("threshold") == 0.25);
  CHECK(back.get_f64("values") == values);
  CHECK(back.get_i32("idx") == idx);
  CHECK(back.has("values"));
  CHECK_FALSE(back.has("missing"));
}

TEST_CASE("container rejects corrupted input") {
  Container c;
  c.add_scalar_u64("x", 1);
  auto bytes = c.serialize();

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(Container::deserialize(bad_magic), Error);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  CHECK_THROWS_AS(Container::deserialize(truncated), Error);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(Container::deserialize(trailing), Error);

  auto bad_version = bytes;
  bad_version[8] = 99;
  CHECK_THROWS_AS(Container::deserialize(bad_version), Error);

  CHECK_THROWS_AS(c.get_u32("x"), Error);   // dtype mismatch
  CHECK_THROWS_AS(c.get_f64("nope"), Error);  // missing
}

TEST_CASE("container file save/load") {
  std::string dir = testutil::temp_dir("container");
  Container c;
  c.add_string("kind", "file_demo");
  c.save(dir + "/a.bin");
  Container back = Container::load(dir + "/a.bin");
  CHECK(back.get_string("kind") == "file_demo");
  CHECK_THROWS_AS(Container::load(dir + "/missing.bin"), Error);
}
