#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace testutil {

/// Central finite difference of a scalar function at x.
inline double numeric_grad(const std::function<double()>& f, double* x,
                           double h = 1e-5) {
  double orig = *x;
  *x = orig + h;
  double fp = f();
  *x = orig - h;
  double fm = f();
  *x = orig;
  return (fp - fm) / (2.0 * h);
}

inline double rel_err(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / scale;
}

/// Gradient-check violation ratio: <= 1 means |a-f| <= atol + rtol*(|a|+|f|).
/// The absolute term absorbs finite-difference roundoff on gradients whose
/// true value is (near) zero, e.g. biases cancelled by batch normalization.
inline double grad_violation(double analytic, double fd, double rtol = 1e-4,
                             double atol = 1e-7) {
  return std::abs(analytic - fd) /
         (atol + rtol * (std::abs(analytic) + std::abs(fd)));
}

/// Unique scratch directory under the build tree.
inline std::string temp_dir(const std::string& name) {
  std::filesystem::path p =
      std::filesystem::temp_directory_path() / ("scenecomp_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

inline std::vector<unsigned char> read_file(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) return {};
  std::fseek(f, 0, SEEK_END);
  long n = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<unsigned char> out(static_cast<size_t>(n));
  size_t got = std::fread(out.data(), 1, out.size(), f);
  std::fclose(f);
  out.resize(got);
  return out;
}

}  // namespace testutil
