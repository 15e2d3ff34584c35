#pragma once

#include <algorithm>
#include <cmath>
#include <span>

namespace scn {

/// log(sum_i exp(z_i)) with max-shift so the exponent stays bounded.
inline double logsumexp(std::span<const double> z) {
  double b = -std::numeric_limits<double>::infinity();
  for (double v : z) b = std::max(b, v);
  if (!std::isfinite(b)) return b;
  double s = 0.0;
  for (double v : z) s += std::exp(v - b);
  return b + std::log(s);
}

/// out_i = z_i - b - log(sum_j exp(z_j - b)), b = max(z).
inline void stable_logsoftmax(std::span<const double> z,
                              std::span<double> out) {
  double lse = logsumexp(z);
  for (size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
}

inline void stable_softmax(std::span<const double> z, std::span<double> out) {
  stable_logsoftmax(z, out);
  for (double& v : out) v = std::exp(v);
}

}  // namespace scn
