#pragma once

#include <cstddef>
#include <span>

namespace rsa::numeric {

// Pairwise (cascade) summation. Blocks of up to 8 values are summed left to
// right, so short inputs give the same result as a plain loop.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Dot product with four interleaved accumulators. Every caller that needs
// bit-identical results for the same inputs goes through this function.
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace rsa::numeric
