#pragma once

#include <cmath>

#include "fscre/matrix.hpp"
#include "fscre/random.hpp"

namespace fscre::test {

inline Matrix random_matrix(RandomSource& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

inline Vector random_vector(RandomSource& rng, std::size_t n) {
  Vector v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

// A^T A + n I: symmetric and well conditioned.
inline Matrix random_spd(RandomSource& rng, std::size_t n) {
  const Matrix a = random_matrix(rng, n, n);
  Matrix s = multiply(a.transpose(), a);
  for (std::size_t i = 0; i < n; ++i) s(i, i) += static_cast<double>(n);
  return s;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace fscre::test
