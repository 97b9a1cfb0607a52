#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bagclean {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major list of rows

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct ArgumentError : Error {
  using Error::Error;
};
struct LookupError : Error {
  using Error::Error;
};

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

inline Mat zeros(std::size_t rows, std::size_t cols) {
  return Mat(rows, Vec(cols, 0.0));
}

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y += c * x
inline void axpy(double c, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw DimensionError("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

// Elementwise mean of a set of equal-length vectors; empty set maps to the
// zero vector of the requested dimension.
inline Vec mean_of(const std::vector<Vec>& vs, std::size_t dim) {
  Vec out(dim, 0.0);
  if (vs.empty()) return out;
  for (const Vec& v : vs) {
    if (v.size() != dim) throw DimensionError("mean_of: dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) out[i] += v[i];
  }
  const double inv = 1.0 / static_cast<double>(vs.size());
  for (double& x : out) x *= inv;
  return out;
}

}  // namespace bagclean
