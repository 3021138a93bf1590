#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdg {

using complexd = std::complex<double>;

inline constexpr int kSpaceDim = 2;  // all transforms live on R^2, directions on S^1
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& msg) : std::invalid_argument(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class DegeneratePairError : public NumericError {
 public:
  explicit DegeneratePairError(const std::string& msg) : NumericError(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Uniform 1-D grid: node(i) = origin + i*step, strictly increasing.
struct Grid1D {
  double origin = 0.0;
  double step = 1.0;
  int count = 2;

  Grid1D() = default;
  Grid1D(double origin_, double step_, int count_) : origin(origin_), step(step_), count(count_) {
    validate();
  }
  static Grid1D centered(double half_extent, int count_) {
    if (count_ < 2) throw InvalidInputError("Grid1D: count must be >= 2");
    const double step_ = 2.0 * half_extent / (count_ - 1);
    return Grid1D(-half_extent, step_, count_);
  }
  void validate() const {
    if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(origin))
      throw InvalidInputError("Grid1D: step must be positive and finite");
    if (count < 2) throw InvalidInputError("Grid1D: count must be >= 2");
  }
  double node(int i) const { return origin + i * step; }
  double back() const { return node(count - 1); }
  double length() const { return step * (count - 1); }
};

// Geometric scale grid: a_j = a_min*(a_max/a_min)^{j/(count-1)}.
struct LogGrid {
  double a_min = 0.5;
  double a_max = 2.0;
  int count = 2;

  LogGrid() = default;
  LogGrid(double a_min_, double a_max_, int count_) : a_min(a_min_), a_max(a_max_), count(count_) {
    validate();
  }
  void validate() const {
    if (!(a_min > 0.0) || !(a_max > a_min))
      throw InvalidInputError("LogGrid: need 0 < a_min < a_max");
    if (count < 2) throw InvalidInputError("LogGrid: count must be >= 2");
  }
  double log_step() const { return std::log(a_max / a_min) / (count - 1); }
  double node(int j) const { return a_min * std::exp(j * log_step()); }
  // trapezoid weight in tau = log a; used for every da/a^k quadrature
  double log_weight(int j) const {
    const double d = log_step();
    return (j == 0 || j == count - 1) ? 0.5 * d : d;
  }
};

// Equiangular grid on S^1 with uniform weights summing to 2*pi.
struct SphereGrid {
  int count = 4;

  SphereGrid() = default;
  explicit SphereGrid(int count_) : count(count_) {
    if (count < 4) throw InvalidInputError("SphereGrid: count must be >= 4");
  }
  double theta(int j) const { return kTwoPi * j / count; }
  double weight() const { return kTwoPi / count; }
  void direction(int j, double& ux, double& uy) const {
    ux = std::cos(theta(j));
    uy = std::sin(theta(j));
  }
};

// Samples of f: R^2 -> R, row-major with y as the slow (row) index.
struct Field2D {
  Grid1D gx, gy;
  std::vector<double> v;

  Field2D() = default;
  Field2D(const Grid1D& gx_, const Grid1D& gy_)
      : gx(gx_), gy(gy_), v(static_cast<size_t>(gx_.count) * gy_.count, 0.0) {}

  int nx() const { return gx.count; }
  int ny() const { return gy.count; }
  double& at(int iy, int ix) { return v[static_cast<size_t>(iy) * gx.count + ix]; }
  double at(int iy, int ix) const { return v[static_cast<size_t>(iy) * gx.count + ix]; }

  void check_finite() const {
    for (size_t i = 0; i < v.size(); ++i)
      if (!std::isfinite(v[i]))
        throw NumericError("Field2D: non-finite value at flat index " + std::to_string(i));
  }
};

inline double rel_l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidInputError("rel_l2_diff: size mismatch");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    num += d * d;
    den += b[i] * b[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

inline double rel_l2_diff(const std::vector<complexd>& a, const std::vector<complexd>& b) {
  if (a.size() != b.size()) throw InvalidInputError("rel_l2_diff: size mismatch");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace rdg
