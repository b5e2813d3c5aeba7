#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace bco {

using Vec = Eigen::VectorXd;

// Bad arguments to an operation (dimension mismatch, out-of-range index, ...).
struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent or out-of-range configuration values.
struct InvalidConfig : std::runtime_error {
  explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

// Failure at run time that is not a usage error (oracle failure, I/O, ...).
struct RuntimeFailure : std::runtime_error {
  explicit RuntimeFailure(const std::string& what) : std::runtime_error(what) {}
};

// Absolute tolerance for feasibility assertions (double-precision projection
// round-off).
inline constexpr double kFeasTol = 1e-9;

// Radial clip onto the Euclidean ball of the given radius.
inline Vec clip_to_ball(const Vec& v, double radius) {
  const double n = v.norm();
  if (n <= radius || n == 0.0) return v;
  return v * (radius / n);
}

inline void require_dim(const Vec& v, Eigen::Index d, const char* who) {
  if (v.size() != d) {
    throw InvalidInput(std::string(who) + ": expected dimension " +
                       std::to_string(d) + ", got " + std::to_string(v.size()));
  }
}

}  // namespace bco
