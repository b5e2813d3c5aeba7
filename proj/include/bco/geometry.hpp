#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "bco/common.hpp"
#include "bco/rng.hpp"

namespace bco {

// A convex feasible set with a Euclidean projection oracle plus the constants
// needed by the learners: diameter D, in-radius r (r * unit-ball is contained
// in the set) and out-radius R (the set is contained in R * unit-ball).
// 0 must be feasible. Values are immutable after construction and safe to
// share across threads.
class ConvexDomain {
 public:
  using ProjectFn = std::function<Vec(const Vec&)>;

  static ConvexDomain ball(int dim, double radius) {
    if (dim < 1) throw InvalidConfig("ball: dim must be >= 1");
    if (!(radius > 0)) throw InvalidConfig("ball: radius must be > 0");
    ConvexDomain d;
    d.dim_ = dim;
    d.shape_ = "ball";
    d.diameter_ = 2.0 * radius;
    d.in_radius_ = radius;
    d.out_radius_ = radius;
    d.project_ = [radius](const Vec& z) { return clip_to_ball(z, radius); };
    return d;
  }

  static ConvexDomain box(Vec half_widths) {
    if (half_widths.size() < 1) throw InvalidConfig("box: empty half_widths");
    if (half_widths.minCoeff() <= 0)
      throw InvalidConfig("box: half_widths must be > 0");
    ConvexDomain d;
    d.dim_ = static_cast<int>(half_widths.size());
    d.shape_ = "box";
    d.diameter_ = 2.0 * half_widths.norm();
    d.in_radius_ = half_widths.minCoeff();
    d.out_radius_ = half_widths.norm();
    auto h = std::make_shared<Vec>(std::move(half_widths));
    d.project_ = [h](const Vec& z) {
      Vec out(z.size());
      for (Eigen::Index i = 0; i < z.size(); ++i)
        out[i] = std::clamp(z[i], -(*h)[i], (*h)[i]);
      return out;
    };
    d.half_widths_ = h;
    return d;
  }

  // User-supplied projection oracle with declared constants. The declarations
  // are trusted but property-tested on registration with random probes.
  static ConvexDomain custom(int dim, ProjectFn project, double diameter,
                             double in_radius, double out_radius,
                             std::uint64_t probe_seed = 7) {
    if (dim < 1) throw InvalidConfig("custom domain: dim must be >= 1");
    if (!(diameter > 0) || !(in_radius > 0) || !(out_radius > 0) ||
        in_radius > out_radius || out_radius > diameter) {
      throw InvalidConfig("custom domain: need 0 < r <= R <= D");
    }
    ConvexDomain d;
    d.dim_ = dim;
    d.shape_ = "custom";
    d.diameter_ = diameter;
    d.in_radius_ = in_radius;
    d.out_radius_ = out_radius;
    d.project_ = std::move(project);
    d.validate_declarations(probe_seed);
    return d;
  }

  int dim() const { return dim_; }
  const std::string& shape() const { return shape_; }
  double diameter() const { return diameter_; }
  double in_radius() const { return in_radius_; }
  double out_radius() const { return out_radius_; }
  const std::shared_ptr<Vec>& box_half_widths() const { return half_widths_; }

  Vec project(const Vec& z) const {
    require_dim(z, dim_, "project");
    return project_(z);
  }

  bool contains(const Vec& z, double tol = kFeasTol) const {
    return (project(z) - z).norm() <= tol;
  }

 private:
  void validate_declarations(std::uint64_t seed) const;

  int dim_ = 0;
  std::string shape_;
  double diameter_ = 0, in_radius_ = 0, out_radius_ = 0;
  ProjectFn project_;
  std::shared_ptr<Vec> half_widths_;  // box only
};

// Uniform direction on the unit sphere S^{d-1}; for d = 1 this is a uniform
// sign. Gaussian-normalize construction (resamples the measure-zero zero
// draw).
inline Vec sample_sphere(int d, CounterRng& rng) {
  if (d < 1) throw InvalidInput("sample_sphere: d must be >= 1");
  for (;;) {
    Vec g = rng.normal_vec(d);
    const double n = g.norm();
    if (n > 1e-300) return g / n;
  }
}

// Uniform basis direction: index i ~ Unif{0..d-1} together with e_i.
inline std::pair<int, Vec> sample_basis_direction(int d, CounterRng& rng) {
  if (d < 1) throw InvalidInput("sample_basis_direction: d must be >= 1");
  const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
  Vec e = Vec::Zero(d);
  e[i] = 1.0;
  return {i, e};
}

// The shrunken set (1 - alpha) * X. Never materialized: since 0 is feasible,
// projection satisfies the scaling identity P_{cX}(z) = c P_X(z / c).
class ShrunkenDomain {
 public:
  ShrunkenDomain(const ConvexDomain& base, double alpha) : base_(&base), alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0))
      throw InvalidConfig("shrunken domain: alpha must be in [0,1)");
  }

  double alpha() const { return alpha_; }
  const ConvexDomain& base() const { return *base_; }

  Vec project(const Vec& z) const {
    if (alpha_ == 0.0) return base_->project(z);
    const double c = 1.0 - alpha_;
    return c * base_->project(z / c);
  }

 private:
  const ConvexDomain* base_;
  double alpha_;
};

inline Vec project_shrunken(const ConvexDomain& base, double alpha, const Vec& z) {
  return ShrunkenDomain(base, alpha).project(z);
}

inline void ConvexDomain::validate_declarations(std::uint64_t seed) const {
  CounterRng rng(seed, 0, Purpose::Probe);
  const double tol = 1e-7;
  // 0 feasible
  if (!contains(Vec::Zero(dim_), tol))
    throw InvalidConfig("custom domain: 0 is not feasible");
  for (int k = 0; k < 100; ++k) {
    Vec u = sample_sphere(dim_, rng);
    // r-ball contained in the set
    Vec p = in_radius_ * u;
    if ((project_(p) - p).norm() > tol)
      throw InvalidConfig("custom domain: declared in-radius violated");
    // projections land inside R-ball, are idempotent and non-expansive
    Vec a = rng.uniform(0.0, 2.0 * out_radius_) * u;
    Vec b = rng.normal_vec(dim_) * out_radius_;
    Vec pa = project_(a), pb = project_(b);
    if (pa.norm() > out_radius_ + tol)
      throw InvalidConfig("custom domain: projection escapes declared out-radius");
    if ((project_(pa) - pa).norm() > tol)
      throw InvalidConfig("custom domain: projection not idempotent");
    if ((pa - pb).norm() > (a - b).norm() + tol)
      throw InvalidConfig("custom domain: projection not non-expansive");
  }
}

}  // namespace bco
