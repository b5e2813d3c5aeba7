#pragma once

#include <cmath>
#include <utility>

#include "bco/common.hpp"

namespace bco {

// Zeroth-order gradient estimators. All of these are pure functions of one
// round's observations; issuing the queries is the learner's job.

// The two symmetric function values observed at round t.
struct TwoPointObservation {
  double f_plus;   // f_t(y + delta v)
  double f_minus;  // f_t(y - delta v)
  double delta;    // perturbation radius, > 0
  Vec v;           // unit direction
};

struct EstimateRecord {
  Vec g_hat;
  double delta_t;      // centered difference after removing the predicted slope
  double residual_sq;  // ||g_hat - m||^2
};

namespace detail {
inline void check_two_point(const TwoPointObservation& obs) {
  if (!(obs.delta > 0)) throw InvalidInput("two-point estimator: delta must be > 0");
  const double n = obs.v.norm();
  if (std::abs(n - 1.0) > 1e-9)
    throw InvalidInput("two-point estimator: direction must be unit norm");
}
}  // namespace detail

// Prediction-centered variance-reduced estimator:
//   g_hat = m + (d / 2 delta) * Delta * v,
//   Delta = f(y + delta v) - f(y - delta v) - 2 delta <m, v>.
// The random part estimates the residual around m, so its magnitude scales
// with the prediction error rather than the gradient norm.
inline EstimateRecord vr_two_point(const TwoPointObservation& obs, const Vec& m, int d) {
  detail::check_two_point(obs);
  require_dim(m, obs.v.size(), "vr_two_point");
  const double delta_t =
      obs.f_plus - obs.f_minus - 2.0 * obs.delta * m.dot(obs.v);
  const double scale = static_cast<double>(d) / (2.0 * obs.delta) * delta_t;
  EstimateRecord rec;
  rec.g_hat = m + scale * obs.v;
  rec.delta_t = delta_t;
  rec.residual_sq = scale * scale;  // ||g_hat - m||^2, v is unit
  return rec;
}

// Classical symmetric-difference estimator; identical to vr_two_point with a
// zero prediction.
inline Vec classical_two_point(const TwoPointObservation& obs, int d) {
  return vr_two_point(obs, Vec::Zero(obs.v.size()), d).g_hat;
}

// Coordinate-sampling estimator. Returns the estimate together with the
// observed slope v_hat = (f_plus - f_minus) / (2 delta) along coordinate i,
// which also drives the coordinate-persistent predictor update.
inline std::pair<EstimateRecord, double> coordinate_estimate(
    double f_plus, double f_minus, double delta, int i, const Vec& m, int d) {
  if (!(delta > 0)) throw InvalidInput("coordinate_estimate: delta must be > 0");
  if (i < 0 || i >= static_cast<int>(m.size()))
    throw InvalidInput("coordinate_estimate: coordinate index out of range");
  const double v_hat = (f_plus - f_minus) / (2.0 * delta);
  const double corr = static_cast<double>(d) * (v_hat - m[i]);
  EstimateRecord rec;
  rec.g_hat = m;
  rec.g_hat[i] += corr;
  rec.delta_t = 2.0 * delta * (v_hat - m[i]);
  rec.residual_sq = corr * corr;
  return {rec, v_hat};
}

// Single-point baseline estimator g_hat = (d / delta) f(y + delta v) v. Its
// magnitude scales with the raw function value, which is what the two-point
// differencing removes.
inline Vec single_point_fkm(double f_at_query, double delta, const Vec& v, int d) {
  if (!(delta > 0)) throw InvalidInput("single_point_fkm: delta must be > 0");
  return (static_cast<double>(d) / delta) * f_at_query * v;
}

}  // namespace bco
