#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "bco/common.hpp"
#include "bco/environments.hpp"
#include "bco/rng.hpp"
#include "bco/trace.hpp"

namespace bco {

// Pathwise static regret: sum of charged losses minus the comparator's
// cumulative loss on the same realized sequence.
inline double static_regret(const std::vector<RoundRecord>& trace, const Vec& comparator,
                            const LossProcess& env) {
  double regret = 0;
  for (const RoundRecord& rec : trace)
    regret += rec.loss_at_x - env.eval(comparator, rec.t);
  return regret;
}

// Dynamic regret against a comparator sequence u_1..u_T; also returns the
// sequence's path length.
inline std::pair<double, double> dynamic_regret(const std::vector<RoundRecord>& trace,
                                                const std::vector<Vec>& u_seq,
                                                const LossProcess& env,
                                                const ConvexDomain& domain) {
  if (u_seq.size() != trace.size())
    throw InvalidInput("dynamic_regret: comparator sequence length mismatch");
  double regret = 0;
  double path = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (!domain.contains(u_seq[k], 1e-7))
      throw InvalidInput("dynamic_regret: infeasible comparator entry");
    regret += trace[k].loss_at_x - env.eval(u_seq[k], trace[k].t);
    if (k > 0) path += (u_seq[k] - u_seq[k - 1]).norm();
  }
  return {regret, path};
}

// Exact pathwise prediction error S_T = sum_t ||grad f_t(x_t) - m_t||^2,
// via the diagnostic gradient channel.
inline double prediction_error(const std::vector<RoundRecord>& trace,
                               const LossProcess& env) {
  Diagnostics diag(env);
  double s = 0;
  for (const RoundRecord& rec : trace)
    s += (diag.grad(rec.x, rec.t) - rec.m).squaredNorm();
  return s;
}

// Consecutive-gradient variation along the trajectory (diagnostic).
inline double gradient_variation(const std::vector<RoundRecord>& trace,
                                 const LossProcess& env) {
  Diagnostics diag(env);
  double s = 0;
  Vec prev;
  for (const RoundRecord& rec : trace) {
    Vec g = diag.grad(rec.x, rec.t);
    if (prev.size() > 0) s += (g - prev).squaredNorm();
    prev = std::move(g);
  }
  return s;
}

// Total movement of a comparator sequence; a single point has path length 0.
inline double path_length(const std::vector<Vec>& u_seq) {
  if (u_seq.empty()) throw InvalidInput("path_length: empty sequence");
  double p = 0;
  for (std::size_t k = 1; k < u_seq.size(); ++k)
    p += (u_seq[k] - u_seq[k - 1]).norm();
  return p;
}

struct SlopeFit {
  double slope = 0;
  double ci_lo = 0, ci_hi = 0;  // 95% bootstrap interval
};

// Least squares on (log x, log y) with a nonparametric bootstrap interval
// (1000 resamples).
inline SlopeFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& points,
                                     std::uint64_t seed = 99) {
  if (points.size() < 3) throw InvalidInput("fit_scaling_exponent: need >= 3 points");
  std::vector<double> lx, ly;
  for (auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0))
      throw InvalidInput("fit_scaling_exponent: points must be positive");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  auto ols = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
  };

  SlopeFit fit;
  fit.slope = ols(lx, ly);

  const int B = 1000;
  std::vector<double> slopes;
  slopes.reserve(B);
  CounterRng rng(seed, 0, Purpose::Bootstrap);
  const std::size_t n = points.size();
  std::vector<double> bx(n), by(n);
  for (int b = 0; b < B; ++b) {
    // resample until at least two distinct x values (slope defined)
    for (int attempt = 0; attempt < 64; ++attempt) {
      bool distinct = false;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = rng.below(n);
        bx[i] = lx[j];
        by[i] = ly[j];
        if (i > 0 && bx[i] != bx[0]) distinct = true;
      }
      if (distinct) break;
    }
    slopes.push_back(ols(bx, by));
  }
  std::sort(slopes.begin(), slopes.end());
  fit.ci_lo = slopes[static_cast<std::size_t>(0.025 * (B - 1))];
  fit.ci_hi = slopes[static_cast<std::size_t>(0.975 * (B - 1))];
  return fit;
}

// Fill the report's regret and diagnostic statistics from its trace, then
// drop the trace unless it was requested.
inline void finalize_report(RunReport& report, const LossProcess& env,
                            const ConvexDomain& domain, bool keep_trace) {
  ComparatorResult comp = solve_static_comparator(env, domain);
  report.comparator_warning = !comp.converged;
  report.static_regret = static_regret(report.trace, comp.point, env);
  report.S_T = prediction_error(report.trace, env);
  report.grad_variation = gradient_variation(report.trace, env);
  if (env.comparator_seq()) {
    const auto& seq = *env.comparator_seq();
    auto [dyn, path] = dynamic_regret(report.trace, seq, env, domain);
    report.dynamic_regret = dyn;
    report.P_T = path;
  }
  if (!keep_trace) {
    report.trace.clear();
    report.trace.shrink_to_fit();
  }
}

}  // namespace bco
