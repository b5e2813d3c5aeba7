#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bco/common.hpp"
#include "bco/geometry.hpp"
#include "bco/rng.hpp"

namespace bco {

class Diagnostics;

// A finite-horizon sequence of loss oracles f_t, t in [1, T]. Learners see
// only function values (through BanditFeed); the true gradient channel is a
// diagnostic reserved for metrics and labeled oracle predictors.
class LossProcess {
 public:
  using EvalFn = std::function<double(const Vec&, int)>;
  using GradFn = std::function<Vec(const Vec&, int)>;
  using AnalyticOptFn = std::function<Vec(const ConvexDomain&)>;

  LossProcess() = default;

  const std::string& kind() const { return kind_; }
  int dim() const { return dim_; }
  int horizon() const { return horizon_; }
  double lipschitz() const { return lipschitz_; }
  // +infinity means no smoothness certificate.
  double smoothness() const { return smoothness_; }
  std::uint64_t seed() const { return seed_; }
  const std::map<std::string, double>& params() const { return params_; }

  double eval(const Vec& x, int t) const {
    require_dim(x, dim_, "LossProcess::eval");
    if (t < 1 || t > horizon_) throw InvalidInput("LossProcess::eval: round out of range");
    return eval_(x, t);
  }

  bool has_analytic_opt() const { return static_cast<bool>(analytic_opt_); }
  Vec analytic_opt(const ConvexDomain& domain) const { return analytic_opt_(domain); }

  // Per-round minimizer sequence, when the environment defines one.
  const std::shared_ptr<const std::vector<Vec>>& comparator_seq() const {
    return comparator_seq_;
  }

  struct Builder {
    std::string kind;
    int dim = 0;
    int horizon = 0;
    double lipschitz = 0;
    double smoothness = 0;
    std::uint64_t seed = 0;
    EvalFn eval;
    GradFn grad;
    AnalyticOptFn analytic_opt;
    std::shared_ptr<const std::vector<Vec>> comparator_seq;
    std::map<std::string, double> params;

    LossProcess build() && {
      LossProcess p;
      p.kind_ = std::move(kind);
      p.dim_ = dim;
      p.horizon_ = horizon;
      p.lipschitz_ = lipschitz;
      p.smoothness_ = smoothness;
      p.seed_ = seed;
      p.eval_ = std::move(eval);
      p.grad_ = std::move(grad);
      p.analytic_opt_ = std::move(analytic_opt);
      p.comparator_seq_ = std::move(comparator_seq);
      p.params_ = std::move(params);
      return p;
    }
  };

 private:
  friend class Diagnostics;

  std::string kind_;
  int dim_ = 0;
  int horizon_ = 0;
  double lipschitz_ = 0;
  double smoothness_ = 0;
  std::uint64_t seed_ = 0;
  EvalFn eval_;
  GradFn grad_;
  AnalyticOptFn analytic_opt_;
  std::shared_ptr<const std::vector<Vec>> comparator_seq_;
  std::map<std::string, double> params_;
};

// The only gradient access point. Learner code must never hold one of these;
// it exists for metrics and for the labeled oracle predictor.
class Diagnostics {
 public:
  explicit Diagnostics(const LossProcess& p) : p_(&p) {}
  Vec grad(const Vec& x, int t) const {
    require_dim(x, p_->dim_, "Diagnostics::grad");
    return p_->grad_(x, t);
  }

 private:
  const LossProcess* p_;
};

// Value-only view handed to learners; counts oracle evaluations so query
// accounting can be asserted.
class BanditFeed {
 public:
  explicit BanditFeed(const LossProcess& p) : p_(&p) {}
  double operator()(const Vec& x, int t) {
    ++count_;
    return p_->eval(x, t);
  }
  long query_count() const { return count_; }
  const LossProcess& process() const { return *p_; }

 private:
  const LossProcess* p_;
  long count_ = 0;
};

// argmin_{x in X} <w, x>. Closed form for balls and boxes; callers fall back
// to projected gradient for custom shapes.
inline std::optional<Vec> linear_minimizer(const ConvexDomain& domain, const Vec& w) {
  if (w.norm() == 0.0) return Vec::Zero(domain.dim());
  if (domain.shape() == "ball") {
    return Vec(-domain.out_radius() * w / w.norm());
  }
  if (domain.shape() == "box") {
    const Vec& h = *domain.box_half_widths();
    Vec x(domain.dim());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = w[i] > 0 ? -h[i] : (w[i] < 0 ? h[i] : 0.0);
    return x;
  }
  return std::nullopt;
}

namespace detail {

// Random-walk steps of exact length; directions resampled until the step
// stays inside the envelope ball.
inline std::shared_ptr<std::vector<Vec>> walk_centers(int d, int T, double step,
                                                      double envelope,
                                                      std::uint64_t seed) {
  auto centers = std::make_shared<std::vector<Vec>>();
  centers->reserve(T);
  Vec c = Vec::Zero(d);
  centers->push_back(c);
  for (int t = 2; t <= T; ++t) {
    if (step > 0) {
      CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::EnvConstruct);
      for (;;) {
        Vec u = sample_sphere(d, rng);
        if ((c + step * u).norm() <= envelope) {
          c += step * u;
          break;
        }
      }
    }
    centers->push_back(c);
  }
  return centers;
}

}  // namespace detail

enum class CenterPath { RandomWalk, Alternate };

// Benign smooth environment: f_t(x) = (curvature/2) ||x - c_t||^2 with a
// slowly moving center. Per-round gradient variation at any fixed point is
// exactly curvature * ||c_t - c_{t-1}||.
inline LossProcess make_quadratic_drift(int d, int T, double drift_rate,
                                        double curvature, std::uint64_t seed,
                                        double domain_diameter = 2.0,
                                        CenterPath path = CenterPath::RandomWalk,
                                        double center_envelope = 1.0) {
  if (!(curvature > 0)) throw InvalidConfig("quadratic_drift: curvature must be > 0");
  if (drift_rate < 0) throw InvalidConfig("quadratic_drift: drift_rate must be >= 0");
  if (d < 1 || T < 1) throw InvalidConfig("quadratic_drift: need d >= 1, T >= 1");

  std::shared_ptr<std::vector<Vec>> centers;
  if (path == CenterPath::Alternate) {
    centers = std::make_shared<std::vector<Vec>>();
    Vec a = Vec::Zero(d), b = Vec::Zero(d);
    b[0] = drift_rate;
    for (int t = 1; t <= T; ++t) centers->push_back(t % 2 == 1 ? a : b);
  } else {
    centers = detail::walk_centers(d, T, drift_rate, center_envelope, seed);
  }
  double cmax = 0;
  for (const Vec& c : *centers) cmax = std::max(cmax, c.norm());

  const double kappa = curvature;
  LossProcess::Builder b;
  b.kind = "quadratic_drift";
  b.dim = d;
  b.horizon = T;
  b.lipschitz = kappa * (domain_diameter + cmax);
  b.smoothness = kappa;
  b.seed = seed;
  b.eval = [centers, kappa](const Vec& x, int t) {
    return 0.5 * kappa * (x - (*centers)[t - 1]).squaredNorm();
  };
  b.grad = [centers, kappa](const Vec& x, int t) {
    return Vec(kappa * (x - (*centers)[t - 1]));
  };
  b.analytic_opt = [centers](const ConvexDomain& domain) {
    Vec mean = Vec::Zero((*centers)[0].size());
    for (const Vec& c : *centers) mean += c;
    mean /= static_cast<double>(centers->size());
    return domain.project(mean);
  };
  b.comparator_seq = centers;
  b.params = {{"drift_rate", drift_rate}, {"curvature", curvature},
              {"center_envelope", center_envelope}};
  return std::move(b).build();
}

// Hard instance for the prediction-error lower bound: linear losses
// f_t(x) = mu zeta_t <v, x> with i.i.d. Rademacher signs and mu chosen so the
// zero predictor incurs squared prediction error exactly S_target over T
// rounds.
inline LossProcess make_linear_rademacher(int d, int T, double S_target, double D,
                                          std::uint64_t seed,
                                          double lipschitz_cap = 1.0) {
  if (d < 1 || T < 1) throw InvalidConfig("linear_rademacher: need d >= 1, T >= 1");
  if (S_target < 0) throw InvalidConfig("linear_rademacher: S_target must be >= 0");
  if (S_target > lipschitz_cap * lipschitz_cap * static_cast<double>(T) * (1 + 1e-12))
    throw InvalidConfig("linear_rademacher: S_target exceeds L^2 T (mu would exceed L)");

  const double mu = std::sqrt(S_target / static_cast<double>(T));
  auto sign_at = [seed](int t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::EnvNoise);
    return static_cast<double>(rng.rademacher());
  };
  LossProcess::Builder b;
  b.kind = "linear_rademacher";
  b.dim = d;
  b.horizon = T;
  b.lipschitz = mu;
  b.smoothness = 0.0;
  b.seed = seed;
  b.eval = [mu, sign_at](const Vec& x, int t) { return mu * sign_at(t) * x[0]; };
  b.grad = [mu, sign_at, d](const Vec&, int t) {
    Vec g = Vec::Zero(d);
    g[0] = mu * sign_at(t);
    return g;
  };
  b.analytic_opt = [mu, sign_at, d, T](const ConvexDomain& domain) -> Vec {
    Vec w = Vec::Zero(d);
    for (int t = 1; t <= T; ++t) w[0] += mu * sign_at(t);
    auto x = linear_minimizer(domain, w);
    if (!x) throw RuntimeFailure("linear_rademacher: no closed-form comparator for custom domain");
    return *x;
  };
  b.params = {{"S_target", S_target}, {"mu", mu}, {"D", D}};
  return std::move(b).build();
}

// Single-point-feedback hard instance: a fixed +/- linear pull of magnitude
// eps = sigma / (2 D sqrt(T)) hidden under i.i.d. Gaussian offsets of scale
// sigma. The offset is drawn once per (seed, t), so the two queries of a
// two-point round share it and differencing cancels it.
inline LossProcess make_single_point_barrier(int d, int T, double sigma, double D,
                                             std::uint64_t seed,
                                             double lipschitz_cap =
                                                 std::numeric_limits<double>::infinity()) {
  if (!(sigma > 0)) throw InvalidConfig("single_point_barrier: sigma must be > 0");
  if (d < 1 || T < 1) throw InvalidConfig("single_point_barrier: need d >= 1, T >= 1");
  if (sigma > 2.0 * lipschitz_cap * D * std::sqrt(static_cast<double>(T)))
    throw InvalidConfig("single_point_barrier: sigma exceeds 2 L D sqrt(T) (eps would exceed L)");

  const double eps = sigma / (2.0 * D * std::sqrt(static_cast<double>(T)));
  CounterRng mrng(seed, 0, Purpose::EnvConstruct);
  const double M = static_cast<double>(mrng.rademacher());
  auto noise_at = [seed, sigma](int t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::EnvNoise);
    return sigma * rng.normal();
  };
  LossProcess::Builder b;
  b.kind = "single_point_barrier";
  b.dim = d;
  b.horizon = T;
  b.lipschitz = eps;
  b.smoothness = 0.0;
  b.seed = seed;
  b.eval = [M, eps, noise_at](const Vec& x, int t) {
    return -M * eps * x[0] + noise_at(t);
  };
  b.grad = [M, eps, d](const Vec&, int) {
    Vec g = Vec::Zero(d);
    g[0] = -M * eps;
    return g;
  };
  b.analytic_opt = [M, eps, d, T](const ConvexDomain& domain) -> Vec {
    Vec w = Vec::Zero(d);
    w[0] = -M * eps * static_cast<double>(T);
    auto x = linear_minimizer(domain, w);
    if (!x) throw RuntimeFailure("single_point_barrier: no closed-form comparator for custom domain");
    return *x;
  };
  b.params = {{"sigma", sigma}, {"eps", eps}, {"M", M}, {"D", D}};
  return std::move(b).build();
}

// One-dimensional convex Lipschitz loss on [-1, 1] whose symmetric secant at
// scale delta misses the derivative at 0 by exactly L/3. Convex and C^1 but
// not smooth near 0; used to demonstrate that the difference-approximation
// bound needs smoothness.
inline LossProcess make_piecewise_nonsmooth(double L, double delta, int T = 1) {
  if (!(L > 0)) throw InvalidConfig("piecewise_nonsmooth: L must be > 0");
  if (!(delta > 0 && delta < 1)) throw InvalidConfig("piecewise_nonsmooth: delta must be in (0,1)");

  auto slope = [L, delta](double x) {
    if (x <= -delta) return -L;
    if (x <= 0) return L / 3.0 + (4.0 * L / 3.0) * (x / delta);
    return L / 3.0;
  };
  auto value = [L, delta](double x) {
    if (x <= -delta) return -L * (x + delta);
    if (x <= 0) return (L / 3.0) * (x + delta) + (2.0 * L / (3.0 * delta)) * (x * x - delta * delta);
    return -L * delta / 3.0 + (L / 3.0) * x;
  };

  LossProcess::Builder b;
  b.kind = "piecewise_nonsmooth";
  b.dim = 1;
  b.horizon = T;
  b.lipschitz = L;
  b.smoothness = std::numeric_limits<double>::infinity();
  b.seed = 0;
  b.eval = [value](const Vec& x, int) { return value(x[0]); };
  b.grad = [slope](const Vec& x, int) {
    Vec g(1);
    g[0] = slope(x[0]);
    return g;
  };
  b.analytic_opt = [delta](const ConvexDomain& domain) {
    Vec x(1);
    x[0] = -delta / 4.0;  // where the slope crosses zero
    return domain.project(x);
  };
  b.params = {{"L", L}, {"delta", delta}};
  return std::move(b).build();
}

// Non-stationary quadratics whose per-round minimizers trace a path of total
// length exactly path_budget. The minimizer sequence doubles as the dynamic
// comparator.
inline std::pair<LossProcess, std::shared_ptr<const std::vector<Vec>>>
make_dynamic_drift(int d, int T, double path_budget, double curvature,
                   std::uint64_t seed, double domain_diameter = 2.0,
                   double center_envelope = 1.0) {
  if (path_budget < 0) throw InvalidConfig("dynamic_drift: path_budget must be >= 0");
  if (path_budget > domain_diameter * static_cast<double>(T))
    throw InvalidConfig("dynamic_drift: path_budget exceeds D*T");
  if (!(curvature > 0)) throw InvalidConfig("dynamic_drift: curvature must be > 0");
  if (d < 1 || T < 1) throw InvalidConfig("dynamic_drift: need d >= 1, T >= 1");

  const double step = T > 1 ? path_budget / static_cast<double>(T - 1) : 0.0;
  auto centers = detail::walk_centers(d, T, step, center_envelope, seed);
  double cmax = 0;
  for (const Vec& c : *centers) cmax = std::max(cmax, c.norm());

  const double kappa = curvature;
  LossProcess::Builder b;
  b.kind = "dynamic_drift";
  b.dim = d;
  b.horizon = T;
  b.lipschitz = kappa * (domain_diameter + cmax);
  b.smoothness = kappa;
  b.seed = seed;
  b.eval = [centers, kappa](const Vec& x, int t) {
    return 0.5 * kappa * (x - (*centers)[t - 1]).squaredNorm();
  };
  b.grad = [centers, kappa](const Vec& x, int t) {
    return Vec(kappa * (x - (*centers)[t - 1]));
  };
  b.analytic_opt = [centers](const ConvexDomain& domain) {
    Vec mean = Vec::Zero((*centers)[0].size());
    for (const Vec& c : *centers) mean += c;
    mean /= static_cast<double>(centers->size());
    return domain.project(mean);
  };
  b.comparator_seq = centers;
  b.params = {{"path_budget", path_budget}, {"curvature", curvature}};
  LossProcess p = std::move(b).build();
  auto seq = p.comparator_seq();
  return {std::move(p), seq};
}

// Stationary linear loss f(x) = <g, x>; handy as the simplest smooth
// stationary environment.
inline LossProcess make_stationary_linear(const Vec& g, int T) {
  LossProcess::Builder b;
  b.kind = "stationary_linear";
  b.dim = static_cast<int>(g.size());
  b.horizon = T;
  b.lipschitz = g.norm();
  b.smoothness = 0.0;
  b.seed = 0;
  Vec gv = g;
  b.eval = [gv](const Vec& x, int) { return gv.dot(x); };
  b.grad = [gv](const Vec&, int) { return gv; };
  b.analytic_opt = [gv, T](const ConvexDomain& domain) -> Vec {
    auto x = linear_minimizer(domain, Vec(static_cast<double>(T) * gv));
    if (!x) throw RuntimeFailure("stationary_linear: no closed-form comparator for custom domain");
    return *x;
  };
  b.params = {};
  return std::move(b).build();
}

// All-zero losses.
inline LossProcess make_zero_losses(int d, int T) {
  LossProcess::Builder b;
  b.kind = "zero";
  b.dim = d;
  b.horizon = T;
  b.lipschitz = 0.0;
  b.smoothness = 0.0;
  b.seed = 0;
  b.eval = [](const Vec&, int) { return 0.0; };
  b.grad = [d](const Vec&, int) { return Vec(Vec::Zero(d)); };
  b.analytic_opt = [d](const ConvexDomain&) { return Vec(Vec::Zero(d)); };
  b.params = {};
  return std::move(b).build();
}

struct ComparatorResult {
  Vec point;
  bool converged = true;  // false attaches a comparator-quality warning
};

// Minimizer of the realized cumulative loss over the domain. Uses the
// environment's closed form when it declares one, otherwise projected
// gradient on the cumulative loss (warm start 0).
inline ComparatorResult solve_static_comparator(const LossProcess& process,
                                                const ConvexDomain& domain) {
  if (process.has_analytic_opt()) return {process.analytic_opt(domain), true};

  Diagnostics diag(process);
  const int T = process.horizon();
  auto cumulative_grad = [&](const Vec& x) {
    Vec g = Vec::Zero(domain.dim());
    for (int t = 1; t <= T; ++t) g += diag.grad(x, t);
    return g;
  };
  const double beta = std::isfinite(process.smoothness()) && process.smoothness() > 0
                          ? process.smoothness()
                          : std::max(process.lipschitz(), 1.0);
  const double step = 1.0 / (beta * static_cast<double>(T) + 1.0);
  Vec x = Vec::Zero(domain.dim());
  for (int it = 0; it < 10000; ++it) x = domain.project(x - step * cumulative_grad(x));
  const double residual = (x - domain.project(x - cumulative_grad(x))).norm();
  const double tol = 1e-5 * std::max(process.lipschitz(), 1e-30) * static_cast<double>(T);
  return {x, residual <= tol};
}

}  // namespace bco
