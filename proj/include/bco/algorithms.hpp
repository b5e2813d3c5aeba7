#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bco/common.hpp"
#include "bco/environments.hpp"
#include "bco/estimators.hpp"
#include "bco/geometry.hpp"
#include "bco/predictors.hpp"
#include "bco/rng.hpp"
#include "bco/trace.hpp"

namespace bco {

// Step size and perturbation radius for a fixed-parameter run.
struct StaticParams {
  double eta = 0;    // >= 0 (0 freezes the learner; useful as a diagnostic)
  double delta = 0;  // in (0, r)
  double alpha = 0;  // = delta / r

  void validate(double r) const {
    if (!(eta >= 0)) throw InvalidConfig("params: eta must be >= 0");
    if (!(delta > 0 && delta < r))
      throw InvalidConfig("params: delta must lie in (0, in_radius)");
  }
};

// Oracle tuning for a known expected prediction error S_bar:
//   eta = D / sqrt(8 d (S_bar + 1)),
//   delta = min{ sqrt(S_bar+1) / (d beta T), 1 / (beta sqrt(T)), r/2 }.
// With beta = 0 the first two branches are vacuous and delta = r/2.
inline StaticParams tune_static(double D, int d, double S_bar, int T, double beta,
                                double r) {
  if (!(D > 0 && d >= 1 && T >= 1 && r > 0 && S_bar >= 0 && beta >= 0))
    throw InvalidConfig("tune_static: inputs must be positive (S_bar, beta >= 0)");
  StaticParams p;
  p.eta = D / std::sqrt(8.0 * d * (S_bar + 1.0));
  double delta = r / 2.0;
  if (beta > 0) {
    delta = std::min(delta, std::sqrt(S_bar + 1.0) / (d * beta * static_cast<double>(T)));
    delta = std::min(delta, 1.0 / (beta * std::sqrt(static_cast<double>(T))));
  }
  p.delta = std::max(delta, 1e-12);
  p.alpha = p.delta / r;
  return p;
}

// Path-length-aware tuning: eta = sqrt((D^2 + 2 D P_T) / (8 d (S_bar + 1))),
// same delta as tune_static. P_T = 0 reduces to the static choice.
inline StaticParams tune_dynamic(double D, int d, double S_bar, double P_T, int T,
                                 double beta, double r) {
  if (P_T < 0) throw InvalidConfig("tune_dynamic: P_T must be >= 0");
  StaticParams p = tune_static(D, d, S_bar, T, beta, r);
  p.eta = std::sqrt((D * D + 2.0 * D * P_T) / (8.0 * d * (S_bar + 1.0)));
  return p;
}

// Tuning for the coordinate-sampling variant against a gradient-variation
// budget D_T.
inline StaticParams tune_coordinate(double D, int d, double D_T, int T, double beta,
                                    double r) {
  if (!(D > 0 && d >= 1 && T >= 1 && r > 0 && D_T >= 0 && beta >= 0))
    throw InvalidConfig("tune_coordinate: inputs must be positive (D_T, beta >= 0)");
  StaticParams p;
  const double dd = static_cast<double>(d);
  p.eta = D / (4.0 * dd * dd * std::sqrt(D_T + 1.0));
  if (beta > 0 && T >= 2) {
    p.eta = std::min(p.eta, 1.0 / (16.0 * beta * std::pow(dd, 1.5) *
                                   std::sqrt(std::log(static_cast<double>(T)))));
  }
  double delta = r / 2.0;
  if (beta > 0) {
    delta = std::min(delta, std::sqrt(D_T + 1.0) / (beta * static_cast<double>(T)));
    delta = std::min(delta, 1.0 / (beta * std::sqrt(static_cast<double>(T))));
  }
  p.delta = std::max(delta, 1e-12);
  p.alpha = p.delta / r;
  return p;
}

// Worst-case tuning for the classical two-point baseline: the residual budget
// is L^2 T, i.e. eta ~ D / sqrt(d T) up to the Lipschitz scale.
inline StaticParams tune_baseline_two_point(double D, int d, int T, double L,
                                            double beta, double r) {
  return tune_static(D, d, std::max(L * L, 1e-12) * static_cast<double>(T), T, beta, r);
}

// Nested doubling schedule: time phases of budget H = 1, 2, 4, ...; within a
// phase the sensitivity budget S starts at S_min = max{1, L^2} and doubles
// (resetting the residual counter) whenever the accumulated observable
// residual exceeds 8 d S.
class DoublingController {
 public:
  DoublingController(int d, double S_min)
      : d_(d), S_min_(S_min), S_(S_min) {
    if (d < 1) throw InvalidInput("doubling controller: d must be >= 1");
    if (!(S_min > 0)) throw InvalidInput("doubling controller: S_min must be > 0");
  }

  double S() const { return S_; }
  double S_min() const { return S_min_; }
  long H() const { return H_; }
  long in_phase_count() const { return c_; }
  double residual() const { return R_; }
  int phase() const { return phase_; }
  int epoch() const { return epoch_; }
  bool phase_done() const { return c_ >= H_; }

  // Accumulate one round's residual. Returns true when the sensitivity budget
  // doubled (a new epoch begins).
  bool observe(double residual_sq) {
    R_ += residual_sq;
    ++c_;
    if (R_ > 8.0 * d_ * S_) {
      S_ *= 2.0;
      R_ = 0.0;
      ++epoch_;
      return true;
    }
    return false;
  }

  void next_phase() {
    H_ *= 2;
    c_ = 0;
    S_ = S_min_;
    R_ = 0.0;
    ++phase_;
    epoch_ = 1;
  }

 private:
  int d_;
  double S_min_, S_, R_ = 0.0;
  long H_ = 1, c_ = 0;
  int phase_ = 1, epoch_ = 1;
};

// Exponential-weights aggregation with a prediction step. The prior
// w_i = ((N+1)/N) / (i (i+1)) telescopes to exactly 1. All weight arithmetic
// is in log space with max subtraction.
class OptimisticHedge {
 public:
  OptimisticHedge(int n, double eps) : n_(n), eps_(eps) {
    if (n < 1) throw InvalidInput("hedge: need at least one expert");
    prior_.resize(n);
    logw_.resize(n);
    const double scale = (n + 1.0) / n;
    for (int i = 1; i <= n; ++i) {
      prior_[i - 1] = scale / (static_cast<double>(i) * (i + 1.0));
      logw_[i - 1] = std::log(prior_[i - 1]);
    }
  }

  int size() const { return n_; }
  double eps() const { return eps_; }
  const std::vector<double>& prior() const { return prior_; }

  // Aggregation distribution p_i proportional to w_i exp(-eps * predicted_i).
  std::vector<double> distribution(const std::vector<double>& predicted) const {
    std::vector<double> p(n_);
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i) {
      p[i] = logw_[i] - eps_ * predicted[i];
      hi = std::max(hi, p[i]);
    }
    double z = 0;
    for (int i = 0; i < n_; ++i) {
      p[i] = std::exp(p[i] - hi);
      z += p[i];
    }
    for (int i = 0; i < n_; ++i) p[i] /= z;
    return p;
  }

  void update(const std::vector<double>& losses) {
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i) {
      logw_[i] -= eps_ * losses[i];
      hi = std::max(hi, logw_[i]);
    }
    for (int i = 0; i < n_; ++i) logw_[i] -= hi;  // re-center
  }

 private:
  int n_;
  double eps_;
  std::vector<double> prior_;
  std::vector<double> logw_;
};

struct RunOptions {
  bool debug_assert = false;
  bool keep_trace = true;
  // Fixed feasible comparator for the per-round descent inequality check
  // (debug mode only).
  std::optional<Vec> comparator;
};

namespace detail {

inline double eval_or_abort(BanditFeed& feed, const Vec& x, int t) {
  try {
    return feed(x, t);
  } catch (const std::exception& e) {
    throw RuntimeFailure("environment evaluation failed at round " + std::to_string(t) +
                         ": " + e.what());
  }
}

inline void check_estimator_bound(const RoundRecord& rec, int d, double L,
                                  RunReport& report) {
  const double bound = 2.0 * d * L;
  if (std::sqrt(rec.residual_sq) > bound * (1.0 + 1e-9) + 1e-12)
    ++report.estimator_bound_violations;
}

inline void check_feasible(const ConvexDomain& domain, const Vec& x, int t) {
  if (!domain.contains(x, kFeasTol))
    throw RuntimeFailure("infeasible query point at round " + std::to_string(t));
}

}  // namespace detail

// One round of the prediction-centered two-point descent: optimistic
// projection to the center, symmetric perturbed queries, variance-reduced
// estimate, corrected projection step.
struct VrRound {
  Vec y;             // center played
  Vec y_prime_next;  // state after the corrected step
  RoundRecord record;
};

inline VrRound step_vr_round(const ConvexDomain& domain, const ShrunkenDomain& shrunken,
                             const Vec& y_prime, const StaticParams& p, const Vec& m,
                             const Vec& v, BanditFeed& feed, int t) {
  const int d = domain.dim();
  VrRound out;
  out.y = shrunken.project(y_prime - p.eta * m);
  const Vec x_plus = out.y + p.delta * v;
  const Vec x_minus = out.y - p.delta * v;
  detail::check_feasible(domain, x_plus, t);
  detail::check_feasible(domain, x_minus, t);
  const double f_plus = detail::eval_or_abort(feed, x_plus, t);
  const double f_minus = detail::eval_or_abort(feed, x_minus, t);
  EstimateRecord est = vr_two_point({f_plus, f_minus, p.delta, v}, m, d);
  out.y_prime_next = shrunken.project(y_prime - p.eta * est.g_hat);

  RoundRecord& rec = out.record;
  rec.t = t;
  rec.y = out.y;
  rec.direction = v;
  rec.x = x_plus;
  rec.f_plus = f_plus;
  rec.f_minus = f_minus;
  rec.m = m;
  rec.g_hat = std::move(est.g_hat);
  rec.residual_sq = est.residual_sq;
  rec.loss_at_x = f_plus;
  rec.eta = p.eta;
  rec.delta = p.delta;
  return out;
}

namespace detail {

inline void feed_predictor(Predictor& predictor, const RoundRecord& rec,
                           const LossProcess& env) {
  switch (predictor.kind()) {
    case Predictor::Kind::LastEstimate:
      predictor.observe_estimate(rec.g_hat);
      break;
    case Predictor::Kind::OraclePrevGrad:
      predictor.observe_true_grad(Diagnostics(env).grad(rec.x, rec.t));
      break;
    default:
      break;
  }
}

inline void check_onestep(const RunOptions& opts, const StaticParams& p,
                          const Vec& y_prime, const VrRound& round,
                          RunReport& report) {
  if (!opts.debug_assert || !opts.comparator || p.eta <= 0) return;
  const Vec y_star = (1.0 - p.alpha) * (*opts.comparator);
  const double lhs = round.record.g_hat.dot(round.record.y - y_star);
  const double rhs = ((y_star - y_prime).squaredNorm() -
                      (y_star - round.y_prime_next).squaredNorm()) /
                         (2.0 * p.eta) +
                     p.eta * round.record.residual_sq;
  if (lhs > rhs + 1e-9) ++report.onestep_violations;
}

inline RunReport make_report(const LossProcess& env, const std::string& algorithm,
                             const Predictor* predictor, std::uint64_t seed, int T) {
  RunReport r;
  r.env_kind = env.kind();
  r.algorithm = algorithm;
  r.predictor = predictor ? Predictor::to_string(predictor->kind()) : "none";
  r.diagnostic_predictor = predictor && predictor->diagnostic();
  r.seed = seed;
  r.T = T;
  r.dim = env.dim();
  return r;
}

}  // namespace detail

// Fixed-parameter prediction-centered two-point descent (sphere sampling).
inline RunReport run_vr_optimistic(const LossProcess& env, const ConvexDomain& domain,
                                   Predictor& predictor, const StaticParams& params,
                                   int T, std::uint64_t seed,
                                   const RunOptions& opts = {}) {
  params.validate(domain.in_radius());
  const int d = domain.dim();
  ShrunkenDomain shrunken(domain, params.alpha);
  BanditFeed feed(env);
  RunReport report = detail::make_report(env, "vr_optimistic", &predictor, seed, T);
  report.trace.reserve(T);

  Vec y_prime = Vec::Zero(d);
  for (int t = 1; t <= T; ++t) {
    const Vec m = predictor.predict();
    CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::Direction);
    const Vec v = sample_sphere(d, rng);
    VrRound round = step_vr_round(domain, shrunken, y_prime, params, m, v, feed, t);
    detail::check_estimator_bound(round.record, d, env.lipschitz(), report);
    detail::check_onestep(opts, params, y_prime, round, report);
    detail::feed_predictor(predictor, round.record, env);
    report.residual_sum += round.record.residual_sq;
    report.charged_loss_sum += round.record.loss_at_x;
    y_prime = std::move(round.y_prime_next);
    report.trace.push_back(std::move(round.record));
  }
  report.oracle_evals = feed.query_count();
  report.phases = {{1, T, 1, 0.0, report.residual_sum}};
  return report;
}

namespace detail {

inline StaticParams epoch_params(double D, int d, double S, long H, double beta,
                                 double r) {
  StaticParams p;
  p.eta = D / std::sqrt(8.0 * d * S);
  double delta = r / 2.0;
  if (beta > 0) {
    delta = std::min(delta, std::sqrt(S) / (d * beta * static_cast<double>(H)));
    delta = std::min(delta, 1.0 / (beta * std::sqrt(static_cast<double>(H))));
  }
  p.delta = std::max(delta, 1e-12);
  p.alpha = p.delta / r;
  return p;
}

}  // namespace detail

// Parameter-free variant: nested doubling over the time budget H and the
// sensitivity budget S, driven by the observable residual. Needs no prior
// knowledge of the horizon or the prediction error.
inline RunReport run_vr_adaptive(const LossProcess& env, const ConvexDomain& domain,
                                 Predictor& predictor, int T, std::uint64_t seed,
                                 const RunOptions& opts = {}) {
  const int d = domain.dim();
  const double D = domain.diameter();
  const double r = domain.in_radius();
  const double beta = std::isfinite(env.smoothness()) ? env.smoothness() : 0.0;
  const double L = env.lipschitz();
  const double S_min = std::max(1.0, L * L);

  BanditFeed feed(env);
  RunReport report = detail::make_report(env, "vr_adaptive", &predictor, seed, T);
  report.trace.reserve(T);
  DoublingController ctrl(d, S_min);

  Vec y_prime = Vec::Zero(d);
  int t = 1;
  while (t <= T) {
    StaticParams params = detail::epoch_params(D, d, ctrl.S(), ctrl.H(), beta, r);
    ShrunkenDomain shrunken(domain, params.alpha);
    y_prime = shrunken.project(y_prime);

    PhaseSummary phase{ctrl.phase(), 0, 1, ctrl.S(), 0.0};
    while (!ctrl.phase_done() && t <= T) {
      const Vec m = predictor.predict();
      CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::Direction);
      const Vec v = sample_sphere(d, rng);
      VrRound round = step_vr_round(domain, shrunken, y_prime, params, m, v, feed, t);
      round.record.phase = ctrl.phase();
      round.record.epoch = ctrl.epoch();
      detail::check_estimator_bound(round.record, d, L, report);
      detail::feed_predictor(predictor, round.record, env);
      const double res_sq = round.record.residual_sq;
      report.residual_sum += res_sq;
      report.charged_loss_sum += round.record.loss_at_x;
      phase.rounds += 1;
      phase.residual_sum += res_sq;
      y_prime = std::move(round.y_prime_next);
      report.trace.push_back(std::move(round.record));

      const bool doubled = ctrl.observe(res_sq);
      ++t;
      if (doubled) {
        phase.epochs += 1;
        params = detail::epoch_params(D, d, ctrl.S(), ctrl.H(), beta, r);
        shrunken = ShrunkenDomain(domain, params.alpha);
        y_prime = shrunken.project(y_prime);
      }
    }
    phase.final_S = ctrl.S();
    report.phases.push_back(phase);
    ctrl.next_phase();
  }
  report.oracle_evals = feed.query_count();
  return report;
}

// Meta-expert variant for unknown non-stationarity: the adaptive outer loop,
// with each epoch running a geometric grid of step sizes aggregated by
// optimistic exponential weights sharing one perturbed query per round.
inline RunReport run_vr_meta(const LossProcess& env, const ConvexDomain& domain,
                             Predictor& predictor, int T, std::uint64_t seed,
                             const RunOptions& opts = {}) {
  const int d = domain.dim();
  const double D = domain.diameter();
  const double r = domain.in_radius();
  const double beta = std::isfinite(env.smoothness()) ? env.smoothness() : 0.0;
  const double L = env.lipschitz();
  const double S_min = std::max(1.0, L * L);

  BanditFeed feed(env);
  RunReport report = detail::make_report(env, "vr_meta", &predictor, seed, T);
  report.trace.reserve(T);
  DoublingController ctrl(d, S_min);

  struct Grid {
    StaticParams params;
    ShrunkenDomain shrunken;
    std::vector<double> etas;
    std::vector<Vec> y_primes;
    OptimisticHedge hedge;
  };
  auto init_grid = [&](double S, long H, const Vec& carry) {
    StaticParams params = detail::epoch_params(D, d, S, H, beta, r);
    const double eta0 = D / std::sqrt(16.0 * d * S);
    const double ratio = D * static_cast<double>(H) / eta0;
    const int N = std::max(2, static_cast<int>(std::ceil(std::log2(ratio) - 1e-12)) + 1);
    const double eps = std::sqrt(std::log(static_cast<double>(N))) /
                       (D * std::sqrt(8.0 * d * S));
    Grid g{params, ShrunkenDomain(domain, params.alpha), {}, {}, OptimisticHedge(N, eps)};
    const Vec start = g.shrunken.project(carry);
    g.etas.resize(N);
    g.y_primes.assign(N, start);
    for (int i = 0; i < N; ++i) g.etas[i] = std::ldexp(eta0, i);  // eta0 * 2^i
    return g;
  };

  Vec carry = Vec::Zero(d);
  int t = 1;
  while (t <= T) {
    Grid grid = init_grid(ctrl.S(), ctrl.H(), carry);
    PhaseSummary phase{ctrl.phase(), 0, 1, ctrl.S(), 0.0};
    while (!ctrl.phase_done() && t <= T) {
      const Vec m = predictor.predict();
      const int N = grid.hedge.size();
      std::vector<Vec> proposals(N);
      std::vector<double> predicted(N);
      for (int i = 0; i < N; ++i) {
        proposals[i] = grid.shrunken.project(grid.y_primes[i] - grid.etas[i] * m);
        predicted[i] = m.dot(proposals[i]);
      }
      const std::vector<double> p = grid.hedge.distribution(predicted);
      Vec y = Vec::Zero(d);
      double psum = 0;
      for (int i = 0; i < N; ++i) {
        y += p[i] * proposals[i];
        psum += p[i];
      }
      if (opts.debug_assert) {
        if (std::abs(psum - 1.0) > 1e-12 || !domain.contains(y, kFeasTol))
          ++report.simplex_violations;
      }

      CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::Direction);
      const Vec v = sample_sphere(d, rng);
      const Vec x_plus = y + grid.params.delta * v;
      const Vec x_minus = y - grid.params.delta * v;
      detail::check_feasible(domain, x_plus, t);
      const double f_plus = detail::eval_or_abort(feed, x_plus, t);
      const double f_minus = detail::eval_or_abort(feed, x_minus, t);
      EstimateRecord est = vr_two_point({f_plus, f_minus, grid.params.delta, v}, m, d);

      std::vector<double> losses(N);
      for (int i = 0; i < N; ++i) {
        losses[i] = est.g_hat.dot(proposals[i]);
        grid.y_primes[i] =
            grid.shrunken.project(grid.y_primes[i] - grid.etas[i] * est.g_hat);
      }
      grid.hedge.update(losses);
      if (opts.debug_assert) {
        double inf_norm = 0;
        for (int i = 0; i < N; ++i)
          inf_norm = std::max(inf_norm, std::abs(losses[i] - predicted[i]));
        if (inf_norm > D * std::sqrt(est.residual_sq) + 1e-9)
          ++report.hedge_violations;
      }

      RoundRecord rec;
      rec.t = t;
      rec.y = y;
      rec.direction = v;
      rec.x = x_plus;
      rec.f_plus = f_plus;
      rec.f_minus = f_minus;
      rec.m = m;
      rec.g_hat = est.g_hat;
      rec.residual_sq = est.residual_sq;
      rec.loss_at_x = f_plus;
      rec.eta = grid.etas[0];
      rec.delta = grid.params.delta;
      rec.phase = ctrl.phase();
      rec.epoch = ctrl.epoch();
      detail::check_estimator_bound(rec, d, L, report);
      detail::feed_predictor(predictor, rec, env);
      report.residual_sum += rec.residual_sq;
      report.charged_loss_sum += rec.loss_at_x;
      phase.rounds += 1;
      phase.residual_sum += rec.residual_sq;
      carry = y;
      report.trace.push_back(std::move(rec));

      const bool doubled = ctrl.observe(est.residual_sq);
      ++t;
      if (doubled && t <= T && !ctrl.phase_done()) {
        phase.epochs += 1;
        grid = init_grid(ctrl.S(), ctrl.H(), carry);
      }
    }
    phase.final_S = ctrl.S();
    report.phases.push_back(phase);
    ctrl.next_phase();
  }
  report.oracle_evals = feed.query_count();
  return report;
}

// Coordinate-sampling variant. The coordinate-persistent predictor is part of
// the algorithm: each round refreshes one coordinate of the hint with the
// observed finite-difference slope.
inline RunReport run_vr_coordinate(const LossProcess& env, const ConvexDomain& domain,
                                   int T, std::uint64_t seed, const StaticParams& params,
                                   [[maybe_unused]] const RunOptions& opts = {}) {
  params.validate(domain.in_radius());
  const int d = domain.dim();
  ShrunkenDomain shrunken(domain, params.alpha);
  BanditFeed feed(env);
  Predictor predictor(Predictor::Kind::CoordinatePersistent, d, env.lipschitz());
  RunReport report = detail::make_report(env, "vr_coordinate", &predictor, seed, T);
  report.trace.reserve(T);

  Vec y_prime = Vec::Zero(d);
  for (int t = 1; t <= T; ++t) {
    const Vec m = predictor.predict();
    const Vec y = shrunken.project(y_prime - params.eta * m);
    CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::Direction);
    auto [i, e] = sample_basis_direction(d, rng);
    const Vec x_plus = y + params.delta * e;
    const Vec x_minus = y - params.delta * e;
    detail::check_feasible(domain, x_plus, t);
    const double f_plus = detail::eval_or_abort(feed, x_plus, t);
    const double f_minus = detail::eval_or_abort(feed, x_minus, t);
    auto [est, v_hat] = coordinate_estimate(f_plus, f_minus, params.delta, i, m, d);
    y_prime = shrunken.project(y_prime - params.eta * est.g_hat);
    predictor.observe_coordinate(i, v_hat);

    RoundRecord rec;
    rec.t = t;
    rec.y = y;
    rec.direction = e;
    rec.coord = i;
    rec.x = x_plus;
    rec.f_plus = f_plus;
    rec.f_minus = f_minus;
    rec.m = m;
    rec.g_hat = std::move(est.g_hat);
    rec.residual_sq = est.residual_sq;
    rec.loss_at_x = f_plus;
    rec.eta = params.eta;
    rec.delta = params.delta;
    detail::check_estimator_bound(rec, d, env.lipschitz(), report);
    report.residual_sum += rec.residual_sq;
    report.charged_loss_sum += rec.loss_at_x;
    report.trace.push_back(std::move(rec));
  }
  report.oracle_evals = feed.query_count();
  report.phases = {{1, T, 1, 0.0, report.residual_sum}};
  return report;
}

// Classical two-point baseline: projected gradient descent on the shrunken
// set with the symmetric-difference estimator (no prediction).
inline RunReport run_ogd_two_point(const LossProcess& env, const ConvexDomain& domain,
                                   int T, std::uint64_t seed, double eta, double delta,
                                   [[maybe_unused]] const RunOptions& opts = {}) {
  StaticParams params{eta, delta, delta / domain.in_radius()};
  params.validate(domain.in_radius());
  const int d = domain.dim();
  ShrunkenDomain shrunken(domain, params.alpha);
  BanditFeed feed(env);
  RunReport report = detail::make_report(env, "ogd_two_point", nullptr, seed, T);
  report.predictor = "none";
  report.trace.reserve(T);

  Vec y = Vec::Zero(d);
  for (int t = 1; t <= T; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::Direction);
    const Vec v = sample_sphere(d, rng);
    const Vec x_plus = y + delta * v;
    const Vec x_minus = y - delta * v;
    detail::check_feasible(domain, x_plus, t);
    const double f_plus = detail::eval_or_abort(feed, x_plus, t);
    const double f_minus = detail::eval_or_abort(feed, x_minus, t);
    const Vec g_hat = classical_two_point({f_plus, f_minus, delta, v}, d);

    RoundRecord rec;
    rec.t = t;
    rec.y = y;
    rec.direction = v;
    rec.x = x_plus;
    rec.f_plus = f_plus;
    rec.f_minus = f_minus;
    rec.m = Vec::Zero(d);
    rec.g_hat = g_hat;
    rec.residual_sq = g_hat.squaredNorm();
    rec.loss_at_x = f_plus;
    rec.eta = eta;
    rec.delta = delta;
    detail::check_estimator_bound(rec, d, env.lipschitz(), report);
    report.residual_sum += rec.residual_sq;
    report.charged_loss_sum += rec.loss_at_x;
    y = shrunken.project(y - eta * g_hat);
    report.trace.push_back(std::move(rec));
  }
  report.oracle_evals = feed.query_count();
  report.phases = {{1, T, 1, 0.0, report.residual_sum}};
  return report;
}

// Single-point baseline: one query per round, value-scaled estimator. Kept to
// exhibit the offset-variance bottleneck that two-point differencing removes.
inline RunReport run_fkm_single_point(const LossProcess& env, const ConvexDomain& domain,
                                      int T, std::uint64_t seed, double eta, double delta,
                                      [[maybe_unused]] const RunOptions& opts = {}) {
  StaticParams params{eta, delta, delta / domain.in_radius()};
  params.validate(domain.in_radius());
  const int d = domain.dim();
  ShrunkenDomain shrunken(domain, params.alpha);
  BanditFeed feed(env);
  RunReport report = detail::make_report(env, "fkm_single_point", nullptr, seed, T);
  report.predictor = "none";
  report.trace.reserve(T);

  Vec y = Vec::Zero(d);
  for (int t = 1; t <= T; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t), Purpose::Direction);
    const Vec v = sample_sphere(d, rng);
    const Vec x = y + delta * v;
    detail::check_feasible(domain, x, t);
    const double f_x = detail::eval_or_abort(feed, x, t);
    const Vec g_hat = single_point_fkm(f_x, delta, v, d);

    RoundRecord rec;
    rec.t = t;
    rec.y = y;
    rec.direction = v;
    rec.x = x;
    rec.f_plus = f_x;
    rec.m = Vec::Zero(d);
    rec.g_hat = g_hat;
    rec.residual_sq = g_hat.squaredNorm();
    rec.loss_at_x = f_x;
    rec.eta = eta;
    rec.delta = delta;
    report.residual_sum += rec.residual_sq;
    report.charged_loss_sum += rec.loss_at_x;
    y = shrunken.project(y - eta * g_hat);
    report.trace.push_back(std::move(rec));
  }
  report.oracle_evals = feed.query_count();
  report.phases = {{1, T, 1, 0.0, report.residual_sum}};
  return report;
}

}  // namespace bco
