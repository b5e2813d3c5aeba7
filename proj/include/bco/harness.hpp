#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bco/config.hpp"
#include "bco/metrics.hpp"
#include "bco/sha256.hpp"

namespace bco {

namespace fs = std::filesystem;

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Replicates are independent; tasks are pulled from a shared counter and the
// first exception wins.
inline void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(workers, n_tasks);
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Tracks emitted artifacts; every file is listed in the manifest with a
// content hash, and the manifest records whether the run completed.
class ArtifactLog {
 public:
  explicit ArtifactLog(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write artifact: " + p.string());
    out << content;
    out.close();
    std::lock_guard<std::mutex> lock(mu_);
    entries_.emplace_back(name, Sha256::of(content));
  }

  void finish(bool complete) {
    json manifest;
    manifest["complete"] = complete;
    manifest["artifacts"] = json::array();
    {
      std::lock_guard<std::mutex> lock(mu_);
      std::sort(entries_.begin(), entries_.end());
      for (auto& [name, hash] : entries_)
        manifest["artifacts"].push_back({{"path", name}, {"sha256", hash}});
    }
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::mutex mu_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

inline json report_to_json(const RunReport& r) {
  json j;
  j["schema_version"] = RunReport::kSchemaVersion;
  j["environment"] = r.env_kind;
  j["algorithm"] = r.algorithm;
  j["predictor"] = r.predictor;
  j["diagnostic_predictor"] = r.diagnostic_predictor;
  j["seed"] = r.seed;
  j["T"] = r.T;
  j["dim"] = r.dim;
  j["static_regret"] = r.static_regret;
  if (r.dynamic_regret) j["dynamic_regret"] = *r.dynamic_regret;
  j["S_T"] = r.S_T;
  j["residual_sum"] = r.residual_sum;
  if (r.P_T) j["P_T"] = *r.P_T;
  if (r.grad_variation) j["grad_variation"] = *r.grad_variation;
  j["charged_loss_sum"] = r.charged_loss_sum;
  j["oracle_evals"] = r.oracle_evals;
  j["comparator_warning"] = r.comparator_warning;
  j["estimator_bound_violations"] = r.estimator_bound_violations;
  j["onestep_violations"] = r.onestep_violations;
  j["hedge_violations"] = r.hedge_violations;
  j["simplex_violations"] = r.simplex_violations;
  j["phases"] = json::array();
  for (const PhaseSummary& p : r.phases) {
    j["phases"].push_back({{"phase", p.phase},
                           {"rounds", p.rounds},
                           {"epochs", p.epochs},
                           {"final_S", p.final_S},
                           {"residual_sum", p.residual_sum}});
  }
  return j;
}

inline std::string trace_to_csv(const RunReport& r) {
  std::ostringstream out;
  const int d = r.dim;
  out << "t,phase,epoch,eta,delta,coord";
  for (int i = 0; i < d; ++i) out << ",y" << i;
  for (int i = 0; i < d; ++i) out << ",v" << i;
  for (int i = 0; i < d; ++i) out << ",x" << i;
  for (int i = 0; i < d; ++i) out << ",m" << i;
  for (int i = 0; i < d; ++i) out << ",ghat" << i;
  out << ",f_plus,f_minus,residual_sq,loss_at_x\n";
  for (const RoundRecord& rec : r.trace) {
    out << rec.t << ',' << rec.phase << ',' << rec.epoch << ',' << fmt_double(rec.eta)
        << ',' << fmt_double(rec.delta) << ',' << rec.coord;
    auto put = [&](const Vec& v) {
      for (int i = 0; i < d; ++i) out << ',' << fmt_double(v.size() == d ? v[i] : 0.0);
    };
    put(rec.y);
    put(rec.direction);
    put(rec.x);
    put(rec.m);
    put(rec.g_hat);
    out << ',' << fmt_double(rec.f_plus) << ',' << fmt_double(rec.f_minus) << ','
        << fmt_double(rec.residual_sq) << ',' << fmt_double(rec.loss_at_x) << "\n";
  }
  return out.str();
}

// One (algorithm, seed) cell: build the replicate's environment, run the
// learner, attach metrics. The report keeps its trace only when requested.
inline RunReport execute_cell(const RunConfig& cfg, const ConvexDomain& domain,
                              const AlgorithmSpec& alg, std::uint64_t seed, int T,
                              const EnvironmentSpec& env_spec, bool keep_trace) {
  LossProcess env = env_spec.build(domain, T, seed);
  RunOptions opts;
  opts.debug_assert = cfg.debug_assert;
  if (cfg.debug_assert && alg.kind == "vr_optimistic")
    opts.comparator = solve_static_comparator(env, domain).point;

  RunReport report;
  if (alg.kind == "vr_optimistic") {
    Predictor pred(cfg.predictor.kind, domain.dim(), env.lipschitz());
    report = run_vr_optimistic(env, domain, pred, alg.resolve_params(domain, env, T), T,
                               seed, opts);
  } else if (alg.kind == "vr_adaptive") {
    Predictor pred(cfg.predictor.kind, domain.dim(), env.lipschitz());
    report = run_vr_adaptive(env, domain, pred, T, seed, opts);
  } else if (alg.kind == "vr_meta") {
    Predictor pred(cfg.predictor.kind, domain.dim(), env.lipschitz());
    report = run_vr_meta(env, domain, pred, T, seed, opts);
  } else if (alg.kind == "vr_coordinate") {
    report = run_vr_coordinate(env, domain, T, seed, alg.resolve_params(domain, env, T), opts);
  } else if (alg.kind == "ogd_two_point") {
    StaticParams p = alg.resolve_params(domain, env, T);
    report = run_ogd_two_point(env, domain, T, seed, p.eta, p.delta, opts);
  } else if (alg.kind == "fkm_single_point") {
    StaticParams p = alg.resolve_params(domain, env, T);
    report = run_fkm_single_point(env, domain, T, seed, p.eta, p.delta, opts);
  } else {
    throw InvalidConfig("unknown algorithm kind: " + alg.kind);
  }
  finalize_report(report, env, domain, keep_trace);
  return report;
}

// `run <cfg>`: every (algorithm x seed) cell, per-run JSON reports, one
// aggregate CSV, and a manifest.
inline void harness_run(const RunConfig& cfg, const std::string& out_dir) {
  ArtifactLog log{fs::path(out_dir)};
  bool ok = false;
  try {
    ConvexDomain domain = cfg.domain.build();
    const int n_algs = static_cast<int>(cfg.algorithms.size());
    const int n_seeds = static_cast<int>(cfg.seeds.size());
    std::vector<RunReport> reports(static_cast<std::size_t>(n_algs) * n_seeds);

    parallel_for(n_algs * n_seeds, cfg.workers, [&](int idx) {
      const int a = idx / n_seeds;
      const int s = idx % n_seeds;
      reports[idx] = execute_cell(cfg, domain, cfg.algorithms[a], cfg.seeds[s], cfg.T,
                                  cfg.environment, cfg.trace);
    });

    std::ostringstream csv;
    csv << "algorithm,predictor,environment,seed,T,static_regret,dynamic_regret,S_T,"
           "residual_sum,P_T,oracle_evals\n";
    for (int idx = 0; idx < n_algs * n_seeds; ++idx) {
      const RunReport& r = reports[idx];
      const std::string stem =
          "run_" + std::to_string(idx / n_seeds) + "_" + r.algorithm + "_seed" +
          std::to_string(r.seed);
      RunReport copy = r;
      if (cfg.trace) log.write(stem + "_trace.csv", trace_to_csv(r));
      copy.trace.clear();
      log.write(stem + ".json", report_to_json(copy).dump(2) + "\n");
      csv << r.algorithm << ',' << r.predictor << ',' << r.env_kind << ',' << r.seed << ','
          << r.T << ',' << fmt_double(r.static_regret) << ','
          << (r.dynamic_regret ? fmt_double(*r.dynamic_regret) : "") << ','
          << fmt_double(r.S_T) << ',' << fmt_double(r.residual_sum) << ','
          << (r.P_T ? fmt_double(*r.P_T) : "") << ',' << r.oracle_evals << "\n";
    }
    log.write("runs.csv", csv.str());
    ok = true;
  } catch (...) {
    log.finish(false);
    throw;
  }
  log.finish(ok);
}

struct SweepPoint {
  double value = 0;
  int seeds = 0;
  double mean_regret = 0, stderr_regret = 0;
  double mean_S_T = 0;
  double mean_P_T = 0;
};

struct SweepSeries {
  std::string algorithm;
  std::vector<SweepPoint> points;
  SlopeFit fit;
};

namespace detail {

inline std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "env_param,seeds,mean_regret,stderr,mean_S_T,mean_P_T\n";
  for (const SweepPoint& p : points) {
    out << fmt_double(p.value) << ',' << p.seeds << ',' << fmt_double(p.mean_regret) << ','
        << fmt_double(p.stderr_regret) << ',' << fmt_double(p.mean_S_T) << ','
        << fmt_double(p.mean_P_T) << "\n";
  }
  return out.str();
}

// Template-based log-log plot, one series per algorithm, fitted slope in the
// legend. No plotting dependency.
inline std::string sweep_svg(const std::string& axis, const std::vector<SweepSeries>& series);

}  // namespace detail

// `sweep <cfg>`: runs the grid along the swept axis, emits per-algorithm
// summary CSVs and a log-log SVG. Returns the fitted series for slope
// assertions.
inline std::vector<SweepSeries> harness_sweep(const RunConfig& cfg,
                                              const std::string& out_dir) {
  if (!cfg.sweep) throw InvalidConfig("sweep: config has no 'sweep' section");
  const SweepSpec& sw = *cfg.sweep;
  if (sw.values.size() < 3)
    throw InvalidConfig("sweep: need at least 3 grid points for a slope fit");

  ArtifactLog log{fs::path(out_dir)};
  std::vector<SweepSeries> all;
  bool ok = false;
  try {
    ConvexDomain domain = cfg.domain.build();
    const int n_vals = static_cast<int>(sw.values.size());
    const int n_seeds = static_cast<int>(cfg.seeds.size());

    for (const AlgorithmSpec& alg : cfg.algorithms) {
      SweepSeries series;
      series.algorithm = alg.kind;
      series.points.resize(n_vals);

      for (int vi = 0; vi < n_vals; ++vi) {
        const double value = sw.values[vi];
        EnvironmentSpec env_spec = cfg.environment;
        int T = cfg.T;
        AlgorithmSpec alg_cell = alg;
        if (sw.axis == "T") {
          T = static_cast<int>(value);
        } else {
          env_spec.params[sw.axis] = value;
        }
        // Oracle-tuned learners track the swept prediction-error level.
        if (sw.axis == "S_target" && alg.kind == "vr_optimistic" && alg.tuning != "manual")
          alg_cell.s_bar = value;

        std::vector<RunReport> reports(n_seeds);
        parallel_for(n_seeds, cfg.workers, [&](int s) {
          reports[s] =
              execute_cell(cfg, domain, alg_cell, cfg.seeds[s], T, env_spec, false);
        });

        SweepPoint& pt = series.points[vi];
        pt.value = value;
        pt.seeds = n_seeds;
        double sum = 0, sum_sq = 0, sum_st = 0, sum_pt = 0;
        for (const RunReport& r : reports) {
          const double reg = r.dynamic_regret ? *r.dynamic_regret : r.static_regret;
          sum += reg;
          sum_sq += reg * reg;
          sum_st += r.S_T;
          sum_pt += r.P_T ? *r.P_T : 0.0;
        }
        pt.mean_regret = sum / n_seeds;
        const double var =
            n_seeds > 1 ? std::max(0.0, (sum_sq - sum * sum / n_seeds) / (n_seeds - 1))
                        : 0.0;
        pt.stderr_regret = std::sqrt(var / n_seeds);
        pt.mean_S_T = sum_st / n_seeds;
        pt.mean_P_T = sum_pt / n_seeds;
      }

      std::vector<std::pair<double, double>> fit_pts;
      for (const SweepPoint& p : series.points) {
        if (!(p.mean_regret > 0))
          throw RuntimeFailure("sweep: nonpositive mean regret at grid point " +
                               fmt_double(p.value) + "; slope fit undefined");
        fit_pts.emplace_back(p.value, p.mean_regret);
      }
      series.fit = fit_scaling_exponent(fit_pts);
      log.write("sweep_" + alg.kind + ".csv", detail::sweep_csv(series.points));
      all.push_back(std::move(series));
    }
    log.write("sweep_" + sw.axis + ".svg", detail::sweep_svg(sw.axis, all));
    ok = true;
  } catch (...) {
    log.finish(false);
    throw;
  }
  log.finish(ok);
  return all;
}

namespace detail {

inline std::string sweep_svg(const std::string& axis, const std::vector<SweepSeries>& series) {
  const double W = 720, H = 520, ml = 70, mr = 170, mt = 40, mb = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      xmin = std::min(xmin, p.value);
      xmax = std::max(xmax, p.value);
      ymin = std::min(ymin, p.mean_regret);
      ymax = std::max(ymax, p.mean_regret);
    }
  }
  auto lx = [&](double x) {
    return ml + (std::log10(x) - std::log10(xmin)) /
                    std::max(std::log10(xmax) - std::log10(xmin), 1e-12) * (W - ml - mr);
  };
  auto ly = [&](double y) {
    return H - mb - (std::log10(y) - std::log10(ymin)) /
                        std::max(std::log10(ymax) - std::log10(ymin), 1e-12) *
                        (H - mt - mb);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
    << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << "mean regret vs " << axis << " (log-log)</text>\n";
  // axes
  o << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
    << H - mb << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
    << "\" stroke=\"black\"/>\n";
  // decade ticks
  for (int e = static_cast<int>(std::floor(std::log10(xmin)));
       e <= static_cast<int>(std::ceil(std::log10(xmax))); ++e) {
    const double v = std::pow(10.0, e);
    if (v < xmin * 0.999 || v > xmax * 1.001) continue;
    o << "<line x1=\"" << lx(v) << "\" y1=\"" << H - mb << "\" x2=\"" << lx(v) << "\" y2=\""
      << H - mb + 5 << "\" stroke=\"black\"/>"
      << "<text x=\"" << lx(v) << "\" y=\"" << H - mb + 20
      << "\" text-anchor=\"middle\" font-size=\"11\">1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::floor(std::log10(ymin)));
       e <= static_cast<int>(std::ceil(std::log10(ymax))); ++e) {
    const double v = std::pow(10.0, e);
    if (v < ymin * 0.999 || v > ymax * 1.001) continue;
    o << "<line x1=\"" << ml - 5 << "\" y1=\"" << ly(v) << "\" x2=\"" << ml << "\" y2=\""
      << ly(v) << "\" stroke=\"black\"/>"
      << "<text x=\"" << ml - 8 << "\" y=\"" << ly(v) + 4
      << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";
  }
  o << "<text x=\"" << (W - mr + ml) / 2 << "\" y=\"" << H - 18
    << "\" text-anchor=\"middle\" font-size=\"13\">" << axis << "</text>\n";
  int ci = 0;
  for (const auto& s : series) {
    const char* color = colors[ci % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : s.points) o << lx(p.value) << ',' << ly(p.mean_regret) << ' ';
    o << "\"/>\n";
    for (const auto& p : s.points) {
      o << "<circle cx=\"" << lx(p.value) << "\" cy=\"" << ly(p.mean_regret)
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    char slope[64];
    std::snprintf(slope, sizeof(slope), "slope %.3f [%.3f, %.3f]", s.fit.slope, s.fit.ci_lo,
                  s.fit.ci_hi);
    o << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 20 + 34 * ci
      << "\" font-size=\"12\" fill=\"" << color << "\">" << s.algorithm << "</text>\n"
      << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 36 + 34 * ci
      << "\" font-size=\"11\" fill=\"" << color << "\">" << slope << "</text>\n";
    ++ci;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace detail

}  // namespace bco
