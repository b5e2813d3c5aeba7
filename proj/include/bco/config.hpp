#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bco/algorithms.hpp"
#include "bco/common.hpp"
#include "bco/environments.hpp"
#include "bco/geometry.hpp"
#include "bco/predictors.hpp"

namespace bco {

using json = nlohmann::json;

namespace cfgdetail {

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw InvalidConfig(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw InvalidConfig(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
T require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw InvalidConfig(where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidConfig(where + ": bad value for '" + key + "'");
  }
}

template <typename T>
T optional_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

}  // namespace cfgdetail

struct DomainSpec {
  std::string shape;  // "ball" | "box"
  int dim = 0;
  double radius = 0;        // ball
  std::vector<double> half_widths;  // box

  static DomainSpec parse(const json& j) {
    cfgdetail::check_keys(j, {"shape", "dim", "radius", "half_widths"}, "domain");
    DomainSpec s;
    s.shape = cfgdetail::require<std::string>(j, "shape", "domain");
    if (s.shape == "ball") {
      s.dim = cfgdetail::require<int>(j, "dim", "domain");
      s.radius = cfgdetail::require<double>(j, "radius", "domain");
    } else if (s.shape == "box") {
      s.half_widths = cfgdetail::require<std::vector<double>>(j, "half_widths", "domain");
      s.dim = static_cast<int>(s.half_widths.size());
    } else {
      throw InvalidConfig("domain: shape must be 'ball' or 'box'");
    }
    return s;
  }

  ConvexDomain build() const {
    if (shape == "ball") return ConvexDomain::ball(dim, radius);
    Vec h(static_cast<Eigen::Index>(half_widths.size()));
    for (std::size_t i = 0; i < half_widths.size(); ++i) h[i] = half_widths[i];
    return ConvexDomain::box(h);
  }
};

struct EnvironmentSpec {
  std::string kind;
  json params;  // kind-specific keys, already validated

  static EnvironmentSpec parse(const json& j) {
    EnvironmentSpec s;
    s.kind = cfgdetail::require<std::string>(j, "kind", "environment");
    s.params = j;
    s.params.erase("kind");
    const std::string where = "environment(" + s.kind + ")";
    if (s.kind == "quadratic_drift") {
      cfgdetail::check_keys(s.params,
                            {"drift_rate", "curvature", "center_path", "center_envelope"},
                            where);
    } else if (s.kind == "linear_rademacher") {
      cfgdetail::check_keys(s.params, {"S_target", "lipschitz_cap"}, where);
    } else if (s.kind == "single_point_barrier") {
      cfgdetail::check_keys(s.params, {"sigma", "lipschitz_cap"}, where);
    } else if (s.kind == "dynamic_drift") {
      cfgdetail::check_keys(s.params, {"path_budget", "curvature", "center_envelope"}, where);
    } else if (s.kind == "piecewise_nonsmooth") {
      cfgdetail::check_keys(s.params, {"L", "delta"}, where);
    } else if (s.kind == "stationary_linear") {
      cfgdetail::check_keys(s.params, {"gradient"}, where);
    } else if (s.kind == "zero") {
      cfgdetail::check_keys(s.params, {}, where);
    } else {
      throw InvalidConfig("environment: unknown kind '" + s.kind + "'");
    }
    return s;
  }

  LossProcess build(const ConvexDomain& domain, int T, std::uint64_t seed) const {
    const int d = domain.dim();
    const double D = domain.diameter();
    if (kind == "quadratic_drift") {
      const auto path = cfgdetail::optional_or<std::string>(params, "center_path", "walk");
      return make_quadratic_drift(
          d, T, cfgdetail::require<double>(params, "drift_rate", kind),
          cfgdetail::require<double>(params, "curvature", kind), seed, D,
          path == "alternate" ? CenterPath::Alternate : CenterPath::RandomWalk,
          cfgdetail::optional_or<double>(params, "center_envelope", 1.0));
    }
    if (kind == "linear_rademacher") {
      return make_linear_rademacher(d, T,
                                    cfgdetail::require<double>(params, "S_target", kind), D,
                                    seed,
                                    cfgdetail::optional_or<double>(params, "lipschitz_cap", 1.0));
    }
    if (kind == "single_point_barrier") {
      return make_single_point_barrier(
          d, T, cfgdetail::require<double>(params, "sigma", kind), D, seed,
          cfgdetail::optional_or<double>(params, "lipschitz_cap",
                                         std::numeric_limits<double>::infinity()));
    }
    if (kind == "dynamic_drift") {
      return make_dynamic_drift(d, T,
                                cfgdetail::require<double>(params, "path_budget", kind),
                                cfgdetail::require<double>(params, "curvature", kind), seed, D,
                                cfgdetail::optional_or<double>(params, "center_envelope", 1.0))
          .first;
    }
    if (kind == "piecewise_nonsmooth") {
      return make_piecewise_nonsmooth(cfgdetail::require<double>(params, "L", kind),
                                      cfgdetail::require<double>(params, "delta", kind), T);
    }
    if (kind == "stationary_linear") {
      const auto g = cfgdetail::require<std::vector<double>>(params, "gradient", kind);
      if (static_cast<int>(g.size()) != d)
        throw InvalidConfig("stationary_linear: gradient dimension mismatch");
      Vec gv(d);
      for (int i = 0; i < d; ++i) gv[i] = g[i];
      return make_stationary_linear(gv, T);
    }
    return make_zero_losses(d, T);
  }
};

struct AlgorithmSpec {
  std::string kind;
  std::string tuning;  // "manual" | "oracle_static" | "oracle_dynamic" | "oracle" | "worst_case" | "auto"
  double eta = 0, delta = 0;
  double s_bar = 0, p_t = 0, d_t = 0;
  double value_scale = 1.0;  // single-point worst-case tuning

  static AlgorithmSpec parse(const json& j) {
    cfgdetail::check_keys(j,
                          {"kind", "tuning", "eta", "delta", "s_bar", "p_t", "d_t",
                           "value_scale"},
                          "algorithm");
    AlgorithmSpec s;
    s.kind = cfgdetail::require<std::string>(j, "kind", "algorithm");
    static const std::set<std::string> kinds = {"vr_optimistic",  "vr_adaptive",
                                                "vr_meta",        "vr_coordinate",
                                                "ogd_two_point",  "fkm_single_point"};
    if (!kinds.count(s.kind)) throw InvalidConfig("algorithm: unknown kind '" + s.kind + "'");
    s.tuning = cfgdetail::optional_or<std::string>(j, "tuning", "auto");
    s.eta = cfgdetail::optional_or<double>(j, "eta", 0.0);
    s.delta = cfgdetail::optional_or<double>(j, "delta", 0.0);
    s.s_bar = cfgdetail::optional_or<double>(j, "s_bar", 0.0);
    s.p_t = cfgdetail::optional_or<double>(j, "p_t", 0.0);
    s.d_t = cfgdetail::optional_or<double>(j, "d_t", 0.0);
    s.value_scale = cfgdetail::optional_or<double>(j, "value_scale", 1.0);
    if (s.tuning == "manual" && !(s.eta > 0 && s.delta > 0))
      throw InvalidConfig("algorithm: manual tuning requires positive eta and delta");
    return s;
  }

  // Resolve (eta, delta) for the fixed-parameter learners.
  StaticParams resolve_params(const ConvexDomain& domain, const LossProcess& env,
                              int T) const {
    const double r = domain.in_radius();
    const double beta = std::isfinite(env.smoothness()) ? env.smoothness() : 0.0;
    if (tuning == "manual") {
      if (!(delta > 0 && delta < r))
        throw InvalidConfig("algorithm: delta must lie in (0, in_radius)");
      return StaticParams{eta, delta, delta / r};
    }
    if (kind == "vr_coordinate")
      return tune_coordinate(domain.diameter(), domain.dim(), d_t, T, beta, r);
    if (kind == "ogd_two_point")
      return tune_baseline_two_point(domain.diameter(), domain.dim(), T, env.lipschitz(),
                                     beta, r);
    if (kind == "fkm_single_point") {
      StaticParams p;
      p.delta = std::min(r / 2.0, r * std::pow(static_cast<double>(T), -0.25));
      p.eta = domain.diameter() * p.delta /
              (domain.dim() * std::max(value_scale, 1e-12) *
               std::sqrt(static_cast<double>(T)));
      p.alpha = p.delta / r;
      return p;
    }
    if (tuning == "oracle_dynamic")
      return tune_dynamic(domain.diameter(), domain.dim(), s_bar, p_t, T, beta, r);
    return tune_static(domain.diameter(), domain.dim(), s_bar, T, beta, r);
  }
};

struct PredictorSpec {
  Predictor::Kind kind = Predictor::Kind::Zero;

  static PredictorSpec parse(const json& j) {
    cfgdetail::check_keys(j, {"kind"}, "predictor");
    PredictorSpec s;
    s.kind = Predictor::kind_from_string(cfgdetail::require<std::string>(j, "kind", "predictor"));
    return s;
  }
};

struct SweepSpec {
  std::string axis;            // environment parameter name, or "T"
  std::vector<double> values;  // positive, strictly increasing
  std::optional<std::pair<double, double>> expected_slope;  // (target, tol)

  static SweepSpec parse(const json& j) {
    cfgdetail::check_keys(j, {"axis", "values", "expected_slope"}, "sweep");
    SweepSpec s;
    s.axis = cfgdetail::require<std::string>(j, "axis", "sweep");
    s.values = cfgdetail::require<std::vector<double>>(j, "values", "sweep");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (!(s.values[i] > 0)) throw InvalidConfig("sweep: values must be positive");
      if (i > 0 && !(s.values[i] > s.values[i - 1]))
        throw InvalidConfig("sweep: values must be strictly increasing");
    }
    if (j.contains("expected_slope")) {
      const json& e = j.at("expected_slope");
      cfgdetail::check_keys(e, {"target", "tol"}, "sweep.expected_slope");
      s.expected_slope = {cfgdetail::require<double>(e, "target", "sweep.expected_slope"),
                          cfgdetail::require<double>(e, "tol", "sweep.expected_slope")};
    }
    return s;
  }
};

struct RunConfig {
  DomainSpec domain;
  EnvironmentSpec environment;
  std::vector<AlgorithmSpec> algorithms;
  PredictorSpec predictor;
  int T = 0;
  std::vector<std::uint64_t> seeds;
  std::string output = "out";
  bool debug_assert = false;
  bool trace = false;
  int workers = 1;
  std::optional<SweepSpec> sweep;

  static RunConfig parse(const json& j) {
    cfgdetail::check_keys(j,
                          {"domain", "environment", "algorithm", "algorithms", "predictor",
                           "T", "seeds", "output", "debug_assert", "trace", "workers",
                           "sweep"},
                          "config");
    RunConfig c;
    c.domain = DomainSpec::parse(j.at("domain"));
    c.environment = EnvironmentSpec::parse(j.at("environment"));
    if (j.contains("algorithm") == j.contains("algorithms"))
      throw InvalidConfig("config: provide exactly one of 'algorithm' or 'algorithms'");
    if (j.contains("algorithm")) {
      c.algorithms.push_back(AlgorithmSpec::parse(j.at("algorithm")));
    } else {
      for (const json& a : j.at("algorithms")) c.algorithms.push_back(AlgorithmSpec::parse(a));
      if (c.algorithms.empty()) throw InvalidConfig("config: 'algorithms' is empty");
    }
    c.predictor = j.contains("predictor") ? PredictorSpec::parse(j.at("predictor"))
                                          : PredictorSpec{};
    c.T = cfgdetail::require<int>(j, "T", "config");
    if (c.T < 1) throw InvalidConfig("config: T must be >= 1");

    if (!j.contains("seeds")) throw InvalidConfig("config: missing key 'seeds'");
    const json& sj = j.at("seeds");
    if (sj.is_array()) {
      for (const json& v : sj) c.seeds.push_back(v.get<std::uint64_t>());
    } else {
      cfgdetail::check_keys(sj, {"count", "base"}, "seeds");
      const int count = cfgdetail::require<int>(sj, "count", "seeds");
      const std::uint64_t base = cfgdetail::require<std::uint64_t>(sj, "base", "seeds");
      for (int i = 0; i < count; ++i) c.seeds.push_back(base + static_cast<std::uint64_t>(i));
    }
    if (c.seeds.empty()) throw InvalidConfig("config: seeds must be nonempty");
    std::set<std::uint64_t> uniq(c.seeds.begin(), c.seeds.end());
    if (uniq.size() != c.seeds.size()) throw InvalidConfig("config: seeds must be distinct");

    c.output = cfgdetail::optional_or<std::string>(j, "output", "out");
    c.debug_assert = cfgdetail::optional_or<bool>(j, "debug_assert", false);
    c.trace = cfgdetail::optional_or<bool>(j, "trace", false);
    c.workers = cfgdetail::optional_or<int>(j, "workers", 1);
    if (c.workers < 1) throw InvalidConfig("config: workers must be >= 1");
    if (j.contains("sweep")) c.sweep = SweepSpec::parse(j.at("sweep"));

    // BCO_SEED overrides the base seed.
    if (const char* env_seed = std::getenv("BCO_SEED")) {
      const std::uint64_t base = std::strtoull(env_seed, nullptr, 10);
      for (std::size_t i = 0; i < c.seeds.size(); ++i)
        c.seeds[i] = base + static_cast<std::uint64_t>(i);
    }

    // Manual step sizes are validated against the domain up front so bad
    // configs fail before any work starts.
    ConvexDomain dom = c.domain.build();
    for (const AlgorithmSpec& a : c.algorithms) {
      if (a.tuning == "manual" && !(a.delta > 0 && a.delta < dom.in_radius()))
        throw InvalidConfig("algorithm(" + a.kind + "): delta must lie in (0, in_radius)");
    }
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file: " + path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidConfig("config parse error: " + std::string(e.what()));
    }
    return parse(j);
  }
};

}  // namespace bco
