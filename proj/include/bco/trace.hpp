#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bco/common.hpp"

namespace bco {

// One round of a learner's trajectory.
struct RoundRecord {
  int t = 0;            // 1-based round index
  Vec y;                // center point in the shrunken set
  Vec direction;        // unit perturbation direction (basis vector if coord >= 0)
  int coord = -1;       // sampled coordinate for basis sampling, else -1
  Vec x;                // charged query point y + delta * direction
  double f_plus = 0;    // observed value at y + delta v
  double f_minus = std::numeric_limits<double>::quiet_NaN();  // NaN for single-point rounds
  Vec m;                // prediction in force
  Vec g_hat;            // gradient estimate
  double residual_sq = 0;  // ||g_hat - m||^2
  double loss_at_x = 0;    // f_t(x_t), the charged loss
  double eta = 0, delta = 0;
  int phase = 1, epoch = 1;
};

struct PhaseSummary {
  int phase = 0;
  long rounds = 0;
  int epochs = 1;          // sensitivity doublings + 1
  double final_S = 0;      // sensitivity budget at phase end
  double residual_sum = 0; // observable residual accumulated over the phase
};

// Aggregate of one (environment, algorithm, seed) cell. The trace is kept
// while metrics are computed and dropped afterwards unless requested.
struct RunReport {
  static constexpr int kSchemaVersion = 1;

  std::string env_kind;
  std::string algorithm;
  std::string predictor;
  std::uint64_t seed = 0;
  int T = 0;
  int dim = 0;

  double static_regret = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> dynamic_regret;
  double S_T = std::numeric_limits<double>::quiet_NaN();  // needs diagnostics
  double residual_sum = 0;                                // observable proxy
  std::optional<double> P_T;
  std::optional<double> grad_variation;
  double charged_loss_sum = 0;

  long oracle_evals = 0;
  bool diagnostic_predictor = false;
  bool comparator_warning = false;

  // Invariant-violation counters (0 expected). The estimator bound is checked
  // on every two-point round; the rest only under debug asserts.
  long estimator_bound_violations = 0;
  long onestep_violations = 0;
  long hedge_violations = 0;
  long simplex_violations = 0;

  std::vector<PhaseSummary> phases;
  std::vector<RoundRecord> trace;
};

}  // namespace bco
