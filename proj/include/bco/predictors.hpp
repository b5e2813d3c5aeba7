#pragma once

#include <string>

#include "bco/common.hpp"

namespace bco {

// History-measurable gradient hints m_t. Every prediction is clipped to the
// L-ball: by Lipschitz continuity the true gradients live there, and radial
// clipping never increases the prediction error. With no history m_1 = 0.
class Predictor {
 public:
  enum class Kind { Zero, LastEstimate, CoordinatePersistent, OraclePrevGrad };

  Predictor(Kind kind, int dim, double clip_radius)
      : kind_(kind), clip_radius_(clip_radius), state_(Vec::Zero(dim)), has_state_(false) {
    if (dim < 1) throw InvalidInput("predictor: dim must be >= 1");
    if (clip_radius < 0) throw InvalidInput("predictor: clip radius must be >= 0");
  }

  Kind kind() const { return kind_; }
  double clip_radius() const { return clip_radius_; }

  // True for hints that read information a bandit learner cannot observe.
  bool diagnostic() const { return kind_ == Kind::OraclePrevGrad; }

  Vec predict() const {
    if (kind_ == Kind::Zero || !has_state_) return Vec::Zero(state_.size());
    return state_;  // stored clipped
  }

  // Feed of the previous round's estimate (LastEstimate hint source).
  void observe_estimate(const Vec& g_hat) {
    if (kind_ != Kind::LastEstimate) return;
    state_ = clip_to_ball(g_hat, clip_radius_);
    has_state_ = true;
  }

  // Coordinate write m[i] <- v_hat; the stored vector is re-clipped after
  // every write so the norm invariant holds at all times.
  void observe_coordinate(int i, double v_hat) {
    if (kind_ != Kind::CoordinatePersistent) return;
    if (i < 0 || i >= static_cast<int>(state_.size()))
      throw InvalidInput("predictor: coordinate index out of range");
    state_[i] = v_hat;
    state_ = clip_to_ball(state_, clip_radius_);
    has_state_ = true;
  }

  // Diagnostic channel: the true gradient at the previous play point.
  void observe_true_grad(const Vec& g) {
    if (kind_ != Kind::OraclePrevGrad) return;
    state_ = clip_to_ball(g, clip_radius_);
    has_state_ = true;
  }

  static Kind kind_from_string(const std::string& s) {
    if (s == "zero") return Kind::Zero;
    if (s == "last_estimate") return Kind::LastEstimate;
    if (s == "coordinate_persistent") return Kind::CoordinatePersistent;
    if (s == "oracle_prev_grad") return Kind::OraclePrevGrad;
    throw InvalidConfig("unknown predictor kind: " + s);
  }

  static std::string to_string(Kind k) {
    switch (k) {
      case Kind::Zero: return "zero";
      case Kind::LastEstimate: return "last_estimate";
      case Kind::CoordinatePersistent: return "coordinate_persistent";
      case Kind::OraclePrevGrad: return "oracle_prev_grad";
    }
    return "?";
  }

 private:
  Kind kind_;
  double clip_radius_;
  Vec state_;
  bool has_state_;
};

}  // namespace bco
