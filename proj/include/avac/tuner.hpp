#pragma once

#include "avac/controller_config.hpp"
#include "avac/features.hpp"
#include "avac/polymodel.hpp"

namespace avac {

struct TunerParams {
  double alpha = 0.1;  // performance weight
  double beta = 0.9;   // energy weight; alpha + beta must be 1
  double learning_rate = 0.01;
  double momentum = 0.9;
  int max_iters = 500;
  double tol = 1e-6;
  // 0 = warm start only; > 0 also starts from the search-box corners.
  int multi_start = 0;
  // Candidate the result must never undercut (model-reward-wise).
  ControllerConfig baseline = static_default_config();

  void validate() const;
};

double reward(double pg, double eg, const TunerParams& params);

// Projected momentum gradient ascent on the model reward over the normalized
// (w, b) plane, warm-started from `current`. Steps are scaled by the start
// gradient norm, making the returned configuration invariant under positive
// scaling of (and constant shifts to) the model outputs. The continuous
// optimum is rounded by evaluating its integer neighbors (B clamped to W),
// breaking exact reward ties toward smaller W*B; the warm start and the
// baseline replace the result only when strictly better.
ControllerConfig optimize(const PolyModel& pg_model, const PolyModel& eg_model,
                          const RawFeatures& raw, ControllerConfig current,
                          const TunerParams& params);

}  // namespace avac
