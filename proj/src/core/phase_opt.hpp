#pragma once

#include <functional>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace duality {

struct PhaseSearchOptions {
  int restarts = 32;
  int max_sweeps = 5000;
  double rel_tol = 1e-12;
};

struct PhaseOptResult {
  double value = 0.0;
  RealVector phases;
  long sweeps = 0;
};

// Maximize v(phi)^dagger M v(phi) with v_z = exp(i phi_z) over the phase
// torus, for Hermitian M, by monotone coordinate ascent with restarts.
PhaseOptResult maximize_unimodular_quadratic(const Matrix& m, RandomSource& rng,
                                             const PhaseSearchOptions& opts = {});

PhaseOptResult minimize_unimodular_quadratic(const Matrix& m, RandomSource& rng,
                                             const PhaseSearchOptions& opts = {});

// Brute-force maximizer of the same objective: dense grid over the gauge-fixed
// torus (phi_0 = 0) followed by local grid refinement.  Independent of the
// coordinate-ascent path; intended for cross-checks with small n.
double grid_search_unimodular_quadratic(const Matrix& m, int points_per_angle = 720,
                                        int refine_levels = 48);

struct TorusMinimizeOptions {
  int restarts = 12;
  int max_iters = 300;
  double tol = 1e-11;
  double fd_step = 1e-6;
};

// Minimize a smooth gauge-invariant function of n phases by finite-difference
// gradient descent with backtracking and random restarts.
PhaseOptResult minimize_on_torus(const std::function<double(const RealVector&)>& f, int n,
                                 RandomSource& rng, const TorusMinimizeOptions& opts = {});

}  // namespace duality
