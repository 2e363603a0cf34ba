#pragma once

// Independent cross-check routes used by the test suites.  Everything here is
// deliberately written against raw Eigen rather than the library's internal
// helpers, so that an agreement between the two sides actually means two
// different computations met.

#include "core/quantum.hpp"
#include "core/types.hpp"

namespace duality::testing {

struct TwoPathClosedForm {
  double visibility = 0.0;
  double distinguishability = 0.0;
};

// Closed form for a pure two-path state with environment amplitudes
// psi(z, e) stacked as joint = (psi(0,.), psi(1,.)).  With g = <psi_0|psi_1>
// and p_z = |psi_z|^2:
//   V = 2|g|,  D = sqrt((p0 - p1)^2 + 4 (p0 p1 - |g|^2)).
TwoPathClosedForm two_path_closed_form(const Vector& joint, int dim_e);

// Click probability of one detector maximized over plate phases by dense
// grid search; rebuilds the quadratic form from scratch.
double grid_pmax_detector(const Matrix& rho_s, const Matrix& fc2, int detector,
                          int points_per_angle = 240, int refine_levels = 40);

// Binary minimum-error value (1 + ||g0 - g1||_1) / 2 for subnormalized
// conditionals, with the trace norm taken directly from an eigensolve.
double helstrom_pguess(const Matrix& g0, const Matrix& g1);

struct DualOracleValue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Secrecy optimum computed through the complementary route: purify the CQ
// state by hand, trace out B, and solve
//   min tr(sigma)  s.t.  I_X (x) sigma >= rho_{X X' R}
// whose optimum equals max_sigma F(rho_XB, I (x) sigma).
DualOracleValue psecr_dual_oracle(const CQState& cq, double gap_tol);

}  // namespace duality::testing
