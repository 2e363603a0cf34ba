#pragma once

#include "core/types.hpp"

namespace duality {

struct SdpResult {
  Matrix sigma;          // last strictly feasible iterate
  double upper = 0.0;    // tr(sigma), upper bound on the optimum
  double lower = 0.0;    // dual value, certified lower bound on the optimum
  int newton_steps = 0;
  bool converged = false;
};

// Certified interior-point solver for
//   minimize tr(sigma)  subject to  I_blocks (x) sigma >= target
// over Hermitian sigma of size m = target.rows() / blocks.  The target must
// be Hermitian.  The returned bracket [lower, upper] always holds; converged
// is set when upper - lower <= gap_tol.
//
// The lower bound comes from the dual max { tr(target Y) : Tr_1 Y = I, Y >= 0 }:
// the scaled barrier gradient is repaired into an exactly feasible Y, so the
// bound is valid regardless of how centered the final iterate is.
SdpResult sdp_min_trace_dominating(const Matrix& target, int blocks, double gap_tol);

}  // namespace duality
