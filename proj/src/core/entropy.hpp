#pragma once

#include <vector>

#include "core/quantum.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace duality {

// Primal value plus a certified bracket around the true optimum.
struct CertifiedValue {
  double value = 0.0;  // best achievable (primal) estimate
  double lower = 0.0;
  double upper = 0.0;
  long iterations = 0;
  bool converged = false;
  double gap() const { return upper - lower; }
};

struct PguessResult {
  CertifiedValue cert;
  std::vector<Matrix> povm;  // achieving measurement
  Matrix dual_witness;       // Y with Y >= p_x rho_x for all x, tr(Y) = upper
};

struct PsecrResult {
  CertifiedValue cert;
  Matrix sigma;  // achieving system-B state
};

// (sum_j sqrt(q_j))^2; rejects inputs that are not a probability vector.
double half_norm(const RealVector& q);

// Optimal probability of guessing X from the quantum side information B.
// Exact paths: |X| = 1, one-dimensional B, all-diagonal conditionals, |X| = 2
// (Helstrom).  Otherwise a fixed-point iteration over measurements, with a
// dual witness for the upper bound and an interior-point fallback when the
// witness gap stays above tol.
PguessResult pguess(const CQState& cq, double tol);

// max_sigma F(rho_XB, I (x) sigma).  Exact paths: one-dimensional B and
// all-diagonal conditionals.  Otherwise projected gradient ascent for the
// primal plus a certified interior-point bracket obtained from the
// complementary system of a purification.
PsecrResult psecr(const CQState& cq, double tol, RandomSource& rng);

// Primal-only ascent value, a lower bound on the secrecy optimum.  Meant for
// inner loops (phase searches) where certifying every evaluation would be
// wasteful; certify the final point with psecr instead.
double psecr_primal_estimate(const CQState& cq, RandomSource& rng, int restarts = 4,
                             int max_iters = 250);

// Entropies in bits, with bracket endpoints mapped through the logarithm.
struct EntropyValue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double gap() const { return upper - lower; }
};

EntropyValue hmin(const CQState& cq, double tol);
EntropyValue hmax(const CQState& cq, double tol, RandomSource& rng);

// (n p_guess - 1) / (n - 1) with the pguess bracket carried through.
struct DistinguishabilityResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double gap() const { return upper - lower; }
};

DistinguishabilityResult distinguishability(const CQState& cq, double tol);

// log2(1 + sqrt((d-1)^2 - (d p - 1)^2)) for p in [1/d, 1].
double lemma2_bound(double pguess_value, int d);

}  // namespace duality
