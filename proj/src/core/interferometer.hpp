#pragma once

#include <vector>

#include "core/entropy.hpp"
#include "core/phase_opt.hpp"
#include "core/quantum.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace duality {

// Which-path coupling S -> S (x) E given by the isometry sum_z |z>|eta_z><z|.
struct WhichPathCoupling {
  int n = 0;
  int env_dim = 0;
  std::vector<Vector> flags;  // one normalized |eta_z> per path

  static WhichPathCoupling from_flag_states(std::vector<Vector> flags);
  // Flags sqrt(gamma)|0> + sqrt(1-gamma)|z+1> on an environment of dimension
  // n+1; gamma = 1 stores nothing, gamma = 0 stores the full path.
  static WhichPathCoupling scalar(int n, double gamma);
  static WhichPathCoupling trivial(int n);  // one-dimensional environment

  Matrix isometry() const;  // (n * env_dim) x n
};

// n-path interferometer: input state, first coupler, which-path coupling,
// second coupler.  Phases are free parameters applied downstream.
class Interferometer {
 public:
  static Interferometer make(int n, Matrix fc1, DensityOperator input, WhichPathCoupling coupling,
                             Matrix fc2);

  int n() const { return n_; }
  const Matrix& fc1() const { return fc1_; }
  const Matrix& fc2() const { return fc2_; }
  const DensityOperator& input() const { return input_; }
  const WhichPathCoupling& coupling() const { return coupling_; }
  int env_dim() const { return coupling_.env_dim; }

  // Joint system-environment state after the first coupler and the coupling.
  DensityOperator propagate() const;

 private:
  Interferometer(int n, Matrix fc1, DensityOperator input, WhichPathCoupling coupling, Matrix fc2)
      : n_(n),
        fc1_(std::move(fc1)),
        input_(std::move(input)),
        coupling_(std::move(coupling)),
        fc2_(std::move(fc2)) {}
  int n_;
  Matrix fc1_;
  DensityOperator input_;
  WhichPathCoupling coupling_;
  Matrix fc2_;
};

// Every matrix entry has modulus 1/sqrt(n): a path eigenstate spreads
// uniformly over the detectors.
bool is_symmetric_coupler(const Matrix& u, double tol = kUnbiasedTol);

// D_psi * F * D_chi with random diagonal phases on both sides.
Matrix random_symmetric_coupler(int n, RandomSource& rng);

// Lumped detection operator for one detector: fc2^dagger |c><c| fc2.
Matrix detection_operator(const Matrix& fc2, int detector);

// Click distribution after the phase plate and the second coupler.
RealVector detection_distribution(const DensityOperator& rho_s, const RealVector& phases,
                                  const Matrix& fc2);

struct DetectorExtremum {
  double value = 0.0;
  RealVector phases;  // plate phases achieving the extremum
  long sweeps = 0;
};

DetectorExtremum pmax_detector(const DensityOperator& rho_s, const Matrix& fc2, int detector,
                               RandomSource& rng, const PhaseSearchOptions& opts = {});
DetectorExtremum pmin_detector(const DensityOperator& rho_s, const Matrix& fc2, int detector,
                               RandomSource& rng, const PhaseSearchOptions& opts = {});

// Click probability of the path-decohered state; independent of the phases.
double pdec_detector(const DensityOperator& rho_s, const Matrix& fc2, int detector);

struct VisibilityResult {
  double value = 0.0;
  double pmax = 0.0;
  double pmin = 0.0;   // only for the two-point form
  RealVector phases;   // plate phases achieving pmax
};

// Two-point fringe contrast (pmax - pmin) / (pmax + pmin) for one detector.
VisibilityResult visibility_naive(const DensityOperator& rho_s, const Matrix& fc2, int detector,
                                  RandomSource& rng);

// Generalized visibility (n max_phi p_detector - 1)/(n - 1); requires a
// symmetric second coupler, for which the detector choice is immaterial.
VisibilityResult visibility_n(const DensityOperator& rho_s, const Matrix& fc2, RandomSource& rng);

// Distinguishability bracket from the optimal environment measurement.
DistinguishabilityResult path_distinguishability(const DensityOperator& rho_se, int n, int dim_e,
                                                 double tol);

struct PostselectedCQ {
  CQState cq;             // path ensemble conditioned on the detection event
  double click_probability = 0.0;  // click probability of the decohered state
};

// Path-copy ensemble on the environment after post-selecting one detector.
// The phases enter only through the off-diagonal blocks and cancel from the
// result; they are accepted to allow that invariance to be exercised.
PostselectedCQ postselected_cq(const DensityOperator& rho_se, int n, int dim_e, const Matrix& fc2,
                               const RealVector& phases, int detector);

struct AsymmetricQuantities {
  double v1 = 0.0;
  double d1 = 0.0;
  double d1_lower = 0.0;
  double d1_upper = 0.0;
  double pmax = 0.0;
  double pdec = 0.0;
  RealVector pmax_phases;
};

AsymmetricQuantities asymmetric_quantities(const DensityOperator& rho_se, int n, int dim_e,
                                           const Matrix& fc2, int detector, double tol,
                                           RandomSource& rng);

struct ErasureOutcome {
  double probability = 0.0;
  double distinguishability = 0.0;
  double visibility = 0.0;
  RealVector optimal_phases;      // plate phases achieving the visibility
  RealVector path_distribution;   // diag of the conditional system state
  Matrix conditional;             // system state given this outcome
};

struct ErasureRecord {
  std::vector<ErasureOutcome> outcomes;
  double avg_distinguishability = 0.0;
  double avg_visibility = 0.0;
  double skipped_probability = 0.0;  // total weight of outcomes below threshold
};

// Sub-ensemble distinguishability and visibility for an erasure measurement
// on the environment, with probability-weighted averages.
ErasureRecord erasure_pipeline(const DensityOperator& rho_se, int n, int dim_e, const POVM& y_povm,
                               const Matrix& fc2, RandomSource& rng);

// Canonical n-path example: equal superposition of all but the last Fourier
// column; amplitudes are real with the large one on the last path.
PureState example1_state(int n);

// Plate phases 2 pi (j+1) / n that darken the first detector exactly.
RealVector example1_phases(int n);

}  // namespace duality
