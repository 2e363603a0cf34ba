#pragma once

#include <utility>
#include <vector>

#include "core/numerics.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace duality {

// Validated density operator: Hermitian, PSD, unit trace.
class DensityOperator {
 public:
  static DensityOperator from_matrix(Matrix m);
  static DensityOperator maximally_mixed(int dim);
  static DensityOperator pure(const Vector& amplitudes);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  explicit DensityOperator(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

class PureState {
 public:
  static PureState from_amplitudes(Vector amplitudes);

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  DensityOperator to_density() const { return DensityOperator::from_matrix(amps_ * amps_.adjoint()); }

 private:
  explicit PureState(Vector amps) : amps_(std::move(amps)) {}
  Vector amps_;
};

// Normalizes a block that is PSD in exact arithmetic.  Dividing by a small
// probability amplifies arithmetic noise in the block past the validation
// window, so eigenvalues within the absolute noise budget (measured before
// normalization) are projected away; genuine negativity still fails.
DensityOperator normalized_conditional(const Matrix& unnormalized_block, double probability,
                                       const char* context);

// Positive operator-valued measure; elements sum to the identity.
struct POVM {
  std::vector<Matrix> elements;

  static POVM from_elements(std::vector<Matrix> elements);
  // One rank-1 projector per column of an orthonormal basis.
  static POVM projective(const Matrix& basis);

  int dim() const { return elements.empty() ? 0 : static_cast<int>(elements.front().rows()); }
  int outcomes() const { return static_cast<int>(elements.size()); }
};

// Completely positive trace-preserving map in Kraus form.
struct QuantumChannel {
  std::vector<Matrix> kraus;
  int dim_in = 0;
  int dim_out = 0;

  static QuantumChannel from_kraus(std::vector<Matrix> kraus);
  static QuantumChannel identity(int dim);
  // Kills all off-diagonal entries in the computational basis.
  static QuantumChannel dephasing(int dim);
};

struct CQOutcome {
  double probability = 0.0;
  DensityOperator state;
  // True when the branch probability fell below kZeroProbability and the
  // conditional state was replaced by the maximally mixed one.
  bool zero_probability = false;
};

// Classical-quantum state: sum_x p_x |x><x| (x) rho_x.
class CQState {
 public:
  static CQState from_ensemble(std::vector<std::pair<double, DensityOperator>> ensemble);
  // Builds from unnormalized conditional blocks G_x = p_x rho_x, as produced
  // by a measurement; probabilities are the block traces.
  static CQState from_blocks(const std::vector<Matrix>& blocks);

  int alphabet_size() const { return static_cast<int>(outcomes_.size()); }
  int dim_b() const { return dim_b_; }
  const std::vector<CQOutcome>& outcomes() const { return outcomes_; }
  RealVector priors() const;
  DensityOperator average_state() const;
  // True when every conditional is diagonal in the computational basis.
  bool classical(double tol = kHermTol) const;

 private:
  CQState(std::vector<CQOutcome> outcomes, int dim_b)
      : outcomes_(std::move(outcomes)), dim_b_(dim_b) {}
  std::vector<CQOutcome> outcomes_;
  int dim_b_;
};

enum class Subsystem { first, second };

// Discrete Fourier basis with one-based exponents in zero-based storage:
// F[j][k] = exp(+2 pi i (j+1)(k+1) / n) / sqrt(n).  With this convention the
// uniform-over-all-but-last superposition has real amplitudes and the dark
// detector of the canonical n-path example sits at the first output index.
Matrix fourier_matrix(int n);

// Phase plate followed by the Fourier coupler: column x is U_phi F |x>.
class BasisFamily {
 public:
  BasisFamily(int n, RealVector phases);

  int n() const { return n_; }
  const RealVector& phases() const { return phases_; }
  const Matrix& matrix() const { return basis_; }

 private:
  int n_;
  RealVector phases_;
  Matrix basis_;
};

Matrix kron(const Matrix& a, const Matrix& b);

DensityOperator partial_trace(const DensityOperator& rho, int dim_first, int dim_second,
                              Subsystem keep);
Matrix partial_trace_matrix(const Matrix& m, int dim_first, int dim_second, Subsystem keep);

DensityOperator apply_channel(const QuantumChannel& channel, const DensityOperator& rho);

RealVector born_distribution(const POVM& povm, const DensityOperator& rho);

// Projective measurement of an orthonormal basis on the first subsystem of a
// bipartite state; the result is the induced classical-quantum ensemble on
// the second subsystem.
CQState measure_first_subsystem(const DensityOperator& rho_ab, int dim_a, int dim_b,
                                const Matrix& basis);

// Computational-basis measurement of the path register of a system (x)
// environment state.
CQState cq_conditional_on_path(const DensityOperator& rho_se, int n, int dim_e);

BasisFamily mub_basis(int n, const RealVector& phases);

// max_{x,y} |<X_x|Y_y>|^2 over basis columns.
double overlap_c(const Matrix& basis_x, const Matrix& basis_y);

// Purification of a CQ state on X (x) X' (x) B (x) R with dim R = dim B:
// |Psi> = sum_x sqrt(p_x) |x>|x>|phi_x>, |phi_x> purifying rho_x on B (x) R.
PureState purify(const CQState& cq);

DensityOperator random_density(int dim, int rank, RandomSource& rng);

// Haar basis coarse-grained into `outcomes` groups, then mixed towards the
// weighted identity by a random amount in [0, 0.5].
POVM random_povm(int dim, int outcomes, RandomSource& rng);

bool is_unitary(const Matrix& u, double tol = kIsometryTol);

}  // namespace duality
