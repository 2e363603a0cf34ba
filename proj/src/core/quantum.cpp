#include "core/quantum.hpp"

#include <cmath>
#include <string>

namespace duality {

namespace {

void check_density_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) fail(Errc::dimension_mismatch, "density operator: matrix not square");
  if (m.rows() == 0) fail(Errc::invalid_argument, "density operator: empty matrix");
  if (!is_hermitian(m, kHermTol)) fail(Errc::not_hermitian, "density operator: not Hermitian");
  if (std::abs(m.trace().real() - 1.0) > kTraceTol || std::abs(m.trace().imag()) > kTraceTol) {
    fail(Errc::bad_trace, "density operator: trace differs from one");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
  if (solver.eigenvalues().minCoeff() < -kEigenvalueTol) {
    fail(Errc::not_psd, "density operator: negative eigenvalue " +
                            std::to_string(solver.eigenvalues().minCoeff()));
  }
}

}  // namespace

DensityOperator DensityOperator::from_matrix(Matrix m) {
  check_density_matrix(m);
  return DensityOperator(hermitize(m));
}

DensityOperator normalized_conditional(const Matrix& unnormalized_block, double probability,
                                       const char* context) {
  if (probability <= 0.0) {
    fail(Errc::zero_probability, std::string(context) + ": non-positive normalizer");
  }
  const Matrix block = hermitize(unnormalized_block);
  HermitianEigenSystem es = hermitian_eig(block);
  // The budget is absolute on the unnormalized block: callers pass blocks in
  // ambient (unit-trace ensemble) scale, where arithmetic noise sits orders
  // of magnitude below this while genuine violations sit orders above.
  constexpr double kBlockNoiseTol = 1e-9;
  if (es.eigenvalues.minCoeff() < -kBlockNoiseTol) {
    fail(Errc::not_psd, std::string(context) + ": conditional block not PSD");
  }
  RealVector vals = es.eigenvalues.cwiseMax(0.0);
  const double total = vals.sum();
  if (total <= 0.0) fail(Errc::zero_probability, std::string(context) + ": vanishing block");
  vals /= total;
  return DensityOperator::from_matrix(es.eigenvectors * vals.asDiagonal() *
                                      es.eigenvectors.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  if (dim <= 0) fail(Errc::invalid_argument, "maximally_mixed: non-positive dimension");
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::pure(const Vector& amplitudes) {
  return PureState::from_amplitudes(amplitudes).to_density();
}

PureState PureState::from_amplitudes(Vector amplitudes) {
  if (amplitudes.size() == 0) fail(Errc::invalid_argument, "pure state: empty amplitude vector");
  if (std::abs(amplitudes.norm() - 1.0) > kTraceTol) {
    fail(Errc::not_normalized, "pure state: amplitudes not normalized");
  }
  return PureState(std::move(amplitudes));
}

POVM POVM::from_elements(std::vector<Matrix> elements) {
  if (elements.empty()) fail(Errc::not_povm, "povm: no elements");
  const Eigen::Index dim = elements.front().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const Matrix& e : elements) {
    if (e.rows() != dim || e.cols() != dim) fail(Errc::dimension_mismatch, "povm: ragged element dimensions");
    if (!is_hermitian(e, kHermTol)) fail(Errc::not_povm, "povm: element not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(e));
    if (solver.eigenvalues().minCoeff() < -kEigenvalueTol) {
      fail(Errc::not_povm, "povm: element not PSD");
    }
    sum += e;
  }
  if (max_abs(sum - Matrix::Identity(dim, dim)) > kPovmSumTol) {
    fail(Errc::not_povm, "povm: elements do not sum to the identity");
  }
  return POVM{std::move(elements)};
}

POVM POVM::projective(const Matrix& basis) {
  if (!is_unitary(basis)) fail(Errc::not_unitary, "projective povm: basis not orthonormal");
  std::vector<Matrix> elements;
  elements.reserve(static_cast<std::size_t>(basis.cols()));
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    elements.push_back(basis.col(j) * basis.col(j).adjoint());
  }
  return POVM{std::move(elements)};
}

QuantumChannel QuantumChannel::from_kraus(std::vector<Matrix> kraus) {
  if (kraus.empty()) fail(Errc::invalid_argument, "channel: no Kraus operators");
  const Eigen::Index rows = kraus.front().rows();
  const Eigen::Index cols = kraus.front().cols();
  Matrix sum = Matrix::Zero(cols, cols);
  for (const Matrix& k : kraus) {
    if (k.rows() != rows || k.cols() != cols) {
      fail(Errc::dimension_mismatch, "channel: ragged Kraus dimensions");
    }
    sum += k.adjoint() * k;
  }
  if (max_abs(sum - Matrix::Identity(cols, cols)) > kPovmSumTol) {
    fail(Errc::not_trace_preserving, "channel: Kraus operators not trace preserving");
  }
  QuantumChannel ch;
  ch.kraus = std::move(kraus);
  ch.dim_in = static_cast<int>(cols);
  ch.dim_out = static_cast<int>(rows);
  return ch;
}

QuantumChannel QuantumChannel::identity(int dim) {
  return from_kraus({Matrix::Identity(dim, dim)});
}

QuantumChannel QuantumChannel::dephasing(int dim) {
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    Matrix k = Matrix::Zero(dim, dim);
    k(j, j) = 1.0;
    kraus.push_back(std::move(k));
  }
  return from_kraus(std::move(kraus));
}

CQState CQState::from_ensemble(std::vector<std::pair<double, DensityOperator>> ensemble) {
  if (ensemble.empty()) fail(Errc::invalid_argument, "cq state: empty ensemble");
  const int dim_b = ensemble.front().second.dim();
  double total = 0.0;
  std::vector<CQOutcome> outcomes;
  outcomes.reserve(ensemble.size());
  for (auto& [p, rho] : ensemble) {
    if (rho.dim() != dim_b) fail(Errc::dimension_mismatch, "cq state: ragged conditional dimensions");
    if (p < -1e-12) fail(Errc::not_a_distribution, "cq state: negative probability");
    const double prob = std::max(p, 0.0);
    total += prob;
    if (prob <= kZeroProbability) {
      outcomes.push_back(CQOutcome{prob, DensityOperator::maximally_mixed(dim_b), true});
    } else {
      outcomes.push_back(CQOutcome{prob, std::move(rho), false});
    }
  }
  if (std::abs(total - 1.0) > kTraceTol) {
    fail(Errc::not_a_distribution, "cq state: probabilities do not sum to one");
  }
  return CQState(std::move(outcomes), dim_b);
}

CQState CQState::from_blocks(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) fail(Errc::invalid_argument, "cq state: no blocks");
  const Eigen::Index dim_b = blocks.front().rows();
  double total = 0.0;
  std::vector<CQOutcome> outcomes;
  outcomes.reserve(blocks.size());
  for (const Matrix& g : blocks) {
    if (g.rows() != dim_b || g.cols() != dim_b) {
      fail(Errc::dimension_mismatch, "cq state: ragged block dimensions");
    }
    if (!is_hermitian(g, 1e-9)) fail(Errc::not_hermitian, "cq state: block not Hermitian");
    const double p = g.trace().real();
    if (p < -1e-12) fail(Errc::not_psd, "cq state: block with negative trace");
    total += std::max(p, 0.0);
    if (p <= kZeroProbability) {
      outcomes.push_back(
          CQOutcome{std::max(p, 0.0), DensityOperator::maximally_mixed(static_cast<int>(dim_b)), true});
    } else {
      outcomes.push_back(CQOutcome{p, normalized_conditional(g, p, "cq state"), false});
    }
  }
  if (std::abs(total - 1.0) > kPovmSumTol) {
    fail(Errc::not_a_distribution, "cq state: block traces do not sum to one");
  }
  return CQState(std::move(outcomes), static_cast<int>(dim_b));
}

RealVector CQState::priors() const {
  RealVector p(alphabet_size());
  for (int x = 0; x < alphabet_size(); ++x) p[x] = outcomes_[static_cast<std::size_t>(x)].probability;
  return p;
}

DensityOperator CQState::average_state() const {
  Matrix avg = Matrix::Zero(dim_b_, dim_b_);
  for (const CQOutcome& o : outcomes_) avg += o.probability * o.state.matrix();
  return DensityOperator::from_matrix(avg / avg.trace().real());
}

bool CQState::classical(double tol) const {
  for (const CQOutcome& o : outcomes_) {
    const Matrix& m = o.state.matrix();
    Matrix off = m;
    off.diagonal().setZero();
    if (max_abs(off) > tol) return false;
  }
  return true;
}

Matrix fourier_matrix(int n) {
  if (n <= 0) fail(Errc::invalid_argument, "fourier_matrix: non-positive dimension");
  Matrix f(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double angle = 2.0 * kPi * static_cast<double>((j + 1) * (k + 1)) / static_cast<double>(n);
      f(j, k) = norm * Complex(std::cos(angle), std::sin(angle));
    }
  }
  return f;
}

BasisFamily::BasisFamily(int n, RealVector phases) : n_(n), phases_(std::move(phases)) {
  if (n < 2) fail(Errc::invalid_argument, "basis family: need at least two paths");
  if (phases_.size() != n) fail(Errc::dimension_mismatch, "basis family: phase count differs from dimension");
  Vector diag(n);
  for (int j = 0; j < n; ++j) diag[j] = Complex(std::cos(phases_[j]), std::sin(phases_[j]));
  basis_ = diag.asDiagonal() * fourier_matrix(n);
}

BasisFamily mub_basis(int n, const RealVector& phases) { return BasisFamily(n, phases); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix partial_trace_matrix(const Matrix& m, int dim_first, int dim_second, Subsystem keep) {
  if (dim_first <= 0 || dim_second <= 0) fail(Errc::invalid_argument, "partial_trace: non-positive dimension");
  const Eigen::Index total = static_cast<Eigen::Index>(dim_first) * dim_second;
  if (m.rows() != total || m.cols() != total) {
    fail(Errc::dimension_mismatch, "partial_trace: dimensions do not factor the matrix");
  }
  if (keep == Subsystem::first) {
    Matrix out = Matrix::Zero(dim_first, dim_first);
    for (int a = 0; a < dim_first; ++a) {
      for (int c = 0; c < dim_first; ++c) {
        Complex sum = 0.0;
        for (int b = 0; b < dim_second; ++b) {
          sum += m(static_cast<Eigen::Index>(a) * dim_second + b,
                   static_cast<Eigen::Index>(c) * dim_second + b);
        }
        out(a, c) = sum;
      }
    }
    return out;
  }
  Matrix out = Matrix::Zero(dim_second, dim_second);
  for (int b = 0; b < dim_second; ++b) {
    for (int d = 0; d < dim_second; ++d) {
      Complex sum = 0.0;
      for (int a = 0; a < dim_first; ++a) {
        sum += m(static_cast<Eigen::Index>(a) * dim_second + b,
                 static_cast<Eigen::Index>(a) * dim_second + d);
      }
      out(b, d) = sum;
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, int dim_first, int dim_second,
                              Subsystem keep) {
  return DensityOperator::from_matrix(
      partial_trace_matrix(rho.matrix(), dim_first, dim_second, keep));
}

DensityOperator apply_channel(const QuantumChannel& channel, const DensityOperator& rho) {
  if (rho.dim() != channel.dim_in) fail(Errc::dimension_mismatch, "apply_channel: dimension mismatch");
  Matrix out = Matrix::Zero(channel.dim_out, channel.dim_out);
  for (const Matrix& k : channel.kraus) out += k * rho.matrix() * k.adjoint();
  return DensityOperator::from_matrix(out);
}

RealVector born_distribution(const POVM& povm, const DensityOperator& rho) {
  if (povm.dim() != rho.dim()) fail(Errc::dimension_mismatch, "born_distribution: dimension mismatch");
  RealVector p(povm.outcomes());
  for (int k = 0; k < povm.outcomes(); ++k) {
    p[k] = std::max((povm.elements[static_cast<std::size_t>(k)] * rho.matrix()).trace().real(), 0.0);
  }
  return p;
}

CQState measure_first_subsystem(const DensityOperator& rho_ab, int dim_a, int dim_b,
                                const Matrix& basis) {
  if (rho_ab.dim() != dim_a * dim_b) {
    fail(Errc::dimension_mismatch, "measure_first_subsystem: dimensions do not factor the state");
  }
  if (basis.rows() != dim_a || basis.cols() != dim_a || !is_unitary(basis)) {
    fail(Errc::not_unitary, "measure_first_subsystem: basis not orthonormal");
  }
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(dim_a));
  const Matrix eye_b = Matrix::Identity(dim_b, dim_b);
  for (int x = 0; x < dim_a; ++x) {
    const Matrix embed = kron(basis.col(x), eye_b);  // (dim_a*dim_b) x dim_b
    blocks.push_back(hermitize(embed.adjoint() * rho_ab.matrix() * embed));
  }
  return CQState::from_blocks(blocks);
}

CQState cq_conditional_on_path(const DensityOperator& rho_se, int n, int dim_e) {
  if (rho_se.dim() != n * dim_e) {
    fail(Errc::dimension_mismatch, "cq_conditional_on_path: dimensions do not factor the state");
  }
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  for (int z = 0; z < n; ++z) {
    blocks.push_back(rho_se.matrix().block(static_cast<Eigen::Index>(z) * dim_e,
                                           static_cast<Eigen::Index>(z) * dim_e, dim_e, dim_e));
  }
  return CQState::from_blocks(blocks);
}

double overlap_c(const Matrix& basis_x, const Matrix& basis_y) {
  if (basis_x.rows() != basis_y.rows() || basis_x.cols() != basis_y.cols()) {
    fail(Errc::dimension_mismatch, "overlap_c: dimension mismatch");
  }
  if (!is_unitary(basis_x) || !is_unitary(basis_y)) {
    fail(Errc::not_unitary, "overlap_c: bases not orthonormal");
  }
  const Matrix gram = basis_x.adjoint() * basis_y;
  double best = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.cols(); ++j) {
      best = std::max(best, std::norm(gram(i, j)));
    }
  }
  return best;
}

PureState purify(const CQState& cq) {
  const int n = cq.alphabet_size();
  const int m = cq.dim_b();
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(n) * n * m * m);
  for (int x = 0; x < n; ++x) {
    const CQOutcome& o = cq.outcomes()[static_cast<std::size_t>(x)];
    if (o.probability <= 0.0) continue;
    HermitianEigenSystem es = hermitian_eig(o.state.matrix());
    for (int k = 0; k < m; ++k) {
      const double lambda = std::max(es.eigenvalues[k], 0.0);
      if (lambda == 0.0) continue;
      const double weight = std::sqrt(o.probability * lambda);
      for (int b = 0; b < m; ++b) {
        const Eigen::Index idx =
            ((static_cast<Eigen::Index>(x) * n + x) * m + b) * m + k;
        psi[idx] += weight * es.eigenvectors(b, k);
      }
    }
  }
  psi /= psi.norm();
  return PureState::from_amplitudes(std::move(psi));
}

DensityOperator random_density(int dim, int rank, RandomSource& rng) {
  return DensityOperator::from_matrix(random_density_matrix(dim, rank, rng));
}

POVM random_povm(int dim, int outcomes, RandomSource& rng) {
  if (dim <= 0 || outcomes <= 0) fail(Errc::invalid_argument, "random_povm: non-positive size");
  std::vector<Matrix> elements(static_cast<std::size_t>(outcomes), Matrix::Zero(dim, dim));
  if (outcomes <= dim) {
    const Matrix u = haar_unitary(dim, rng);
    for (int j = 0; j < dim; ++j) {
      elements[static_cast<std::size_t>(j % outcomes)] += u.col(j) * u.col(j).adjoint();
    }
  } else {
    // Naimark-style rank-1 elements from the top rows of a larger Haar unitary.
    const Matrix u = haar_unitary(outcomes, rng);
    const Matrix w = u.block(0, 0, outcomes, dim);  // isometry C^dim -> C^outcomes
    for (int y = 0; y < outcomes; ++y) {
      elements[static_cast<std::size_t>(y)] = w.row(y).adjoint() * w.row(y);
    }
  }
  const double mu = rng.uniform(0.0, 0.5);
  for (Matrix& e : elements) {
    const double weight = e.trace().real() / static_cast<double>(dim);
    e = (1.0 - mu) * e + mu * weight * Matrix::Identity(dim, dim);
  }
  return POVM::from_elements(std::move(elements));
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())) <= tol;
}

}  // namespace duality
