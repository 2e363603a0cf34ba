#include "core/interferometer.hpp"

#include <cmath>

namespace duality {

namespace {

void check_detector(int n, int detector) {
  if (detector < 0 || detector >= n) fail(Errc::out_of_range, "detector index out of range");
}

Matrix phase_unitary(const RealVector& phases) {
  Vector diag(phases.size());
  for (Eigen::Index z = 0; z < phases.size(); ++z) {
    diag[z] = Complex(std::cos(phases[z]), std::sin(phases[z]));
  }
  return Matrix(diag.asDiagonal());
}

// Hermitian matrix N with v(phi)^dagger N v(phi) = tr(U_phi rho U_phi^dagger Ct).
Matrix detector_quadratic(const DensityOperator& rho_s, const Matrix& fc2, int detector) {
  const Matrix ct = detection_operator(fc2, detector);
  return hermitize(ct.cwiseProduct(rho_s.matrix().transpose()));
}

}  // namespace

WhichPathCoupling WhichPathCoupling::from_flag_states(std::vector<Vector> flags) {
  if (flags.size() < 2) fail(Errc::invalid_argument, "coupling: need at least two paths");
  const Eigen::Index env_dim = flags.front().size();
  if (env_dim < 1) fail(Errc::invalid_argument, "coupling: empty flag state");
  for (const Vector& f : flags) {
    if (f.size() != env_dim) fail(Errc::dimension_mismatch, "coupling: ragged flag dimensions");
    if (std::abs(f.norm() - 1.0) > kTraceTol) {
      fail(Errc::not_normalized, "coupling: flag state not normalized");
    }
  }
  WhichPathCoupling out;
  out.n = static_cast<int>(flags.size());
  out.env_dim = static_cast<int>(env_dim);
  out.flags = std::move(flags);
  return out;
}

WhichPathCoupling WhichPathCoupling::scalar(int n, double gamma) {
  if (n < 2) fail(Errc::invalid_argument, "coupling: need at least two paths");
  if (gamma < 0.0 || gamma > 1.0) fail(Errc::out_of_range, "coupling: gamma outside [0, 1]");
  std::vector<Vector> flags;
  flags.reserve(static_cast<std::size_t>(n));
  for (int z = 0; z < n; ++z) {
    Vector f = Vector::Zero(n + 1);
    f[0] = std::sqrt(gamma);
    f[z + 1] = std::sqrt(1.0 - gamma);
    flags.push_back(std::move(f));
  }
  return from_flag_states(std::move(flags));
}

WhichPathCoupling WhichPathCoupling::trivial(int n) {
  if (n < 2) fail(Errc::invalid_argument, "coupling: need at least two paths");
  std::vector<Vector> flags(static_cast<std::size_t>(n), Vector::Ones(1));
  return from_flag_states(std::move(flags));
}

Matrix WhichPathCoupling::isometry() const {
  Matrix v = Matrix::Zero(static_cast<Eigen::Index>(n) * env_dim, n);
  for (int z = 0; z < n; ++z) {
    v.block(static_cast<Eigen::Index>(z) * env_dim, z, env_dim, 1) =
        flags[static_cast<std::size_t>(z)];
  }
  return v;
}

Interferometer Interferometer::make(int n, Matrix fc1, DensityOperator input,
                                    WhichPathCoupling coupling, Matrix fc2) {
  if (n < 2) fail(Errc::invalid_argument, "interferometer: need at least two paths");
  if (fc1.rows() != n || fc1.cols() != n || !is_unitary(fc1)) {
    fail(Errc::not_unitary, "interferometer: first coupler not unitary");
  }
  if (fc2.rows() != n || fc2.cols() != n || !is_unitary(fc2)) {
    fail(Errc::not_unitary, "interferometer: second coupler not unitary");
  }
  if (input.dim() != n) fail(Errc::dimension_mismatch, "interferometer: input dimension mismatch");
  if (coupling.n != n) fail(Errc::dimension_mismatch, "interferometer: coupling path count mismatch");
  return Interferometer(n, std::move(fc1), std::move(input), std::move(coupling), std::move(fc2));
}

DensityOperator Interferometer::propagate() const {
  const Matrix inside = fc1_ * input_.matrix() * fc1_.adjoint();
  const Matrix v = coupling_.isometry();
  return DensityOperator::from_matrix(v * inside * v.adjoint());
}

bool is_symmetric_coupler(const Matrix& u, double tol) {
  if (u.rows() != u.cols() || !is_unitary(u)) return false;
  const double target = 1.0 / std::sqrt(static_cast<double>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      if (std::abs(std::abs(u(i, j)) - target) > tol) return false;
    }
  }
  return true;
}

Matrix random_symmetric_coupler(int n, RandomSource& rng) {
  if (n < 2) fail(Errc::invalid_argument, "random_symmetric_coupler: need at least two paths");
  RealVector left(n), right(n);
  for (int i = 0; i < n; ++i) {
    left[i] = rng.uniform(0.0, 2.0 * kPi);
    right[i] = rng.uniform(0.0, 2.0 * kPi);
  }
  return phase_unitary(left) * fourier_matrix(n) * phase_unitary(right);
}

Matrix detection_operator(const Matrix& fc2, int detector) {
  check_detector(static_cast<int>(fc2.rows()), detector);
  return fc2.row(detector).adjoint() * fc2.row(detector);
}

RealVector detection_distribution(const DensityOperator& rho_s, const RealVector& phases,
                                  const Matrix& fc2) {
  const int n = rho_s.dim();
  if (fc2.rows() != n || phases.size() != n) {
    fail(Errc::dimension_mismatch, "detection_distribution: dimension mismatch");
  }
  const Matrix w = fc2 * phase_unitary(phases);
  const Matrix out = w * rho_s.matrix() * w.adjoint();
  RealVector p(n);
  for (int c = 0; c < n; ++c) p[c] = std::max(out(c, c).real(), 0.0);
  return p;
}

DetectorExtremum pmax_detector(const DensityOperator& rho_s, const Matrix& fc2, int detector,
                               RandomSource& rng, const PhaseSearchOptions& opts) {
  const PhaseOptResult res =
      maximize_unimodular_quadratic(detector_quadratic(rho_s, fc2, detector), rng, opts);
  return DetectorExtremum{res.value, res.phases, res.sweeps};
}

DetectorExtremum pmin_detector(const DensityOperator& rho_s, const Matrix& fc2, int detector,
                               RandomSource& rng, const PhaseSearchOptions& opts) {
  const PhaseOptResult res =
      minimize_unimodular_quadratic(detector_quadratic(rho_s, fc2, detector), rng, opts);
  return DetectorExtremum{res.value, res.phases, res.sweeps};
}

double pdec_detector(const DensityOperator& rho_s, const Matrix& fc2, int detector) {
  const Matrix ct = detection_operator(fc2, detector);
  double p = 0.0;
  for (int z = 0; z < rho_s.dim(); ++z) {
    p += ct(z, z).real() * rho_s.matrix()(z, z).real();
  }
  return p;
}

VisibilityResult visibility_naive(const DensityOperator& rho_s, const Matrix& fc2, int detector,
                                  RandomSource& rng) {
  const DetectorExtremum hi = pmax_detector(rho_s, fc2, detector, rng);
  const DetectorExtremum lo = pmin_detector(rho_s, fc2, detector, rng);
  VisibilityResult out;
  out.pmax = hi.value;
  out.pmin = std::max(lo.value, 0.0);
  out.phases = hi.phases;
  const double denom = out.pmax + out.pmin;
  out.value = denom > 0.0 ? (out.pmax - out.pmin) / denom : 0.0;
  return out;
}

VisibilityResult visibility_n(const DensityOperator& rho_s, const Matrix& fc2, RandomSource& rng) {
  if (!is_symmetric_coupler(fc2)) {
    fail(Errc::not_symmetric_coupler, "visibility_n: second coupler not symmetric");
  }
  const int n = rho_s.dim();
  const DetectorExtremum hi = pmax_detector(rho_s, fc2, 0, rng);
  VisibilityResult out;
  out.pmax = hi.value;
  out.phases = hi.phases;
  out.value = (n * hi.value - 1.0) / static_cast<double>(n - 1);
  return out;
}

DistinguishabilityResult path_distinguishability(const DensityOperator& rho_se, int n, int dim_e,
                                                 double tol) {
  return distinguishability(cq_conditional_on_path(rho_se, n, dim_e), tol);
}

PostselectedCQ postselected_cq(const DensityOperator& rho_se, int n, int dim_e, const Matrix& fc2,
                               const RealVector& phases, int detector) {
  if (rho_se.dim() != n * dim_e) {
    fail(Errc::dimension_mismatch, "postselected_cq: dimensions do not factor the state");
  }
  if (phases.size() != n) fail(Errc::dimension_mismatch, "postselected_cq: phase count mismatch");
  const Matrix ct = detection_operator(fc2, detector);
  const Matrix plate = kron(phase_unitary(phases), Matrix::Identity(dim_e, dim_e));
  const Matrix rho_phi = plate * rho_se.matrix() * plate.adjoint();

  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  double click = 0.0;
  for (int z = 0; z < n; ++z) {
    Matrix g = ct(z, z).real() *
               rho_phi.block(static_cast<Eigen::Index>(z) * dim_e,
                             static_cast<Eigen::Index>(z) * dim_e, dim_e, dim_e);
    click += g.trace().real();
    blocks.push_back(std::move(g));
  }
  if (click <= kZeroProbability) {
    fail(Errc::zero_probability, "postselected_cq: detector never clicks on the decohered state");
  }
  for (Matrix& g : blocks) g /= click;
  return PostselectedCQ{CQState::from_blocks(blocks), click};
}

AsymmetricQuantities asymmetric_quantities(const DensityOperator& rho_se, int n, int dim_e,
                                           const Matrix& fc2, int detector, double tol,
                                           RandomSource& rng) {
  const DensityOperator rho_s = partial_trace(rho_se, n, dim_e, Subsystem::first);
  AsymmetricQuantities out;
  out.pdec = pdec_detector(rho_s, fc2, detector);
  if (out.pdec <= kZeroProbability) {
    fail(Errc::zero_probability, "asymmetric_quantities: decohered click probability vanishes");
  }
  const DetectorExtremum hi = pmax_detector(rho_s, fc2, detector, rng);
  out.pmax = hi.value;
  out.pmax_phases = hi.phases;
  out.v1 = (out.pmax - out.pdec) / ((n - 1) * out.pdec);

  const PostselectedCQ post =
      postselected_cq(rho_se, n, dim_e, fc2, RealVector::Zero(n), detector);
  const DistinguishabilityResult d = distinguishability(post.cq, tol);
  out.d1 = d.value;
  out.d1_lower = d.lower;
  out.d1_upper = d.upper;
  return out;
}

ErasureRecord erasure_pipeline(const DensityOperator& rho_se, int n, int dim_e, const POVM& y_povm,
                               const Matrix& fc2, RandomSource& rng) {
  if (rho_se.dim() != n * dim_e) {
    fail(Errc::dimension_mismatch, "erasure_pipeline: dimensions do not factor the state");
  }
  if (y_povm.dim() != dim_e) fail(Errc::dimension_mismatch, "erasure_pipeline: POVM acts on wrong space");
  if (!is_symmetric_coupler(fc2)) {
    fail(Errc::not_symmetric_coupler, "erasure_pipeline: second coupler not symmetric");
  }

  ErasureRecord record;
  const Matrix eye_s = Matrix::Identity(n, n);
  for (int y = 0; y < y_povm.outcomes(); ++y) {
    const Matrix lifted = kron(eye_s, y_povm.elements[static_cast<std::size_t>(y)]);
    const Matrix weighted =
        partial_trace_matrix(lifted * rho_se.matrix(), n, dim_e, Subsystem::first);
    const double py = weighted.trace().real();
    if (py <= 1e-12) {
      record.skipped_probability += std::max(py, 0.0);
      continue;
    }
    const DensityOperator rho_y = normalized_conditional(weighted, py, "erasure_pipeline");

    ErasureOutcome outcome;
    outcome.probability = py;
    outcome.conditional = rho_y.matrix();
    outcome.path_distribution = RealVector(n);
    double best_path = 0.0;
    for (int z = 0; z < n; ++z) {
      outcome.path_distribution[z] = std::max(rho_y.matrix()(z, z).real(), 0.0);
      best_path = std::max(best_path, outcome.path_distribution[z]);
    }
    outcome.distinguishability = (n * best_path - 1.0) / static_cast<double>(n - 1);

    const VisibilityResult vis = visibility_n(rho_y, fc2, rng);
    outcome.visibility = vis.value;
    outcome.optimal_phases = vis.phases;

    record.avg_distinguishability += py * outcome.distinguishability;
    record.avg_visibility += py * outcome.visibility;
    record.outcomes.push_back(std::move(outcome));
  }
  return record;
}

PureState example1_state(int n) {
  if (n < 2) fail(Errc::invalid_argument, "example1_state: need at least two paths");
  Vector psi(n);
  const double small = -1.0 / std::sqrt(static_cast<double>(n) * (n - 1));
  for (int j = 0; j + 1 < n; ++j) psi[j] = small;
  psi[n - 1] = std::sqrt(static_cast<double>(n - 1) / n);
  return PureState::from_amplitudes(std::move(psi));
}

RealVector example1_phases(int n) {
  if (n < 2) fail(Errc::invalid_argument, "example1_phases: need at least two paths");
  RealVector phi(n);
  for (int j = 0; j < n; ++j) phi[j] = 2.0 * kPi * (j + 1) / n;
  return phi;
}

}  // namespace duality
