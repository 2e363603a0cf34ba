#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>

#include "core/interferometer.hpp"
#include "support/oracles.hpp"

using namespace duality;

namespace {

template <typename F>
std::optional<Errc> thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

Interferometer scalar_ifm(int n, double gamma, const DensityOperator& input, const Matrix& fc1,
                          const Matrix& fc2) {
  return Interferometer::make(n, fc1, input, WhichPathCoupling::scalar(n, gamma), fc2);
}

Vector unit_vector(int dim, RandomSource& rng) {
  Vector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

}  // namespace

TEST_CASE("scalar coupling flag geometry") {
  for (int n = 2; n <= 4; ++n) {
    for (double gamma : {0.0, 0.3, 1.0}) {
      const WhichPathCoupling c = WhichPathCoupling::scalar(n, gamma);
      CHECK(c.n == n);
      CHECK(c.env_dim == n + 1);
      REQUIRE(static_cast<int>(c.flags.size()) == n);
      for (int z = 0; z < n; ++z) {
        CHECK(std::abs(c.flags[static_cast<std::size_t>(z)].norm() - 1.0) < 1e-12);
        for (int w = z + 1; w < n; ++w) {
          const Complex overlap =
              c.flags[static_cast<std::size_t>(z)].dot(c.flags[static_cast<std::size_t>(w)]);
          CHECK(std::abs(overlap - Complex(gamma, 0.0)) < 1e-12);
        }
      }
    }
  }
  const WhichPathCoupling t = WhichPathCoupling::trivial(3);
  CHECK(t.env_dim == 1);
  for (const Vector& f : t.flags) CHECK(std::abs(f[0] - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("coupling isometry satisfies V^dagger V = I") {
  const WhichPathCoupling c = WhichPathCoupling::scalar(3, 0.4);
  const Matrix v = c.isometry();
  REQUIRE(v.rows() == 12);
  REQUIRE(v.cols() == 3);
  CHECK(max_abs(v.adjoint() * v - Matrix::Identity(3, 3)) < 1e-12);

  RandomSource rng(11);
  std::vector<Vector> flags;
  for (int z = 0; z < 2; ++z) flags.push_back(unit_vector(3, rng));
  const Matrix w = WhichPathCoupling::from_flag_states(flags).isometry();
  CHECK(max_abs(w.adjoint() * w - Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("flag state validation") {
  Vector a = Vector::Zero(2);
  a[0] = 1.0;
  Vector ragged = Vector::Zero(3);
  ragged[0] = 1.0;
  CHECK(thrown_code([&] { WhichPathCoupling::from_flag_states({a, ragged}); }) ==
        Errc::dimension_mismatch);
  CHECK(thrown_code([&] { WhichPathCoupling::from_flag_states({a, 2.0 * a}); }) ==
        Errc::not_normalized);
  CHECK(thrown_code([&] { WhichPathCoupling::from_flag_states({a}); }) == Errc::invalid_argument);
  CHECK(thrown_code([] { WhichPathCoupling::scalar(3, 1.5); }) == Errc::out_of_range);
}

TEST_CASE("interferometer construction validation") {
  const Matrix f2 = fourier_matrix(2);
  const DensityOperator mixed2 = DensityOperator::maximally_mixed(2);
  const WhichPathCoupling c2 = WhichPathCoupling::scalar(2, 0.5);
  CHECK(thrown_code([&] { Interferometer::make(2, 2.0 * f2, mixed2, c2, f2); }) ==
        Errc::not_unitary);
  CHECK(thrown_code([&] { Interferometer::make(2, f2, mixed2, c2, 2.0 * f2); }) ==
        Errc::not_unitary);
  CHECK(thrown_code([&] {
          Interferometer::make(2, f2, DensityOperator::maximally_mixed(3), c2, f2);
        }) == Errc::dimension_mismatch);
  CHECK(thrown_code([&] {
          Interferometer::make(2, f2, mixed2, WhichPathCoupling::scalar(3, 0.5), f2);
        }) == Errc::dimension_mismatch);
}

TEST_CASE("propagate factorizes when the coupling stores nothing") {
  RandomSource rng(21);
  const int n = 3;
  const Matrix f = fourier_matrix(n);
  const DensityOperator input = random_density(n, 2, rng);
  const Interferometer ifm = scalar_ifm(n, 1.0, input, f, f.adjoint());
  const DensityOperator joint = ifm.propagate();
  REQUIRE(joint.dim() == n * (n + 1));

  const Matrix rho_s = f * input.matrix() * f.adjoint();
  Matrix env = Matrix::Zero(n + 1, n + 1);
  env(0, 0) = 1.0;
  CHECK(max_abs(joint.matrix() - kron(rho_s, env)) < 1e-12);
  CHECK(std::abs(joint.purity() - input.purity()) < 1e-10);
}

TEST_CASE("detection distribution anchors on the canonical state") {
  for (int n : {3, 5}) {
    const PureState psi = example1_state(n);
    const DensityOperator rho = psi.to_density();
    const Matrix fc2 = fourier_matrix(n).adjoint();

    const RealVector flat = detection_distribution(rho, RealVector::Zero(n), fc2);
    CHECK(std::abs(flat.sum() - 1.0) < 1e-12);
    for (int k = 0; k + 1 < n; ++k) CHECK(std::abs(flat[k] - 1.0 / (n - 1)) < 1e-12);
    CHECK(flat[n - 1] < 1e-12);

    const RealVector dark = detection_distribution(rho, example1_phases(n), fc2);
    CHECK(std::abs(dark.sum() - 1.0) < 1e-12);
    CHECK(dark[0] < 1e-12);
  }
}

TEST_CASE("detection operators resolve the identity") {
  RandomSource rng(31);
  const Matrix fc2 = haar_unitary(4, rng);
  Matrix total = Matrix::Zero(4, 4);
  for (int d = 0; d < 4; ++d) {
    const Matrix ct = detection_operator(fc2, d);
    total += ct;
    const HermitianEigenSystem eig = hermitian_eig(ct);
    CHECK(eig.eigenvalues.minCoeff() > -1e-12);
    CHECK(std::abs(eig.eigenvalues.sum() - 1.0) < 1e-12);
  }
  CHECK(max_abs(total - Matrix::Identity(4, 4)) < 1e-12);
}

TEST_CASE("decohered click probability ignores the plate") {
  RandomSource rng(41);
  const int n = 3;
  const DensityOperator rho = random_density(n, 3, rng);
  const Matrix fc2 = random_symmetric_coupler(n, rng);
  const DensityOperator dephased = apply_channel(QuantumChannel::dephasing(n), rho);
  for (int d = 0; d < n; ++d) {
    const double pdec = pdec_detector(rho, fc2, d);
    CHECK(std::abs(pdec - 1.0 / n) < 1e-12);  // symmetric coupler: always 1/n
    for (int probe = 0; probe < 4; ++probe) {
      RealVector phases(n);
      for (int z = 0; z < n; ++z) phases[z] = rng.uniform(0.0, 2.0 * kPi);
      CHECK(std::abs(detection_distribution(dephased, phases, fc2)[d] - pdec) < 1e-12);
    }
  }
}

TEST_CASE("phase extrema agree with the grid oracle") {
  RandomSource rng(51);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = trial < 2 ? 2 : 3;
    const DensityOperator rho = random_density(n, rng.uniform_int(1, n), rng);
    const Matrix fc2 = haar_unitary(n, rng);
    const int det = rng.uniform_int(0, n - 1);

    const DetectorExtremum hi = pmax_detector(rho, fc2, det, rng);
    const DetectorExtremum lo = pmin_detector(rho, fc2, det, rng);
    const double grid = duality::testing::grid_pmax_detector(rho.matrix(), fc2, det);
    CHECK(std::abs(hi.value - grid) < 1e-6);
    CHECK(std::abs(detection_distribution(rho, hi.phases, fc2)[det] - hi.value) < 1e-10);
    CHECK(lo.value <= hi.value + 1e-12);
    for (int probe = 0; probe < 5; ++probe) {
      RealVector phases(n);
      for (int z = 0; z < n; ++z) phases[z] = rng.uniform(0.0, 2.0 * kPi);
      const double p = detection_distribution(rho, phases, fc2)[det];
      CHECK(p <= hi.value + 1e-9);
      CHECK(p >= lo.value - 1e-9);
    }
  }
}

TEST_CASE("canonical state visibilities have closed forms") {
  RandomSource rng(61);
  for (int n : {3, 4}) {
    const DensityOperator rho = example1_state(n).to_density();
    const Matrix fc2 = fourier_matrix(n).adjoint();

    const VisibilityResult naive = visibility_naive(rho, fc2, 0, rng);
    CHECK(naive.pmin <= 1e-9);
    CHECK(std::abs(naive.value - 1.0) < 1e-8);

    // pmax = (sum_j |psi_j|)^2 / n for a pure state through a symmetric coupler.
    const VisibilityResult vn = visibility_n(rho, fc2, rng);
    const double expected = (3.0 * n - 4.0) / (n * (n - 1.0));
    CHECK(std::abs(vn.pmax - 4.0 * (n - 1.0) / (n * n)) < 1e-9);
    CHECK(std::abs(vn.value - expected) < 1e-9);
  }
}

TEST_CASE("generalized visibility demands a symmetric coupler") {
  RandomSource rng(71);
  Matrix u = haar_unitary(3, rng);
  const DensityOperator rho = DensityOperator::maximally_mixed(3);
  CHECK(thrown_code([&] { visibility_n(rho, u, rng); }) == Errc::not_symmetric_coupler);
  CHECK(thrown_code([&] {
          erasure_pipeline(rho, 3, 1, POVM::from_elements({Matrix::Identity(1, 1)}), u, rng);
        }) == Errc::not_symmetric_coupler);
}

TEST_CASE("path distinguishability endpoints") {
  RandomSource rng(81);
  const int n = 3;
  const Matrix f = fourier_matrix(n);
  const DensityOperator input = random_density(n, 2, rng);

  const DensityOperator orthogonal = scalar_ifm(n, 0.0, input, f, f.adjoint()).propagate();
  CHECK(std::abs(path_distinguishability(orthogonal, n, n + 1, 1e-9).value - 1.0) < 1e-9);

  // Identical flags leave only the priors; the Fourier coupler makes them
  // uniform for a basis-state input, so nothing distinguishes the paths.
  Vector zero = Vector::Zero(n);
  zero[0] = 1.0;
  const DensityOperator blind =
      scalar_ifm(n, 1.0, DensityOperator::pure(zero), f, f.adjoint()).propagate();
  CHECK(std::abs(path_distinguishability(blind, n, n + 1, 1e-7).value) < 1e-6);
}

TEST_CASE("post-selected ensemble ignores the plate and clicks at the decohered rate") {
  RandomSource rng(91);
  const int n = 3;
  const int dim_e = n + 1;
  const Matrix fc2 = random_symmetric_coupler(n, rng);
  const DensityOperator input = DensityOperator::pure(unit_vector(n, rng));
  const DensityOperator rho_se =
      scalar_ifm(n, 0.35, input, haar_unitary(n, rng), fc2).propagate();
  const DensityOperator rho_s = partial_trace(rho_se, n, dim_e, Subsystem::first);

  const PostselectedCQ base = postselected_cq(rho_se, n, dim_e, fc2, RealVector::Zero(n), 1);
  CHECK(std::abs(base.click_probability - pdec_detector(rho_s, fc2, 1)) < 1e-12);
  CHECK(std::abs(base.cq.priors().sum() - 1.0) < 1e-10);

  for (int probe = 0; probe < 4; ++probe) {
    RealVector phases(n);
    for (int z = 0; z < n; ++z) phases[z] = rng.uniform(0.0, 2.0 * kPi);
    const PostselectedCQ moved = postselected_cq(rho_se, n, dim_e, fc2, phases, 1);
    CHECK(std::abs(moved.click_probability - base.click_probability) < 1e-12);
    for (int x = 0; x < n; ++x) {
      const Matrix diff =
          moved.cq.outcomes()[static_cast<std::size_t>(x)].probability *
              moved.cq.outcomes()[static_cast<std::size_t>(x)].state.matrix() -
          base.cq.outcomes()[static_cast<std::size_t>(x)].probability *
              base.cq.outcomes()[static_cast<std::size_t>(x)].state.matrix();
      CHECK(max_abs(diff) < 1e-12);
    }
  }
}

TEST_CASE("post-selection on a dark detector is rejected") {
  Vector one = Vector::Zero(2);
  one[1] = 1.0;
  const DensityOperator rho = DensityOperator::pure(one);
  CHECK(thrown_code([&] {
          postselected_cq(rho, 2, 1, Matrix::Identity(2, 2), RealVector::Zero(2), 0);
        }) == Errc::zero_probability);
}

TEST_CASE("asymmetric quantities collapse to the symmetric ones for a symmetric coupler") {
  RandomSource rng(101);
  const int n = 3;
  const int dim_e = 2;
  std::vector<Vector> flags;
  for (int z = 0; z < n; ++z) flags.push_back(unit_vector(dim_e, rng));
  const Interferometer ifm =
      Interferometer::make(n, haar_unitary(n, rng), random_density(n, 2, rng),
                           WhichPathCoupling::from_flag_states(flags),
                           random_symmetric_coupler(n, rng));
  const DensityOperator rho_se = ifm.propagate();
  const DensityOperator rho_s = partial_trace(rho_se, n, dim_e, Subsystem::first);

  const AsymmetricQuantities aq =
      asymmetric_quantities(rho_se, n, dim_e, ifm.fc2(), 0, 1e-9, rng);
  CHECK(std::abs(aq.pdec - 1.0 / n) < 1e-12);
  CHECK(aq.pmax >= aq.pdec - 1e-12);
  CHECK(aq.d1_lower <= aq.d1 + 1e-12);
  CHECK(aq.d1 <= aq.d1_upper + 1e-12);

  const VisibilityResult vn = visibility_n(rho_s, ifm.fc2(), rng);
  CHECK(std::abs(aq.v1 - vn.value) < 1e-9);
  const DistinguishabilityResult d = path_distinguishability(rho_se, n, dim_e, 1e-9);
  CHECK(std::abs(aq.d1 - d.value) < 1e-9);
}

TEST_CASE("erasure with the trivial measurement reduces to the global quantities") {
  RandomSource rng(111);
  const int n = 2;
  const int dim_e = n + 1;
  const Matrix f = fourier_matrix(n);
  Vector zero = Vector::Zero(n);
  zero[0] = 1.0;
  const DensityOperator rho_se =
      scalar_ifm(n, 0.4, DensityOperator::pure(zero), f, f.adjoint()).propagate();
  const DensityOperator rho_s = partial_trace(rho_se, n, dim_e, Subsystem::first);

  const POVM trivial = POVM::from_elements({Matrix::Identity(dim_e, dim_e)});
  const ErasureRecord rec = erasure_pipeline(rho_se, n, dim_e, trivial, f.adjoint(), rng);
  REQUIRE(rec.outcomes.size() == 1);
  CHECK(rec.skipped_probability == 0.0);
  CHECK(std::abs(rec.outcomes[0].probability - 1.0) < 1e-12);
  CHECK(max_abs(rec.outcomes[0].conditional - rho_s.matrix()) < 1e-12);

  double best_path = 0.0;
  for (int z = 0; z < n; ++z) best_path = std::max(best_path, rho_s.matrix()(z, z).real());
  CHECK(std::abs(rec.avg_distinguishability - (n * best_path - 1.0) / (n - 1.0)) < 1e-12);
  CHECK(std::abs(rec.avg_visibility - visibility_n(rho_s, f.adjoint(), rng).value) < 1e-9);
}

TEST_CASE("erasure bookkeeping stays consistent for random measurements") {
  RandomSource rng(121);
  const int n = 2;
  const int dim_e = n + 1;
  const Matrix f = fourier_matrix(n);
  const DensityOperator rho_se =
      scalar_ifm(n, 0.5, random_density(n, 2, rng), haar_unitary(n, rng), f.adjoint()).propagate();
  const DensityOperator rho_s = partial_trace(rho_se, n, dim_e, Subsystem::first);

  const POVM y = random_povm(dim_e, 3, rng);
  const ErasureRecord rec = erasure_pipeline(rho_se, n, dim_e, y, f.adjoint(), rng);

  double total = rec.skipped_probability;
  Matrix avg_state = Matrix::Zero(n, n);
  double avg_d = 0.0;
  double avg_v = 0.0;
  for (const ErasureOutcome& outcome : rec.outcomes) {
    total += outcome.probability;
    avg_state += outcome.probability * outcome.conditional;
    avg_d += outcome.probability * outcome.distinguishability;
    avg_v += outcome.probability * outcome.visibility;
    CHECK(std::abs(outcome.path_distribution.sum() - 1.0) < 1e-9);
    CHECK(outcome.visibility >= -1e-12);
    CHECK(outcome.distinguishability >= -1e-12);
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
  CHECK(rec.skipped_probability < 1e-9);
  CHECK(max_abs(avg_state - rho_s.matrix()) < 1e-9);
  CHECK(std::abs(avg_d - rec.avg_distinguishability) < 1e-12);
  CHECK(std::abs(avg_v - rec.avg_visibility) < 1e-12);
}

TEST_CASE("canonical state and plate phases") {
  for (int n = 2; n <= 6; ++n) {
    const PureState psi = example1_state(n);
    REQUIRE(psi.dim() == n);
    Complex sum = 0.0;
    for (int j = 0; j < n; ++j) sum += psi.amplitudes()[j];
    CHECK(std::abs(sum) < 1e-13);
    CHECK(std::abs(psi.amplitudes().norm() - 1.0) < 1e-13);
    CHECK(std::abs(psi.amplitudes()[n - 1] - Complex(std::sqrt((n - 1.0) / n), 0.0)) < 1e-13);

    const RealVector phases = example1_phases(n);
    REQUIRE(phases.size() == n);
    for (int j = 0; j < n; ++j) CHECK(std::abs(phases[j] - 2.0 * kPi * (j + 1) / n) < 1e-13);
  }
}
