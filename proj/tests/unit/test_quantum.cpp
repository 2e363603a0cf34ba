#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "core/quantum.hpp"

using namespace duality;

namespace {

Vector basis_ket(int dim, int k) {
  Vector v = Vector::Zero(dim);
  v[k] = 1.0;
  return v;
}

// Trace over the middle factor of A (x) B (x) C; local to the tests so the
// purification check does not lean on library internals.
Matrix trace_middle(const Matrix& m, int da, int db, int dc) {
  Matrix out = Matrix::Zero(da * dc, da * dc);
  for (int a = 0; a < da; ++a)
    for (int c = 0; c < dc; ++c)
      for (int ap = 0; ap < da; ++ap)
        for (int cp = 0; cp < dc; ++cp) {
          Complex sum = 0.0;
          for (int b = 0; b < db; ++b) {
            sum += m((a * db + b) * dc + c, (ap * db + b) * dc + cp);
          }
          out(a * dc + c, ap * dc + cp) = sum;
        }
  return out;
}

}  // namespace

TEST_CASE("density operator validation") {
  Matrix bad(2, 2);
  bad << 1, 1, 0, 0;
  CHECK_THROWS_AS(DensityOperator::from_matrix(bad), Error);

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityOperator::from_matrix(neg), Error);

  Matrix off_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator::from_matrix(off_trace), Error);

  const DensityOperator mixed = DensityOperator::maximally_mixed(4);
  CHECK(mixed.purity() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pure states normalize and have unit purity") {
  Vector v(3);
  v << 1, 1, 1;
  CHECK_THROWS_AS(PureState::from_amplitudes(v), Error);
  v /= std::sqrt(3.0);
  const PureState psi = PureState::from_amplitudes(v);
  CHECK(psi.to_density().purity() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("povm construction enforces completeness") {
  std::vector<Matrix> halves(2, 0.5 * Matrix::Identity(3, 3));
  CHECK_NOTHROW(POVM::from_elements(halves));
  halves[1] = 0.4 * Matrix::Identity(3, 3);
  CHECK_THROWS_AS(POVM::from_elements(halves), Error);

  const POVM proj = POVM::projective(fourier_matrix(3));
  Matrix sum = Matrix::Zero(3, 3);
  for (const Matrix& e : proj.elements) sum += e;
  CHECK(max_abs(sum - Matrix::Identity(3, 3)) < 1e-10);
}

TEST_CASE("random povm elements are psd and complete") {
  RandomSource rng(31);
  for (int t = 0; t < 10; ++t) {
    const POVM povm = random_povm(3, 2 + t % 3, rng);
    Matrix sum = Matrix::Zero(3, 3);
    for (const Matrix& e : povm.elements) {
      sum += e;
      CHECK(hermitian_eig(hermitize(e)).eigenvalues.minCoeff() > -1e-10);
    }
    CHECK(max_abs(sum - Matrix::Identity(3, 3)) < 1e-8);
  }
}

TEST_CASE("dephasing channel kills coherences and preserves trace") {
  RandomSource rng(32);
  const DensityOperator rho =
      DensityOperator::from_matrix(random_density_matrix(3, 3, rng));
  const DensityOperator out = apply_channel(QuantumChannel::dephasing(3), rho);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        CHECK(out.matrix()(i, i).real() ==
              doctest::Approx(rho.matrix()(i, i).real()).epsilon(1e-12));
      } else {
        CHECK(std::abs(out.matrix()(i, j)) < 1e-12);
      }
    }
  }
  std::vector<Matrix> bad{Matrix::Identity(2, 2) * 0.5};
  CHECK_THROWS_AS(QuantumChannel::from_kraus(bad), Error);
}

TEST_CASE("fourier matrix convention and unitarity") {
  for (int n = 2; n <= 6; ++n) {
    const Matrix f = fourier_matrix(n);
    CHECK(is_unitary(f));
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double angle = 2.0 * kPi * (j + 1) * (k + 1) / n;
        const Complex expect =
            Complex(std::cos(angle), std::sin(angle)) / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(f(j, k) - expect) < 1e-12);
      }
    }
  }
  const Matrix f2 = fourier_matrix(2);
  CHECK(std::abs(f2(0, 0) - Complex(-1.0 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(f2(1, 1) - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-12);
}

TEST_CASE("basis family applies the phase plate after the coupler") {
  RealVector phases(3);
  phases << 0.3, 1.1, 4.0;
  const BasisFamily fam(3, phases);
  CHECK(is_unitary(fam.matrix()));
  Matrix plate = Matrix::Zero(3, 3);
  for (int z = 0; z < 3; ++z) plate(z, z) = Complex(std::cos(phases[z]), std::sin(phases[z]));
  CHECK(max_abs(fam.matrix() - plate * fourier_matrix(3)) < 1e-12);
  CHECK(max_abs(BasisFamily(3, RealVector::Zero(3)).matrix() - fourier_matrix(3)) < 1e-12);
}

TEST_CASE("kron acts blockwise") {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  const Matrix b = Matrix::Identity(2, 2);
  const Matrix k = kron(a, b);
  CHECK(k.rows() == 4);
  CHECK(std::abs(k(0, 2) - Complex(2, 0)) < 1e-15);
  CHECK(std::abs(k(1, 3) - Complex(2, 0)) < 1e-15);
  CHECK(std::abs(k(2, 0) - Complex(3, 0)) < 1e-15);
}

TEST_CASE("partial trace recovers product factors and mixes bell halves") {
  RandomSource rng(33);
  const Matrix a = random_density_matrix(2, 2, rng);
  const Matrix b = random_density_matrix(3, 1, rng);
  const DensityOperator joint = DensityOperator::from_matrix(kron(a, b));
  CHECK(max_abs(partial_trace(joint, 2, 3, Subsystem::first).matrix() - a) < 1e-12);
  CHECK(max_abs(partial_trace(joint, 2, 3, Subsystem::second).matrix() - b) < 1e-12);

  Vector bell = Vector::Zero(4);
  bell[0] = 1.0 / std::sqrt(2.0);
  bell[3] = 1.0 / std::sqrt(2.0);
  const DensityOperator phi = PureState::from_amplitudes(bell).to_density();
  CHECK(max_abs(partial_trace(phi, 2, 2, Subsystem::first).matrix() -
                0.5 * Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("measuring the first subsystem of a product state") {
  RandomSource rng(34);
  const Matrix a = random_density_matrix(3, 3, rng);
  const Matrix b = random_density_matrix(2, 2, rng);
  const DensityOperator joint = DensityOperator::from_matrix(kron(a, b));
  const CQState cq = measure_first_subsystem(joint, 3, 2, Matrix::Identity(3, 3));
  CHECK(cq.alphabet_size() == 3);
  CHECK(cq.dim_b() == 2);
  double total = 0.0;
  for (int x = 0; x < 3; ++x) {
    total += cq.outcomes()[x].probability;
    CHECK(cq.outcomes()[x].probability == doctest::Approx(a(x, x).real()).epsilon(1e-10));
    if (cq.outcomes()[x].probability > 1e-12) {
      CHECK(max_abs(cq.outcomes()[x].state.matrix() - b) < 1e-9);
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("path conditioning equals measuring the identity basis") {
  RandomSource rng(35);
  const DensityOperator rho =
      DensityOperator::from_matrix(random_density_matrix(6, 4, rng));
  const CQState a = cq_conditional_on_path(rho, 2, 3);
  const CQState b = measure_first_subsystem(rho, 2, 3, Matrix::Identity(2, 2));
  REQUIRE(a.alphabet_size() == b.alphabet_size());
  for (int z = 0; z < a.alphabet_size(); ++z) {
    const Matrix ga = a.outcomes()[z].probability * a.outcomes()[z].state.matrix();
    const Matrix gb = b.outcomes()[z].probability * b.outcomes()[z].state.matrix();
    CHECK(max_abs(ga - gb) < 1e-12);
  }
}

TEST_CASE("overlap_c finds the largest squared column overlap") {
  for (int n = 2; n <= 5; ++n) {
    CHECK(overlap_c(Matrix::Identity(n, n), fourier_matrix(n)) ==
          doctest::Approx(1.0 / n).epsilon(1e-10));
  }
  RandomSource rng(36);
  const Matrix u = haar_unitary(3, rng);
  CHECK(overlap_c(u, u) == doctest::Approx(1.0).epsilon(1e-10));

  RealVector phases(4);
  phases << 0.2, 2.2, 5.0, 1.0;
  CHECK(overlap_c(Matrix::Identity(4, 4), mub_basis(4, phases).matrix()) ==
        doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("purification traces back to the cq state") {
  RandomSource rng(37);
  std::vector<std::pair<double, DensityOperator>> ensemble;
  ensemble.emplace_back(0.3, DensityOperator::from_matrix(random_density_matrix(2, 2, rng)));
  ensemble.emplace_back(0.7, DensityOperator::from_matrix(random_density_matrix(2, 1, rng)));
  const CQState cq = CQState::from_ensemble(ensemble);
  const PureState psi = purify(cq);
  const int d = 2;
  const int m = 2;
  REQUIRE(psi.dim() == d * d * m * m);

  // Trace out R (last factor), then X' (middle of X (x) X' (x) B).
  const Matrix full = psi.to_density().matrix();
  const Matrix xxb = partial_trace_matrix(full, d * d * m, m, Subsystem::first);
  const Matrix xb = trace_middle(xxb, d, d, m);
  for (int x = 0; x < d; ++x) {
    const Matrix block = xb.block(x * m, x * m, m, m);
    const Matrix expect = ensemble[x].first * ensemble[x].second.matrix();
    CHECK(max_abs(block - expect) < 1e-10);
  }
}

TEST_CASE("cq state bookkeeping") {
  RandomSource rng(38);
  std::vector<Matrix> blocks;
  blocks.push_back(0.25 * random_density_matrix(2, 2, rng));
  blocks.push_back(0.75 * random_density_matrix(2, 1, rng));
  const CQState cq = CQState::from_blocks(blocks);
  CHECK(cq.priors()[0] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(cq.priors()[1] == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(max_abs(cq.average_state().matrix() - (blocks[0] + blocks[1])) < 1e-10);
  CHECK(!cq.classical());

  // A vanishing block is flagged and replaced by the maximally mixed state.
  blocks[0] = Matrix::Zero(2, 2);
  blocks[1] = random_density_matrix(2, 2, rng);
  const CQState degenerate = CQState::from_blocks(blocks);
  CHECK(degenerate.outcomes()[0].zero_probability);
  CHECK(max_abs(degenerate.outcomes()[0].state.matrix() - 0.5 * Matrix::Identity(2, 2)) <
        1e-12);

  Matrix d0 = Matrix::Zero(2, 2);
  d0(0, 0) = 0.5;
  d0(1, 1) = 0.1;
  Matrix d1 = Matrix::Zero(2, 2);
  d1(0, 0) = 0.1;
  d1(1, 1) = 0.3;
  CHECK(CQState::from_blocks({d0, d1}).classical());
}

TEST_CASE("born distribution matches eigenvalues in the eigenbasis") {
  RandomSource rng(39);
  const Matrix m = random_density_matrix(3, 3, rng);
  const HermitianEigenSystem es = hermitian_eig(m);
  const POVM povm = POVM::projective(es.eigenvectors);
  const RealVector p = born_distribution(povm, DensityOperator::from_matrix(m));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-10));
  for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(es.eigenvalues[i]).epsilon(1e-9));
}

TEST_CASE("mub bases are unbiased against the computational basis") {
  RandomSource rng(40);
  for (int n = 2; n <= 4; ++n) {
    RealVector phases(n);
    for (int z = 0; z < n; ++z) phases[z] = rng.uniform(0.0, 2.0 * kPi);
    const BasisFamily fam = mub_basis(n, phases);
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        CHECK(std::norm(fam.matrix().col(y)[x]) == doctest::Approx(1.0 / n).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("random density respects rank bounds") {
  RandomSource rng(41);
  const DensityOperator rho = random_density(4, 2, rng);
  const HermitianEigenSystem es = hermitian_eig(rho.matrix());
  int support = 0;
  for (int i = 0; i < 4; ++i) {
    if (es.eigenvalues[i] > 1e-10) ++support;
  }
  CHECK(support <= 2);
}

TEST_CASE("basis ket helper sanity") {
  CHECK(basis_ket(3, 1)[1] == Complex(1, 0));
  CHECK(basis_ket(3, 1)[0] == Complex(0, 0));
}
