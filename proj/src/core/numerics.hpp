#pragma once

#include "core/rng.hpp"
#include "core/types.hpp"

namespace duality {

struct HermitianEigenSystem {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, unitary
};

bool is_hermitian(const Matrix& m, double tol = kHermTol);

// (m + m^dagger) / 2; cheap symmetrization before spectral calls.
Matrix hermitize(const Matrix& m);

double max_abs(const Matrix& m);

// Rejects non-square or non-Hermitian (within kHermTol) input.
HermitianEigenSystem hermitian_eig(const Matrix& m);

// Principal square root of a PSD matrix.  Eigenvalues in [-kSqrtClampTol, 0)
// are clamped to zero; anything lower is rejected as not PSD.
Matrix matrix_sqrt_psd(const Matrix& m);

// Moore-Penrose inverse square root of a PSD matrix; eigenvalues below
// rel_cut * max eigenvalue are treated as exact zeros.
Matrix matrix_inv_sqrt_psd(const Matrix& m, double rel_cut = 1e-13);

// Positive part sum of max(eigenvalue, 0) * projector.
Matrix positive_part(const Matrix& m);

double trace_norm(const Matrix& m);

// Uhlmann fidelity F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const Matrix& rho, const Matrix& sigma);
double sqrt_fidelity(const Matrix& rho, const Matrix& sigma);

double trace_distance(const Matrix& rho, const Matrix& sigma);

// Haar-distributed unitary: QR of a complex Ginibre matrix with the R-diagonal
// phase correction.
Matrix haar_unitary(int dim, RandomSource& rng);

Matrix ginibre(int rows, int cols, RandomSource& rng);

// G G^dagger / tr(G G^dagger) with G a dim x rank Ginibre draw.
Matrix random_density_matrix(int dim, int rank, RandomSource& rng);

// Euclidean projection of a real vector onto the probability simplex.
RealVector project_to_simplex(const RealVector& v);

}  // namespace duality
