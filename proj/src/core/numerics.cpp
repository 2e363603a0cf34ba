#include "core/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace duality {

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

HermitianEigenSystem hermitian_eig(const Matrix& m) {
  if (m.rows() != m.cols()) fail(Errc::dimension_mismatch, "hermitian_eig: matrix not square");
  if (!is_hermitian(m)) fail(Errc::not_hermitian, "hermitian_eig: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
  if (solver.info() != Eigen::Success) fail(Errc::no_convergence, "hermitian_eig: solver failed");
  return HermitianEigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix matrix_sqrt_psd(const Matrix& m) {
  HermitianEigenSystem es = hermitian_eig(m);
  RealVector vals = es.eigenvalues;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -kSqrtClampTol) {
      fail(Errc::not_psd, "matrix_sqrt_psd: eigenvalue " + std::to_string(vals[i]) + " below PSD window");
    }
    vals[i] = vals[i] > 0.0 ? std::sqrt(vals[i]) : 0.0;
  }
  return es.eigenvectors * vals.asDiagonal() * es.eigenvectors.adjoint();
}

Matrix matrix_inv_sqrt_psd(const Matrix& m, double rel_cut) {
  HermitianEigenSystem es = hermitian_eig(m);
  const double top = es.eigenvalues.size() ? es.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double cut = rel_cut * std::max(top, 1e-300);
  RealVector vals = es.eigenvalues;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    vals[i] = vals[i] > cut ? 1.0 / std::sqrt(vals[i]) : 0.0;
  }
  return es.eigenvectors * vals.asDiagonal() * es.eigenvectors.adjoint();
}

Matrix positive_part(const Matrix& m) {
  HermitianEigenSystem es = hermitian_eig(m);
  RealVector vals = es.eigenvalues.cwiseMax(0.0);
  return es.eigenvectors * vals.asDiagonal() * es.eigenvectors.adjoint();
}

double trace_norm(const Matrix& m) {
  if (m.rows() != m.cols()) fail(Errc::dimension_mismatch, "trace_norm: matrix not square");
  if (is_hermitian(m)) {
    return hermitian_eig(m).eigenvalues.cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double sqrt_fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    fail(Errc::dimension_mismatch, "fidelity: dimension mismatch");
  }
  const Matrix root = matrix_sqrt_psd(rho);
  const Matrix inner = hermitize(root * sigma * root);
  HermitianEigenSystem es = hermitian_eig(inner);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
    if (es.eigenvalues[i] > 0.0) sum += std::sqrt(es.eigenvalues[i]);
  }
  return sum;
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
  const double s = sqrt_fidelity(rho, sigma);
  return s * s;
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    fail(Errc::dimension_mismatch, "trace_distance: dimension mismatch");
  }
  return 0.5 * trace_norm(hermitize(rho - sigma));
}

Matrix ginibre(int rows, int cols, RandomSource& rng) {
  if (rows <= 0 || cols <= 0) fail(Errc::invalid_argument, "ginibre: non-positive dimension");
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  return g;
}

Matrix haar_unitary(int dim, RandomSource& rng) {
  if (dim <= 0) fail(Errc::invalid_argument, "haar_unitary: non-positive dimension");
  const Matrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fixing the R-diagonal phases makes the distribution Haar rather than
  // merely unitary.
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

Matrix random_density_matrix(int dim, int rank, RandomSource& rng) {
  if (dim <= 0) fail(Errc::invalid_argument, "random_density_matrix: non-positive dimension");
  if (rank <= 0 || rank > dim) fail(Errc::invalid_argument, "random_density_matrix: rank out of range");
  const Matrix g = ginibre(dim, rank, rng);
  Matrix m = g * g.adjoint();
  const double tr = m.trace().real();
  if (tr <= 0.0) fail(Errc::invalid_argument, "random_density_matrix: degenerate draw");
  return hermitize(m / tr);
}

RealVector project_to_simplex(const RealVector& v) {
  const Eigen::Index n = v.size();
  if (n == 0) fail(Errc::invalid_argument, "project_to_simplex: empty vector");
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double theta = 0.0;
  int support = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    running += sorted[static_cast<std::size_t>(i)];
    const double candidate = (running - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) {
      theta = candidate;
      support = static_cast<int>(i + 1);
    }
  }
  if (support == 0) theta = (running - 1.0) / static_cast<double>(n);
  RealVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(v[i] - theta, 0.0);
  const double total = out.sum();
  if (total <= 0.0) {
    out.setConstant(1.0 / static_cast<double>(n));
  } else {
    out /= total;
  }
  return out;
}

}  // namespace duality
