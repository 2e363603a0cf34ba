#include "core/sdp.hpp"

#include <cmath>

#include "core/numerics.hpp"
#include "core/quantum.hpp"

namespace duality {

namespace {

Matrix expand(const Matrix& sigma, int blocks) {
  const Eigen::Index m = sigma.rows();
  Matrix s = Matrix::Zero(m * blocks, m * blocks);
  for (int a = 0; a < blocks; ++a) s.block(a * m, a * m, m, m) = sigma;
  return s;
}

// Trace over the block index: out = sum_a w[a*m.., a*m..].
Matrix block_trace(const Matrix& w, int blocks, Eigen::Index m) {
  Matrix out = Matrix::Zero(m, m);
  for (int a = 0; a < blocks; ++a) out += w.block(a * m, a * m, m, m);
  return out;
}

bool strictly_feasible(const Matrix& s, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(s), Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > floor;
}

// Dual candidate from the scaled slack inverse, repaired to satisfy the
// partial-trace constraint exactly.
double dual_value(const Matrix& w_over_t, const Matrix& target, int blocks, Eigen::Index m) {
  const Matrix a = hermitize(block_trace(w_over_t, blocks, m));
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) return -1e300;
  RealVector inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix a_inv_root = es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().adjoint();
  const Matrix scale = expand(a_inv_root, blocks);
  const Matrix y = scale * w_over_t * scale;
  return (y * target).trace().real();
}

}  // namespace

SdpResult sdp_min_trace_dominating(const Matrix& target, int blocks, double gap_tol) {
  if (blocks <= 0) fail(Errc::invalid_argument, "sdp: non-positive block count");
  if (target.rows() != target.cols() || target.rows() % blocks != 0) {
    fail(Errc::dimension_mismatch, "sdp: target does not factor into blocks");
  }
  if (!is_hermitian(target, 1e-9)) fail(Errc::not_hermitian, "sdp: target not Hermitian");
  if (gap_tol <= 0.0) fail(Errc::invalid_argument, "sdp: non-positive gap tolerance");

  const Eigen::Index m = target.rows() / blocks;
  const Matrix r = hermitize(target);
  const double nu = static_cast<double>(r.rows());  // barrier parameter of the PSD cone

  Eigen::SelfAdjointEigenSolver<Matrix> res(r, Eigen::EigenvaluesOnly);
  const double top = std::max(res.eigenvalues().maxCoeff(), 0.0);

  Matrix sigma = (top + 1.0) * Matrix::Identity(m, m);

  SdpResult out;
  out.sigma = sigma;
  out.upper = sigma.trace().real();
  out.lower = -1e300;

  double t = std::max(1.0, nu / std::max(out.upper, 1.0));
  const double t_max = 1e15;
  const double mu = 10.0;
  int total_steps = 0;

  auto barrier_value = [&](const Matrix& sig, double& logdet, bool& ok) -> double {
    const Matrix s = expand(sig, blocks) - r;
    Eigen::LLT<Matrix> llt(hermitize(s));
    if (llt.info() != Eigen::Success) {
      ok = false;
      return 0.0;
    }
    logdet = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
    ok = true;
    return t * sig.trace().real() - logdet;
  };

  while (total_steps < 800) {
    // Newton centering for f(sigma) = t tr(sigma) - log det(I (x) sigma - target).
    for (int inner = 0; inner < 60; ++inner) {
      const Matrix s = hermitize(expand(sigma, blocks) - r);
      Eigen::LLT<Matrix> llt(s);
      if (llt.info() != Eigen::Success) break;
      const Matrix w = llt.solve(Matrix::Identity(s.rows(), s.cols()));

      const Matrix grad = t * Matrix::Identity(m, m) - block_trace(w, blocks, m);

      // Hessian as a matrix on vec(E): sum_{a,c} W_ca^T (x) W_ac.
      Matrix hess = Matrix::Zero(m * m, m * m);
      for (int a = 0; a < blocks; ++a) {
        for (int c = 0; c < blocks; ++c) {
          hess += kron(w.block(c * m, a * m, m, m).transpose(), w.block(a * m, c * m, m, m));
        }
      }
      Vector rhs(m * m);
      for (Eigen::Index j = 0; j < m; ++j) rhs.segment(j * m, m) = -grad.col(j);
      Eigen::LDLT<Matrix> hsolve(hermitize(hess));
      if (hsolve.info() != Eigen::Success) break;
      const Vector step_vec = hsolve.solve(rhs);
      Matrix step(m, m);
      for (Eigen::Index j = 0; j < m; ++j) step.col(j) = step_vec.segment(j * m, m);
      step = hermitize(step);

      const double decrement = -(grad * step).trace().real();
      ++total_steps;
      if (!(decrement > 0.0)) break;

      double alpha = 1.0;
      double logdet = 0.0;
      bool ok = false;
      const double f0 = barrier_value(sigma, logdet, ok);
      if (!ok) break;
      Matrix trial;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        trial = sigma + alpha * step;
        bool trial_ok = false;
        double trial_logdet = 0.0;
        const double f1 = barrier_value(trial, trial_logdet, trial_ok);
        if (trial_ok && f1 <= f0 - 0.25 * alpha * decrement) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      sigma = trial;

      const double upper_candidate = sigma.trace().real();
      if (upper_candidate < out.upper && strictly_feasible(expand(sigma, blocks) - r, 0.0)) {
        out.upper = upper_candidate;
        out.sigma = sigma;
      }
      if (decrement < 1e-11) break;
    }

    {
      const Matrix s = hermitize(expand(sigma, blocks) - r);
      Eigen::LLT<Matrix> llt(s);
      if (llt.info() == Eigen::Success) {
        const Matrix w = llt.solve(Matrix::Identity(s.rows(), s.cols()));
        out.lower = std::max(out.lower, dual_value(hermitize(w) / t, r, blocks, m));
      }
    }

    if (out.upper - out.lower <= gap_tol) {
      out.converged = true;
      break;
    }
    if (t >= t_max) break;
    t = std::min(t * mu, t_max);
  }

  out.newton_steps = total_steps;
  if (out.upper < out.lower) out.upper = out.lower;
  return out;
}

}  // namespace duality
