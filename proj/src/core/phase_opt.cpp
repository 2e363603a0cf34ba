#include "core/phase_opt.hpp"

#include <cmath>

#include "core/numerics.hpp"

namespace duality {

namespace {

Vector unit_phases(const RealVector& phi) {
  Vector v(phi.size());
  for (Eigen::Index z = 0; z < phi.size(); ++z) v[z] = Complex(std::cos(phi[z]), std::sin(phi[z]));
  return v;
}

double quadratic_value(const Matrix& m, const Vector& v) { return (v.adjoint() * m * v)(0).real(); }

RealVector phases_of(const Vector& v) {
  RealVector phi(v.size());
  for (Eigen::Index z = 0; z < v.size(); ++z) phi[z] = std::atan2(v[z].imag(), v[z].real());
  return phi;
}

PhaseOptResult ascend_from(const Matrix& m, Vector v, const PhaseSearchOptions& opts) {
  const Eigen::Index n = m.rows();
  double value = quadratic_value(m, v);
  long sweeps = 0;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    ++sweeps;
    for (Eigen::Index z = 0; z < n; ++z) {
      // Off-diagonal coupling of coordinate z; the diagonal term is constant.
      Complex b = 0.0;
      for (Eigen::Index w = 0; w < n; ++w) {
        if (w != z) b += m(z, w) * v[w];
      }
      const double mag = std::abs(b);
      if (mag > 1e-300) v[z] = b / mag;
    }
    const double updated = quadratic_value(m, v);
    if (updated - value <= opts.rel_tol * std::max(1.0, std::abs(updated))) {
      value = std::max(updated, value);
      break;
    }
    value = updated;
  }
  return PhaseOptResult{value, phases_of(v), sweeps};
}

}  // namespace

PhaseOptResult maximize_unimodular_quadratic(const Matrix& m, RandomSource& rng,
                                             const PhaseSearchOptions& opts) {
  if (m.rows() != m.cols()) fail(Errc::dimension_mismatch, "phase ascent: matrix not square");
  if (!is_hermitian(m, 1e-9)) fail(Errc::not_hermitian, "phase ascent: matrix not Hermitian");
  const Eigen::Index n = m.rows();
  const Matrix h = hermitize(m);

  PhaseOptResult best;
  best.value = -1e300;
  long total_sweeps = 0;
  for (int attempt = 0; attempt < std::max(opts.restarts, 1); ++attempt) {
    Vector v(n);
    if (attempt == 0) {
      v.setOnes();
    } else if (attempt == 1) {
      // Align against the first row; a good seed when one row dominates.
      v[0] = 1.0;
      for (Eigen::Index z = 1; z < n; ++z) {
        const Complex entry = h(0, z);
        const double mag = std::abs(entry);
        v[z] = mag > 1e-300 ? std::conj(entry) / mag : Complex(1.0, 0.0);
      }
    } else {
      RealVector phi(n);
      for (Eigen::Index z = 0; z < n; ++z) phi[z] = rng.uniform(0.0, 2.0 * kPi);
      v = unit_phases(phi);
    }
    PhaseOptResult res = ascend_from(h, v, opts);
    total_sweeps += res.sweeps;
    if (res.value > best.value) best = res;
  }
  best.sweeps = total_sweeps;
  return best;
}

PhaseOptResult minimize_unimodular_quadratic(const Matrix& m, RandomSource& rng,
                                             const PhaseSearchOptions& opts) {
  PhaseOptResult res = maximize_unimodular_quadratic(-m, rng, opts);
  res.value = -res.value;
  return res;
}

double grid_search_unimodular_quadratic(const Matrix& m, int points_per_angle, int refine_levels) {
  if (m.rows() != m.cols()) fail(Errc::dimension_mismatch, "grid search: matrix not square");
  const int n = static_cast<int>(m.rows());
  if (n > 4) fail(Errc::invalid_argument, "grid search: supported only for up to four paths");
  const Matrix h = hermitize(m);
  const int free_angles = n - 1;

  RealVector phi = RealVector::Zero(n);
  auto value_at = [&](const RealVector& p) { return quadratic_value(h, unit_phases(p)); };
  if (free_angles == 0) return value_at(phi);

  std::vector<double> center(static_cast<std::size_t>(free_angles), kPi);
  double width = 2.0 * kPi;
  double best = -1e300;
  std::vector<double> best_point = center;

  for (int level = 0; level < refine_levels; ++level) {
    const int points = level == 0 ? points_per_angle : 12;
    const double lo = -0.5 * width;
    const double spacing = width / points;
    std::vector<int> idx(static_cast<std::size_t>(free_angles), 0);
    while (true) {
      for (int k = 0; k < free_angles; ++k) {
        phi[k + 1] = center[static_cast<std::size_t>(k)] + lo +
                     spacing * (idx[static_cast<std::size_t>(k)] + 0.5);
      }
      const double v = value_at(phi);
      if (v > best) {
        best = v;
        for (int k = 0; k < free_angles; ++k) {
          best_point[static_cast<std::size_t>(k)] = phi[k + 1];
        }
      }
      int k = 0;
      while (k < free_angles && ++idx[static_cast<std::size_t>(k)] == points) {
        idx[static_cast<std::size_t>(k)] = 0;
        ++k;
      }
      if (k == free_angles) break;
    }
    center = best_point;
    width = 3.0 * spacing;
    if (width < 1e-9) break;
  }
  return best;
}

PhaseOptResult minimize_on_torus(const std::function<double(const RealVector&)>& f, int n,
                                 RandomSource& rng, const TorusMinimizeOptions& opts) {
  if (n < 1) fail(Errc::invalid_argument, "torus minimize: non-positive dimension");
  PhaseOptResult best;
  best.value = 1e300;

  for (int attempt = 0; attempt < std::max(opts.restarts, 1); ++attempt) {
    RealVector phi = RealVector::Zero(n);
    if (attempt > 0) {
      for (int z = 1; z < n; ++z) phi[z] = rng.uniform(0.0, 2.0 * kPi);
    }
    double value = f(phi);
    double step = 0.5;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
      ++best.sweeps;
      // Central differences on the gauge-fixed coordinates.
      RealVector grad = RealVector::Zero(n);
      for (int z = 1; z < n; ++z) {
        RealVector probe = phi;
        probe[z] = phi[z] + opts.fd_step;
        const double up = f(probe);
        probe[z] = phi[z] - opts.fd_step;
        const double down = f(probe);
        grad[z] = (up - down) / (2.0 * opts.fd_step);
      }
      const double gnorm = grad.norm();
      if (gnorm < 1e-12) break;
      bool improved = false;
      for (int bt = 0; bt < 40; ++bt) {
        const RealVector trial = phi - step * grad;
        const double trial_value = f(trial);
        if (trial_value < value - 1e-16) {
          const bool tiny = value - trial_value < opts.tol * std::max(1.0, std::abs(value));
          phi = trial;
          value = trial_value;
          step = std::min(step * 1.4, 4.0);
          improved = true;
          if (tiny) iter = opts.max_iters;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (value < best.value) {
      best.value = value;
      best.phases = phi;
    }
  }
  return best;
}

}  // namespace duality
