#include "core/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/sdp.hpp"

namespace duality {

namespace {

std::vector<Matrix> weighted_blocks(const CQState& cq) {
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(cq.alphabet_size()));
  for (const CQOutcome& o : cq.outcomes()) {
    blocks.push_back(o.probability * o.state.matrix());
  }
  return blocks;
}

double lambda_max(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Y0 shifted until Y >= G_x for every x; the trace is then a valid upper
// bound on the guessing probability.
double witness_upper(const std::vector<Matrix>& blocks, Matrix& y) {
  double shift = 0.0;
  for (const Matrix& g : blocks) shift = std::max(shift, lambda_max(g - y));
  if (shift > 0.0) y += shift * Matrix::Identity(y.rows(), y.cols());
  return y.trace().real();
}

// Guessing probabilities live in [0, 1]; trailing arithmetic can leave a
// certificate endpoint a few ulps outside, which downstream bound functions
// with unbounded slope would amplify.  Clamp and order the bracket.
void clamp_probability_cert(CertifiedValue& cert) {
  cert.value = std::min(std::max(cert.value, 0.0), 1.0);
  cert.lower = std::min(std::max(cert.lower, 0.0), 1.0);
  cert.upper = std::min(std::max(cert.upper, cert.lower), 1.0);
}

PguessResult pguess_exact(double value, std::vector<Matrix> povm, Matrix witness) {
  PguessResult out;
  out.cert.value = value;
  out.cert.lower = value;
  out.cert.upper = std::max(value, witness.trace().real());
  out.cert.converged = true;
  out.povm = std::move(povm);
  out.dual_witness = std::move(witness);
  clamp_probability_cert(out.cert);
  return out;
}

PguessResult pguess_helstrom(const std::vector<Matrix>& blocks) {
  const Matrix delta = hermitize(blocks[0] - blocks[1]);
  HermitianEigenSystem es = hermitian_eig(delta);
  const Eigen::Index m = delta.rows();
  Matrix plus_proj = Matrix::Zero(m, m);
  Matrix delta_plus = Matrix::Zero(m, m);
  double trace_norm_delta = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lam = es.eigenvalues[i];
    trace_norm_delta += std::abs(lam);
    if (lam > 0.0) {
      plus_proj += es.eigenvectors.col(i) * es.eigenvectors.col(i).adjoint();
      delta_plus += lam * es.eigenvectors.col(i) * es.eigenvectors.col(i).adjoint();
    }
  }
  const double total = (blocks[0] + blocks[1]).trace().real();
  const double value = 0.5 * (total + trace_norm_delta);
  const Matrix witness = hermitize(blocks[1] + delta_plus);
  std::vector<Matrix> povm{plus_proj, Matrix::Identity(m, m) - plus_proj};
  return pguess_exact(value, std::move(povm), witness);
}

PguessResult pguess_classical(const std::vector<Matrix>& blocks) {
  const Eigen::Index m = blocks.front().rows();
  const auto x_count = blocks.size();
  Matrix witness = Matrix::Zero(m, m);
  std::vector<Matrix> povm(x_count, Matrix::Zero(m, m));
  double value = 0.0;
  for (Eigen::Index y = 0; y < m; ++y) {
    std::size_t best_x = 0;
    double best = blocks[0](y, y).real();
    for (std::size_t x = 1; x < x_count; ++x) {
      const double candidate = blocks[x](y, y).real();
      if (candidate > best) {
        best = candidate;
        best_x = x;
      }
    }
    value += std::max(best, 0.0);
    witness(y, y) = std::max(best, 0.0);
    povm[best_x](y, y) = 1.0;
  }
  return pguess_exact(value, std::move(povm), witness);
}

struct AscentObjective {
  std::vector<Matrix> roots;  // sqrt(G_x)

  double sqrt_f_sum(const Matrix& sigma) const {
    double total = 0.0;
    for (const Matrix& q : roots) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(q * sigma * q), Eigen::EigenvaluesOnly);
      // Rank-deficient products report their zero eigenvalues as arithmetic
      // noise near 1e-16, and the square root lifts each to 1e-8; skipping
      // everything under the floor only underestimates, which keeps this
      // value usable as an achievable estimate.
      const double top = es.eigenvalues().size() > 0 ? es.eigenvalues().maxCoeff() : 0.0;
      const double floor = 1e-14 * std::max(1.0, top);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i] > floor) total += std::sqrt(es.eigenvalues()[i]);
      }
    }
    return total;
  }

  Matrix gradient(const Matrix& sigma) const {
    const Eigen::Index m = sigma.rows();
    Matrix grad = Matrix::Zero(m, m);
    for (const Matrix& q : roots) {
      grad += 0.5 * q * matrix_inv_sqrt_psd(hermitize(q * sigma * q)) * q;
    }
    return hermitize(grad);
  }
};

Matrix project_to_density(const Matrix& m) {
  HermitianEigenSystem es = hermitian_eig(hermitize(m));
  const RealVector probs = project_to_simplex(es.eigenvalues);
  return hermitize(es.eigenvectors * probs.asDiagonal() * es.eigenvectors.adjoint());
}

struct AscentOutcome {
  double best_root_sum = 0.0;
  Matrix sigma;
  long iterations = 0;
};

AscentOutcome ascend_root_fidelity(const AscentObjective& objective,
                                   const std::vector<Matrix>& seeds, Eigen::Index m,
                                   RandomSource& rng, int restarts, int max_iters,
                                   double stop_at_value) {
  AscentOutcome out;
  out.sigma = Matrix::Identity(m, m) / static_cast<double>(m);
  for (int attempt = 0; attempt < restarts; ++attempt) {
    Matrix sigma;
    if (attempt < static_cast<int>(seeds.size())) {
      sigma = seeds[static_cast<std::size_t>(attempt)];
    } else if (attempt == static_cast<int>(seeds.size())) {
      sigma = Matrix::Identity(m, m) / static_cast<double>(m);
    } else {
      sigma = random_density_matrix(static_cast<int>(m), static_cast<int>(m), rng);
    }
    double current = objective.sqrt_f_sum(sigma);
    double step = 0.5;
    for (int iter = 0; iter < max_iters; ++iter) {
      ++out.iterations;
      const Matrix grad = objective.gradient(sigma);
      bool improved = false;
      // Multiplicative step first: its fixed point is the stationarity
      // condition (gradient proportional to identity on the support), and it
      // contracts boundary directions geometrically where additive projected
      // steps crawl sublinearly.
      const Matrix pushed = hermitize(grad * sigma * grad);
      const double pushed_trace = pushed.trace().real();
      if (pushed_trace > 0.0) {
        const Matrix trial = pushed / pushed_trace;
        const double trial_value = objective.sqrt_f_sum(trial);
        if (trial_value > current + 1e-15) {
          const bool small_gain = trial_value - current < 1e-13 * std::max(1.0, current);
          sigma = trial;
          current = trial_value;
          improved = true;
          if (small_gain) iter = max_iters;
        }
      }
      if (!improved) {
        for (int bt = 0; bt < 30; ++bt) {
          const Matrix trial = project_to_density(sigma + step * grad);
          const double trial_value = objective.sqrt_f_sum(trial);
          if (trial_value > current + 1e-15) {
            sigma = trial;
            const bool small_gain = trial_value - current < 1e-13 * std::max(1.0, current);
            current = trial_value;
            step = std::min(step * 1.4, 8.0);
            improved = true;
            if (small_gain) iter = max_iters;
            break;
          }
          step *= 0.4;
        }
      }
      if (!improved) break;
    }
    if (current > out.best_root_sum) {
      out.best_root_sum = current;
      out.sigma = sigma;
    }
    if (out.best_root_sum * out.best_root_sum >= stop_at_value) break;
  }
  return out;
}

// Density operator on X (x) X' (x) R obtained by purifying the CQ state on
// X (x) X' (x) B (x) R and tracing out B.
Matrix purification_complement(const CQState& cq) {
  const int n = cq.alphabet_size();
  const int m = cq.dim_b();
  const Vector psi = purify(cq).amplitudes();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * n * m;
  Matrix rho = Matrix::Zero(dim, dim);
  for (int x = 0; x < n; ++x) {
    for (int xp = 0; xp < n; ++xp) {
      for (int r = 0; r < m; ++r) {
        const Eigen::Index row = (static_cast<Eigen::Index>(x) * n + xp) * m + r;
        for (int u = 0; u < n; ++u) {
          for (int up = 0; up < n; ++up) {
            for (int s = 0; s < m; ++s) {
              const Eigen::Index col = (static_cast<Eigen::Index>(u) * n + up) * m + s;
              Complex sum = 0.0;
              for (int b = 0; b < m; ++b) {
                const Eigen::Index i =
                    ((static_cast<Eigen::Index>(x) * n + xp) * m + b) * m + r;
                const Eigen::Index j =
                    ((static_cast<Eigen::Index>(u) * n + up) * m + b) * m + s;
                sum += psi[i] * std::conj(psi[j]);
              }
              rho(row, col) = sum;
            }
          }
        }
      }
    }
  }
  return hermitize(rho);
}

}  // namespace

double half_norm(const RealVector& q) {
  if (q.size() == 0) fail(Errc::invalid_argument, "half_norm: empty vector");
  double total = 0.0;
  double root_sum = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] < -1e-12) fail(Errc::not_a_distribution, "half_norm: negative entry");
    const double v = std::max(q[i], 0.0);
    total += v;
    root_sum += std::sqrt(v);
  }
  if (std::abs(total - 1.0) > 1e-9) fail(Errc::not_a_distribution, "half_norm: entries do not sum to one");
  return root_sum * root_sum;
}

PguessResult pguess(const CQState& cq, double tol) {
  if (tol <= 0.0) fail(Errc::invalid_argument, "pguess: non-positive tolerance");
  std::vector<Matrix> blocks = weighted_blocks(cq);
  for (Matrix& g : blocks) g = hermitize(g);
  const std::size_t x_count = blocks.size();
  const Eigen::Index m = blocks.front().rows();

  if (x_count == 1) {
    return pguess_exact(1.0, {Matrix::Identity(m, m)}, blocks[0]);
  }
  if (m == 1) {
    std::size_t best_x = 0;
    for (std::size_t x = 1; x < x_count; ++x) {
      if (blocks[x](0, 0).real() > blocks[best_x](0, 0).real()) best_x = x;
    }
    std::vector<Matrix> povm(x_count, Matrix::Zero(1, 1));
    povm[best_x](0, 0) = 1.0;
    Matrix witness(1, 1);
    witness(0, 0) = blocks[best_x](0, 0).real();
    return pguess_exact(witness(0, 0).real(), std::move(povm), witness);
  }
  if (cq.classical()) return pguess_classical(blocks);
  if (x_count == 2) return pguess_helstrom(blocks);

  // Fixed-point iteration over measurements, seeded with the pretty-good
  // measurement; any support deficit is completed with a uniform split of
  // the leftover projector.
  const Matrix eye = Matrix::Identity(m, m);
  auto complete = [&](std::vector<Matrix>& povm) {
    Matrix sum = Matrix::Zero(m, m);
    for (const Matrix& e : povm) sum += e;
    const Matrix rest = hermitize(eye - sum);
    for (Matrix& e : povm) e = hermitize(e + rest / static_cast<double>(x_count));
  };

  Matrix s = Matrix::Zero(m, m);
  for (const Matrix& g : blocks) s += g;
  const Matrix s_inv_root = matrix_inv_sqrt_psd(s);
  std::vector<Matrix> povm(x_count);
  for (std::size_t x = 0; x < x_count; ++x) povm[x] = hermitize(s_inv_root * blocks[x] * s_inv_root);
  complete(povm);

  // Exit repair: the completion step keeps the element sum at the identity
  // but can leave individual elements slightly indefinite, and the evaluated
  // primal then drifts above the true optimum by the indefinite mass.  Push
  // every element back to the PSD cone, renormalize symmetrically so the sum
  // becomes the support projector, split any deficit uniformly, and return
  // the value achieved by the repaired measurement.
  auto repaired_primal = [&](std::vector<Matrix>& candidate) {
    Matrix sum = Matrix::Zero(m, m);
    for (Matrix& e : candidate) {
      e = positive_part(e);
      sum += e;
    }
    const Matrix renorm = matrix_inv_sqrt_psd(hermitize(sum));
    sum = Matrix::Zero(m, m);
    for (Matrix& e : candidate) {
      e = hermitize(renorm * e * renorm);
      sum += e;
    }
    const Matrix leftover = positive_part(eye - sum);
    double value = 0.0;
    for (std::size_t x = 0; x < x_count; ++x) {
      candidate[x] = hermitize(candidate[x] + leftover / static_cast<double>(x_count));
      value += (blocks[x] * candidate[x]).trace().real();
    }
    return value;
  };

  PguessResult out;
  out.cert.lower = 0.0;
  out.cert.upper = 1.0;
  const long max_sweeps = 10000;
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    double primal = 0.0;
    Matrix y0 = Matrix::Zero(m, m);
    for (std::size_t x = 0; x < x_count; ++x) {
      primal += (blocks[x] * povm[x]).trace().real();
      y0 += blocks[x] * povm[x];
    }
    Matrix witness = hermitize(y0);
    const double upper = witness_upper(blocks, witness);
    out.cert.iterations = sweep + 1;
    if (primal > out.cert.lower) {
      out.cert.lower = primal;
      out.cert.value = primal;
      out.povm = povm;
    }
    if (upper < out.cert.upper) {
      out.cert.upper = upper;
      out.dual_witness = witness;
    }
    if (out.cert.upper - out.cert.lower <= tol) {
      // Candidate convergence under the raw primal; accept only if the gap
      // still closes after repair, otherwise keep sweeping with the honest
      // lower bound in place.
      const double honest = repaired_primal(out.povm);
      out.cert.value = honest;
      out.cert.lower = honest;
      if (out.cert.upper - out.cert.lower <= tol) {
        out.cert.converged = true;
        clamp_probability_cert(out.cert);
        return out;
      }
    }

    Matrix t = Matrix::Zero(m, m);
    for (std::size_t x = 0; x < x_count; ++x) t += blocks[x] * povm[x] * blocks[x];
    const Matrix t_inv_root = matrix_inv_sqrt_psd(hermitize(t));
    for (std::size_t x = 0; x < x_count; ++x) {
      povm[x] = hermitize(t_inv_root * blocks[x] * povm[x] * blocks[x] * t_inv_root);
    }
    complete(povm);
  }

  // Certified interior-point fallback on the block-diagonal embedding.
  const double honest = repaired_primal(out.povm);
  out.cert.value = honest;
  out.cert.lower = honest;
  Matrix embedded = Matrix::Zero(static_cast<Eigen::Index>(x_count) * m,
                                 static_cast<Eigen::Index>(x_count) * m);
  for (std::size_t x = 0; x < x_count; ++x) {
    embedded.block(static_cast<Eigen::Index>(x) * m, static_cast<Eigen::Index>(x) * m, m, m) =
        blocks[x];
  }
  const SdpResult sdp = sdp_min_trace_dominating(embedded, static_cast<int>(x_count), tol);
  out.cert.upper = std::min(out.cert.upper, sdp.upper);
  out.cert.lower = std::max(out.cert.lower, sdp.lower);
  if (out.cert.upper < out.cert.lower) out.cert.upper = out.cert.lower;
  clamp_probability_cert(out.cert);
  if (out.cert.upper - out.cert.lower <= tol) {
    out.cert.converged = true;
    return out;
  }
  fail(Errc::no_convergence, "pguess: gap above tolerance after fixed-point and interior-point passes");
}

PsecrResult psecr(const CQState& cq, double tol, RandomSource& rng) {
  if (tol <= 0.0) fail(Errc::invalid_argument, "psecr: non-positive tolerance");
  const std::vector<Matrix> blocks = weighted_blocks(cq);
  const Eigen::Index m = blocks.front().rows();

  PsecrResult out;
  if (m == 1) {
    out.cert.value = half_norm(cq.priors());
    out.cert.lower = out.cert.value;
    out.cert.upper = out.cert.value;
    out.cert.converged = true;
    out.sigma = Matrix::Identity(1, 1);
    return out;
  }
  if (cq.classical()) {
    // The optimal sigma is diagonal, weighting column y by the squared root
    // sum; the optimum value is the weighted sum of conditional half-norms.
    double value = 0.0;
    RealVector weights = RealVector::Zero(m);
    for (Eigen::Index y = 0; y < m; ++y) {
      double root_sum = 0.0;
      for (const Matrix& g : blocks) root_sum += std::sqrt(std::max(g(y, y).real(), 0.0));
      weights[y] = root_sum * root_sum;
      value += weights[y];
    }
    out.cert.value = value;
    out.cert.lower = value;
    out.cert.upper = value;
    out.cert.converged = true;
    out.sigma = value > 0.0
                    ? Matrix(Vector(weights.cast<Complex>() / value).asDiagonal())
                    : Matrix(Matrix::Identity(m, m) / static_cast<double>(m));
    return out;
  }

  const SdpResult sdp =
      sdp_min_trace_dominating(purification_complement(cq), cq.alphabet_size(), tol * 0.5);

  AscentObjective objective;
  objective.roots.reserve(blocks.size());
  for (const Matrix& g : blocks) objective.roots.push_back(matrix_sqrt_psd(g));

  std::vector<Matrix> seeds;
  seeds.push_back(cq.average_state().matrix());
  // Seed that is exact for commuting blocks: sigma proportional to the
  // square of the summed block roots.
  Matrix root_sum = Matrix::Zero(m, m);
  for (const Matrix& q : objective.roots) root_sum += q;
  const Matrix squared = hermitize(root_sum * root_sum);
  if (squared.trace().real() > 0.0) seeds.push_back(squared / squared.trace().real());
  const AscentOutcome ascent =
      ascend_root_fidelity(objective, seeds, m, rng, 32, 600, sdp.upper - 0.5 * tol);

  out.cert.value = ascent.best_root_sum * ascent.best_root_sum;
  out.cert.lower = std::max(out.cert.value, sdp.lower);
  out.cert.upper = std::max(sdp.upper, out.cert.lower);
  out.cert.iterations = ascent.iterations;
  out.cert.converged = out.cert.upper - out.cert.lower <= tol;
  out.sigma = ascent.sigma;
  if (!out.cert.converged) {
    fail(Errc::no_convergence, "psecr: gap above tolerance after ascent and interior-point passes");
  }
  return out;
}

double psecr_primal_estimate(const CQState& cq, RandomSource& rng, int restarts, int max_iters) {
  const std::vector<Matrix> blocks = weighted_blocks(cq);
  const Eigen::Index m = blocks.front().rows();
  if (m == 1) return half_norm(cq.priors());
  if (cq.classical()) {
    double value = 0.0;
    for (Eigen::Index y = 0; y < m; ++y) {
      double root_sum = 0.0;
      for (const Matrix& g : blocks) root_sum += std::sqrt(std::max(g(y, y).real(), 0.0));
      value += root_sum * root_sum;
    }
    return value;
  }
  AscentObjective objective;
  objective.roots.reserve(blocks.size());
  for (const Matrix& g : blocks) objective.roots.push_back(matrix_sqrt_psd(hermitize(g)));
  const AscentOutcome ascent =
      ascend_root_fidelity(objective, {cq.average_state().matrix()}, m, rng, restarts, max_iters,
                           std::numeric_limits<double>::infinity());
  return ascent.best_root_sum * ascent.best_root_sum;
}

EntropyValue hmin(const CQState& cq, double tol) {
  const PguessResult pg = pguess(cq, tol);
  EntropyValue out;
  out.value = -std::log2(pg.cert.value);
  out.lower = -std::log2(std::min(pg.cert.upper, 1.0));
  out.upper = -std::log2(std::max(pg.cert.lower, 1e-300));
  return out;
}

EntropyValue hmax(const CQState& cq, double tol, RandomSource& rng) {
  const PsecrResult ps = psecr(cq, tol, rng);
  EntropyValue out;
  out.value = std::log2(ps.cert.value);
  out.lower = std::log2(std::max(ps.cert.lower, 1e-300));
  out.upper = std::log2(std::max(ps.cert.upper, 1e-300));
  return out;
}

DistinguishabilityResult distinguishability(const CQState& cq, double tol) {
  const int n = cq.alphabet_size();
  if (n < 2) fail(Errc::invalid_argument, "distinguishability: need at least two symbols");
  const PguessResult pg = pguess(cq, tol);
  const double denom = static_cast<double>(n - 1);
  DistinguishabilityResult out;
  out.value = (n * pg.cert.value - 1.0) / denom;
  out.lower = (n * pg.cert.lower - 1.0) / denom;
  out.upper = (n * pg.cert.upper - 1.0) / denom;
  return out;
}

double lemma2_bound(double pguess_value, int d) {
  if (d < 1) fail(Errc::invalid_argument, "lemma2_bound: non-positive alphabet");
  const double arg = d * pguess_value - 1.0;
  const double span = static_cast<double>(d - 1);
  if (arg < -1e-9 || arg > span + 1e-9) {
    fail(Errc::out_of_range, "lemma2_bound: guessing probability outside [1/d, 1]");
  }
  const double clamped = std::clamp(arg, 0.0, span);
  return std::log2(1.0 + std::sqrt(std::max(span * span - clamped * clamped, 0.0)));
}

}  // namespace duality
