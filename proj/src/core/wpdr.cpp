#include "core/wpdr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace duality {

namespace {

constexpr std::array<std::pair<Relation, const char*>, 12> kRelationNames = {{
    {Relation::lemma1, "LEMMA1"},
    {Relation::lemma2, "LEMMA2"},
    {Relation::mmeur, "MMEUR"},
    {Relation::pguess_ur, "PGUESS_UR"},
    {Relation::mub_ur, "MUB_UR"},
    {Relation::generic_wpdr, "GENERIC_WPDR"},
    {Relation::theorem1, "THEOREM1"},
    {Relation::asymmetric, "ASYMMETRIC"},
    {Relation::erasure, "ERASURE"},
    {Relation::erasure_entropic, "ERASURE_ENTROPIC"},
    {Relation::durr_identity, "DURR_IDENTITY"},
    {Relation::n2_reductions, "N2_REDUCTIONS"},
}};

void finalize(RelationReport& r) { r.pass = r.slack >= -(r.tol + r.gap_allowance); }

// Trace over the middle factor of A (x) B (x) C.
Matrix partial_trace_middle(const Matrix& m, int dim_a, int dim_b, int dim_c) {
  const Eigen::Index dim = static_cast<Eigen::Index>(dim_a) * dim_c;
  Matrix out = Matrix::Zero(dim, dim);
  for (int a = 0; a < dim_a; ++a) {
    for (int c = 0; c < dim_c; ++c) {
      const Eigen::Index row = static_cast<Eigen::Index>(a) * dim_c + c;
      for (int ap = 0; ap < dim_a; ++ap) {
        for (int cp = 0; cp < dim_c; ++cp) {
          const Eigen::Index col = static_cast<Eigen::Index>(ap) * dim_c + cp;
          Complex sum = 0.0;
          for (int b = 0; b < dim_b; ++b) {
            sum += m((static_cast<Eigen::Index>(a) * dim_b + b) * dim_c + c,
                     (static_cast<Eigen::Index>(ap) * dim_b + b) * dim_c + cp);
          }
          out(row, col) = sum;
        }
      }
    }
  }
  return out;
}

struct TripartiteWings {
  CQState cq_x;
  CQState cq_y;
  double c = 0.0;
};

TripartiteWings tripartite_wings(const DensityOperator& rho, int dim_a, int dim_b1, int dim_b2,
                                 const Matrix& basis_x, const Matrix& basis_y) {
  if (dim_a < 2 || dim_b1 < 1 || dim_b2 < 1) {
    fail(Errc::invalid_argument, "tripartite check: bad dimensions");
  }
  if (rho.dim() != dim_a * dim_b1 * dim_b2) {
    fail(Errc::dimension_mismatch, "tripartite check: state does not factor into the given dims");
  }
  if (basis_x.rows() != dim_a || !is_unitary(basis_x) || basis_y.rows() != dim_a ||
      !is_unitary(basis_y)) {
    fail(Errc::not_unitary, "tripartite check: bases must be orthonormal on the first factor");
  }
  const Matrix rho_ab1 =
      partial_trace_matrix(rho.matrix(), dim_a * dim_b1, dim_b2, Subsystem::first);
  const Matrix rho_ab2 = partial_trace_middle(rho.matrix(), dim_a, dim_b1, dim_b2);
  return TripartiteWings{
      measure_first_subsystem(DensityOperator::from_matrix(rho_ab1), dim_a, dim_b1, basis_x),
      measure_first_subsystem(DensityOperator::from_matrix(rho_ab2), dim_a, dim_b2, basis_y),
      overlap_c(basis_x, basis_y)};
}

// sqrt((d-1)^2 - (d p - 1)^2) with the argument clamped to its domain.
double particle_wing(double p, int d) {
  const double span = static_cast<double>(d - 1);
  const double arg = std::clamp(d * p - 1.0, 0.0, span);
  return std::sqrt(std::max(span * span - arg * arg, 0.0));
}

double clamped_hmax_cap(double p, int d) {
  return lemma2_bound(std::clamp(p, 1.0 / d, 1.0), d);
}

double normalized_bias(double p, int n) {
  return std::max((n * p - 1.0) / static_cast<double>(n - 1), 0.0);
}

double max_block_deviation(const CQState& a, const CQState& b) {
  double dev = 0.0;
  for (int z = 0; z < a.alphabet_size(); ++z) {
    const Matrix ga = a.outcomes()[z].probability * a.outcomes()[z].state.matrix();
    const Matrix gb = b.outcomes()[z].probability * b.outcomes()[z].state.matrix();
    dev = std::max(dev, max_abs(ga - gb));
  }
  return dev;
}

}  // namespace

std::string_view relation_name(Relation relation) {
  for (const auto& [r, name] : kRelationNames) {
    if (r == relation) return name;
  }
  fail(Errc::invalid_argument, "relation_name: unknown relation");
}

std::optional<Relation> relation_from_name(std::string_view name) {
  for (const auto& [r, n] : kRelationNames) {
    if (name == n) return r;
  }
  return std::nullopt;
}

const std::vector<Relation>& all_relations() {
  static const std::vector<Relation> all = [] {
    std::vector<Relation> v;
    v.reserve(kRelationNames.size());
    for (const auto& [r, name] : kRelationNames) v.push_back(r);
    return v;
  }();
  return all;
}

RelationReport check_lemma1(const RealVector& q, double tol) {
  const int d = static_cast<int>(q.size());
  if (d < 2) fail(Errc::invalid_argument, "check_lemma1: need at least two outcomes");
  const double hn = half_norm(q);  // validates the distribution
  const double span = static_cast<double>(d - 1);

  RelationReport r;
  r.relation = Relation::lemma1;
  r.tol = tol;
  const double particle = d * q.maxCoeff() - 1.0;
  const double wave = hn - 1.0;
  r.lhs = wave * wave + particle * particle;
  r.rhs = span * span;
  r.slack = r.rhs - r.lhs;
  r.terms = {{"half_norm", hn}, {"max_prob", q.maxCoeff()}};
  if (d == 2) r.terms.emplace_back("equality_residual", r.slack);
  finalize(r);
  return r;
}

RelationReport check_lemma2(const CQState& cq, double tol, RandomSource& rng) {
  const int d = cq.alphabet_size();
  const PguessResult pg = pguess(cq, tol);
  const EntropyValue hm = hmax(cq, tol, rng);
  // The cap is decreasing in the guessing probability with unbounded slope at
  // the endpoints, so femto-scale rounding excess in the solver value would
  // be amplified past any fixed tolerance.  Evaluating at the lower end of
  // the certified bracket, widened by a rounding guard, keeps the reported
  // cap on the safe side; the widening is folded into the gap allowance.
  constexpr double kPguessGuard = 1e-9;
  const double guarded = std::min(pg.cert.lower, pg.cert.value) - kPguessGuard;
  const double cap = clamped_hmax_cap(guarded, d);

  RelationReport r;
  r.relation = Relation::lemma2;
  r.tol = tol;
  r.lhs = hm.value;
  r.rhs = cap;
  r.slack = r.rhs - r.lhs;
  r.gap_allowance = (cap - clamped_hmax_cap(pg.cert.upper, d)) + hm.gap();
  r.solver_gaps = {pg.cert.gap(), hm.gap()};
  r.terms = {{"pguess", pg.cert.value}, {"hmax", hm.value}, {"cap", cap}};
  finalize(r);
  return r;
}

RelationReport check_mmeur(const DensityOperator& rho, int dim_a, int dim_b1, int dim_b2,
                           const Matrix& basis_x, const Matrix& basis_y, double tol,
                           RandomSource& rng) {
  const TripartiteWings w = tripartite_wings(rho, dim_a, dim_b1, dim_b2, basis_x, basis_y);
  const EntropyValue particle = hmin(w.cq_x, tol);
  const EntropyValue wave = hmax(w.cq_y, tol, rng);

  RelationReport r;
  r.relation = Relation::mmeur;
  r.tol = tol;
  r.lhs = particle.value + wave.value;
  r.rhs = -std::log2(w.c);
  r.slack = r.lhs - r.rhs;
  r.gap_allowance = particle.gap() + wave.gap();
  r.solver_gaps = {particle.gap(), wave.gap()};
  r.terms = {{"hmin_x", particle.value}, {"hmax_y", wave.value}, {"overlap_c", w.c}};
  finalize(r);
  return r;
}

RelationReport check_pguess_ur(const DensityOperator& rho, int dim_a, int dim_b1, int dim_b2,
                               const Matrix& basis_x, const Matrix& basis_y, double tol,
                               RandomSource& rng) {
  (void)rng;
  const TripartiteWings w = tripartite_wings(rho, dim_a, dim_b1, dim_b2, basis_x, basis_y);
  const PguessResult pg_x = pguess(w.cq_x, tol);
  const PguessResult pg_y = pguess(w.cq_y, tol);

  RelationReport r;
  r.relation = Relation::pguess_ur;
  r.tol = tol;
  r.lhs = pg_x.cert.value / w.c - particle_wing(pg_y.cert.value, dim_a);
  r.rhs = 1.0;
  r.slack = r.rhs - r.lhs;
  // lhs is increasing in both guessing probabilities; push both to their
  // upper bracket ends for the allowance.
  r.gap_allowance = (pg_x.cert.upper - pg_x.cert.value) / w.c +
                    (particle_wing(pg_y.cert.value, dim_a) -
                     particle_wing(pg_y.cert.upper, dim_a));
  r.solver_gaps = {pg_x.cert.gap(), pg_y.cert.gap()};
  r.terms = {{"pguess_x", pg_x.cert.value}, {"pguess_y", pg_y.cert.value}, {"overlap_c", w.c}};
  finalize(r);
  return r;
}

RelationReport check_mub_ur(const DensityOperator& rho, int dim_a, int dim_b1, int dim_b2,
                            const Matrix& basis_x, const Matrix& basis_y, double tol,
                            RandomSource& rng) {
  (void)rng;
  const TripartiteWings w = tripartite_wings(rho, dim_a, dim_b1, dim_b2, basis_x, basis_y);
  if (std::abs(w.c - 1.0 / dim_a) > 1e-10) {
    fail(Errc::invalid_argument, "check_mub_ur: bases are not mutually unbiased");
  }
  const PguessResult pg_x = pguess(w.cq_x, tol);
  const PguessResult pg_y = pguess(w.cq_y, tol);
  const double dx = normalized_bias(pg_x.cert.value, dim_a);
  const double dy = normalized_bias(pg_y.cert.value, dim_a);

  RelationReport r;
  r.relation = Relation::mub_ur;
  r.tol = tol;
  r.lhs = dx * dx + dy * dy;
  r.rhs = 1.0;
  r.slack = r.rhs - r.lhs;
  const double dx_up = normalized_bias(pg_x.cert.upper, dim_a);
  const double dy_up = normalized_bias(pg_y.cert.upper, dim_a);
  r.gap_allowance = (dx_up * dx_up - dx * dx) + (dy_up * dy_up - dy * dy);
  r.solver_gaps = {pg_x.cert.gap(), pg_y.cert.gap()};
  r.terms = {{"d_x", dx}, {"d_y", dy}};
  finalize(r);
  return r;
}

RelationReport check_generic_wpdr(const DensityOperator& rho, int n, int dim_e1, int dim_e2,
                                  double tol, RandomSource& rng) {
  if (n < 2 || dim_e1 < 1 || dim_e2 < 1) {
    fail(Errc::invalid_argument, "check_generic_wpdr: bad dimensions");
  }
  if (rho.dim() != n * dim_e1 * dim_e2) {
    fail(Errc::dimension_mismatch, "check_generic_wpdr: state does not factor into the given dims");
  }
  const DensityOperator rho_se1 = DensityOperator::from_matrix(
      partial_trace_matrix(rho.matrix(), n * dim_e1, dim_e2, Subsystem::first));
  const DensityOperator rho_se2 =
      DensityOperator::from_matrix(partial_trace_middle(rho.matrix(), n, dim_e1, dim_e2));

  const EntropyValue particle = hmin(cq_conditional_on_path(rho_se1, n, dim_e1), tol);

  // Deterministic inner objective: the ascent seed is fixed once so the
  // finite-difference gradients see a smooth function of the phases.
  const std::uint64_t eval_seed = rng.next_u64();
  const auto wave_objective = [&](const RealVector& phases) {
    RandomSource local(eval_seed);
    const CQState cq =
        measure_first_subsystem(rho_se2, n, dim_e2, BasisFamily(n, phases).matrix());
    return psecr_primal_estimate(cq, local, 2, 150);
  };
  TorusMinimizeOptions topts;
  topts.restarts = 32;
  topts.max_iters = 150;
  const PhaseOptResult min_phase = minimize_on_torus(wave_objective, n, rng, topts);
  const CQState cq_wave =
      measure_first_subsystem(rho_se2, n, dim_e2, BasisFamily(n, min_phase.phases).matrix());
  const EntropyValue wave = hmax(cq_wave, tol, rng);

  RelationReport r;
  r.relation = Relation::generic_wpdr;
  r.tol = tol;
  r.lhs = particle.value + wave.value;
  r.rhs = std::log2(static_cast<double>(n));
  r.slack = r.lhs - r.rhs;
  r.gap_allowance = particle.gap() + wave.gap();
  r.solver_gaps = {particle.gap(), wave.gap()};
  r.terms = {{"hmin_particle", particle.value},
             {"hmax_wave", wave.value},
             {"wave_search_value", std::log2(std::max(min_phase.value, 1e-300))}};
  finalize(r);
  return r;
}

RelationReport check_theorem1(const Interferometer& ifm, double tol, RandomSource& rng) {
  if (!is_symmetric_coupler(ifm.fc2())) {
    fail(Errc::not_symmetric_coupler, "check_theorem1: second coupler must be symmetric");
  }
  const int n = ifm.n();
  const int de = ifm.env_dim();
  const DensityOperator rho_se = ifm.propagate();
  const DensityOperator rho_s = partial_trace(rho_se, n, de, Subsystem::first);

  const DistinguishabilityResult d = path_distinguishability(rho_se, n, de, tol);
  const VisibilityResult v = visibility_n(rho_s, ifm.fc2(), rng);

  RelationReport r;
  r.relation = Relation::theorem1;
  r.tol = tol;
  r.lhs = v.value * v.value + d.value * d.value;
  r.rhs = 1.0;
  r.slack = r.rhs - r.lhs;
  r.gap_allowance = std::max(0.0, d.upper * d.upper - d.value * d.value);
  r.solver_gaps = {d.gap()};
  r.terms = {{"distinguishability", d.value}, {"visibility", v.value}, {"pmax", v.pmax}};
  finalize(r);
  return r;
}

RelationReport check_asymmetric(const Interferometer& ifm, double tol, RandomSource& rng,
                                int phase_probes) {
  const int n = ifm.n();
  const int de = ifm.env_dim();
  const DensityOperator rho_se = ifm.propagate();
  const int detector = 0;
  const AsymmetricQuantities aq =
      asymmetric_quantities(rho_se, n, de, ifm.fc2(), detector, tol, rng);

  // The post-selected ensemble must not depend on the plate phases.
  const PostselectedCQ base =
      postselected_cq(rho_se, n, de, ifm.fc2(), RealVector::Zero(n), detector);
  double phase_dev = 0.0;
  const auto probe = [&](const RealVector& phases) {
    const PostselectedCQ p = postselected_cq(rho_se, n, de, ifm.fc2(), phases, detector);
    phase_dev = std::max(phase_dev, std::abs(p.click_probability - base.click_probability));
    phase_dev = std::max(phase_dev, max_block_deviation(p.cq, base.cq));
  };
  for (int i = 0; i < phase_probes; ++i) {
    RealVector phases(n);
    for (int z = 0; z < n; ++z) phases[z] = rng.uniform(0.0, 2.0 * kPi);
    probe(phases);
  }
  probe(aq.pmax_phases);

  RelationReport r;
  r.relation = Relation::asymmetric;
  r.tol = tol;
  r.lhs = aq.v1 * aq.v1 + aq.d1 * aq.d1;
  r.rhs = 1.0;
  r.slack = r.rhs - r.lhs;
  r.gap_allowance = std::max(0.0, aq.d1_upper * aq.d1_upper - aq.d1 * aq.d1);
  r.solver_gaps = {aq.d1_upper - aq.d1_lower};
  r.terms = {{"v1", aq.v1},
             {"d1", aq.d1},
             {"pmax", aq.pmax},
             {"pdec", aq.pdec},
             {"phase_dependence", phase_dev}};
  finalize(r);
  if (phase_dev > 1e-10) r.pass = false;
  return r;
}

ErasureReports check_erasure(const Interferometer& ifm, const POVM& y_povm, double tol,
                             RandomSource& rng) {
  if (!is_symmetric_coupler(ifm.fc2())) {
    fail(Errc::not_symmetric_coupler, "check_erasure: second coupler must be symmetric");
  }
  const int n = ifm.n();
  const int de = ifm.env_dim();
  if (y_povm.dim() != de) {
    fail(Errc::dimension_mismatch, "check_erasure: POVM does not act on the environment");
  }
  const DensityOperator rho_se = ifm.propagate();
  const ErasureRecord record = erasure_pipeline(rho_se, n, de, y_povm, ifm.fc2(), rng);

  ErasureReports out;
  RelationReport& geo = out.geometric;
  geo.relation = Relation::erasure;
  geo.tol = tol;
  geo.lhs = record.avg_visibility * record.avg_visibility +
            record.avg_distinguishability * record.avg_distinguishability;
  geo.rhs = 1.0;
  geo.slack = geo.rhs - geo.lhs;
  geo.terms = {{"avg_visibility", record.avg_visibility},
               {"avg_distinguishability", record.avg_distinguishability},
               {"outcomes", static_cast<double>(record.outcomes.size())},
               {"skipped_probability", record.skipped_probability}};
  finalize(geo);

  // Entropic form on the erased state: each branch carries its correcting
  // plate phases; the remaining freedom is one common plate on top.
  double p_guess = 0.0;
  std::vector<DensityOperator> conditionals;
  conditionals.reserve(record.outcomes.size());
  for (const ErasureOutcome& o : record.outcomes) {
    p_guess += o.probability * o.path_distribution.maxCoeff();
    conditionals.push_back(DensityOperator::from_matrix(o.conditional));
  }
  const auto wave_objective = [&](const RealVector& phases) {
    double total = 0.0;
    for (std::size_t y = 0; y < conditionals.size(); ++y) {
      const RealVector shifted = record.outcomes[y].optimal_phases + phases;
      total += record.outcomes[y].probability *
               half_norm(detection_distribution(conditionals[y], shifted, ifm.fc2()));
    }
    return total;
  };
  TorusMinimizeOptions topts;
  topts.restarts = 16;
  const PhaseOptResult min_phase = minimize_on_torus(wave_objective, n, rng, topts);
  const double hmin_val = -std::log2(std::max(p_guess, 1e-300));
  const double hmax_val = std::log2(std::max(min_phase.value, 1e-300));

  RelationReport& ent = out.entropic;
  ent.relation = Relation::erasure_entropic;
  ent.tol = tol;
  ent.lhs = hmin_val + hmax_val;
  ent.rhs = std::log2(static_cast<double>(n));
  ent.slack = ent.lhs - ent.rhs;
  ent.terms = {{"hmin", hmin_val},
               {"hmax_min", hmax_val},
               {"pguess", p_guess},
               {"skipped_probability", record.skipped_probability}};
  finalize(ent);
  return out;
}

RelationReport check_durr_identity(const DensityOperator& rho, double tol) {
  const int n = rho.dim();
  if (n < 2) fail(Errc::invalid_argument, "check_durr_identity: need dimension at least two");
  const Matrix& m = rho.matrix();
  double diag_sq = 0.0;
  double off_sq = 0.0;
  for (int z = 0; z < n; ++z) {
    diag_sq += m(z, z).real() * m(z, z).real();
    for (int zp = 0; zp < n; ++zp) {
      if (zp != z) off_sq += std::norm(m(z, zp));
    }
  }
  const double purity = rho.purity();
  const double scale = n / static_cast<double>(n - 1);

  RelationReport r;
  r.relation = Relation::durr_identity;
  r.tol = tol;
  r.lhs = diag_sq + off_sq;
  r.rhs = purity;
  r.slack = -std::abs(r.lhs - r.rhs);
  r.terms = {{"particle_sq", scale * (diag_sq - 1.0 / n)},
             {"wave_sq", scale * off_sq},
             {"purity", purity},
             {"purity_slack", 1.0 - purity}};
  finalize(r);
  return r;
}

RelationReport check_n2_reductions(const Interferometer& ifm, double tol, RandomSource& rng) {
  if (ifm.n() != 2) fail(Errc::invalid_argument, "check_n2_reductions: needs a two-path setup");
  if (!is_symmetric_coupler(ifm.fc2())) {
    fail(Errc::not_symmetric_coupler, "check_n2_reductions: second coupler must be symmetric");
  }
  const DensityOperator rho_se = ifm.propagate();
  const int de = ifm.env_dim();
  const DensityOperator rho_s = partial_trace(rho_se, 2, de, Subsystem::first);
  const CQState cq = cq_conditional_on_path(rho_se, 2, de);

  // Path side, with the bias recomputed through the trace norm as an
  // independent route to the same quantity.
  const PguessResult pg = pguess(cq, tol);
  const Matrix g0 = cq.outcomes()[0].probability * cq.outcomes()[0].state.matrix();
  const Matrix g1 = cq.outcomes()[1].probability * cq.outcomes()[1].state.matrix();
  const double d_alt = trace_norm(g0 - g1);
  const double hmin_val = -std::log2(pg.cert.value);
  const double r_hmin = std::abs(hmin_val + std::log2((1.0 + d_alt) / 2.0));
  const double t_hmin =
      1e-8 + std::abs(std::log2(std::max(pg.cert.lower, 1e-300)) -
                      std::log2(std::min(pg.cert.upper, 1.0)));

  // Wave side: the minimized two-outcome collision quantity has a closed form
  // in the visibility.
  const VisibilityResult v = visibility_n(rho_s, ifm.fc2(), rng);
  const VisibilityResult naive = visibility_naive(rho_s, ifm.fc2(), 0, rng);
  const auto wave_objective = [&](const RealVector& phases) {
    return half_norm(detection_distribution(rho_s, phases, ifm.fc2()));
  };
  TorusMinimizeOptions topts;
  topts.restarts = 16;
  const PhaseOptResult min_phase = minimize_on_torus(wave_objective, 2, rng, topts);
  const double closed = std::log2(1.0 + std::sqrt(std::max(1.0 - v.value * v.value, 0.0)));
  const double r_wave = std::abs(std::log2(min_phase.value) - closed);
  const double t_wave = 1e-6;

  const double pdec = pdec_detector(rho_s, ifm.fc2(), 0);
  const double r_pdec = std::abs(pdec - 0.5 * (naive.pmax + naive.pmin));
  const double t_pdec = 1e-9;

  const double r_vis = std::abs(v.value - naive.value);
  const double t_vis = 1e-9;

  RelationReport r;
  r.relation = Relation::n2_reductions;
  r.tol = 0.0;
  r.lhs = std::max({r_hmin / t_hmin, r_wave / t_wave, r_pdec / t_pdec, r_vis / t_vis});
  r.rhs = 1.0;
  r.slack = std::min({t_hmin - r_hmin, t_wave - r_wave, t_pdec - r_pdec, t_vis - r_vis});
  r.solver_gaps = {pg.cert.gap()};
  r.terms = {{"hmin_residual", r_hmin},
             {"wave_entropy_residual", r_wave},
             {"pdec_residual", r_pdec},
             {"visibility_residual", r_vis},
             {"distinguishability", d_alt},
             {"visibility", v.value}};
  finalize(r);
  return r;
}

}  // namespace duality
