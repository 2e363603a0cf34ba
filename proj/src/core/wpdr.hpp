#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/interferometer.hpp"

namespace duality {

enum class Relation {
  lemma1,
  lemma2,
  mmeur,
  pguess_ur,
  mub_ur,
  generic_wpdr,
  theorem1,
  asymmetric,
  erasure,
  erasure_entropic,
  durr_identity,
  n2_reductions,
};

std::string_view relation_name(Relation relation);
std::optional<Relation> relation_from_name(std::string_view name);
const std::vector<Relation>& all_relations();

// One checked inequality instance.  Pass criterion:
//   slack >= -(tol + gap_allowance)
// where gap_allowance propagates the certified solver gaps into slack units.
// Identity-style relations (durr_identity, n2_reductions) fold their
// tolerances into slack and use tol = 0.
struct RelationReport {
  Relation relation = Relation::lemma1;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tol = 0.0;
  double gap_allowance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> terms;
  std::vector<double> solver_gaps;
};

RelationReport check_lemma1(const RealVector& q, double tol);

RelationReport check_lemma2(const CQState& cq, double tol, RandomSource& rng);

// rho lives on A (x) B1 (x) B2; bases are orthonormal on A.
RelationReport check_mmeur(const DensityOperator& rho, int dim_a, int dim_b1, int dim_b2,
                           const Matrix& basis_x, const Matrix& basis_y, double tol,
                           RandomSource& rng);
RelationReport check_pguess_ur(const DensityOperator& rho, int dim_a, int dim_b1, int dim_b2,
                               const Matrix& basis_x, const Matrix& basis_y, double tol,
                               RandomSource& rng);
// Requires the bases to be mutually unbiased (overlap 1/d within 1e-10).
RelationReport check_mub_ur(const DensityOperator& rho, int dim_a, int dim_b1, int dim_b2,
                            const Matrix& basis_x, const Matrix& basis_y, double tol,
                            RandomSource& rng);

// rho lives on S (x) E1 (x) E2; the wave wing is minimized over the
// phase-parametrized family of bases unbiased to the path basis.
RelationReport check_generic_wpdr(const DensityOperator& rho, int n, int dim_e1, int dim_e2,
                                  double tol, RandomSource& rng);

RelationReport check_theorem1(const Interferometer& ifm, double tol, RandomSource& rng);

// Also verifies that the post-selected ensemble ignores the plate phases, by
// recomputing it at `phase_probes` random phase vectors.
RelationReport check_asymmetric(const Interferometer& ifm, double tol, RandomSource& rng,
                                int phase_probes = 16);

struct ErasureReports {
  RelationReport geometric;  // averaged visibility/distinguishability tradeoff
  RelationReport entropic;   // min/max entropy form on the post-measurement state
};

ErasureReports check_erasure(const Interferometer& ifm, const POVM& y_povm, double tol,
                             RandomSource& rng);

RelationReport check_durr_identity(const DensityOperator& rho, double tol = 1e-12);

// Two-path consistency: the entropy identities behind the visibility and
// distinguishability definitions, and the equality of the two visibility
// formulas for a symmetric second coupler.
RelationReport check_n2_reductions(const Interferometer& ifm, double tol, RandomSource& rng);

}  // namespace duality
