#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/wpdr.hpp"

namespace duality {

// Flat key=value configuration for verification campaigns.  Unknown keys are
// rejected so that a typo in a tolerance never silently runs with defaults.
struct CampaignConfig {
  std::vector<Relation> relations = all_relations();
  long trials = 100;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int n_min = 2;
  int n_max = 4;
  int env_min = 1;
  int env_max = 4;
  std::vector<double> gammas;       // empty: random flag states
  std::string coupler = "fourier";  // "fourier" | "haar" | "inline:<re,im,...>"
  std::string out;                  // record stream destination; empty: stdout

  static CampaignConfig from_file(const std::string& path);
  static CampaignConfig from_text(const std::string& text);
  void apply_entry(const std::string& key, const std::string& value);
  std::string get_entry(const std::string& key) const;
  void validate() const;

  // The first-coupler factory implied by the coupler spec.
  Matrix make_fc1(int n, RandomSource& rng) const;
};

struct TrialRecord {
  Relation relation = Relation::lemma1;
  long trial = 0;
  std::uint64_t seed = 0;
  int n = 0;
  std::vector<int> dims;
  std::string status;  // "ok" | "violation" | "no_convergence"
  std::string error;
  RelationReport report;

  std::string to_json() const;
};

struct CampaignSummary {
  long trials = 0;
  long violations = 0;
  long nonconvergences = 0;
  double min_slack = 0.0;
  bool min_slack_valid = false;
};

using RecordSink = std::function<void(const TrialRecord&)>;

// Runs trials for every selected relation; records are delivered to the sink
// ordered by (relation, trial index) regardless of worker scheduling.
CampaignSummary run_campaign(const CampaignConfig& config, const RecordSink& sink);

// One sampled instance, checked; exposed so any emitted record can be
// replayed bit-for-bit from its (relation, seed) pair.
TrialRecord run_trial(Relation relation, const CampaignConfig& config, long trial_index,
                      std::uint64_t trial_seed);

struct Example1Report {
  int n = 0;
  double pguess = 0.0;
  double distinguishability = 0.0;
  double naive_visibility = 0.0;
  double dark_probability = 0.0;  // detector 0 at the canonical plate phases
  double visibility = 0.0;
  double tradeoff_slack = 0.0;  // 1 - (V^2 + D^2)
};

Example1Report run_example1(int n, std::uint64_t seed, double tol);

struct SweepPoint {
  double gamma = 0.0;
  double d = 0.0;
  double v = 0.0;
  double sum_sq = 0.0;
  double slack = 0.0;
};

// Scalar-coupling sweep with Fourier couplers and a basis-state input; the
// grid must be strictly increasing.
std::vector<SweepPoint> run_sweep(int n, const std::vector<double>& gammas, std::uint64_t seed,
                                  double tol);

// True when distinguishability is nonincreasing along the sweep within tol.
bool sweep_monotone(const std::vector<SweepPoint>& points, double tol = 1e-9);

}  // namespace duality
