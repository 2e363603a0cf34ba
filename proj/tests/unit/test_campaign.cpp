#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "core/campaign.hpp"
#include "json.hpp"

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

std::vector<std::string> campaign_json(const CampaignConfig& cfg, CampaignSummary* summary_out) {
  std::vector<std::string> lines;
  const CampaignSummary summary =
      run_campaign(cfg, [&](const TrialRecord& rec) { lines.push_back(rec.to_json()); });
  if (summary_out) *summary_out = summary;
  return lines;
}

}  // namespace

TEST_CASE("config text parsing") {
  const CampaignConfig cfg = CampaignConfig::from_text(
      "# campaign settings\n"
      "relations = lemma1, durr_identity  # mixed case tokens\n"
      "\n"
      "trials = 30\n"
      "seed = 9\n"
      "tol = 1e-9\n"
      "n_min=2\n"
      "n_max = 3\n"
      "coupling = 0.25, 0.75\n"
      "coupler = haar\n");
  REQUIRE(cfg.relations.size() == 2);
  CHECK(cfg.relations[0] == Relation::lemma1);
  CHECK(cfg.relations[1] == Relation::durr_identity);
  CHECK(cfg.trials == 30);
  CHECK(cfg.seed == 9);
  CHECK(cfg.tol == 1e-9);
  CHECK(cfg.n_min == 2);
  CHECK(cfg.n_max == 3);
  REQUIRE(cfg.gammas.size() == 2);
  CHECK(cfg.gammas[0] == 0.25);
  CHECK(cfg.gammas[1] == 0.75);
  CHECK(cfg.get_entry("relations") == "LEMMA1,DURR_IDENTITY");
  CHECK(cfg.get_entry("coupling") == "0.25,0.75");
  CHECK(cfg.get_entry("coupler") == "haar");
  CHECK(cfg.get_entry("trials") == "30");

  CHECK(CampaignConfig::from_text("relations = all\n").relations.size() == 12);
  CHECK(CampaignConfig::from_text("coupling = random\n").gammas.empty());
  CHECK(CampaignConfig::from_text("").relations.size() == 12);  // defaults

  CHECK(thrown_code([] { CampaignConfig::from_text("tol\n"); }) == Errc::config_error);
  CHECK(thrown_code([] { CampaignConfig::from_text("trials = x\n"); }) == Errc::config_error);
  CHECK(thrown_code([] { CampaignConfig::from_text("bogus = 1\n"); }) == Errc::config_error);
  CHECK(thrown_code([] { CampaignConfig::from_text("relations = LEMMA1,NOPE\n"); }) ==
        Errc::config_error);
  try {
    CampaignConfig::from_text("trials = 10\nnot a pair\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  const auto rejects = [](const char* key, const char* value) {
    CampaignConfig cfg;
    cfg.apply_entry(key, value);
    return thrown_code([&] { cfg.validate(); }) == Errc::config_error;
  };
  CHECK(rejects("tol", "0.01"));
  CHECK(rejects("tol", "1e-13"));
  CHECK(rejects("trials", "0"));
  CHECK(rejects("n_min", "1"));
  CHECK(rejects("env_min", "9"));  // inverted against the default env_max
  CHECK(rejects("coupling", "1.5"));
  CHECK(rejects("coupler", "nope"));
  CHECK(rejects("coupler", "inline:1,0,0"));        // odd scalar count
  CHECK(rejects("coupler", "inline:1,0,0,0,0,0"));  // not a square matrix
  CHECK(rejects("coupler", "inline:1,0,0,0,0,0,0,0"));  // not unitary

  CampaignConfig inline_ok;
  inline_ok.apply_entry("coupler", "inline:0,0,1,0,1,0,0,0");  // exchange gate
  inline_ok.apply_entry("n_min", "2");
  inline_ok.apply_entry("n_max", "2");
  inline_ok.validate();
  RandomSource rng(3);
  const Matrix u = inline_ok.make_fc1(2, rng);
  CHECK(std::abs(u(0, 1) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(u(1, 0) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(u(0, 0)) < 1e-12);

  CampaignConfig inline_range = inline_ok;
  inline_range.apply_entry("n_max", "3");
  CHECK(thrown_code([&] { inline_range.validate(); }) == Errc::config_error);
}

TEST_CASE("first coupler factory") {
  CampaignConfig cfg;
  RandomSource rng(5);
  CHECK(max_abs(cfg.make_fc1(3, rng) - fourier_matrix(3)) == 0.0);

  cfg.apply_entry("coupler", "haar");
  RandomSource a(11);
  RandomSource b(11);
  const Matrix ua = cfg.make_fc1(3, a);
  const Matrix ub = cfg.make_fc1(3, b);
  CHECK(is_unitary(ua));
  CHECK(max_abs(ua - ub) == 0.0);
}

TEST_CASE("trials replay bit for bit") {
  CampaignConfig cfg;
  cfg.apply_entry("relations", "THEOREM1");
  cfg.apply_entry("n_max", "3");
  cfg.apply_entry("env_max", "2");
  cfg.validate();
  const TrialRecord a = run_trial(Relation::theorem1, cfg, 3, 12345);
  const TrialRecord b = run_trial(Relation::theorem1, cfg, 3, 12345);
  CHECK(a.status == "ok");
  CHECK(a.to_json() == b.to_json());
  const TrialRecord c = run_trial(Relation::theorem1, cfg, 3, 54321);
  CHECK(a.to_json() != c.to_json());
}

TEST_CASE("campaign ordering, seeds and replay") {
  CampaignConfig cfg;
  cfg.apply_entry("relations", "LEMMA1,DURR_IDENTITY");
  cfg.apply_entry("trials", "15");
  cfg.apply_entry("seed", "77");
  cfg.validate();

  std::vector<TrialRecord> records;
  const CampaignSummary summary =
      run_campaign(cfg, [&](const TrialRecord& rec) { records.push_back(rec); });
  CHECK(summary.trials == 30);
  CHECK(summary.violations == 0);
  CHECK(summary.nonconvergences == 0);
  CHECK(summary.min_slack_valid);
  REQUIRE(records.size() == 30);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Relation expected = i < 15 ? Relation::lemma1 : Relation::durr_identity;
    CHECK(records[i].relation == expected);
    CHECK(records[i].trial == static_cast<long>(i % 15));
    CHECK(records[i].seed == (77ULL ^ static_cast<std::uint64_t>(i)));
    CHECK(records[i].status == "ok");
  }
  for (std::size_t i = 0; i < records.size(); i += 7) {
    const TrialRecord replay =
        run_trial(records[i].relation, cfg, records[i].trial, records[i].seed);
    CHECK(replay.to_json() == records[i].to_json());
  }
}

TEST_CASE("worker count does not change the record stream") {
  CampaignConfig cfg;
  cfg.apply_entry("relations", "LEMMA1,THEOREM1");
  cfg.apply_entry("trials", "8");
  cfg.apply_entry("seed", "101");
  cfg.apply_entry("n_max", "3");
  cfg.apply_entry("env_max", "2");
  cfg.validate();

  setenv("DUALITY_LAB_THREADS", "3", 1);
  const std::vector<std::string> parallel = campaign_json(cfg, nullptr);
  setenv("DUALITY_LAB_THREADS", "1", 1);
  const std::vector<std::string> serial = campaign_json(cfg, nullptr);
  CHECK(parallel == serial);

  setenv("DUALITY_LAB_THREADS", "zero", 1);
  CHECK(thrown_code([&] { run_campaign(cfg, nullptr); }) == Errc::config_error);
  setenv("DUALITY_LAB_THREADS", "0", 1);
  CHECK(thrown_code([&] { run_campaign(cfg, nullptr); }) == Errc::config_error);
  unsetenv("DUALITY_LAB_THREADS");
}

TEST_CASE("record json shape") {
  CampaignConfig cfg;
  cfg.apply_entry("relations", "LEMMA2");
  cfg.validate();
  const TrialRecord rec = run_trial(Relation::lemma2, cfg, 0, 42);
  const std::string text = rec.to_json();
  CHECK(text.rfind("{\"relation\":", 0) == 0);  // stable leading field

  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.at("relation") == "LEMMA2");
  CHECK(j.at("trial") == 0);
  CHECK(j.at("seed") == 42);
  CHECK(j.at("n") == rec.n);
  CHECK(j.at("dims").size() == rec.dims.size());
  CHECK(j.at("status") == "ok");
  CHECK(!j.contains("error"));
  CHECK(j.at("pass") == true);
  CHECK(j.at("terms").size() == rec.report.terms.size());
  CHECK(j.at("gaps").size() == rec.report.solver_gaps.size());
  CHECK(j.at("slack").get<double>() == rec.report.slack);
}

TEST_CASE("canonical example report") {
  const Example1Report rep = run_example1(4, 1, 1e-6);
  CHECK(rep.n == 4);
  CHECK(std::abs(rep.pguess - 0.75) < 1e-12);
  CHECK(std::abs(rep.distinguishability - 2.0 / 3.0) < 1e-12);
  CHECK(rep.dark_probability <= 1e-10);
  CHECK(std::abs(rep.naive_visibility - 1.0) < 1e-8);
  // pmax = (sum_j |psi_j|)^2 / n gives the closed-form fringe contrast.
  CHECK(std::abs(rep.visibility - (3.0 * 4 - 4.0) / (4 * 3.0)) < 1e-9);
  CHECK(std::abs(rep.tradeoff_slack -
                 (1.0 - rep.visibility * rep.visibility -
                  rep.distinguishability * rep.distinguishability)) < 1e-15);
  CHECK(rep.tradeoff_slack >= -1e-9);

  CHECK(thrown_code([] { run_example1(2, 1, 1e-6); }) == Errc::invalid_argument);
}

TEST_CASE("scalar coupling sweep closed forms") {
  const std::vector<SweepPoint> points = run_sweep(2, {0.0, 0.5, 1.0}, 1, 1e-9);
  REQUIRE(points.size() == 3);

  CHECK(std::abs(points[0].d - 1.0) < 1e-9);
  CHECK(std::abs(points[0].v) < 1e-6);

  CHECK(std::abs(points[1].v - 0.5) < 1e-6);
  CHECK(std::abs(points[1].d - std::sqrt(0.75)) < 1e-9);

  CHECK(std::abs(points[2].d) < 1e-9);
  CHECK(std::abs(points[2].v - 1.0) < 1e-6);

  for (const SweepPoint& p : points) {
    CHECK(std::abs(p.sum_sq - 1.0) < 1e-6);  // pure joint state saturates
    CHECK(std::abs(p.slack + p.sum_sq - 1.0) < 1e-15);
  }
  CHECK(sweep_monotone(points));

  CHECK(thrown_code([] { run_sweep(2, {0.5, 0.5}, 1, 1e-9); }) == Errc::config_error);
  CHECK(thrown_code([] { run_sweep(2, {1.2}, 1, 1e-9); }) == Errc::config_error);
  CHECK(thrown_code([] { run_sweep(2, {}, 1, 1e-9); }) == Errc::config_error);
  CHECK(thrown_code([] { run_sweep(1, {0.5}, 1, 1e-9); }) == Errc::config_error);
}
