// Command-line front end for the duality lab.  Talks to the core exclusively
// through the C interface in duality/duality.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "duality/duality.h"

namespace {

int exit_code_for(dl_status status) {
  switch (status) {
    case DL_OK:
      return 0;
    case DL_ERR_RELATION_VIOLATION:
      return 1;
    case DL_ERR_CONFIG:
    case DL_ERR_INVALID_ARGUMENT:
      return 2;
    case DL_ERR_NO_CONVERGENCE:
    case DL_ERR_INTERNAL:
      return 3;
  }
  return 3;
}

int report_failure(const char* what, dl_status status) {
  std::cerr << what << ": " << dl_last_error() << "\n";
  return exit_code_for(status);
}

struct ConfigHandle {
  dl_config* ptr = dl_config_new();
  ~ConfigHandle() { dl_config_free(ptr); }
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

struct RecordSinkContext {
  std::ostream* stream = nullptr;
  long lines = 0;
};

void write_record(const char* json_line, void* user) {
  auto* ctx = static_cast<RecordSinkContext*>(user);
  (*ctx->stream) << json_line << '\n';
  ++ctx->lines;
}

struct CampaignFlags {
  std::string config_path;
  std::string relations;
  std::string coupling;
  std::string coupler;
  std::string out;
  long trials = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int n_min = 0;
  int n_max = 0;
  int env_min = 0;
  int env_max = 0;

  CLI::Option* opt_relations = nullptr;
  CLI::Option* opt_coupling = nullptr;
  CLI::Option* opt_coupler = nullptr;
  CLI::Option* opt_out = nullptr;
  CLI::Option* opt_trials = nullptr;
  CLI::Option* opt_seed = nullptr;
  CLI::Option* opt_tol = nullptr;
  CLI::Option* opt_n_min = nullptr;
  CLI::Option* opt_n_max = nullptr;
  CLI::Option* opt_env_min = nullptr;
  CLI::Option* opt_env_max = nullptr;
};

void add_common_flags(CLI::App* cmd, CampaignFlags& f, bool with_relations) {
  cmd->add_option("--config", f.config_path, "campaign config file (key = value lines)");
  if (with_relations) {
    f.opt_relations =
        cmd->add_option("--relations", f.relations, "comma-separated relation ids, or 'all'");
  }
  f.opt_trials = cmd->add_option("--trials", f.trials, "trials per relation");
  f.opt_seed = cmd->add_option("--seed", f.seed, "campaign master seed");
  f.opt_tol = cmd->add_option("--tol", f.tol, "solver/report tolerance");
  f.opt_out = cmd->add_option("--out", f.out, "record output path (default: stdout)");
  f.opt_n_min = cmd->add_option("--n-min", f.n_min, "minimum path count");
  f.opt_n_max = cmd->add_option("--n-max", f.n_max, "maximum path count");
  f.opt_env_min = cmd->add_option("--env-min", f.env_min, "minimum environment dimension");
  f.opt_env_max = cmd->add_option("--env-max", f.env_max, "maximum environment dimension");
  f.opt_coupling = cmd->add_option("--coupling", f.coupling,
                                   "comma-separated gamma list, or 'random'");
  f.opt_coupler = cmd->add_option("--coupler", f.coupler,
                                  "first coupler: fourier | haar | inline:<re,im,...>");
}

bool apply_flag(dl_config* cfg, const char* key, const std::string& value, int& rc) {
  const dl_status status = dl_config_set(cfg, key, value.c_str());
  if (status != DL_OK) {
    rc = report_failure("config", status);
    return false;
  }
  return true;
}

int run_campaign_command(const CampaignFlags& f, const char* forced_relations) {
  ConfigHandle cfg;
  if (!cfg.ptr) {
    std::cerr << "out of memory\n";
    return 3;
  }
  if (!f.config_path.empty()) {
    const dl_status status = dl_config_load_file(cfg.ptr, f.config_path.c_str());
    if (status != DL_OK) return report_failure("config", status);
  }

  int rc = 0;
  const auto set_if = [&](CLI::Option* opt, const char* key, const std::string& value) {
    if (rc != 0 || !opt || opt->count() == 0) return;
    if (!apply_flag(cfg.ptr, key, value, rc)) return;
  };
  set_if(f.opt_relations, "relations", f.relations);
  set_if(f.opt_trials, "trials", std::to_string(f.trials));
  set_if(f.opt_seed, "seed", std::to_string(f.seed));
  if (f.opt_tol && f.opt_tol->count() > 0) {
    std::ostringstream tol_text;
    tol_text.precision(17);
    tol_text << f.tol;
    set_if(f.opt_tol, "tol", tol_text.str());
  }
  set_if(f.opt_n_min, "n_min", std::to_string(f.n_min));
  set_if(f.opt_n_max, "n_max", std::to_string(f.n_max));
  set_if(f.opt_env_min, "env_min", std::to_string(f.env_min));
  set_if(f.opt_env_max, "env_max", std::to_string(f.env_max));
  set_if(f.opt_coupling, "coupling", f.coupling);
  set_if(f.opt_coupler, "coupler", f.coupler);
  set_if(f.opt_out, "out", f.out);
  if (rc != 0) return rc;
  if (forced_relations) {
    if (!apply_flag(cfg.ptr, "relations", forced_relations, rc)) return rc;
  }

  char out_path[4096] = {0};
  if (dl_config_get(cfg.ptr, "out", out_path, sizeof out_path) != DL_OK) {
    return report_failure("config", DL_ERR_CONFIG);
  }

  std::ofstream file;
  RecordSinkContext ctx;
  if (out_path[0] != '\0') {
    file.open(out_path);
    if (!file) {
      std::cerr << "config: cannot open output path: " << out_path << "\n";
      return 2;
    }
    ctx.stream = &file;
  } else {
    ctx.stream = &std::cout;
  }

  dl_campaign_summary summary = {};
  const dl_status status = dl_run_check(cfg.ptr, write_record, &ctx, &summary);
  ctx.stream->flush();
  if (status == DL_ERR_CONFIG || status == DL_ERR_INVALID_ARGUMENT ||
      status == DL_ERR_INTERNAL) {
    return report_failure("check", status);
  }
  std::cerr << "summary: trials=" << summary.trials << " violations=" << summary.violations
            << " nonconvergences=" << summary.nonconvergences;
  if (summary.min_slack_valid) {
    std::fprintf(stderr, " min_slack=%.12g", summary.min_slack);
  }
  std::cerr << "\n";
  return exit_code_for(status);
}

int run_example1(int n, std::uint64_t seed, double tol) {
  dl_example1_report rep = {};
  const dl_status status = dl_run_example1(n, seed, tol, &rep);
  if (status != DL_OK) return report_failure("example1", status);
  std::printf("n: %d\n", rep.n);
  std::printf("pguess: %.12g\n", rep.pguess);
  std::printf("distinguishability: %.12g\n", rep.distinguishability);
  std::printf("naive_visibility: %.12g\n", rep.naive_visibility);
  std::printf("dark_probability: %.12g\n", rep.dark_probability);
  std::printf("visibility: %.12g\n", rep.visibility);
  std::printf("tradeoff_slack: %.12g\n", rep.tradeoff_slack);
  return 0;
}

std::vector<double> parse_gamma_list(const std::string& text, bool& ok) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string token;
  ok = true;
  while (std::getline(in, token, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      ok = false;
      return values;
    }
  }
  return values;
}

int run_sweep(int n, const std::string& gamma_text, std::uint64_t seed, double tol,
              const std::string& out_path) {
  bool ok = false;
  std::vector<double> gammas = parse_gamma_list(gamma_text, ok);
  if (!ok || gammas.empty()) {
    std::cerr << "sweep: --gammas must be a comma-separated list of numbers\n";
    return 2;
  }
  std::vector<dl_sweep_point> points(gammas.size());
  int monotone = 0;
  const dl_status status =
      dl_run_sweep(n, gammas.data(), gammas.size(), seed, tol, points.data(), &monotone);
  if (status != DL_OK) return report_failure("sweep", status);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "sweep: cannot open output path: " << out_path << "\n";
      return 2;
    }
    out = &file;
  }
  (*out) << "gamma,D,V,sum_sq,slack\n";
  char line[256];
  for (const dl_sweep_point& p : points) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g\n", p.gamma, p.d, p.v,
                  p.sum_sq, p.slack);
    (*out) << line;
  }
  out->flush();
  std::cerr << "monotonicity: D nonincreasing = " << (monotone ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duality lab: interferometric duality relation verification"};
  app.require_subcommand(1);

  CampaignFlags check_flags;
  CLI::App* check = app.add_subcommand("check", "run a verification campaign");
  add_common_flags(check, check_flags, true);

  CampaignFlags erasure_flags;
  CLI::App* erasure = app.add_subcommand("erasure", "erasure-relation campaign");
  add_common_flags(erasure, erasure_flags, false);

  CampaignFlags asymmetric_flags;
  CLI::App* asymmetric = app.add_subcommand("asymmetric", "arbitrary-coupler campaign");
  add_common_flags(asymmetric, asymmetric_flags, false);

  int example_n = 4;
  std::uint64_t example_seed = 1;
  double example_tol = 1e-6;
  CLI::App* example1 = app.add_subcommand("example1", "lopsided superposition reproduction");
  example1->add_option("--n", example_n, "path count (>= 3)");
  example1->add_option("--seed", example_seed, "search seed");
  example1->add_option("--tol", example_tol, "solver tolerance");

  int sweep_n = 2;
  std::string sweep_gammas =
      "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1";
  std::uint64_t sweep_seed = 1;
  double sweep_tol = 1e-9;
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "scalar-coupling frontier sweep (CSV)");
  sweep->add_option("--n", sweep_n, "path count");
  sweep->add_option("--gammas", sweep_gammas, "comma-separated coupling grid");
  sweep->add_option("--seed", sweep_seed, "search seed");
  sweep->add_option("--tol", sweep_tol, "solver tolerance");
  sweep->add_option("--out", sweep_out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (check->parsed()) return run_campaign_command(check_flags, nullptr);
  if (erasure->parsed()) {
    return run_campaign_command(erasure_flags, "ERASURE,ERASURE_ENTROPIC");
  }
  if (asymmetric->parsed()) return run_campaign_command(asymmetric_flags, "ASYMMETRIC");
  if (example1->parsed()) return run_example1(example_n, example_seed, example_tol);
  if (sweep->parsed()) return run_sweep(sweep_n, sweep_gammas, sweep_seed, sweep_tol, sweep_out);
  return 2;
}
