#include "duality/duality.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "core/campaign.hpp"

struct dl_config {
  duality::CampaignConfig impl;
};

namespace {

thread_local std::string g_last_error;

dl_status map_error_code(duality::Errc code) {
  switch (code) {
    case duality::Errc::config_error:
      return DL_ERR_CONFIG;
    case duality::Errc::no_convergence:
    case duality::Errc::zero_probability:
      return DL_ERR_NO_CONVERGENCE;
    default:
      return DL_ERR_INVALID_ARGUMENT;
  }
}

dl_status invalid(const char* message) {
  g_last_error = message;
  return DL_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
dl_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const duality::Error& e) {
    g_last_error = e.what();
    return map_error_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DL_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* dl_version(void) { return "0.1.0"; }

const char* dl_last_error(void) { return g_last_error.c_str(); }

int dl_relation_count(void) { return static_cast<int>(duality::all_relations().size()); }

const char* dl_relation_name(int index) {
  const auto& all = duality::all_relations();
  if (index < 0 || static_cast<std::size_t>(index) >= all.size()) return nullptr;
  return duality::relation_name(all[static_cast<std::size_t>(index)]).data();
}

dl_config* dl_config_new(void) { return new (std::nothrow) dl_config(); }

void dl_config_free(dl_config* config) { delete config; }

dl_status dl_config_set(dl_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return invalid("dl_config_set: null argument");
  return guarded([&] {
    config->impl.apply_entry(key, value);
    return DL_OK;
  });
}

dl_status dl_config_load_file(dl_config* config, const char* path) {
  if (!config || !path) return invalid("dl_config_load_file: null argument");
  return guarded([&] {
    duality::CampaignConfig loaded = duality::CampaignConfig::from_file(path);
    config->impl = std::move(loaded);
    return DL_OK;
  });
}

dl_status dl_config_get(const dl_config* config, const char* key, char* buffer, size_t size) {
  if (!config || !key || !buffer || size == 0) return invalid("dl_config_get: null argument");
  return guarded([&] {
    const std::string value = config->impl.get_entry(key);
    const std::size_t n = std::min(value.size(), size - 1);
    std::memcpy(buffer, value.data(), n);
    buffer[n] = '\0';
    return DL_OK;
  });
}

dl_status dl_run_check(const dl_config* config, dl_record_callback callback, void* user,
                       dl_campaign_summary* summary) {
  if (!config) return invalid("dl_run_check: null config");
  return guarded([&] {
    const duality::RecordSink sink = [&](const duality::TrialRecord& rec) {
      if (callback) {
        const std::string line = rec.to_json();
        callback(line.c_str(), user);
      }
    };
    const duality::CampaignSummary s = duality::run_campaign(config->impl, sink);
    if (summary) {
      summary->trials = s.trials;
      summary->violations = s.violations;
      summary->nonconvergences = s.nonconvergences;
      summary->min_slack = s.min_slack;
      summary->min_slack_valid = s.min_slack_valid ? 1 : 0;
    }
    if (s.violations > 0) return DL_ERR_RELATION_VIOLATION;
    if (s.nonconvergences > 0) return DL_ERR_NO_CONVERGENCE;
    return DL_OK;
  });
}

dl_status dl_run_example1(int n, uint64_t seed, double tol, dl_example1_report* report) {
  if (!report) return invalid("dl_run_example1: null report");
  return guarded([&] {
    const duality::Example1Report r = duality::run_example1(n, seed, tol);
    report->n = r.n;
    report->pguess = r.pguess;
    report->distinguishability = r.distinguishability;
    report->naive_visibility = r.naive_visibility;
    report->dark_probability = r.dark_probability;
    report->visibility = r.visibility;
    report->tradeoff_slack = r.tradeoff_slack;
    return DL_OK;
  });
}

dl_status dl_run_sweep(int n, const double* gammas, size_t count, uint64_t seed, double tol,
                       dl_sweep_point* points, int* monotone) {
  if (!gammas || !points || count == 0) return invalid("dl_run_sweep: null or empty grid");
  return guarded([&] {
    const std::vector<double> grid(gammas, gammas + count);
    const std::vector<duality::SweepPoint> result = duality::run_sweep(n, grid, seed, tol);
    for (std::size_t i = 0; i < result.size(); ++i) {
      points[i].gamma = result[i].gamma;
      points[i].d = result[i].d;
      points[i].v = result[i].v;
      points[i].sum_sq = result[i].sum_sq;
      points[i].slack = result[i].slack;
    }
    if (monotone) *monotone = duality::sweep_monotone(result) ? 1 : 0;
    return DL_OK;
  });
}

}  // extern "C"
