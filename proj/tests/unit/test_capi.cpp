#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <duality/duality.h>

namespace {

struct ConfigGuard {
  dl_config* ptr = dl_config_new();
  ~ConfigGuard() { dl_config_free(ptr); }
};

std::string get_key(const dl_config* cfg, const char* key) {
  char buffer[4096] = {0};
  REQUIRE(dl_config_get(cfg, key, buffer, sizeof buffer) == DL_OK);
  return buffer;
}

}  // namespace

TEST_CASE("version and relation table") {
  CHECK(std::string(dl_version()) == "0.1.0");
  REQUIRE(dl_relation_count() == 12);
  CHECK(std::string(dl_relation_name(0)) == "LEMMA1");
  CHECK(std::string(dl_relation_name(11)) == "N2_REDUCTIONS");
  CHECK(dl_relation_name(-1) == nullptr);
  CHECK(dl_relation_name(12) == nullptr);
}

TEST_CASE("config set and get round trip") {
  ConfigGuard cfg;
  REQUIRE(cfg.ptr != nullptr);
  CHECK(dl_config_set(cfg.ptr, "trials", "25") == DL_OK);
  CHECK(get_key(cfg.ptr, "trials") == "25");
  CHECK(dl_config_set(cfg.ptr, "relations", "lemma1,theorem1") == DL_OK);
  CHECK(get_key(cfg.ptr, "relations") == "LEMMA1,THEOREM1");
  CHECK(get_key(cfg.ptr, "coupling") == "random");

  CHECK(dl_config_set(cfg.ptr, "bogus", "1") == DL_ERR_CONFIG);
  CHECK(std::strlen(dl_last_error()) > 0);
  CHECK(dl_config_set(cfg.ptr, "trials", "x") == DL_ERR_CONFIG);
  CHECK(dl_config_set(cfg.ptr, "relations", "NOPE") == DL_ERR_CONFIG);

  char buffer[8] = {0};
  CHECK(dl_config_get(cfg.ptr, "bogus", buffer, sizeof buffer) == DL_ERR_CONFIG);
  CHECK(dl_config_set(nullptr, "trials", "1") == DL_ERR_INVALID_ARGUMENT);
  CHECK(dl_config_get(cfg.ptr, "trials", nullptr, 8) == DL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config file loading") {
  const char* path = "capi_config_test.cfg";
  {
    std::ofstream out(path);
    out << "# exercise the file loader\n"
        << "relations = LEMMA1\n"
        << "trials = 12\n"
        << "seed = 5\n";
  }
  ConfigGuard cfg;
  REQUIRE(dl_config_load_file(cfg.ptr, path) == DL_OK);
  CHECK(get_key(cfg.ptr, "relations") == "LEMMA1");
  CHECK(get_key(cfg.ptr, "trials") == "12");
  CHECK(get_key(cfg.ptr, "seed") == "5");
  CHECK(dl_config_load_file(cfg.ptr, "no/such/file.cfg") == DL_ERR_CONFIG);
  std::remove(path);
}

TEST_CASE("campaign through the C boundary") {
  ConfigGuard cfg;
  REQUIRE(dl_config_set(cfg.ptr, "relations", "LEMMA1,DURR_IDENTITY") == DL_OK);
  REQUIRE(dl_config_set(cfg.ptr, "trials", "20") == DL_OK);
  REQUIRE(dl_config_set(cfg.ptr, "seed", "33") == DL_OK);

  std::vector<std::string> lines;
  const auto callback = [](const char* json_line, void* user) {
    static_cast<std::vector<std::string>*>(user)->emplace_back(json_line);
  };
  dl_campaign_summary summary{};
  REQUIRE(dl_run_check(cfg.ptr, callback, &lines, &summary) == DL_OK);
  CHECK(summary.trials == 40);
  CHECK(summary.violations == 0);
  CHECK(summary.nonconvergences == 0);
  CHECK(summary.min_slack_valid == 1);
  REQUIRE(lines.size() == 40);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const char* expected = i < 20 ? "{\"relation\":\"LEMMA1\"" : "{\"relation\":\"DURR_IDENTITY\"";
    CHECK(lines[i].rfind(expected, 0) == 0);
  }

  // Callback and summary are both optional.
  CHECK(dl_run_check(cfg.ptr, nullptr, nullptr, nullptr) == DL_OK);
  CHECK(dl_run_check(nullptr, nullptr, nullptr, &summary) == DL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("canonical example through the C boundary") {
  dl_example1_report report{};
  REQUIRE(dl_run_example1(4, 1, 1e-6, &report) == DL_OK);
  CHECK(report.n == 4);
  CHECK(std::abs(report.pguess - 0.75) < 1e-12);
  CHECK(std::abs(report.distinguishability - 2.0 / 3.0) < 1e-12);
  CHECK(report.dark_probability <= 1e-10);
  CHECK(std::abs(report.naive_visibility - 1.0) < 1e-8);
  CHECK(std::abs(report.tradeoff_slack -
                 (1.0 - report.visibility * report.visibility -
                  report.distinguishability * report.distinguishability)) < 1e-15);

  CHECK(dl_run_example1(2, 1, 1e-6, &report) == DL_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(dl_last_error()) > 0);
  CHECK(dl_run_example1(4, 1, 1e-6, nullptr) == DL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("sweep through the C boundary") {
  const double gammas[3] = {0.0, 0.5, 1.0};
  dl_sweep_point points[3];
  int monotone = 0;
  REQUIRE(dl_run_sweep(2, gammas, 3, 1, 1e-9, points, &monotone) == DL_OK);
  CHECK(monotone == 1);
  CHECK(std::abs(points[0].d - 1.0) < 1e-9);
  CHECK(std::abs(points[1].v - 0.5) < 1e-6);
  CHECK(std::abs(points[2].d) < 1e-9);
  for (const dl_sweep_point& p : points) CHECK(std::abs(p.sum_sq - 1.0) < 1e-6);

  CHECK(dl_run_sweep(2, gammas, 3, 1, 1e-9, points, nullptr) == DL_OK);
  CHECK(dl_run_sweep(2, nullptr, 3, 1, 1e-9, points, &monotone) == DL_ERR_INVALID_ARGUMENT);
  CHECK(dl_run_sweep(2, gammas, 0, 1, 1e-9, points, &monotone) == DL_ERR_INVALID_ARGUMENT);
  const double bad[2] = {0.5, 0.5};
  CHECK(dl_run_sweep(2, bad, 2, 1, 1e-9, points, &monotone) == DL_ERR_CONFIG);
}
