#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "bridgecast.h"

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("schedule handle lifecycle and values") {
  bc_schedule* sched = nullptr;
  REQUIRE(bc_schedule_create(50, &sched) == BC_OK);
  REQUIRE(sched != nullptr);
  CHECK(bc_schedule_steps(sched) == 50);

  double v = -1.0;
  CHECK(bc_schedule_alpha(sched, 0, &v) == BC_OK);
  CHECK(v == 1.0);
  CHECK(bc_schedule_alpha(sched, 50, &v) == BC_OK);
  CHECK(v == 0.0);
  CHECK(bc_schedule_beta(sched, 25, &v) == BC_OK);
  CHECK(v == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(bc_schedule_sigma2(sched, 10, 2.0, &v) == BC_OK);
  CHECK(v == doctest::Approx(2.0 * 9 / (50.0 * 10)).epsilon(1e-14));

  bc_reverse_coeffs rc;
  CHECK(bc_schedule_reverse_coeffs(sched, 10, 2.0, &rc) == BC_OK);
  CHECK(rc.kappa == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(rc.lambda == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(rc.zeta == 0.0);

  CHECK(bc_schedule_alpha(sched, 99, &v) == BC_INVALID_ARGUMENT);
  CHECK(std::string(bc_last_error()).find("99") != std::string::npos);
  bc_schedule_free(sched);
}

TEST_CASE("invalid schedule construction reports through status and message") {
  bc_schedule* sched = nullptr;
  CHECK(bc_schedule_create(1, &sched) == BC_INVALID_ARGUMENT);
  CHECK(sched == nullptr);
  CHECK(bc_last_error()[0] != '\0');
  CHECK(bc_schedule_create(10, nullptr) == BC_INVALID_ARGUMENT);
}

TEST_CASE("status names and version") {
  CHECK(std::string(bc_version()) == "0.1.0");
  CHECK(std::string(bc_status_name(BC_OK)) == "ok");
  CHECK(std::string(bc_status_name(BC_VERIFY_FAILED)) == "verification failed");
}

TEST_CASE("config defaults") {
  bc_run_config cfg;
  bc_run_config_init(&cfg);
  CHECK(cfg.lookback == 336);
  CHECK(cfg.label_len == 48);
  CHECK(cfg.steps == 50);
  CHECK(cfg.s == 0.0);
  CHECK(cfg.n_samples == 1);
  CHECK(cfg.width == 64);
  CHECK(cfg.seed == 42);
  CHECK(cfg.split_train == 0.7);
}

TEST_CASE("inspect-schedule writes a parsable table and gates on identities") {
  const std::string path = temp_file("bc_capi_schedule.csv");
  REQUIRE(bc_inspect_schedule(50, 2.0, path.c_str()) == BC_OK);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,alpha_hat,beta_hat,gamma_hat,kappa,lambda,zeta,sigma2");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 51);
  std::remove(path.c_str());

  CHECK(bc_inspect_schedule(1, 0.0, nullptr) == BC_INVALID_ARGUMENT);
}

TEST_CASE("train rejects missing data with a data error") {
  bc_run_config cfg;
  bc_run_config_init(&cfg);
  cfg.data_path = "/nonexistent/series.csv";
  cfg.horizon = 8;
  CHECK(bc_train(&cfg) == BC_DATA_ERROR);
  CHECK(bc_last_error()[0] != '\0');
}

TEST_CASE("train rejects invalid configurations before touching data") {
  bc_run_config cfg;
  bc_run_config_init(&cfg);
  cfg.data_path = "/nonexistent/series.csv";
  cfg.horizon = 8;
  cfg.n_samples = 4;  // s = 0 with several samples
  CHECK(bc_train(&cfg) == BC_INVALID_ARGUMENT);
  CHECK(bc_forecast(&cfg, "/nonexistent/ckpt.bin") == BC_INVALID_ARGUMENT);
  CHECK(bc_evaluate(nullptr, nullptr, nullptr, 0) == BC_INVALID_ARGUMENT);
}

TEST_CASE("verification suite passes and the fault injection fails it") {
  CHECK(bc_verify(1, 5000, 0) == BC_OK);
  CHECK(bc_verify(1, 1000, 1) == BC_VERIFY_FAILED);
  CHECK(std::string(bc_last_error()).find("identities") != std::string::npos);
}
