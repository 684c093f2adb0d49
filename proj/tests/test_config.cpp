#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "bridgecast/checkpoint.hpp"
#include "bridgecast/config.hpp"
#include "bridgecast/errors.hpp"
#include "testutil.hpp"

using namespace bridgecast;

TEST_CASE("config json round-trip is byte-identical") {
  RunConfig cfg;
  cfg.data_path = "data/series.csv";
  cfg.out_dir = "runs/a";
  cfg.horizon = 24;
  cfg.preset = Preset::kProb;
  cfg.s = 2.0;
  cfg.n_samples = 100;
  cfg.seed = 1234567890123ULL;
  cfg.splits = {0.6, 0.2, 0.2};
  cfg.loss = LossKind::kMse;

  const std::string once = config_to_json(cfg);
  const RunConfig parsed = config_from_json(once);
  const std::string twice = config_to_json(parsed);
  CHECK(once == twice);

  CHECK(parsed.preset == Preset::kProb);
  CHECK(parsed.s == 2.0);
  CHECK(parsed.seed == cfg.seed);
  CHECK(parsed.splits.val == 0.2);
}

TEST_CASE("config validation rejects inconsistent combinations") {
  RunConfig cfg;
  cfg.horizon = 24;
  validate(cfg);  // defaults plus a horizon are fine

  RunConfig bad = cfg;
  bad.n_samples = 8;  // s = 0 with multiple samples
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = cfg;
  bad.preset = Preset::kProb;  // prob preset with s = 0
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = cfg;
  bad.preset = Preset::kPoint;
  bad.s = 1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = cfg;
  bad.label_len = cfg.lookback;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = cfg;
  bad.horizon = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = cfg;
  bad.splits = {0.7, 0.3, 0.2};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = cfg;
  bad.steps = 1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("config file save/load") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "bc_config.json").string();
  RunConfig cfg;
  cfg.data_path = "x.csv";
  cfg.horizon = 8;
  save_config(path, cfg);
  const RunConfig loaded = load_config(path);
  CHECK(config_to_json(loaded) == config_to_json(cfg));
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), DataError);
  CHECK_THROWS_AS(config_from_json("{not json"), DataError);
  CHECK_THROWS_AS(config_from_json("{}"), DataError);
}

TEST_CASE("checkpoint tensors round-trip bit-exactly") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "bc_ckpt.bin").string();
  Rng rng(3);
  std::vector<NamedTensor> tensors;
  tensors.push_back({"prior_F.weight", testutil::random_matrix(7, 5, rng)});
  tensors.push_back({"prior_F.bias", testutil::random_matrix(7, 1, rng)});
  tensors.push_back({"cond_E.weight", testutil::random_matrix(7, 5, rng)});
  // Values with awkward bit patterns survive the trip.
  tensors[0].value(0, 0) = 0x1.fffffffffffffp+1023;
  tensors[0].value(1, 1) = 5e-324;
  tensors[0].value(2, 2) = -0.0;

  save_checkpoint(path, tensors);
  const std::vector<NamedTensor> back = load_checkpoint(path);
  REQUIRE(back.size() == tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    CHECK(back[i].name == tensors[i].name);
    CHECK(bitwise_equal(back[i].value, tensors[i].value));
  }
  CHECK(find_tensor(back, "cond_E.weight").rows() == 7);
  CHECK(find_tensor_opt(back, "missing") == nullptr);
  CHECK_THROWS_AS(find_tensor(back, "missing"), DataError);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.bin"), DataError);
}
