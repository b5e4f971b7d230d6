#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "manin/config.hpp"

using namespace manin;

TEST_CASE("defaults round-trip through TOML") {
  const RunConfig def;
  const RunConfig back = RunConfig::from_toml(def.to_toml());
  CHECK(back.to_toml() == def.to_toml());
  CHECK(back.subcommand == "predict");
  CHECK(back.n == 2);
  CHECK(back.L == "2");
  CHECK(back.metric == "singular-value");
  CHECK(back.B_max == 1e6);
  CHECK(back.p_max == 20000);
  CHECK(back.mc_samples == 400000);
  CHECK(back.shards == 8);
  CHECK(back.seed == 12345);
  CHECK(back.quad_level == 5);
  CHECK(back.out_json.empty());
  CHECK(back.timing == false);
  CHECK(back.suite == "qcounts");
  CHECK(back.checkpoints.empty());
}

TEST_CASE("modified fields round-trip, comments and spacing are tolerated") {
  RunConfig cfg;
  cfg.subcommand = "count";
  cfg.n = 3;
  cfg.L = "3/2,2";
  cfg.metric = "sup";
  cfg.B_max = 2.5e8;
  cfg.seed = 987654321;
  cfg.timing = true;
  cfg.out_json = "report.json";
  cfg.checkpoints = {10000, 160000, 100000000};
  const RunConfig back = RunConfig::from_toml(cfg.to_toml());
  CHECK(back.to_toml() == cfg.to_toml());
  CHECK(back.L == "3/2,2");
  CHECK(back.B_max == 2.5e8);
  CHECK(back.timing == true);
  CHECK(back.checkpoints == std::vector<long long>{10000, 160000, 100000000});

  const RunConfig sparse = RunConfig::from_toml(
      "# a comment line\n"
      "  seed =  42   # trailing comment\n"
      "\n"
      "metric = \"l2\"\n"
      "checkpoints = [ 100 , 200 ]\n");
  CHECK(sparse.seed == 42);
  CHECK(sparse.metric == "l2");
  CHECK(sparse.checkpoints == std::vector<long long>{100, 200});
  CHECK(sparse.n == 2);  // untouched fields keep defaults
}

TEST_CASE("malformed input is rejected with the offending line") {
  CHECK_THROWS_AS(RunConfig::from_toml("nonsense\n"), std::runtime_error);
  CHECK_THROWS_AS(RunConfig::from_toml("unknown_key = 1\n"), std::runtime_error);
  CHECK_THROWS_AS(RunConfig::from_toml("n = \"two\"\n"), std::runtime_error);
  CHECK_THROWS_AS(RunConfig::from_toml("metric = l2\n"), std::runtime_error);
  CHECK_THROWS_AS(RunConfig::from_toml("timing = maybe\n"), std::runtime_error);
  CHECK_THROWS_AS(RunConfig::from_toml("checkpoints = 100\n"), std::runtime_error);
  try {
    RunConfig::from_toml("n = 2\nbogus = 1\n");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("hash is stable, canonical, and sensitive to every field") {
  const RunConfig def;
  const std::string h = def.hash();
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(h == RunConfig::from_toml(def.to_toml()).hash());
  // comments and spacing do not affect the canonical hash
  CHECK(RunConfig::from_toml("seed = 12345 # same as default\n").hash() == h);

  RunConfig other = def;
  other.seed = 12346;
  CHECK(other.hash() != h);
  other = def;
  other.metric = "sup";
  CHECK(other.hash() != h);
  other = def;
  other.checkpoints = {1};
  CHECK(other.hash() != h);
  other = def;
  other.timing = true;
  CHECK(other.hash() != h);
  // output destinations route the report without changing the computation
  other = def;
  other.out_json = "somewhere.json";
  other.out_csv = "somewhere.csv";
  CHECK(other.hash() == h);
}
