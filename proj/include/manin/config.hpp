#pragma once
// Run configuration: a flat TOML subset (ints, floats, booleans, quoted
// strings, arrays of ints; '#' comments), round-trippable, with a stable
// 64-bit hash of the canonical serialization for provenance stamping.

#include <cstdint>
#include <string>
#include <vector>

namespace manin {

struct RunConfig {
  std::string subcommand = "predict";  // predict | count | check
  int n = 2;
  std::string L = "2";                  // class coordinates, csv of rationals
  std::string metric = "singular-value";
  double B_max = 1e6;
  long long p_max = 20000;
  std::int64_t mc_samples = 400000;
  int shards = 8;
  std::uint64_t seed = 12345;
  int quad_level = 5;
  std::string out_json;   // empty = stdout only
  std::string out_csv;    // empty = stdout
  bool timing = false;    // include elapsed_s column in CSV
  std::string suite = "qcounts";  // for check
  std::vector<long long> checkpoints;  // empty = default grid

  std::string to_toml() const;
  static RunConfig from_toml(const std::string& text);  // throws std::runtime_error
  // FNV-1a 64 over the canonical TOML with the output paths blanked (they
  // route results, they do not change them), 16 hex digits.
  std::string hash() const;
};

}  // namespace manin
