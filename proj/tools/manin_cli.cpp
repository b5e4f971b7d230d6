// Command-line front end: asymptotic predictions, exact point counts, and
// quick self-check suites for compactified PGL_n point counting.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gitrev.hpp"
#include "manin/config.hpp"
#include "manin/enumerate.hpp"
#include "manin/euler.hpp"
#include "manin/qcounts.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

int run_predict(const manin::RunConfig& cfg) {
  const manin::RootDatum datum = manin::build_pgl(cfg.n);
  const manin::SVector L = manin::svector_from_string(cfg.L);
  const manin::ArchMetric metric = manin::arch_metric_from_string(cfg.metric);
  manin::PredictOptions opts;
  opts.p_max = cfg.p_max;
  opts.mc.samples = cfg.mc_samples;
  opts.mc.shards = cfg.shards;
  opts.mc.seed = cfg.seed;
  opts.quad_level = cfg.quad_level;
  manin::PredictionReport report = manin::leading_constant(datum, L, metric, opts);
  report.config_hash = cfg.hash();
  report.git_revision = MANIN_GIT_REVISION;
  report.seed = cfg.seed;

  std::cout << report.to_markdown();
  const std::string json = report.to_json().dump(2) + "\n";
  if (!cfg.out_json.empty())
    write_file(cfg.out_json, json);
  else
    std::cout << json;
  return 0;
}

int run_count(const manin::RunConfig& cfg) {
  const manin::SVector L = manin::svector_from_string(cfg.L);
  const manin::ArchMetric metric = manin::arch_metric_from_string(cfg.metric);
  std::vector<double> cps;
  if (cfg.checkpoints.empty()) {
    cps = manin::default_checkpoints(cfg.B_max);
  } else {
    for (long long b : cfg.checkpoints) cps.push_back(static_cast<double>(b));
  }
  const manin::CountRun run =
      manin::count_run(cfg.n, L, metric, cfg.B_max, cps, cfg.shards);

  const std::string csv = run.to_csv(cfg.timing);
  if (!cfg.out_csv.empty())
    write_file(cfg.out_csv, csv);
  else
    std::cout << csv;

  if (!cfg.out_json.empty()) {
    nlohmann::ordered_json j;
    j["n"] = run.n;
    j["L"] = run.L_string;
    j["metric"] = run.metric;
    j["B_max"] = run.B_max;
    j["T"] = run.T;
    j["shards"] = run.shards;
    j["checkpoints"] = run.checkpoints;
    j["counts"] = run.counts;
    if (cfg.timing) j["elapsed_s"] = run.elapsed_s;
    j["provenance"] = {{"config_hash", cfg.hash()},
                       {"git_revision", MANIN_GIT_REVISION},
                       {"seed", cfg.seed}};
    write_file(cfg.out_json, j.dump(2) + "\n");
  }
  return 0;
}

int run_check(const manin::RunConfig& cfg) {
  int failures = 0;
  const auto report = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok:   " : "FAIL: ") << what << "\n";
    if (!ok) ++failures;
  };

  if (cfg.suite == "qcounts") {
    for (int n : {2, 3}) {
      const manin::RootDatum datum = manin::build_pgl(n);
      const std::vector<std::vector<int>> profiles =
          n == 2 ? std::vector<std::vector<int>>{{0}, {1}, {2}, {3}}
                 : std::vector<std::vector<int>>{{0, 0}, {1, 0}, {1, 1}, {2, 0}};
      for (long long p : {2LL, 3LL}) {
        for (const auto& a : profiles) {
          const mpz_class vol = manin::hecke_volume(datum, a, mpz_class(static_cast<long>(p)));
          std::vector<int> cumulative{0};  // oracle takes full exponent vectors
          for (int step : a) cumulative.push_back(cumulative.back() + step);
          const mpz_class oracle(
              static_cast<long>(manin::coset_count_oracle(n, p, cumulative)));
          std::ostringstream what;
          what << "hecke volume PGL_" << n << " p=" << p << " a=(";
          for (size_t i = 0; i < a.size(); ++i) what << (i ? "," : "") << a[i];
          what << ") = " << vol;
          report(vol == oracle, what.str());
        }
      }
    }
    for (int n : {2, 3, 4}) {
      const manin::RootDatum datum = manin::build_pgl(n);
      manin::QPolynomial total(0);
      for (manin::Subset A = 0; A < (1u << (n - 1)); ++A)
        total = total + manin::d_a0_count(datum, A);
      report(total == manin::x_count(datum),
             "stratum counts sum to the total count for PGL_" + std::to_string(n));
    }
  } else if (cfg.suite == "heights") {
    const manin::SVector L = manin::svector_from_string("2");
    report(manin::point_stream_count(2, 1) == 24, "24 primitive classes in the unit box");
    for (manin::ArchMetric metric : {manin::ArchMetric::SupNorm, manin::ArchMetric::L2Norm,
                                     manin::ArchMetric::SingularValue}) {
      report(manin::box_bound_holds(L, metric, 1e4, 10, cfg.seed, 100),
             "height exceeds B outside the search box (" + manin::arch_metric_name(metric) + ")");
      const std::vector<double> cps{625.0, 10000.0};
      const manin::CountRun one = manin::count_run(2, L, metric, 1e4, cps, 1);
      const manin::CountRun four = manin::count_run(2, L, metric, 1e4, cps, 4);
      report(one.counts == four.counts,
             "shard-independent counts (" + manin::arch_metric_name(metric) + ")");
    }
  } else if (cfg.suite == "arch") {
    const manin::RootDatum datum = manin::build_pgl(2);
    const std::vector<long double> s{2.0L};
    manin::McBudget budget;
    budget.samples = cfg.mc_samples;
    budget.shards = cfg.shards;
    budget.seed = cfg.seed;
    const manin::ArchValue mc =
        manin::arch_integral_mc(datum, manin::ArchMetric::SingularValue, s, 8.0, budget);
    const manin::QuadValue quad =
        manin::arch_integral_quadrature(datum, manin::ArchMetric::SingularValue, s, cfg.quad_level);
    const long double diff = fabsl(mc.value - quad.value);
    report(quad.supported && !mc.unconverged &&
               diff <= 3.0L * mc.stderr_ + quad.abs_err && diff <= 0.01L * quad.value,
           "Monte Carlo and quadrature agree on the singular-value integral");
  } else {
    throw std::runtime_error("unknown suite " + cfg.suite +
                             " (expected qcounts, heights, or arch)");
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictions and exact counts for rational points of bounded height\n"
               "on compactified PGL_n"};
  app.require_subcommand(1);

  std::string config_path;
  manin::RunConfig flags;  // staging area for command-line overrides
  std::vector<long long> cp_flags;
  bool timing_flag = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "TOML run configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--n", flags.n, "group rank parameter of PGL_n");
    sub->add_option("--L", flags.L, "class coordinates, comma-separated rationals");
    sub->add_option("--metric", flags.metric, "archimedean metric: singular-value | sup | l2");
    sub->add_option("--B-max", flags.B_max, "largest height bound");
    sub->add_option("--p-max", flags.p_max, "Euler product cutoff");
    sub->add_option("--mc-samples", flags.mc_samples, "Monte Carlo sample budget");
    sub->add_option("--shards", flags.shards, "work partition count (never changes results)");
    sub->add_option("--seed", flags.seed, "deterministic RNG seed");
    sub->add_option("--quad-level", flags.quad_level, "quadrature refinement level");
    sub->add_option("--out-json", flags.out_json, "write the JSON report here");
    sub->add_option("--out-csv", flags.out_csv, "write the CSV table here");
    sub->add_flag("--timing", timing_flag, "include wall-clock column in CSV output");
    sub->add_option("--suite", flags.suite, "check suite: qcounts | heights | arch");
    sub->add_option("--checkpoints", cp_flags, "comma-separated height checkpoints")
        ->delimiter(',');
  };

  CLI::App* predict = app.add_subcommand("predict", "compute the leading-constant report");
  CLI::App* count = app.add_subcommand("count", "exact point counts at height checkpoints");
  CLI::App* check = app.add_subcommand("check", "run a quick self-check suite");
  add_common(predict);
  add_common(count);
  add_common(check);

  try {
    app.parse(argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    manin::RunConfig cfg;
    if (sub->count("--config")) cfg = manin::RunConfig::from_toml(read_file(config_path));
    if (sub->count("--n")) cfg.n = flags.n;
    if (sub->count("--L")) cfg.L = flags.L;
    if (sub->count("--metric")) cfg.metric = flags.metric;
    if (sub->count("--B-max")) cfg.B_max = flags.B_max;
    if (sub->count("--p-max")) cfg.p_max = flags.p_max;
    if (sub->count("--mc-samples")) cfg.mc_samples = flags.mc_samples;
    if (sub->count("--shards")) cfg.shards = flags.shards;
    if (sub->count("--seed")) cfg.seed = flags.seed;
    if (sub->count("--quad-level")) cfg.quad_level = flags.quad_level;
    if (sub->count("--out-json")) cfg.out_json = flags.out_json;
    if (sub->count("--out-csv")) cfg.out_csv = flags.out_csv;
    if (sub->count("--timing")) cfg.timing = timing_flag;
    if (sub->count("--suite")) cfg.suite = flags.suite;
    if (sub->count("--checkpoints")) cfg.checkpoints = cp_flags;
    cfg.subcommand = sub->get_name();

    if (cfg.subcommand == "predict") return run_predict(cfg);
    if (cfg.subcommand == "count") return run_count(cfg);
    return run_check(cfg);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
