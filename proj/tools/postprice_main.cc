// Copyright 2026 The Postprice Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// postprice: build mechanisms, dump price tables, simulate markets, run the
// experiment sweeps and the self-check suite.
//
//   postprice solve --lambda 10 --T 12 --h 2.8 --discount linear
//   postprice simulate --lambda 5 --T 10 --h 10 --mechanism mpc --nsub 4
//   postprice experiment result1 --format csv --out result1.csv

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "postprice/analytics.h"
#include "postprice/check.h"
#include "postprice/experiments.h"
#include "postprice/mechanisms.h"
#include "postprice/simulator.h"
#include "postprice/valuation.h"

namespace {

using nlohmann::json;
using namespace postprice;

struct Common {
  std::string format = "csv";
  std::string out;
  std::optional<uint64_t> seed;
  int threads = 1;

  uint64_t ResolvedSeed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("POSTPRICE_SEED")) {
      return std::stoull(env);
    }
    return 1;
  }
};

struct Market {
  double lambda = 0.0;
  double horizon = 0.0;
  double h = 0.0;
  std::string discount = "linear";

  MarketParams Params() const { return {lambda, horizon, h}; }
  DiscountFunction Discount() const {
    switch (DiscountKindFromString(discount)) {
      case DiscountKind::kLinear:
        return MakeLinearDiscount(horizon);
      case DiscountKind::kConstantOne:
        return MakeConstantDiscount(horizon);
      default:
        throw std::invalid_argument("discount must be linear or constant_one");
    }
  }
  json ToJson() const {
    return {{"lambda", lambda}, {"T", horizon}, {"h", h},
            {"discount", discount}};
  }
};

struct MechanismChoice {
  std::string name = "mc";
  std::optional<int> nsub;
  std::optional<double> delta;
  double v = 1.0;

  json ToJson() const {
    json out = {{"mechanism", name}, {"nsub", nullptr}, {"delta", nullptr}};
    if (nsub) out["nsub"] = *nsub;
    if (delta) out["delta"] = *delta;
    if (name == "benchmark") out["v"] = v;
    return out;
  }
};

void AddCommon(CLI::App* app, Common* common) {
  app->add_option("--format", common->format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", common->out, "Output file (default stdout)");
  app->add_option("--seed", common->seed,
                  "Master seed (falls back to POSTPRICE_SEED)");
  app->add_option("--threads", common->threads,
                  "Worker cap; 0 uses every core")
      ->check(CLI::NonNegativeNumber);
}

void AddMarket(CLI::App* app, Market* market) {
  app->add_option("--lambda", market->lambda, "Arrival rate")->required();
  app->add_option("--T", market->horizon, "Horizon")->required();
  app->add_option("--h", market->h, "Valuation ratio v_max / v_min")
      ->required();
  app->add_option("--discount", market->discount, "Discount function")
      ->check(CLI::IsMember({"linear", "constant_one"}));
}

void AddMechanism(CLI::App* app, MechanismChoice* choice) {
  app->add_option("--mechanism", choice->name, "Pricing mechanism")
      ->check(CLI::IsMember({"mc", "mpc", "esoes_ss", "benchmark"}));
  app->add_option("--nsub", choice->nsub, "mpc sub-intervals of [0, t0]")
      ->check(CLI::PositiveNumber);
  app->add_option("--delta", choice->delta, "Geometric price step");
  app->add_option("--v", choice->v, "Benchmark valuation");
}

PricingStrategy BuildMc(const Market& market) {
  if (market.discount == "linear") return BuildMcLin(market.Params());
  return BuildMcGeneral(market.Params(), market.Discount());
}

PricingStrategy BuildChoice(const Market& market,
                            const MechanismChoice& choice) {
  const MarketParams params = market.Params();
  const DiscountFunction discount = market.Discount();
  if (choice.name == "mc") return BuildMc(market);
  if (choice.name == "benchmark") {
    return BuildBenchmarkIv(params, discount, choice.v);
  }
  if (choice.name == "esoes_ss") {
    return BuildEsoesSs(params, choice.delta.value_or(2.0), discount);
  }
  const double t0 = BuildMc(market).switch_time();
  if (choice.nsub) return MpcFromNsub(params, discount, *choice.nsub, t0);
  return BuildMpc(params, discount, choice.delta.value_or(2.0), t0);
}

std::string FormatNumber(const json& value) {
  if (value.is_null()) return "";
  if (value.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value.get<double>());
    return buf;
  }
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

// A header preamble of '#' config lines, then one header row and data rows
// taken from the keys of the first record.
void WriteRecordsCsv(std::ostream& out, const json& config,
                     const json& records) {
  out << "# config=" << config.dump() << '\n';
  if (records.empty()) return;
  bool first = true;
  for (const auto& [key, value] : records.front().items()) {
    out << (first ? "" : ",") << key;
    first = false;
  }
  out << '\n';
  for (const json& record : records) {
    first = true;
    for (const auto& [key, value] : record.items()) {
      out << (first ? "" : ",") << FormatNumber(value);
      first = false;
    }
    out << '\n';
  }
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// nlohmann keeps object keys sorted; the CSV column order follows.
void Emit(const Common& common, const json& config, const json& records) {
  Output output(common.out);
  if (common.format == "json") {
    output.stream() << json{{"config", config}, {"rows", records}}.dump(2)
                    << '\n';
  } else {
    WriteRecordsCsv(output.stream(), config, records);
  }
}

int Solve(const Common& common, const Market& market) {
  const MarketParams params = market.Params();
  const PricingStrategy mc = BuildMc(market);
  const McMeta& meta = mc.mc_meta();
  const RatioReport ratio = CompetitiveRatioMc(meta, params);
  json row = {{"t0", meta.switch_time},
              {"k", meta.unit_revenue},
              {"a", meta.front_coefficient},
              {"rho", ratio.rho},
              {"k_star", ratio.benchmark_unit_revenue},
              {"t0_upper_bound", nullptr},
              {"residual", nullptr}};
  if (market.discount == "linear") {
    row["t0_upper_bound"] = T0UpperBound(params);
    if (params.value_ratio > 1.0) {
      row["residual"] = McLinResidual(params, meta.switch_time);
    }
  }
  json config = market.ToJson();
  config["command"] = "solve";
  config["seed"] = common.ResolvedSeed();
  Emit(common, config, json::array({row}));
  return 0;
}

int PriceTable(const Common& common, const Market& market,
               const MechanismChoice& choice, int grid) {
  if (choice.name == "esoes_ss") {
    throw std::invalid_argument("esoes_ss prices follow the arrival index");
  }
  const PricingStrategy strategy = BuildChoice(market, choice);
  json rows = json::array();
  for (int i = 0; i < grid; ++i) {
    const double t = market.horizon * i / (grid - 1);
    rows.push_back({{"t", t}, {"price", strategy.PriceAt(t)}});
  }
  json config = market.ToJson();
  config.update(choice.ToJson());
  config["command"] = "price-table";
  config["grid"] = grid;
  config["seed"] = common.ResolvedSeed();
  config["metadata"] = strategy.MetadataJson();
  Emit(common, config, rows);
  return 0;
}

int Simulate(const Common& common, const Market& market,
             const MechanismChoice& choice, const std::string& valuation,
             int runs, const std::string& per_run_path) {
  const PricingStrategy strategy = BuildChoice(market, choice);
  const double h = market.h;
  ValuationDistribution dist =
      valuation == "uniform"  ? ValuationDistribution::Uniform(h)
      : valuation == "point"  ? ValuationDistribution::Point(h, choice.v)
                              : ValuationDistribution::DefaultTruncatedNormal(h);
  const uint64_t seed = common.ResolvedSeed();
  const McReport report =
      MonteCarlo(strategy, dist, runs, seed,
                 {common.threads, !per_run_path.empty()});
  if (!per_run_path.empty()) {
    std::ofstream per_run(per_run_path, std::ios::binary);
    if (!per_run) throw std::runtime_error("cannot open " + per_run_path);
    report.WritePerRunCsv(per_run);
  }
  json config = market.ToJson();
  config.update(choice.ToJson());
  config["command"] = "simulate";
  config["valuation"] = dist.ToJson();
  config["seed"] = seed;
  Emit(common, config, json::array({report.ToJson()}));
  return 0;
}

int Experiment(const Common& common, const std::string& id, bool full,
               std::optional<int> runs, std::optional<double> h) {
  ExperimentSpec spec = ExperimentSpec::Defaults(id, full);
  spec.seed = common.ResolvedSeed();
  spec.threads = common.threads;
  if (runs) spec.n_runs = *runs;
  if (h) spec.h = *h;
  const ExperimentTable table = RunExperiment(spec);
  Output output(common.out);
  if (common.format == "json") {
    output.stream() << table.ToJson().dump(2) << '\n';
  } else {
    table.WriteCsv(output.stream());
  }
  return 0;
}

int Check(const Common& common, bool inject) {
  const CheckReport report = RunInvariantChecks({inject});
  Output output(common.out);
  if (common.format == "json") {
    output.stream() << report.ToJson().dump(2) << '\n';
  } else {
    report.Print(output.stream());
  }
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posted-price mechanisms under Poisson arrivals"};
  // --h is the valuation ratio, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Common common;
  Market market;
  MechanismChoice choice;

  CLI::App* solve = app.add_subcommand("solve", "Build the constant-ratio mechanism");
  AddCommon(solve, &common);
  AddMarket(solve, &market);

  int grid = 201;
  CLI::App* table = app.add_subcommand("price-table", "Dump p(t) on a grid");
  AddCommon(table, &common);
  AddMarket(table, &market);
  AddMechanism(table, &choice);
  table->add_option("--grid", grid, "Grid points")->check(CLI::Range(2, 10000000));

  std::string valuation = "uniform";
  int runs = 1000;
  std::string per_run_path;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo revenue");
  AddCommon(simulate, &common);
  AddMarket(simulate, &market);
  AddMechanism(simulate, &choice);
  simulate->add_option("--valuation", valuation, "Valuation distribution")
      ->check(CLI::IsMember({"uniform", "point", "truncnormal"}));
  simulate->add_option("--runs", runs, "Monte Carlo runs")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--per-run", per_run_path, "Per-run revenue CSV");

  std::string experiment_id;
  bool full = false;
  std::optional<int> experiment_runs;
  std::optional<double> experiment_h;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a sweep");
  AddCommon(experiment, &common);
  experiment->add_option("id", experiment_id, "result1..result4")->required();
  experiment->add_flag("--full", full, "Full lambda and T grids");
  experiment->add_option("--runs", experiment_runs, "Monte Carlo runs per cell")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--h", experiment_h, "Valuation ratio");

  bool inject = false;
  CLI::App* check = app.add_subcommand("check", "Run the invariant suite");
  AddCommon(check, &common);
  check->add_flag("--inject-perturbation", inject,
                  "Add a falling-then-rising price to the monotonicity check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return Solve(common, market);
    if (*table) return PriceTable(common, market, choice, grid);
    if (*simulate) {
      return Simulate(common, market, choice, valuation, runs, per_run_path);
    }
    if (*experiment) {
      return Experiment(common, experiment_id, full, experiment_runs,
                        experiment_h);
    }
    if (*check) return Check(common, inject);
  } catch (const std::exception& err) {
    std::cerr << "postprice: " << err.what() << '\n';
    return 2;
  }
  return 1;
}
