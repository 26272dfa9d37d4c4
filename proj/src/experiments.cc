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

#include "postprice/experiments.h"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "postprice/analytics.h"
#include "postprice/mechanisms.h"
#include "postprice/random.h"
#include "postprice/simulator.h"
#include "postprice/valuation.h"

namespace postprice {
namespace {

const char* const kIds[] = {"result1", "result2", "result3", "result4"};

std::string Num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

DiscountFunction DiscountFor(const ExperimentSpec& spec, double horizon) {
  return spec.discount_kind == DiscountKind::kLinear
             ? MakeLinearDiscount(horizon)
             : MakeConstantDiscount(horizon);
}

ValuationDistribution DistributionFor(const ExperimentSpec& spec) {
  if (spec.id == "result3") return ValuationDistribution::DefaultTruncatedNormal(spec.h);
  return ValuationDistribution::Uniform(spec.h);
}

PricingStrategy BuildMc(const MarketParams& params,
                        const DiscountFunction& discount) {
  if (discount.kind() == DiscountKind::kLinear) return BuildMcLin(params);
  return BuildMcGeneral(params, discount);
}

// Cells for one (lambda, T): mc, mpc for each nsub, then esoes_ss when the
// market is undiscounted.
void AppendMarketCells(const ExperimentSpec& spec, double lambda,
                       double horizon, ExperimentTable* table) {
  const MarketParams params{lambda, horizon, spec.h};
  const DiscountFunction discount = DiscountFor(spec, horizon);
  const ValuationDistribution dist = DistributionFor(spec);
  const PricingStrategy mc = BuildMc(params, discount);
  const McOptions options{spec.threads, false};

  auto add = [&](const PricingStrategy& strategy, const std::string& name,
                 std::optional<int> nsub) {
    const uint64_t seed = CellSeed(spec, lambda, horizon, name, nsub.value_or(0));
    const McReport report = MonteCarlo(strategy, dist, spec.n_runs, seed, options);
    ExperimentRow row;
    row.experiment_id = spec.id;
    row.lambda = lambda;
    row.horizon = horizon;
    row.h = spec.h;
    row.mechanism = name;
    row.nsub = nsub;
    row.n_runs = spec.n_runs;
    row.seed = seed;
    row.mean_revenue = report.mean_revenue;
    row.normalized_mean = report.normalized_mean;
    row.std_error = report.std_error;
    table->rows.push_back(row);
  };

  add(mc, "mc", std::nullopt);
  for (int nsub : spec.nsub_list) {
    add(MpcFromNsub(params, discount, nsub, mc.switch_time()), "mpc", nsub);
  }
  if (spec.discount_kind == DiscountKind::kConstantOne) {
    add(BuildEsoesSs(params, 2.0, discount), "esoes_ss", std::nullopt);
  }
}

ExperimentTable MonteCarloSweep(const ExperimentSpec& spec) {
  spec.Validate();
  ExperimentTable table;
  table.experiment_id = spec.id;
  table.config = spec.ToJson();
  for (double horizon : spec.horizon_grid) {
    for (double lambda : spec.lambda_grid) {
      AppendMarketCells(spec, lambda, horizon, &table);
    }
  }
  return table;
}

void RequireId(const ExperimentSpec& spec, const std::string& id) {
  if (spec.id != id) {
    throw std::invalid_argument("spec id " + spec.id + " passed to " + id);
  }
}

}  // namespace

ExperimentSpec ExperimentSpec::Defaults(const std::string& id, bool full) {
  bool known = false;
  for (const char* k : kIds) known = known || id == k;
  if (!known) throw std::invalid_argument("unknown experiment id: " + id);
  ExperimentSpec spec;
  spec.id = id;
  if (full) {
    for (int l = 1; l <= 20; ++l) spec.lambda_grid.push_back(l);
    spec.horizon_grid = {10, 20, 50, 100};
  } else {
    spec.lambda_grid = {1, 5, 10, 15, 20};
    spec.horizon_grid = {10, 50};
  }
  if (id != "result2") spec.nsub_list = {2, 4, 13, 232};
  spec.discount_kind =
      id == "result4" ? DiscountKind::kLinear : DiscountKind::kConstantOne;
  return spec;
}

void ExperimentSpec::Validate() const {
  bool known = false;
  for (const char* k : kIds) known = known || id == k;
  if (!known) throw std::invalid_argument("unknown experiment id: " + id);
  if (lambda_grid.empty() || horizon_grid.empty()) {
    throw std::invalid_argument(id + ": lambda and T grids must be non-empty");
  }
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument(id + ": lambda must be positive, got " +
                                  Num(lambda));
    }
  }
  for (double horizon : horizon_grid) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw std::invalid_argument(id + ": T must be positive, got " +
                                  Num(horizon));
    }
  }
  if (!(h > 1.0)) throw std::invalid_argument(id + ": h must exceed 1");
  if (n_runs < 1) throw std::invalid_argument(id + ": n_runs must be >= 1");
  for (int nsub : nsub_list) {
    if (nsub < 1) throw std::invalid_argument(id + ": nsub must be >= 1");
  }
  const DiscountKind wanted =
      id == "result4" ? DiscountKind::kLinear : DiscountKind::kConstantOne;
  if (discount_kind != wanted) {
    throw std::invalid_argument(id + " runs with the " + ToString(wanted) +
                                " discount");
  }
}

nlohmann::json ExperimentSpec::ToJson() const {
  return {{"experiment_id", id},   {"lambda", lambda_grid},
          {"T", horizon_grid},     {"h", h},
          {"n_runs", n_runs},      {"nsub", nsub_list},
          {"seed", seed},          {"discount", ToString(discount_kind)}};
}

nlohmann::json ExperimentRow::ToJson() const {
  nlohmann::json out = {{"experiment_id", experiment_id},
                        {"lambda", lambda},
                        {"T", horizon},
                        {"h", h},
                        {"mechanism", mechanism},
                        {"nsub", nullptr},
                        {"n_runs", n_runs},
                        {"seed", seed},
                        {"mean_revenue", mean_revenue},
                        {"normalized_mean", normalized_mean},
                        {"std_error", std_error}};
  if (nsub) out["nsub"] = *nsub;
  if (argmax_v) out["argmax_v"] = *argmax_v;
  return out;
}

void ExperimentTable::WriteCsv(std::ostream& out) const {
  out << "# experiment_id=" << experiment_id << '\n';
  out << "# config=" << config.dump() << '\n';
  for (const std::string& note : notes) out << "# note: " << note << '\n';
  const bool has_argmax = experiment_id == "result2";
  out << "experiment_id,lambda,T,h,mechanism,nsub,n_runs,seed,mean_revenue,"
         "normalized_mean,std_error";
  if (has_argmax) out << ",argmax_v";
  out << '\n';
  for (const ExperimentRow& row : rows) {
    out << row.experiment_id << ',' << Num(row.lambda) << ','
        << Num(row.horizon) << ',' << Num(row.h) << ',' << row.mechanism
        << ',';
    if (row.nsub) out << *row.nsub;
    out << ',' << row.n_runs << ',' << row.seed << ','
        << Num(row.mean_revenue) << ',' << Num(row.normalized_mean) << ','
        << Num(row.std_error);
    if (has_argmax) {
      out << ',';
      if (row.argmax_v) out << Num(*row.argmax_v);
    }
    out << '\n';
  }
}

nlohmann::json ExperimentTable::ToJson() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ExperimentRow& row : rows) rows_json.push_back(row.ToJson());
  return {{"experiment_id", experiment_id},
          {"config", config},
          {"notes", notes},
          {"rows", rows_json}};
}

const ExperimentRow* ExperimentTable::Find(double lambda, double horizon,
                                           const std::string& mechanism,
                                           std::optional<int> nsub) const {
  for (const ExperimentRow& row : rows) {
    if (row.lambda == lambda && row.horizon == horizon &&
        row.mechanism == mechanism && row.nsub == nsub) {
      return &row;
    }
  }
  return nullptr;
}

uint64_t CellSeed(const ExperimentSpec& spec, double lambda, double horizon,
                  const std::string& mechanism, int nsub) {
  return DeriveSeed(spec.seed,
                    {HashLabel(spec.id), DoubleBits(lambda),
                     DoubleBits(horizon), HashLabel(mechanism),
                     static_cast<uint64_t>(nsub)});
}

ExperimentRow RunCell(const ExperimentSpec& spec, double lambda,
                      double horizon, const std::string& mechanism,
                      int nsub) {
  if (spec.id == "result2") {
    throw std::invalid_argument("result2 cells are exact, not Monte Carlo");
  }
  ExperimentSpec one = spec;
  one.lambda_grid = {lambda};
  one.horizon_grid = {horizon};
  one.nsub_list = mechanism == "mpc" ? std::vector<int>{nsub}
                                     : std::vector<int>{};
  const ExperimentTable table = MonteCarloSweep(one);
  const std::optional<int> key =
      mechanism == "mpc" ? std::optional<int>(nsub) : std::nullopt;
  const ExperimentRow* row = table.Find(lambda, horizon, mechanism, key);
  if (row == nullptr) {
    throw std::invalid_argument("no " + mechanism + " cell in " + spec.id);
  }
  return *row;
}

ExperimentTable RunResult1(const ExperimentSpec& spec) {
  RequireId(spec, "result1");
  return MonteCarloSweep(spec);
}

ExperimentTable RunResult3(const ExperimentSpec& spec) {
  RequireId(spec, "result3");
  return MonteCarloSweep(spec);
}

ExperimentTable RunResult4(const ExperimentSpec& spec) {
  RequireId(spec, "result4");
  ExperimentTable table = MonteCarloSweep(spec);
  for (double horizon : spec.horizon_grid) {
    for (double lambda : spec.lambda_grid) {
      const ExperimentRow* mc = table.Find(lambda, horizon, "mc");
      for (int nsub : spec.nsub_list) {
        const ExperimentRow* mpc = table.Find(lambda, horizon, "mpc", nsub);
        const double band = 2.0 * std::hypot(mc->std_error, mpc->std_error);
        if (mpc->mean_revenue - mc->mean_revenue > band) {
          table.notes.push_back("mpc nsub=" + std::to_string(nsub) +
                                " beats mc by more than 2 SE at lambda=" +
                                Num(lambda) + " T=" + Num(horizon));
        }
      }
    }
  }
  return table;
}

ExperimentTable RunResult2(const ExperimentSpec& spec) {
  RequireId(spec, "result2");
  spec.Validate();
  ExperimentTable table;
  table.experiment_id = spec.id;
  table.config = spec.ToJson();
  const std::vector<double> grid = ValuationGrid(spec.h, 0.5);
  for (double horizon : spec.horizon_grid) {
    const DiscountFunction discount = MakeConstantDiscount(horizon);
    for (double lambda : spec.lambda_grid) {
      const MarketParams params{lambda, horizon, spec.h};
      const RevenueCurve mc = IvRevenueCurve(BuildMcGeneral(params, discount), grid);
      const RevenueCurve esoes =
          IvRevenueCurve(BuildEsoesSs(params, 2.0, discount), grid);
      const LossIndices loss = ComputeLossIndices(mc, esoes, spec.h);
      auto add = [&](const std::string& name, double index, double argmax) {
        ExperimentRow row;
        row.experiment_id = spec.id;
        row.lambda = lambda;
        row.horizon = horizon;
        row.h = spec.h;
        row.mechanism = name;
        row.n_runs = 0;
        row.seed = spec.seed;
        row.mean_revenue = index * spec.h;
        row.normalized_mean = index;
        row.std_error = 0.0;
        row.argmax_v = argmax;
        table.rows.push_back(row);
      };
      // mc minus esoes_ss, then the reverse.
      add("loss_esoes_ss_vs_mc", loss.max_loss_b_vs_a, loss.argmax_b_vs_a);
      add("loss_mc_vs_esoes_ss", loss.max_loss_a_vs_b, loss.argmax_a_vs_b);
    }
  }
  table.notes.push_back(
      "result2 rows hold max loss indices from exact revenues; mean_revenue "
      "is the raw difference and normalized_mean the difference over h");
  return table;
}

ExperimentTable RunExperiment(const ExperimentSpec& spec) {
  if (spec.id == "result1") return RunResult1(spec);
  if (spec.id == "result2") return RunResult2(spec);
  if (spec.id == "result3") return RunResult3(spec);
  if (spec.id == "result4") return RunResult4(spec);
  throw std::invalid_argument("unknown experiment id: " + spec.id);
}

}  // namespace postprice
