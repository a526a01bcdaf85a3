#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "hetcell/config.hpp"
#include "hetcell/report.hpp"
#include "hetcell/sweep.hpp"
#include "hetcell/validate.hpp"

using namespace hetcell;

namespace {

const char* kTwoTier = R"({
  "experiment_id": "two_tier",
  "window": {"side_length": 6, "resolution": 60},
  "tiers": [
    {"power_dbm": 53, "density": 1, "path_loss_exponent": 3.5,
     "fading": {"kind": "lognormal", "sigma": 2}},
    {"power_dbm": 33, "density": 5, "path_loss_exponent": 3.5,
     "fading": {"kind": "exponential", "scale": 1.5}}
  ],
  "strategy": "max_sir",
  "gain_mode": "per_evaluation_point",
  "replications": 4,
  "master_seed": 99,
  "output": {"dir": "results", "raw_cells": true},
  "sweep": {"parameter": "density", "tier": 2, "values": [1, 2]}
})";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, ParsesEveryField) {
  const SimulationConfig c = parse_config(kTwoTier);
  EXPECT_EQ(c.experiment_id, "two_tier");
  EXPECT_DOUBLE_EQ(c.side_length, 6.0);
  EXPECT_EQ(c.resolution, 60u);
  ASSERT_EQ(c.tiers.size(), 2u);
  EXPECT_EQ(c.tiers[0].fading, FadingModel::lognormal(2.0));
  EXPECT_EQ(c.tiers[1].fading, FadingModel::exponential(1.5));
  EXPECT_EQ(c.strategy, AssociationStrategy::kMaxSIR);
  EXPECT_EQ(c.gain_mode, GainFieldMode::kPerEvaluationPoint);
  EXPECT_EQ(c.replications, 4u);
  EXPECT_EQ(c.master_seed, 99u);
  EXPECT_TRUE(c.output.raw_cells);
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_EQ(c.sweep->tier, 1u);
}

TEST(Config, PowersAreConvertedFromDbm) {
  const auto tiers = linear_tiers(parse_config(kTwoTier));
  EXPECT_NEAR(tiers[0].power, 199.52623149688796, 1e-10);
  EXPECT_NEAR(tiers[1].power, 1.9952623149688795, 1e-13);
}

TEST(Config, RoundTripIsIdentity) {
  const SimulationConfig c = parse_config(kTwoTier);
  const SimulationConfig back = parse_config(dump_config(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(dump_config(back), dump_config(c));
}

TEST(Config, HashChangesWithContent) {
  SimulationConfig c = parse_config(kTwoTier);
  const auto h = config_hash(c);
  c.tiers[1].density = 5.5;
  EXPECT_NE(config_hash(c), h);
  EXPECT_NE(provenance_line(c).find("seed=99"), std::string::npos);
}

TEST(Config, ErrorsCarryLineNumbers) {
  std::string bad_density = kTwoTier;
  bad_density.replace(bad_density.find("\"density\": 5"), 12, "\"density\": -5");
  EXPECT_EQ(error_line(bad_density), 7);

  std::string bad_kind = kTwoTier;
  bad_kind.replace(bad_kind.find("\"exponential\""), 13, "\"rayleigh\"");
  EXPECT_EQ(error_line(bad_kind), 8);

  std::string bad_strategy = kTwoTier;
  bad_strategy.replace(bad_strategy.find("\"max_sir\""), 9, "\"best\"");
  EXPECT_EQ(error_line(bad_strategy), 10);

  std::string malformed = kTwoTier;
  malformed.replace(malformed.find("\"replications\": 4,"), 18, "\"replications\": 4,,");
  EXPECT_EQ(error_line(malformed), 12);

  std::string missing = kTwoTier;
  missing.replace(missing.find("\"path_loss_exponent\": 3.5,\n     \"fading\": {\"kind\": \"exp"), 27, "");
  EXPECT_EQ(error_line(missing), 7);
}

TEST(Config, EmptyTierListIsRejected) {
  try {
    parse_config(R"({"window": {"side_length": 5, "resolution": 10},
  "tiers": []})");
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.path(), "/tiers");
  }
}

TEST(Config, SetupCarriesSettings) {
  const ExperimentSetup s = to_setup(parse_config(kTwoTier));
  EXPECT_EQ(s.window.resolution(), 60u);
  EXPECT_EQ(s.strategy, AssociationStrategy::kMaxSIR);
  EXPECT_TRUE(s.keep_raw_cells);
  EXPECT_EQ(s.master_seed, 99u);
}

TEST(Report, OutputsStartWithProvenanceAndAreDeterministic) {
  SimulationConfig c = parse_config(kTwoTier);
  c.gain_mode = GainFieldMode::kPerAP;
  auto render = [&c] {
    const AreaStatistics stats = run_experiment(c);
    std::ostringstream summary, cells;
    write_summary_csv(summary, c, stats);
    write_cells_csv(cells, c, stats);
    return summary.str() + cells.str();
  };
  const std::string first = render();
  EXPECT_EQ(first, render());
  EXPECT_EQ(first.rfind(provenance_line(c) + "\n", 0), 0u);
  EXPECT_NE(first.find("two_tier,1,montecarlo,"), std::string::npos);
  EXPECT_NE(first.find("two_tier,2,analytic,"), std::string::npos);
  EXPECT_NE(first.find("replication,ap_index,tier,area,contains_origin"), std::string::npos);
}

TEST(Report, PredictionCsvHasBothColumns) {
  SimulationConfig c = parse_config(kTwoTier);
  std::ostringstream out;
  write_prediction_csv(out, c, predict(linear_tiers(c)));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, provenance_line(c));
  std::getline(in, line);
  EXPECT_EQ(line.rfind("experiment_id,tier,transformed_density", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Sweep, AppliesParameterAndProducesLongFormat) {
  const SimulationConfig c = parse_config(kTwoTier);
  SweepSpec sigma{SweepParameter::kSigma, 0, {1.0}};
  EXPECT_EQ(apply_sweep_value(c, sigma, 3.0).tiers[0].fading, FadingModel::lognormal(3.0));
  SweepSpec bad_sigma{SweepParameter::kSigma, 1, {1.0}};
  EXPECT_THROW(apply_sweep_value(c, bad_sigma, 3.0), InvalidArgument);
  SweepSpec exponent{SweepParameter::kPathLossExponent, 1, {3.0}};
  EXPECT_DOUBLE_EQ(apply_sweep_value(c, exponent, 3.0).tiers[1].path_loss_exponent, 3.0);
  EXPECT_THROW(apply_sweep_value(c, exponent, 1.5), InvalidArgument);

  const auto rows = run_sweep(c, false);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_GT(rows[0].mean_area, rows[2].mean_area);  // tier-1 area shrinks as tier-2 density grows
  std::ostringstream out;
  write_sweep_csv(out, c, rows);
  EXPECT_NE(out.str().find("two_tier,density,2,2,1,analytic,"), std::string::npos);
}

TEST(Sweep, UnknownParameterIsAConfigError) {
  std::string text = kTwoTier;
  text.replace(text.find("\"parameter\": \"density\""), 23, "\"parameter\": \"power\"");
  EXPECT_THROW(parse_config(text), ConfigError);
}

TEST(Validate, SmallConfigSkipsDataHungryChecks) {
  SimulationConfig c = parse_config(kTwoTier);
  c.gain_mode = GainFieldMode::kPerAP;
  const ValidationReport r = run_validation(c);
  EXPECT_GT(r.count(CheckStatus::kSkip), 0u);
  const ValidationReport neg = run_validation(c, true);
  EXPECT_FALSE(neg.passed());
}
