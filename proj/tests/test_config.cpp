#include "dude/config.hpp"

#include <doctest.h>

using namespace dude;

namespace
{

std::vector<std::string>
Paths(const std::string& text)
{
    try
    {
        ValidateExperimentConfig(text);
    }
    catch (const ConfigError& e)
    {
        std::vector<std::string> paths;
        for (const auto& d : e.Diagnostics())
        {
            paths.push_back(d.path);
        }
        return paths;
    }
    return {};
}

} // namespace

TEST_CASE("an empty config gives the reference defaults")
{
    const auto cfg = ValidateConfig("");
    CHECK(cfg == SimConfig{});
    CHECK(ValidateConfig("{}") == SimConfig{});
    CHECK(cfg.subframes == 10000);
    CHECK(cfg.link.prbCount == 100);
    CHECK(cfg.link.bandwidthHz == 20e6);
    CHECK(cfg.scenario.ues == 330);
    CHECK(cfg.scenario.macroTxPowerDbm == 46.0);
    CHECK(cfg.scenario.smallTxPowerDbm == 30.0);
    CHECK(cfg.pc.pMaxDbm == 20.0);
    CHECK(cfg.scenario.macroAntennaGainDbi == 17.8);
    CHECK(cfg.scenario.smallAntennaGainDbi == 4.0);
    CHECK(cfg.scenario.ueAntennaGainDbi == 0.0);
    CHECK(cfg.flow.meanFlowBits == 1e6);
    CHECK(cfg.flow.meanWaitSubframes == 100.0);
}

TEST_CASE("out-of-range alpha names the field")
{
    CHECK(Paths(R"({"pc": {"alpha": 1.5}})") == std::vector<std::string>{"pc.alpha"});
}

TEST_CASE("unknown keys are rejected with their path")
{
    CHECK(Paths(R"({"subframe": 10})") == std::vector<std::string>{"subframe"});
    CHECK(Paths(R"({"scenario": {"propagation": {"sigma": 3}}})") ==
          std::vector<std::string>{"scenario.propagation.sigma"});
}

TEST_CASE("type errors and several problems at once")
{
    const auto p = Paths(R"({"subframes": "many", "traffic": {"mean_wait_ms": -1}})");
    CHECK(p.size() == 2);
}

TEST_CASE("unknown policy is a config error")
{
    CHECK_THROWS_AS(ValidateExperimentConfig(R"({"experiment": {"policies": ["best"]}})"),
                    ConfigError);
    CHECK_THROWS_AS(ValidateExperimentConfig(R"({"association_policy": "best"})"), ConfigError);
}

TEST_CASE("malformed JSON")
{
    CHECK_THROWS_AS(ValidateConfig("{"), ConfigError);
    CHECK_THROWS_AS(ValidateConfig("[1]"), ConfigError);
}

TEST_CASE("a preset is applied before explicit fields")
{
    const auto cfg = ValidateConfig(R"({"pc": {"preset": "setting2", "p0_dbm": -75}})");
    CHECK(cfg.pc.alpha == 0.6);
    CHECK(cfg.pc.p0Dbm == -75.0);
    CHECK(ValidateConfig(R"({"pc": {"preset": "interference_aware"}})").pc ==
          PowerControlConfig::InterferenceAware());
}

TEST_CASE("metrics options")
{
    const auto spec = ValidateExperimentConfig(
        R"({"metrics": {"throughput": "long_run", "percentile": "linear"}})");
    CHECK(spec.metrics.throughput == ThroughputStatistic::LongRun);
    CHECK(spec.metrics.percentile == PercentileRule::Linear);
    CHECK(Paths(R"({"metrics": {"throughput": "average"}})") ==
          std::vector<std::string>{"metrics.throughput"});
}

TEST_CASE("the effective config text parses back to the same spec")
{
    const auto spec = ValidateExperimentConfig(R"({
        "subframes": 2000, "seed": 9, "fading_enabled": true,
        "pc": {"preset": "setting2"},
        "backhaul": {"ideal": false, "small_bps": 5e6, "criterion": "residual"},
        "scenario": {"ues": 100, "propagation": {"small_pl0_db": 36}},
        "metrics": {"percentile": "linear"},
        "experiment": {"name": "backhaul_sweep", "seeds": [4, 5],
                       "small_backhaul_mbps": [2, 8], "workers": 3}
    })");
    const auto text = EffectiveConfigText(spec);
    CHECK(text.find('\n') == std::string::npos);
    auto back = ValidateExperimentConfig(text);
    back.workers = spec.workers;
    CHECK(back == spec);
    CHECK(EffectiveConfigText(back) == text);
}

TEST_CASE("sweep values must increase")
{
    CHECK_THROWS_AS(ValidateExperimentConfig(
                        R"({"experiment": {"name": "backhaul_sweep", "small_backhaul_mbps": [5, 2]}})"),
                    ConfigError);
}
