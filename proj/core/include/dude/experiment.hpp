#pragma once

#include "dude/deployment.hpp"
#include "dude/engine.hpp"
#include "dude/metrics.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dude
{

enum class ExperimentKind : std::uint8_t
{
    Single,                 // the base config as is, once per seed
    PolicyComparison,       // every policy under the base power control
    PowerControlComparison, // every policy under every listed power setting
    BackhaulSweep,          // every policy at every small-cell backhaul value
};

std::string_view ToString(ExperimentKind kind);
std::optional<ExperimentKind> ParseExperimentKind(std::string_view name);

/// Named power-control presets: setting1, setting2, interference_aware.
std::optional<PowerControlConfig> PowerControlPreset(std::string_view name);

struct ExperimentSpec
{
    ExperimentKind kind = ExperimentKind::Single;
    SimConfig base;
    std::vector<AssociationPolicy> policies{AssociationPolicy::DlRsrp, AssociationPolicy::Dude,
                                            AssociationPolicy::DudeLoad};
    std::vector<std::string> powerSettings{"setting1", "setting2", "interference_aware"};
    std::vector<double> smallBackhaulMbps{1, 2, 5, 10, 20, 50, 100};
    double macroBackhaulMbps = 100.0;
    MetricsOptions metrics;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    unsigned workers = 1;

    /// Throws std::invalid_argument naming the offending field.
    void Validate() const;

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// One engine invocation of an experiment, with the labels it is reported under.
struct RunPoint
{
    AssociationPolicy policy = AssociationPolicy::DudeLoad;
    std::string powerSetting; // preset name, or "custom"
    std::optional<double> smallBackhaulMbps;
    std::uint64_t seed = 0;
    SimConfig config;
};

/// Runs in output order: sweep point, then power setting, then policy, then seed.
std::vector<RunPoint> ExpandRuns(const ExperimentSpec& spec);

struct RunResult
{
    RunPoint point;
    SummaryStats stats;
    std::vector<FlowRecord> flows;
    std::vector<std::pair<std::uint32_t, double>> sinrVariances;
    std::vector<double> meanActivePerCell;
    std::int64_t warmupSubframes = 0;
    std::vector<std::string> warnings;
};

struct ExperimentResult
{
    ExperimentSpec spec;
    std::vector<RunResult> runs; // same order as ExpandRuns
};

/**
 * Executes every run of the experiment on up to spec.workers threads. Each
 * seed generates its own scenario from base.scenario unless `scenario` is
 * given, in which case all runs share it. `progress`, if set, is called from
 * the calling thread after each run completes, in completion order.
 */
ExperimentResult RunExperiment(const ExperimentSpec& spec,
                               const std::optional<Scenario>& scenario = std::nullopt,
                               const std::function<void(std::size_t done, std::size_t total)>&
                                   progress = {});

/// Writes runs.csv, aggregate.csv, flows.csv, sinr_variance.csv, summary.json and, for sweeps, sweep.csv.
void WriteOutputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// Human-readable table of the aggregates in a summary.json document.
std::string RenderReport(std::string_view summaryJson);

/// Median of an unsorted sample (mean of the two middle values for even sizes).
double Median(std::vector<double> values);

} // namespace dude
