#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dude
{

struct FlowRecord
{
    std::uint32_t ue = 0;
    std::uint32_t cell = 0;
    std::uint64_t sizeBits = 0;
    std::uint64_t servedBits = 0;
    std::int64_t start = 0; // arrival subframe
    std::int64_t end = -1;  // one past the completing subframe; -1 while incomplete

    bool Completed() const
    {
        return end >= 0;
    }
};

/// One scheduled transmission; written only for subframes in which the UE transmits.
struct UeSubframeRecord
{
    std::uint32_t subframe = 0;
    std::uint16_t ue = 0;
    std::uint16_t cell = 0;
    std::uint32_t servedBits = 0;
    float sinrDb = 0.0f;
    std::uint16_t prbs = 0;
};

struct CellSubframeRecord
{
    std::uint32_t subframe = 0;
    std::uint16_t cell = 0;
    std::uint16_t activeFlows = 0;
    float expectedFlows = 0.0f;
    std::uint32_t backhaulBits = 0;
    std::uint16_t prbsUsed = 0;
};

struct DecisionRecord
{
    std::uint32_t subframe = 0;
    std::uint16_t ue = 0;
    std::uint16_t ulCell = 0;
    std::uint16_t dlAnchor = 0;
    std::int64_t broadcastEpoch = -1; // -1 when the policy does not read broadcasts
};

/// Everything one simulation run records. All record vectors are in time order.
struct MetricsLog
{
    std::int64_t subframes = 0;
    std::int64_t warmupSubframes = 0;
    std::uint32_t ueCount = 0;
    std::uint32_t cellCount = 0;
    std::vector<FlowRecord> flows;
    std::vector<UeSubframeRecord> ueRecords;
    std::vector<CellSubframeRecord> cellRecords;
    std::vector<DecisionRecord> decisions;
    std::vector<std::uint64_t> servedBitsAfterWarmup; // per UE
    std::vector<std::string> warnings;

    bool IsWarmup(std::int64_t subframe) const
    {
        return subframe < warmupSubframes;
    }

    friend bool operator==(const MetricsLog&, const MetricsLog&);
};

enum class ThroughputStatistic : std::uint8_t
{
    FlowRate, // completed flow bits over their arrival-to-completion time
    LongRun,  // all bits served after warm-up over the post-warm-up wall-clock time
};

enum class PercentileRule : std::uint8_t
{
    NearestRank,
    Linear, // interpolates between closest ranks, position p / 100 * (n - 1)
};

std::string_view ToString(ThroughputStatistic statistic);
std::string_view ToString(PercentileRule rule);
std::optional<ThroughputStatistic> ParseThroughputStatistic(std::string_view name);
std::optional<PercentileRule> ParsePercentileRule(std::string_view name);

struct MetricsOptions
{
    ThroughputStatistic throughput = ThroughputStatistic::FlowRate;
    PercentileRule percentile = PercentileRule::NearestRank;
    std::size_t minSinrSamples = 30;

    friend bool operator==(const MetricsOptions&, const MetricsOptions&) = default;
};

struct ThroughputResult
{
    std::vector<std::pair<std::uint32_t, double>> perUe; // (ue, bits/s), ascending ue id
    std::uint32_t excludedUes = 0; // UEs without a completed post-warm-up flow

    std::vector<double> Values() const;
};

/**
 * Flow-level throughput of one UE: completed post-warm-up flow bits divided
 * by the summed arrival-to-completion durations. Empty when the UE has no
 * such flow.
 */
std::optional<double> UeThroughput(const MetricsLog& log, std::uint32_t ue);

/**
 * Per-UE throughput under the chosen statistic. FlowRate excludes UEs without
 * a completed post-warm-up flow; LongRun includes every UE, idle time and
 * unfinished flows included.
 */
ThroughputResult UeThroughputs(const MetricsLog& log,
                               ThroughputStatistic statistic = ThroughputStatistic::FlowRate);

/**
 * Nearest-rank percentile: the value at 1-based rank ceil(p / 100 * n) of the
 * ascending sort, rank clamped to [1, n]. Throws std::invalid_argument on
 * empty input.
 */
double Percentile(std::span<const double> values, double p,
                  PercentileRule rule = PercentileRule::NearestRank);

/// Population variance (dB^2) of each UE's post-warm-up SINR samples; UEs below minSamples are skipped.
std::vector<std::pair<std::uint32_t, double>> SinrVariances(const MetricsLog& log,
                                                            std::size_t minSamples = 30);

/// Empirical CDF points (value, i / n) over the per-UE SINR variances.
std::vector<std::pair<double, double>> SinrVarianceCdf(const MetricsLog& log,
                                                       std::size_t minSamples = 30);

/// Time-average post-warm-up number of active UL flows in each cell.
std::vector<double> MeanActivePerCell(const MetricsLog& log);

/// Population variance across cells of MeanActivePerCell.
double UePerCellVariance(const MetricsLog& log);

double PopulationVariance(std::span<const double> values);

struct SummaryStats
{
    std::string label;
    double p5 = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
    std::vector<double> sinrVariancePerUe;
    double medianSinrVariance = 0.0;
    double uePerCellVariance = 0.0;
    std::uint32_t ueWithThroughput = 0;
    std::uint32_t excludedUes = 0;
    std::uint64_t completedFlows = 0;
};

SummaryStats Summarize(const MetricsLog& log, std::string label = {},
                       const MetricsOptions& options = {});

} // namespace dude
