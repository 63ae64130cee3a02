#include "dude/metrics.hpp"

#include "dude/units.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace dude
{

namespace
{

auto
Tie(const UeSubframeRecord& r)
{
    return std::tie(r.subframe, r.ue, r.cell, r.servedBits, r.sinrDb, r.prbs);
}

auto
Tie(const CellSubframeRecord& r)
{
    return std::tie(r.subframe, r.cell, r.activeFlows, r.expectedFlows, r.backhaulBits,
                    r.prbsUsed);
}

auto
Tie(const FlowRecord& r)
{
    return std::tie(r.ue, r.cell, r.sizeBits, r.servedBits, r.start, r.end);
}

auto
Tie(const DecisionRecord& r)
{
    return std::tie(r.subframe, r.ue, r.ulCell, r.dlAnchor, r.broadcastEpoch);
}

template <typename T>
bool
SameRecords(const std::vector<T>& a, const std::vector<T>& b)
{
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const T& x, const T& y) { return Tie(x) == Tie(y); });
}

bool
Counts(const MetricsLog& log, const FlowRecord& f)
{
    return f.Completed() && !log.IsWarmup(f.start);
}

} // namespace

bool
operator==(const MetricsLog& a, const MetricsLog& b)
{
    return a.subframes == b.subframes && a.warmupSubframes == b.warmupSubframes &&
           a.ueCount == b.ueCount && a.cellCount == b.cellCount && SameRecords(a.flows, b.flows) &&
           SameRecords(a.ueRecords, b.ueRecords) && SameRecords(a.cellRecords, b.cellRecords) &&
           SameRecords(a.decisions, b.decisions) &&
           a.servedBitsAfterWarmup == b.servedBitsAfterWarmup && a.warnings == b.warnings;
}

std::vector<double>
ThroughputResult::Values() const
{
    std::vector<double> v;
    v.reserve(perUe.size());
    for (const auto& [ue, bps] : perUe)
    {
        v.push_back(bps);
    }
    return v;
}

std::optional<double>
UeThroughput(const MetricsLog& log, std::uint32_t ue)
{
    double bits = 0.0;
    std::int64_t duration = 0;
    for (const auto& f : log.flows)
    {
        if (f.ue == ue && Counts(log, f))
        {
            bits += static_cast<double>(f.sizeBits);
            duration += f.end - f.start;
        }
    }
    if (duration == 0)
    {
        return std::nullopt;
    }
    return bits / (static_cast<double>(duration) * kSubframeSeconds);
}

std::string_view
ToString(ThroughputStatistic statistic)
{
    return statistic == ThroughputStatistic::FlowRate ? "flow_rate" : "long_run";
}

std::string_view
ToString(PercentileRule rule)
{
    return rule == PercentileRule::NearestRank ? "nearest_rank" : "linear";
}

std::optional<ThroughputStatistic>
ParseThroughputStatistic(std::string_view name)
{
    if (name == "flow_rate")
    {
        return ThroughputStatistic::FlowRate;
    }
    if (name == "long_run")
    {
        return ThroughputStatistic::LongRun;
    }
    return std::nullopt;
}

std::optional<PercentileRule>
ParsePercentileRule(std::string_view name)
{
    if (name == "nearest_rank")
    {
        return PercentileRule::NearestRank;
    }
    if (name == "linear")
    {
        return PercentileRule::Linear;
    }
    return std::nullopt;
}

ThroughputResult
UeThroughputs(const MetricsLog& log, ThroughputStatistic statistic)
{
    if (statistic == ThroughputStatistic::LongRun)
    {
        ThroughputResult result;
        const auto span = std::max<std::int64_t>(1, log.subframes - log.warmupSubframes);
        const double seconds = static_cast<double>(span) * kSubframeSeconds;
        for (std::uint32_t u = 0; u < log.ueCount; ++u)
        {
            const auto bits =
                u < log.servedBitsAfterWarmup.size() ? log.servedBitsAfterWarmup[u] : 0;
            result.perUe.emplace_back(u, static_cast<double>(bits) / seconds);
        }
        return result;
    }
    std::vector<double> bits(log.ueCount, 0.0);
    std::vector<std::int64_t> duration(log.ueCount, 0);
    for (const auto& f : log.flows)
    {
        if (Counts(log, f))
        {
            bits[f.ue] += static_cast<double>(f.sizeBits);
            duration[f.ue] += f.end - f.start;
        }
    }
    ThroughputResult result;
    for (std::uint32_t u = 0; u < log.ueCount; ++u)
    {
        if (duration[u] > 0)
        {
            result.perUe.emplace_back(
                u, bits[u] / (static_cast<double>(duration[u]) * kSubframeSeconds));
        }
        else
        {
            ++result.excludedUes;
        }
    }
    return result;
}

double
Percentile(std::span<const double> values, double p, PercentileRule rule)
{
    if (values.empty())
    {
        throw std::invalid_argument("percentile of an empty sequence");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    if (rule == PercentileRule::Linear)
    {
        const double pos = std::clamp(p / 100.0, 0.0, 1.0) * (n - 1.0);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    }
    const double rank = std::clamp(std::ceil(p / 100.0 * n), 1.0, n);
    return sorted[static_cast<std::size_t>(rank) - 1];
}

std::vector<std::pair<std::uint32_t, double>>
SinrVariances(const MetricsLog& log, std::size_t minSamples)
{
    // Welford accumulators per UE
    std::vector<std::size_t> count(log.ueCount, 0);
    std::vector<double> mean(log.ueCount, 0.0);
    std::vector<double> m2(log.ueCount, 0.0);
    for (const auto& r : log.ueRecords)
    {
        if (log.IsWarmup(r.subframe))
        {
            continue;
        }
        const double x = r.sinrDb;
        const auto n = ++count[r.ue];
        const double delta = x - mean[r.ue];
        mean[r.ue] += delta / static_cast<double>(n);
        m2[r.ue] += delta * (x - mean[r.ue]);
    }
    std::vector<std::pair<std::uint32_t, double>> out;
    for (std::uint32_t u = 0; u < log.ueCount; ++u)
    {
        if (count[u] >= minSamples && count[u] > 0)
        {
            out.emplace_back(u, m2[u] / static_cast<double>(count[u]));
        }
    }
    return out;
}

std::vector<std::pair<double, double>>
SinrVarianceCdf(const MetricsLog& log, std::size_t minSamples)
{
    std::vector<double> values;
    for (const auto& [ue, v] : SinrVariances(log, minSamples))
    {
        values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(values.size());
    const auto n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        cdf.emplace_back(values[i], static_cast<double>(i + 1) / n);
    }
    return cdf;
}

std::vector<double>
MeanActivePerCell(const MetricsLog& log)
{
    std::vector<double> sum(log.cellCount, 0.0);
    for (const auto& r : log.cellRecords)
    {
        if (!log.IsWarmup(r.subframe))
        {
            sum[r.cell] += r.activeFlows;
        }
    }
    const auto span = std::max<std::int64_t>(1, log.subframes - log.warmupSubframes);
    for (auto& s : sum)
    {
        s /= static_cast<double>(span);
    }
    return sum;
}

double
PopulationVariance(std::span<const double> values)
{
    if (values.empty())
    {
        return 0.0;
    }
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values)
    {
        acc += (v - mean) * (v - mean);
    }
    return acc / static_cast<double>(values.size());
}

double
UePerCellVariance(const MetricsLog& log)
{
    const auto means = MeanActivePerCell(log);
    return PopulationVariance(means);
}

SummaryStats
Summarize(const MetricsLog& log, std::string label, const MetricsOptions& options)
{
    SummaryStats s;
    s.label = std::move(label);
    const auto tput = UeThroughputs(log, options.throughput);
    const auto values = tput.Values();
    s.ueWithThroughput = static_cast<std::uint32_t>(values.size());
    s.excludedUes = tput.excludedUes;
    if (!values.empty())
    {
        s.p5 = Percentile(values, 5, options.percentile);
        s.p50 = Percentile(values, 50, options.percentile);
        s.p90 = Percentile(values, 90, options.percentile);
    }
    for (const auto& [ue, v] : SinrVariances(log, options.minSinrSamples))
    {
        s.sinrVariancePerUe.push_back(v);
    }
    if (!s.sinrVariancePerUe.empty())
    {
        s.medianSinrVariance = Percentile(s.sinrVariancePerUe, 50, options.percentile);
    }
    s.uePerCellVariance = UePerCellVariance(log);
    s.completedFlows = static_cast<std::uint64_t>(
        std::count_if(log.flows.begin(), log.flows.end(), [&](const FlowRecord& f) {
            return Counts(log, f);
        }));
    return s;
}

} // namespace dude
