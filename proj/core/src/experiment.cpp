#include "dude/experiment.hpp"

#include "dude/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace dude
{

namespace
{

using nlohmann::ordered_json;

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::Single, "single"},
    {ExperimentKind::PolicyComparison, "policy_comparison"},
    {ExperimentKind::PowerControlComparison, "power_control_comparison"},
    {ExperimentKind::BackhaulSweep, "backhaul_sweep"},
};

std::string
PresetNameOf(const PowerControlConfig& pc)
{
    for (const char* name : {"setting1", "setting2", "interference_aware"})
    {
        if (PowerControlPreset(name) == pc)
        {
            return name;
        }
    }
    return "custom";
}

std::string
Num(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string
SweepLabel(const std::optional<double>& mbps)
{
    return mbps ? Num(*mbps) : std::string();
}

struct Metric
{
    const char* name;
    double (*get)(const SummaryStats&);
};

constexpr Metric kMetrics[] = {
    {"p5_bps", [](const SummaryStats& s) { return s.p5; }},
    {"p50_bps", [](const SummaryStats& s) { return s.p50; }},
    {"p90_bps", [](const SummaryStats& s) { return s.p90; }},
    {"median_sinr_variance_db2", [](const SummaryStats& s) { return s.medianSinrVariance; }},
    {"ue_per_cell_variance", [](const SummaryStats& s) { return s.uePerCellVariance; }},
};

struct Aggregate
{
    const RunPoint* first; // labels of the group
    std::size_t seeds = 0;
    // per metric: min, median, max
    std::vector<std::array<double, 3>> values;
};

std::vector<Aggregate>
AggregateRuns(const ExperimentResult& result)
{
    const auto seeds = result.spec.seeds.size();
    std::vector<Aggregate> out;
    for (std::size_t begin = 0; begin < result.runs.size(); begin += seeds)
    {
        Aggregate a;
        a.first = &result.runs[begin].point;
        a.seeds = seeds;
        for (const auto& m : kMetrics)
        {
            std::vector<double> v;
            for (std::size_t i = begin; i < begin + seeds; ++i)
            {
                v.push_back(m.get(result.runs[i].stats));
            }
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            a.values.push_back({*lo, Median(v), *hi});
        }
        out.push_back(std::move(a));
    }
    return out;
}

void
WriteHeader(std::ostream& os, const ExperimentResult& result, std::string_view what)
{
    os << "# dudesim " << what << "\n";
    os << "# experiment: " << ToString(result.spec.kind) << "\n";
    os << "# config: " << EffectiveConfigText(result.spec) << "\n";
}

std::string
Labels(const RunPoint& p)
{
    return std::string(ToString(p.policy)) + "," + p.powerSetting + "," +
           SweepLabel(p.smallBackhaulMbps);
}

std::ofstream
OpenOutput(const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
    {
        throw std::runtime_error("cannot write " + path.string());
    }
    return os;
}

ordered_json
LabelsJson(const RunPoint& p)
{
    ordered_json j;
    j["policy"] = std::string(ToString(p.policy));
    j["power_setting"] = p.powerSetting;
    j["small_backhaul_mbps"] = p.smallBackhaulMbps ? ordered_json(*p.smallBackhaulMbps)
                                                   : ordered_json(nullptr);
    return j;
}

RunResult
Execute(const RunPoint& point, const Scenario& scenario, const MetricsOptions& options)
{
    const auto log = Run(point.config, scenario);
    RunResult r;
    r.point = point;
    r.stats = Summarize(log, Labels(point) + ",seed=" + std::to_string(point.seed), options);
    r.flows = log.flows;
    r.sinrVariances = SinrVariances(log, options.minSinrSamples);
    r.meanActivePerCell = MeanActivePerCell(log);
    r.warmupSubframes = log.warmupSubframes;
    r.warnings = log.warnings;
    return r;
}

} // namespace

std::string_view
ToString(ExperimentKind kind)
{
    for (const auto& [k, name] : kKindNames)
    {
        if (k == kind)
        {
            return name;
        }
    }
    return "unknown";
}

std::optional<ExperimentKind>
ParseExperimentKind(std::string_view name)
{
    for (const auto& [k, n] : kKindNames)
    {
        if (n == name)
        {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<PowerControlConfig>
PowerControlPreset(std::string_view name)
{
    if (name == "setting1")
    {
        return PowerControlConfig::Setting1();
    }
    if (name == "setting2")
    {
        return PowerControlConfig::Setting2();
    }
    if (name == "interference_aware")
    {
        return PowerControlConfig::InterferenceAware();
    }
    return std::nullopt;
}

void
ExperimentSpec::Validate() const
{
    base.Validate();
    if (seeds.empty())
    {
        throw std::invalid_argument("experiment.seeds: at least one seed is required");
    }
    if (policies.empty())
    {
        throw std::invalid_argument("experiment.policies: at least one policy is required");
    }
    if (kind == ExperimentKind::PowerControlComparison)
    {
        if (powerSettings.empty())
        {
            throw std::invalid_argument("experiment.power_settings: at least one is required");
        }
        for (const auto& s : powerSettings)
        {
            if (!PowerControlPreset(s))
            {
                throw std::invalid_argument("experiment.power_settings: unknown setting " + s);
            }
        }
    }
    if (kind == ExperimentKind::BackhaulSweep)
    {
        if (smallBackhaulMbps.empty())
        {
            throw std::invalid_argument("experiment.small_backhaul_mbps: at least one value is "
                                        "required");
        }
        for (std::size_t i = 0; i < smallBackhaulMbps.size(); ++i)
        {
            if (!(smallBackhaulMbps[i] > 0.0))
            {
                throw std::invalid_argument("experiment.small_backhaul_mbps: values must be "
                                            "positive");
            }
            if (i > 0 && !(smallBackhaulMbps[i] > smallBackhaulMbps[i - 1]))
            {
                throw std::invalid_argument("experiment.small_backhaul_mbps: values must be "
                                            "strictly increasing");
            }
        }
        if (!(macroBackhaulMbps > 0.0))
        {
            throw std::invalid_argument("experiment.macro_backhaul_mbps: must be positive");
        }
    }
    if (workers < 1)
    {
        throw std::invalid_argument("experiment.workers: must be >= 1");
    }
}

std::vector<RunPoint>
ExpandRuns(const ExperimentSpec& spec)
{
    std::vector<std::optional<double>> sweep{std::nullopt};
    if (spec.kind == ExperimentKind::BackhaulSweep)
    {
        sweep.assign(spec.smallBackhaulMbps.begin(), spec.smallBackhaulMbps.end());
    }
    std::vector<std::optional<std::string>> settings{std::nullopt};
    if (spec.kind == ExperimentKind::PowerControlComparison)
    {
        settings.assign(spec.powerSettings.begin(), spec.powerSettings.end());
    }
    std::vector<AssociationPolicy> policies{spec.base.policy};
    if (spec.kind != ExperimentKind::Single)
    {
        policies = spec.policies;
    }

    std::vector<RunPoint> runs;
    for (const auto& mbps : sweep)
    {
        for (const auto& setting : settings)
        {
            for (const auto policy : policies)
            {
                for (const auto seed : spec.seeds)
                {
                    RunPoint p;
                    p.policy = policy;
                    p.seed = seed;
                    p.smallBackhaulMbps = mbps;
                    p.config = spec.base;
                    p.config.policy = policy;
                    p.config.seed = seed;
                    if (setting)
                    {
                        p.config.pc = *PowerControlPreset(*setting);
                    }
                    p.powerSetting = PresetNameOf(p.config.pc);
                    if (mbps)
                    {
                        p.config.backhaul.ideal = false;
                        p.config.backhaul.macroBps = spec.macroBackhaulMbps * 1e6;
                        p.config.backhaul.smallBps = *mbps * 1e6;
                    }
                    runs.push_back(std::move(p));
                }
            }
        }
    }
    return runs;
}

double
Median(std::vector<double> values)
{
    if (values.empty())
    {
        throw std::invalid_argument("median of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ExperimentResult
RunExperiment(const ExperimentSpec& spec, const std::optional<Scenario>& scenario,
              const std::function<void(std::size_t, std::size_t)>& progress)
{
    spec.Validate();
    ExperimentResult result;
    result.spec = spec;
    const auto points = ExpandRuns(spec);

    // One scenario per seed, shared by every policy and setting of that seed.
    std::map<std::uint64_t, Scenario> scenarios;
    if (!scenario)
    {
        for (const auto seed : spec.seeds)
        {
            if (!scenarios.count(seed))
            {
                scenarios.emplace(seed, GenerateScenario(seed, spec.base.scenario));
            }
        }
    }
    const auto scenarioFor = [&](std::uint64_t seed) -> const Scenario& {
        return scenario ? *scenario : scenarios.at(seed);
    };

    std::vector<std::optional<RunResult>> slots(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::condition_variable cv;
    std::size_t done = 0;
    std::exception_ptr failure;

    const unsigned threads =
        static_cast<unsigned>(std::min<std::size_t>(spec.workers, points.size()));
    const auto work = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size())
            {
                return;
            }
            std::optional<RunResult> r;
            std::exception_ptr error;
            try
            {
                r = Execute(points[i], scenarioFor(points[i].seed), spec.metrics);
            }
            catch (const std::exception& e)
            {
                error = std::make_exception_ptr(std::runtime_error(
                    "run " + Labels(points[i]) + " seed " + std::to_string(points[i].seed) +
                    ": " + e.what()));
            }
            std::unique_lock lock(mutex);
            if (error)
            {
                if (!failure)
                {
                    failure = error;
                }
                next = points.size();
            }
            slots[i] = std::move(r);
            ++done;
            cv.notify_one();
            if (threads <= 1 && progress && !error)
            {
                const auto n = done;
                lock.unlock();
                progress(n, points.size());
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t)
    {
        pool.emplace_back(work);
    }
    if (threads <= 1)
    {
        work();
    }
    else
    {
        std::unique_lock lock(mutex);
        std::size_t reported = 0;
        while (reported < points.size() && !failure)
        {
            cv.wait(lock, [&] { return done > reported || failure; });
            while (reported < done)
            {
                ++reported;
                if (progress)
                {
                    lock.unlock();
                    progress(reported, points.size());
                    lock.lock();
                }
            }
        }
    }
    for (auto& t : pool)
    {
        t.join();
    }
    if (failure)
    {
        std::rethrow_exception(failure);
    }
    for (auto& s : slots)
    {
        result.runs.push_back(std::move(*s));
    }
    return result;
}

void
WriteOutputs(const ExperimentResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const auto aggregates = AggregateRuns(result);

    {
        auto os = OpenOutput(dir / "runs.csv");
        WriteHeader(os, result, "per-run summary, one row per run");
        os << "policy,power_setting,small_backhaul_mbps,seed";
        for (const auto& m : kMetrics)
        {
            os << ',' << m.name;
        }
        os << ",ues_with_throughput,excluded_ues,completed_flows\n";
        for (const auto& r : result.runs)
        {
            os << Labels(r.point) << ',' << r.point.seed;
            for (const auto& m : kMetrics)
            {
                os << ',' << Num(m.get(r.stats));
            }
            os << ',' << r.stats.ueWithThroughput << ',' << r.stats.excludedUes << ','
               << r.stats.completedFlows << '\n';
        }
    }
    {
        auto os = OpenOutput(dir / "aggregate.csv");
        WriteHeader(os, result, "min/median/max across seeds");
        os << "policy,power_setting,small_backhaul_mbps,seeds";
        for (const auto& m : kMetrics)
        {
            os << ',' << m.name << "_min," << m.name << "_median," << m.name << "_max";
        }
        os << '\n';
        for (const auto& a : aggregates)
        {
            os << Labels(*a.first) << ',' << a.seeds;
            for (const auto& v : a.values)
            {
                os << ',' << Num(v[0]) << ',' << Num(v[1]) << ',' << Num(v[2]);
            }
            os << '\n';
        }
    }
    if (result.spec.kind == ExperimentKind::BackhaulSweep)
    {
        auto os = OpenOutput(dir / "sweep.csv");
        WriteHeader(os, result, "backhaul sweep, one row per sweep point and policy");
        os << "small_backhaul_mbps,policy,seeds,p5_bps_min,p5_bps_median,p5_bps_max,"
              "p50_bps_median,p90_bps_median\n";
        for (const auto& a : aggregates)
        {
            os << SweepLabel(a.first->smallBackhaulMbps) << ',' << ToString(a.first->policy)
               << ',' << a.seeds << ',' << Num(a.values[0][0]) << ',' << Num(a.values[0][1])
               << ',' << Num(a.values[0][2]) << ',' << Num(a.values[1][1]) << ','
               << Num(a.values[2][1]) << '\n';
        }
    }
    {
        auto os = OpenOutput(dir / "flows.csv");
        WriteHeader(os, result, "one row per flow");
        os << "policy,power_setting,small_backhaul_mbps,seed,ue,cell,size_bits,served_bits,"
              "start_subframe,end_subframe,completed,warmup\n";
        for (const auto& r : result.runs)
        {
            const auto labels = Labels(r.point) + ',' + std::to_string(r.point.seed) + ',';
            for (const auto& f : r.flows)
            {
                os << labels << f.ue << ',' << f.cell << ',' << f.sizeBits << ','
                   << f.servedBits << ',' << f.start << ',';
                if (f.Completed())
                {
                    os << f.end;
                }
                os << ',' << (f.Completed() ? 1 : 0) << ','
                   << (f.start < r.warmupSubframes ? 1 : 0) << '\n';
            }
        }
    }
    {
        auto os = OpenOutput(dir / "sinr_variance.csv");
        WriteHeader(os, result, "per-UE uplink SINR variance after warm-up");
        os << "policy,power_setting,small_backhaul_mbps,seed,ue,sinr_variance_db2\n";
        for (const auto& r : result.runs)
        {
            for (const auto& [ue, v] : r.sinrVariances)
            {
                os << Labels(r.point) << ',' << r.point.seed << ',' << ue << ',' << Num(v)
                   << '\n';
            }
        }
    }
    {
        ordered_json doc;
        doc["format"] = "dudesim-summary";
        doc["version"] = 1;
        doc["experiment"] = std::string(ToString(result.spec.kind));
        doc["config"] = ordered_json::parse(EffectiveConfigText(result.spec));
        auto& runs = doc["runs"] = ordered_json::array();
        std::vector<std::string> warnings;
        for (const auto& r : result.runs)
        {
            auto j = LabelsJson(r.point);
            j["seed"] = r.point.seed;
            for (const auto& m : kMetrics)
            {
                j[m.name] = m.get(r.stats);
            }
            j["ues_with_throughput"] = r.stats.ueWithThroughput;
            j["excluded_ues"] = r.stats.excludedUes;
            j["completed_flows"] = r.stats.completedFlows;
            j["mean_active_flows_per_cell"] = r.meanActivePerCell;
            runs.push_back(std::move(j));
            for (const auto& w : r.warnings)
            {
                if (std::find(warnings.begin(), warnings.end(), w) == warnings.end())
                {
                    warnings.push_back(w);
                }
            }
        }
        auto& aggs = doc["aggregates"] = ordered_json::array();
        for (const auto& a : aggregates)
        {
            auto j = LabelsJson(*a.first);
            j["seeds"] = a.seeds;
            for (std::size_t m = 0; m < std::size(kMetrics); ++m)
            {
                j[kMetrics[m].name] = {{"min", a.values[m][0]},
                                       {"median", a.values[m][1]},
                                       {"max", a.values[m][2]}};
            }
            aggs.push_back(std::move(j));
        }
        doc["warnings"] = warnings;
        auto os = OpenOutput(dir / "summary.json");
        os << doc.dump(2) << '\n';
    }
}

std::string
RenderReport(std::string_view summaryJson)
{
    const auto doc = ordered_json::parse(summaryJson);
    if (doc.value("format", "") != "dudesim-summary")
    {
        throw std::invalid_argument("not a dudesim summary file");
    }
    std::ostringstream os;
    os << "experiment: " << doc.at("experiment").get<std::string>() << "\n";
    os << "runs: " << doc.at("runs").size() << "\n\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s %-19s %9s %5s %23s %23s %12s %12s\n", "policy",
                  "power_setting", "bh_mbps", "seeds", "p5 Mbps (min/med/max)",
                  "p50 Mbps (min/med/max)", "sinr_var_db2", "ue_cell_var");
    os << line;
    for (const auto& a : doc.at("aggregates"))
    {
        const auto triple = [&](const char* key) {
            const auto& m = a.at(key);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3f/%.3f/%.3f", m.at("min").get<double>() / 1e6,
                          m.at("median").get<double>() / 1e6, m.at("max").get<double>() / 1e6);
            return std::string(buf);
        };
        const auto& bh = a.at("small_backhaul_mbps");
        const std::string bhText = bh.is_null() ? "ideal" : Num(bh.get<double>());
        std::snprintf(line, sizeof(line), "%-10s %-19s %9s %5d %23s %23s %12.2f %12.3f\n",
                      a.at("policy").get<std::string>().c_str(),
                      a.at("power_setting").get<std::string>().c_str(), bhText.c_str(),
                      a.at("seeds").get<int>(), triple("p5_bps").c_str(),
                      triple("p50_bps").c_str(),
                      a.at("median_sinr_variance_db2").at("median").get<double>(),
                      a.at("ue_per_cell_variance").at("median").get<double>());
        os << line;
    }
    for (const auto& w : doc.value("warnings", ordered_json::array()))
    {
        os << "warning: " << w.get<std::string>() << "\n";
    }
    return os.str();
}

} // namespace dude
