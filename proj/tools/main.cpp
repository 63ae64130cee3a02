// dudesim command-line front end: scenario generation, single runs,
// canned experiments and report rendering.

#include "dude/config.hpp"
#include "dude/deployment.hpp"
#include "dude/experiment.hpp"
#include "dude/scenario_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::string
ReadFile(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonOptions
{
    std::string configPath;
    std::string scenarioPath;
    std::vector<std::uint64_t> seeds;
    std::string outDir = "out";
    unsigned workers = 0;
    std::string experiment;
};

dude::ExperimentSpec
LoadSpec(const CommonOptions& o)
{
    auto spec = dude::ValidateExperimentConfig(o.configPath.empty() ? std::string()
                                                                    : ReadFile(o.configPath));
    if (!o.seeds.empty())
    {
        spec.seeds = o.seeds;
    }
    if (o.workers > 0)
    {
        spec.workers = o.workers;
    }
    if (!o.experiment.empty())
    {
        const auto kind = dude::ParseExperimentKind(o.experiment);
        if (!kind)
        {
            throw dude::ConfigError(std::vector<dude::ConfigDiagnostic>{
                {"experiment.name", "unknown experiment \"" + o.experiment +
                                                             "\""}});
        }
        spec.kind = *kind;
    }
    spec.Validate();
    return spec;
}

int
Execute(const CommonOptions& o, bool single)
{
    auto spec = LoadSpec(o);
    if (single)
    {
        spec.kind = dude::ExperimentKind::Single;
    }
    else if (spec.kind == dude::ExperimentKind::Single)
    {
        spec.kind = dude::ExperimentKind::PolicyComparison;
    }
    std::optional<dude::Scenario> scenario;
    if (!o.scenarioPath.empty())
    {
        scenario = dude::LoadScenario(o.scenarioPath);
    }
    const auto total = dude::ExpandRuns(spec).size();
    std::clog << dude::ToString(spec.kind) << ": " << total << " runs on " << spec.workers
              << " worker(s)\n";
    const auto result = dude::RunExperiment(spec, scenario, [](std::size_t done, std::size_t n) {
        std::clog << "  run " << done << "/" << n << " done\n";
    });
    dude::WriteOutputs(result, o.outDir);
    std::cout << dude::RenderReport(ReadFile((std::filesystem::path(o.outDir) / "summary.json")
                                                 .string()));
    return 0;
}

void
AddCommon(CLI::App* cmd, CommonOptions& o, bool withExperiment)
{
    cmd->add_option("-c,--config", o.configPath, "JSON config file (defaults apply when absent)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-s,--scenario", o.scenarioPath,
                    "scenario file to use instead of generating one per seed")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seeds", o.seeds, "seed list, e.g. --seeds 1,2,3")->delimiter(',');
    cmd->add_option("-o,--out", o.outDir, "output directory")->capture_default_str();
    cmd->add_option("-j,--workers", o.workers, "concurrent runs (overrides the config)")
        ->check(CLI::PositiveNumber);
    if (withExperiment)
    {
        cmd->add_option("-e,--experiment", o.experiment,
                        "policy_comparison, power_control_comparison or backhaul_sweep");
    }
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"dudesim: uplink HetNet simulator with decoupled, load-aware cell association"};
    app.require_subcommand(1);

    std::string genConfig;
    std::uint64_t genSeed = 1;
    std::string genOut = "scenario.json";
    auto* gen = app.add_subcommand("generate-scenario", "write a synthetic scenario file");
    gen->add_option("-c,--config", genConfig, "JSON config file; its scenario section is used")
        ->check(CLI::ExistingFile);
    gen->add_option("--seed", genSeed, "scenario seed")->capture_default_str();
    gen->add_option("-o,--out", genOut, "output file")->capture_default_str();

    CommonOptions runOpts;
    auto* run = app.add_subcommand("run", "run the configured policy once per seed");
    AddCommon(run, runOpts, false);

    CommonOptions sweepOpts;
    auto* sweep = app.add_subcommand(
        "sweep", "run an experiment family (policy, power-control or backhaul comparison)");
    AddCommon(sweep, sweepOpts, true);

    std::string reportDir = "out";
    auto* report = app.add_subcommand("report", "print the aggregate table of an output directory");
    report->add_option("-o,--out,dir", reportDir, "output directory holding summary.json")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*gen)
        {
            const auto cfg = dude::ValidateConfig(genConfig.empty() ? std::string()
                                                                    : ReadFile(genConfig));
            const auto scenario = dude::GenerateScenario(genSeed, cfg.scenario);
            dude::SaveScenario(scenario, genOut);
            std::cout << "wrote " << genOut << ": " << scenario.CellCount() << " cells, "
                      << scenario.UeCount() << " UEs\n";
            return 0;
        }
        if (*run)
        {
            return Execute(runOpts, true);
        }
        if (*sweep)
        {
            return Execute(sweepOpts, false);
        }
        if (*report)
        {
            std::cout << dude::RenderReport(
                ReadFile((std::filesystem::path(reportDir) / "summary.json").string()));
            return 0;
        }
    }
    catch (const dude::ConfigError& e)
    {
        for (const auto& d : e.Diagnostics())
        {
            std::cerr << "config error: " << (d.path.empty() ? "" : d.path + ": ") << d.message
                      << '\n';
        }
        return kExitConfig;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
