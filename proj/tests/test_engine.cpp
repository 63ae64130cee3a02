#include "dude/engine.hpp"
#include "dude/scheduler.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace dude;

namespace
{

// One macro cell with every UE at the same fixed pathloss.
Scenario
SingleCell(std::size_t ues, double pathlossDb)
{
    Scenario s;
    s.cells.push_back({0, Tier::Macro, {500.0, 500.0}, 46.0, 17.8, kUnlimited});
    for (std::size_t i = 0; i < ues; ++i)
    {
        s.ues.push_back({static_cast<std::uint32_t>(i), {510.0, 500.0}, std::nullopt});
    }
    s.propagation = PropagationMap(ues, 1, std::vector<double>(ues, pathlossDb));
    return s;
}

SimConfig
SmallConfig(AssociationPolicy policy)
{
    SimConfig cfg;
    cfg.subframes = 1500;
    cfg.warmupSubframes = 200;
    cfg.policy = policy;
    cfg.scenario.ues = 60;
    cfg.scenario.macroCells = 3;
    cfg.scenario.smallCells = 6;
    cfg.scenario.hotspots = 6;
    return cfg;
}

void
CheckConservation(const MetricsLog& log)
{
    std::map<std::pair<std::uint32_t, std::int64_t>, std::uint64_t> served;
    for (const auto& r : log.ueRecords)
    {
        // attribute a record to the latest flow of that UE starting at or before it
        std::int64_t start = -1;
        for (const auto& f : log.flows)
        {
            if (f.ue == r.ue && f.start <= r.subframe && f.start > start)
            {
                start = f.start;
            }
        }
        served[{r.ue, start}] += r.servedBits;
    }
    for (const auto& f : log.flows)
    {
        const auto it = served.find({f.ue, f.start});
        const std::uint64_t bits = it == served.end() ? 0 : it->second;
        REQUIRE(bits == f.servedBits);
        if (f.Completed())
        {
            REQUIRE(f.servedBits == f.sizeBits);
            REQUIRE(f.end > f.start);
        }
        else
        {
            REQUIRE(f.servedBits < f.sizeBits);
        }
    }
}

} // namespace

TEST_CASE("an empty UE set gives an empty log")
{
    auto s = SingleCell(0, 80.0);
    SimConfig cfg;
    cfg.subframes = 10;
    const auto log = Run(cfg, s);
    CHECK(log.flows.empty());
    CHECK(log.ueRecords.empty());
}

TEST_CASE("a single link drains each flow in ceil(size / per-subframe rate) subframes")
{
    auto s = SingleCell(1, 100.0);
    SimConfig cfg;
    cfg.subframes = 5000;
    cfg.warmupSubframes = 0;
    cfg.mobilityEnabled = false;
    cfg.policy = AssociationPolicy::Dude;
    // Setting 1 at L = 100 dB: 20 dBm over the full band, 1 mW per PRB.
    const double gain = LinkGainLinear(s.cells[0], 100.0, 0.0);
    const LinkBudget& link = cfg.link;
    const int m = MaxUsefulPrbs(100.0, kUnlimited, gain, cfg.pc, link);
    const double p = UplinkTxPower(cfg.pc, m, 100.0, kUnlimited);
    const double sinr = DbmToMw(p) / m * gain / link.NoisePerPrbMw();
    const auto perSubframe = static_cast<double>(static_cast<std::uint64_t>(
        m * link.prbBandwidthHz * 1e-3 * SpectralEfficiency(sinr, link)));
    const auto log = Run(cfg, s);
    REQUIRE(log.flows.size() > 5);
    for (const auto& f : log.flows)
    {
        if (!f.Completed())
        {
            continue;
        }
        const auto expected =
            static_cast<std::int64_t>(std::ceil(static_cast<double>(f.sizeBits) / perSubframe));
        CHECK(f.end - f.start == expected);
    }
    CHECK(log.warnings.empty());
}

TEST_CASE("identical inputs give identical logs")
{
    for (auto policy : {AssociationPolicy::DlRsrp, AssociationPolicy::Dude,
                        AssociationPolicy::DudeLoad})
    {
        const auto cfg = SmallConfig(policy);
        const auto s = GenerateScenario(cfg.seed, cfg.scenario);
        const auto a = Run(cfg, s);
        const auto b = Run(cfg, s);
        CHECK(a == b);
        CHECK_FALSE(a.flows.empty());
    }
}

TEST_CASE("flow bits are conserved and the serving cell holds for the whole flow")
{
    auto cfg = SmallConfig(AssociationPolicy::DudeLoad);
    cfg.pc = PowerControlConfig::InterferenceAware();
    cfg.backhaul.ideal = false;
    cfg.backhaul.smallBps = 2e6;
    cfg.fadingEnabled = true;
    const auto s = GenerateScenario(cfg.seed, cfg.scenario);
    const auto log = Run(cfg, s);
    CheckConservation(log);
    std::map<std::pair<std::uint32_t, std::int64_t>, std::uint32_t> cellOf;
    for (const auto& f : log.flows)
    {
        cellOf[{f.ue, f.start}] = f.cell;
    }
    for (const auto& r : log.ueRecords)
    {
        std::int64_t start = -1;
        std::uint32_t cell = 0;
        for (const auto& [key, c] : cellOf)
        {
            if (key.first == r.ue && key.second <= r.subframe && key.second > start)
            {
                start = key.second;
                cell = c;
            }
        }
        REQUIRE(r.cell == cell);
    }
}

TEST_CASE("per-cell records respect the band and the backhaul budget")
{
    auto cfg = SmallConfig(AssociationPolicy::DlRsrp);
    cfg.backhaul.ideal = false;
    cfg.backhaul.smallBps = 1e6;
    cfg.backhaul.macroBps = 20e6;
    const auto s = GenerateScenario(cfg.seed, cfg.scenario);
    const auto log = Run(cfg, s);
    for (const auto& r : log.cellRecords)
    {
        REQUIRE(r.prbsUsed <= 100);
        const double budget = (s.cells[r.cell].tier == Tier::Small ? 1e6 : 20e6) * 1e-3;
        REQUIRE(r.backhaulBits <= budget + 1e-9);
    }
    // one grant per UE per subframe
    for (std::size_t i = 1; i < log.ueRecords.size(); ++i)
    {
        const auto& a = log.ueRecords[i - 1];
        const auto& b = log.ueRecords[i];
        REQUIRE((a.subframe < b.subframe || a.ue != b.ue));
    }
}

TEST_CASE("decisions use broadcasts no older than the broadcast period")
{
    auto cfg = SmallConfig(AssociationPolicy::DudeLoad);
    cfg.broadcastPeriod = 37;
    const auto s = GenerateScenario(cfg.seed, cfg.scenario);
    const auto log = Run(cfg, s);
    REQUIRE_FALSE(log.decisions.empty());
    for (const auto& d : log.decisions)
    {
        REQUIRE(d.broadcastEpoch >= 0);
        REQUIRE(static_cast<std::int64_t>(d.subframe) - d.broadcastEpoch < cfg.broadcastPeriod);
        REQUIRE(d.broadcastEpoch % cfg.broadcastPeriod == 0);
    }
}

TEST_CASE("per-UE traffic does not depend on the fading switch")
{
    auto cfg = SmallConfig(AssociationPolicy::Dude);
    cfg.mobilityEnabled = false;
    const auto s = GenerateScenario(cfg.seed, cfg.scenario);
    const auto plain = Run(cfg, s);
    cfg.fadingEnabled = true;
    const auto faded = Run(cfg, s);
    // the first flow of every UE arrives at the same time with the same size
    std::map<std::uint32_t, std::pair<std::int64_t, std::uint64_t>> first;
    for (const auto& f : plain.flows)
    {
        first.try_emplace(f.ue, f.start, f.sizeBits);
    }
    for (const auto& f : faded.flows)
    {
        if (const auto it = first.find(f.ue); it != first.end())
        {
            CHECK(it->second.first == f.start);
            CHECK(it->second.second == f.sizeBits);
            first.erase(it);
        }
    }
}

TEST_CASE("mobility on a loaded scenario is reported and ignored")
{
    auto s = SingleCell(3, 90.0);
    SimConfig cfg;
    cfg.subframes = 300;
    cfg.mobilityEnabled = true;
    const auto log = Run(cfg, s);
    REQUIRE(log.warnings.size() == 1);
}

TEST_CASE("invalid configurations are refused")
{
    auto s = SingleCell(1, 90.0);
    SimConfig cfg;
    cfg.pc.alpha = 1.5;
    CHECK_THROWS_AS(Run(cfg, s), std::invalid_argument);
    cfg = {};
    cfg.broadcastPeriod = 0;
    CHECK_THROWS_AS(Run(cfg, s), std::invalid_argument);
    cfg = {};
    Scenario none;
    CHECK_THROWS_AS(Run(cfg, none), std::invalid_argument);
}
