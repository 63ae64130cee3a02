#include "dude/scheduler.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace dude;

namespace
{

int
BruteForceMaxUseful(double l, double ls, double gain, const PowerControlConfig& pc,
                    const LinkBudget& link)
{
    int best = 1;
    double bestRate = UsefulRate(1, l, ls, gain, pc, link);
    for (int m = 2; m <= link.prbCount; ++m)
    {
        const double r = UsefulRate(m, l, ls, gain, pc, link);
        if (r > bestRate)
        {
            best = m;
            bestRate = r;
        }
    }
    return best;
}

SchedulingCandidate
Unconstrained(std::uint32_t ue)
{
    // very small pathloss: P_MAX never binds and the SNR is far above the cap
    return {ue, 100, 40.0, 200.0, DbToLinear(-40.0)};
}

} // namespace

TEST_CASE("a UE with full power headroom uses the whole band")
{
    const LinkBudget link;
    const auto c = Unconstrained(0);
    CHECK(MaxUsefulPrbs(c.servingPathlossDb, c.mostInterferedPathlossDb, c.gainLinear,
                        PowerControlConfig::Setting1(), link) == 100);
}

TEST_CASE("max useful PRBs matches a brute-force scan")
{
    const LinkBudget link;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> pl(60.0, 170.0);
    std::uniform_real_distribution<double> extra(0.0, 30.0);
    std::uniform_real_distribution<double> antenna(0.0, 18.0);
    std::uniform_real_distribution<double> alpha(0.0, 1.0);
    std::uniform_int_distribution<int> regime(0, 1);
    for (int i = 0; i < 3000; ++i)
    {
        PowerControlConfig pc = regime(rng) ? PowerControlConfig::InterferenceAware()
                                            : PowerControlConfig::Setting1();
        pc.alpha = alpha(rng);
        const double l = pl(rng);
        const double ls = l + extra(rng);
        const double gain = DbToLinear(antenna(rng) - l);
        REQUIRE(MaxUsefulPrbs(l, ls, gain, pc, link) == BruteForceMaxUseful(l, ls, gain, pc, link));
    }
}

TEST_CASE("a lone UE gets its useful PRB count")
{
    const LinkBudget link;
    PfState pf;
    pf.Ensure(4);
    SchedulingCandidate c = Unconstrained(4);
    c.maxUsefulPrbs = 17;
    const auto grants = ScheduleCell(std::vector{c}, pf, PowerControlConfig::Setting1(), link, 0.0);
    REQUIRE(grants.size() == 1);
    CHECK(grants[0].ueId == 4);
    CHECK(grants[0].prbStart == 0);
    CHECK(grants[0].prbLen == 17);
}

TEST_CASE("equal-metric UEs split the band evenly")
{
    const LinkBudget link;
    const auto pc = PowerControlConfig::Setting1();
    SUBCASE("two UEs")
    {
        PfState pf;
        std::vector<SchedulingCandidate> c{Unconstrained(0), Unconstrained(1)};
        pf.Ensure(0);
        pf.Ensure(1);
        const auto g = ScheduleCell(c, pf, pc, link, 0.0);
        REQUIRE(g.size() == 2);
        CHECK(g[0].prbLen == 50);
        CHECK(g[1].prbLen == 50);
        CHECK(g[0].ueId == 0);
    }
    SUBCASE("a hundred UEs")
    {
        PfState pf;
        std::vector<SchedulingCandidate> c;
        for (std::uint32_t u = 0; u < 100; ++u)
        {
            c.push_back(Unconstrained(u));
            pf.Ensure(u);
        }
        const auto g = ScheduleCell(c, pf, pc, link, 0.0);
        REQUIRE(g.size() == 100);
        for (const auto& grant : g)
        {
            CHECK(grant.prbLen == 1);
        }
    }
}

TEST_CASE("grants are disjoint, within the band and within P_MAX")
{
    const LinkBudget link;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> pl(70.0, 150.0);
    std::uniform_int_distribution<int> count(1, 140);
    std::uniform_real_distribution<double> avg(1e3, 1e7);
    for (int trial = 0; trial < 300; ++trial)
    {
        const auto pc = PowerControlConfig::InterferenceAware();
        const int n = count(rng);
        std::vector<SchedulingCandidate> c;
        PfState pf;
        for (int u = 0; u < n; ++u)
        {
            const double l = pl(rng);
            const double gain = DbToLinear(4.0 - l);
            c.push_back({static_cast<std::uint32_t>(u),
                         MaxUsefulPrbs(l, l + 3.0, gain, pc, link), l, l + 3.0, gain});
            pf.Ensure(static_cast<std::uint32_t>(u));
        }
        for (auto& e : pf.Entries())
        {
            e.avgBps = avg(rng);
        }
        const auto g = ScheduleCell(c, pf, pc, link, 1e-13);
        std::vector<int> used(link.prbCount, 0);
        for (const auto& grant : g)
        {
            REQUIRE(grant.prbLen >= 1);
            REQUIRE(grant.prbStart >= 0);
            REQUIRE(grant.prbStart + grant.prbLen <= link.prbCount);
            REQUIRE(grant.txPowerDbm <= pc.pMaxDbm + 1e-12);
            for (int k = grant.prbStart; k < grant.prbStart + grant.prbLen; ++k)
            {
                REQUIRE(++used[k] == 1);
            }
        }
        if (n <= link.prbCount)
        {
            REQUIRE(static_cast<int>(g.size()) == n);
        }
    }
}

TEST_CASE("no UE starves under a stable active set")
{
    const LinkBudget link;
    const auto pc = PowerControlConfig::Setting1();
    std::vector<SchedulingCandidate> c;
    PfState pf(100.0);
    for (std::uint32_t u = 0; u < 30; ++u)
    {
        const double l = 80.0 + 2.0 * u;
        const double gain = DbToLinear(4.0 - l);
        c.push_back({u, MaxUsefulPrbs(l, l + 2.0, gain, pc, link), l, l + 2.0, gain});
        pf.Ensure(u);
    }
    for (int t = 0; t < 200; ++t)
    {
        const auto g = ScheduleCell(c, pf, pc, link, 0.0);
        REQUIRE(g.size() == c.size());
        std::vector<ServedBits> served;
        for (const auto& grant : g)
        {
            served.push_back({grant.ueId, static_cast<std::uint64_t>(grant.prbLen) * 100});
        }
        UpdatePf(pf, served, 1e-3);
    }
}

TEST_CASE("backhaul cap scales proportionally")
{
    std::vector<std::uint64_t> slack{3000000, 2000000};
    ApplyBackhaulCap(slack, 10e6);
    CHECK(slack == std::vector<std::uint64_t>{3000000, 2000000});

    std::vector<std::uint64_t> tight{8000000, 2000000};
    ApplyBackhaulCap(tight, 5e6);
    CHECK(tight == std::vector<std::uint64_t>{4000000, 1000000});

    std::vector<std::uint64_t> zero{7, 9};
    ApplyBackhaulCap(zero, 0.0);
    CHECK(zero == std::vector<std::uint64_t>{0, 0});

    std::vector<std::uint64_t> odd{333, 333, 334};
    ApplyBackhaulCap(odd, 500.0);
    CHECK(odd[0] + odd[1] + odd[2] <= 500);
}

TEST_CASE("proportional-fair averages")
{
    SUBCASE("idle UEs decay to the floor")
    {
        PfState pf(10.0, 1.0);
        pf.Ensure(0);
        pf.Entries()[0].avgBps = 1e6;
        for (int i = 0; i < 2000; ++i)
        {
            UpdatePf(pf, {}, 1e-3);
        }
        CHECK(pf.Average(0) == doctest::Approx(1.0));
    }
    SUBCASE("constant service converges to its rate")
    {
        PfState pf(20.0);
        pf.Ensure(0);
        const std::vector<ServedBits> s{{0, 1000}};
        for (int i = 0; i < 2000; ++i)
        {
            UpdatePf(pf, s, 1e-3);
        }
        CHECK(pf.Average(0) == doctest::Approx(1e6).epsilon(1e-9));
    }
    SUBCASE("unit time constant tracks the last subframe")
    {
        PfState pf(1.0);
        pf.Ensure(0);
        pf.Ensure(1);
        const std::vector<ServedBits> s{{1, 500}, {0, 200}};
        UpdatePf(pf, s, 1e-3);
        CHECK(pf.Average(0) == doctest::Approx(2e5));
        CHECK(pf.Average(1) == doctest::Approx(5e5));
    }
    SUBCASE("membership")
    {
        PfState pf;
        pf.Ensure(3);
        pf.Ensure(1);
        pf.Ensure(3);
        CHECK(pf.Entries().size() == 2);
        CHECK(pf.Contains(1));
        pf.Remove(1);
        CHECK_FALSE(pf.Contains(1));
    }
}
