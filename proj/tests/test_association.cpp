#include "dude/association.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace dude;

namespace
{

const Cell kMacro{0, Tier::Macro, {}, 46.0, 17.8, kUnlimited};
const Cell kSmall{1, Tier::Small, {}, 30.0, 4.0, kUnlimited};

std::vector<CellBroadcast>
Broadcasts(const std::vector<double>& load, const std::vector<double>& backhaul)
{
    std::vector<CellBroadcast> b;
    for (std::size_t j = 0; j < load.size(); ++j)
    {
        b.push_back({static_cast<std::uint32_t>(j), load[j], backhaul[j], 0});
    }
    return b;
}

} // namespace

TEST_CASE("utilization from the smoothed flow count")
{
    CHECK(EstimateUtilization({0, 0.0, 0.01}) == 0.0);
    CHECK(EstimateUtilization({0, 1.0, 0.01}) == doctest::Approx(0.5));
    CHECK(EstimateUtilization({0, 9.0, 0.01}) == doctest::Approx(0.9));
}

TEST_CASE("load estimator update")
{
    CHECK(UpdateLoad({0, 0.0, 0.01}, 0).emaFlows == 0.0);
    CHECK(UpdateLoad({0, 4.0, 0.3}, 4).emaFlows == doctest::Approx(4.0));
    CHECK(UpdateLoad({0, 0.0, 0.01}, 10).emaFlows == doctest::Approx(0.1));
}

TEST_CASE("DL-RSRP association")
{
    const std::vector<Cell> cells{kMacro, kSmall};
    const std::vector<double> pl{100.0, 70.0};
    const auto d = AssociateDlRsrp(3, cells, pl);
    CHECK(d.ueId == 3);
    CHECK(d.ulCell == 1);
    CHECK(d.dlAnchor == 1);
    CHECK(d.criterionValues[0] == doctest::Approx(-36.2));
    CHECK(d.criterionValues[1] == doctest::Approx(-36.0));

    const std::vector<Cell> one{kMacro};
    CHECK(AssociateDlRsrp(0, one, std::vector<double>{120.0}).ulCell == 0);

    const std::vector<Cell> twins{kSmall, Cell{1, Tier::Small, {}, 30.0, 4.0, kUnlimited}};
    CHECK(AssociateDlRsrp(0, twins, std::vector<double>{90.0, 90.0}).ulCell == 0);
}

TEST_CASE("DUDe association follows the smallest pathloss")
{
    const std::vector<Cell> cells{kMacro, kSmall};
    auto d = AssociateDude(0, cells, std::vector<double>{100.0, 70.0});
    CHECK(d.ulCell == 1);
    d = AssociateDude(0, cells, std::vector<double>{90.0, 90.0});
    CHECK(d.ulCell == 0);

    d = AssociateDude(0, cells, std::vector<double>{95.0, 98.0});
    CHECK(d.ulCell == 0);
    // the downlink anchor still follows RSRP: macro -31.2 dBm vs small -64 dBm
    CHECK(d.dlAnchor == 0);
    auto louder = cells;
    louder[1].txPowerDlDbm = 80.0;
    louder[1].antennaGainDbi = 20.0;
    CHECK(AssociateDude(0, louder, std::vector<double>{95.0, 98.0}).ulCell == 0);
    CHECK(AssociateDude(0, louder, std::vector<double>{95.0, 98.0}).dlAnchor == 1);
}

TEST_CASE("load-aware association")
{
    SUBCASE("equal rates, the idle cell wins")
    {
        const auto d = AssociateDudeLoad(0, 0, Broadcasts({0.0, 9.0}, {kUnlimited, kUnlimited}),
                                         std::vector<double>{5e6, 5e6});
        CHECK(d.ulCell == 0);
    }
    SUBCASE("scores 2 and 3")
    {
        const auto d = AssociateDudeLoad(0, 0, Broadcasts({4.0, 1.0}, {kUnlimited, kUnlimited}),
                                         std::vector<double>{10e6, 6e6});
        CHECK(d.ulCell == 1);
        CHECK(d.criterionValues[0] == doctest::Approx(2e6));
        CHECK(d.criterionValues[1] == doctest::Approx(3e6));
    }
    SUBCASE("backhaul clamps the access rate")
    {
        const auto d = AssociateDudeLoad(0, 0, Broadcasts({0.0, 0.0}, {1e6, 100e6}),
                                         std::vector<double>{50e6, 50e6});
        CHECK(d.ulCell == 1);
        CHECK(d.criterionValues[0] == doctest::Approx(1e6));
    }
    SUBCASE("the downlink anchor is passed through")
    {
        const auto d = AssociateDudeLoad(0, 1, Broadcasts({0.0, 0.0}, {kUnlimited, kUnlimited}),
                                         std::vector<double>{9e6, 5e6});
        CHECK(d.ulCell == 0);
        CHECK(d.dlAnchor == 1);
    }
}

TEST_CASE("a missing broadcast is a staleness error")
{
    CHECK_THROWS_AS(AssociateDudeLoad(0, 0, Broadcasts({0.0}, {kUnlimited}),
                                      std::vector<double>{1e6, 1e6}),
                    StaleBroadcastError);
}

TEST_CASE("the utilization form and the flow-count form pick the same cell")
{
    std::mt19937_64 rng(20);
    std::uniform_int_distribution<int> cellsDist(2, 26);
    std::uniform_real_distribution<double> rate(0.1e6, 108e6);
    std::uniform_real_distribution<double> load(0.0, 30.0);
    for (int trial = 0; trial < 20000; ++trial)
    {
        const int n = cellsDist(rng);
        std::vector<double> cmax(n);
        std::vector<double> flows(n);
        for (int j = 0; j < n; ++j)
        {
            cmax[j] = rate(rng);
            flows[j] = load(rng);
        }
        std::vector<double> utilForm(n);
        for (int j = 0; j < n; ++j)
        {
            const double eta = EstimateUtilization({0, flows[j], 0.01});
            utilForm[j] = (1.0 - eta) * cmax[j];
        }
        std::vector<double> backhaul(n, kUnlimited);
        const auto d = AssociateDudeLoad(0, 0, Broadcasts(flows, backhaul), cmax);
        REQUIRE(d.ulCell == ArgmaxLowestIndex(utilForm));
    }
}

TEST_CASE("load-aware choice properties")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> rate(1e6, 100e6);
    std::uniform_real_distribution<double> load(0.0, 10.0);
    for (int trial = 0; trial < 2000; ++trial)
    {
        const std::size_t n = 8;
        std::vector<double> access(n);
        std::vector<double> flows(n);
        for (std::size_t j = 0; j < n; ++j)
        {
            access[j] = rate(rng);
            flows[j] = load(rng);
        }
        const std::vector<double> inf(n, kUnlimited);
        const auto base = AssociateDudeLoad(0, 0, Broadcasts(flows, inf), access);

        auto scaled = access;
        for (auto& a : scaled)
        {
            a *= 4.0;
        }
        REQUIRE(AssociateDudeLoad(0, 0, Broadcasts(flows, inf), scaled).ulCell == base.ulCell);

        const std::vector<double> idle(n, 0.0);
        REQUIRE(AssociateDudeLoad(0, 0, Broadcasts(idle, inf), access).ulCell ==
                ArgmaxLowestIndex(access));

        // loading up a cell that was not chosen never attracts the UE to it
        const std::size_t other = (base.ulCell + 1) % n;
        auto heavier = flows;
        heavier[other] += 5.0;
        REQUIRE(AssociateDudeLoad(0, 0, Broadcasts(heavier, inf), access).ulCell == base.ulCell);
    }
}

TEST_CASE("argmax ties go to the lowest index")
{
    CHECK(ArgmaxLowestIndex(std::vector<double>{1.0, 3.0, 3.0}) == 1);
    CHECK(ArgmaxLowestIndex(std::vector<double>{2.0}) == 0);
}

TEST_CASE("access rate estimate over the full band")
{
    const LinkBudget link;
    const double noise = link.NoisePerPrbMw();
    PowerControlConfig pc = PowerControlConfig::Setting1();
    // choose the serving gain so that per-PRB SINR is exactly 1 at full band:
    // P = min(20, 20 - 80 + L) = 20 dBm at L = 100, i.e. 1 mW per PRB.
    const double l = 100.0;
    const double gain = noise / 1.0;
    CHECK(AccessRateEstimate(l, 200.0, gain, 0.0, pc, link) ==
          doctest::Approx(18e6).epsilon(1e-9));
    CHECK(AccessRateEstimate(l, 200.0, gain * 1e6, 0.0, pc, link) ==
          doctest::Approx(108e6).epsilon(1e-9));
    CHECK(AccessRateEstimate(l, 200.0, gain, noise, pc, link) ==
          doctest::Approx(100 * 180e3 * std::log2(1.5)).epsilon(1e-9));
}

TEST_CASE("policy names")
{
    for (auto p : {AssociationPolicy::DlRsrp, AssociationPolicy::Dude, AssociationPolicy::DudeLoad})
    {
        CHECK(ParsePolicy(ToString(p)) == p);
    }
    CHECK_FALSE(ParsePolicy("max_sinr").has_value());
}
