#include "dude/radio.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dude;

TEST_CASE("open-loop and interference-aware transmit power")
{
    CHECK(UplinkTxPower(PowerControlConfig::Setting1(), 100, 100.0, 200.0) ==
          doctest::Approx(20.0).epsilon(1e-12));
    CHECK(UplinkTxPower(PowerControlConfig::Setting2(), 1, 90.0, 200.0) ==
          doctest::Approx(-16.0).epsilon(1e-12));
    CHECK(UplinkTxPower(PowerControlConfig::InterferenceAware(), 1, 120.0, 110.0) ==
          doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("a zero-PRB power request is a scheduler bug")
{
    CHECK_THROWS_AS(UplinkTxPower(PowerControlConfig::Setting1(), 0, 100.0, 100.0),
                    InvariantViolation);
}

TEST_CASE("transmit power never exceeds P_MAX and respects I_0 when it binds")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pl(40.0, 180.0);
    std::uniform_int_distribution<int> prbs(1, 100);
    std::uniform_real_distribution<double> alpha(0.0, 1.0);
    for (int i = 0; i < 20000; ++i)
    {
        PowerControlConfig pc = PowerControlConfig::InterferenceAware();
        pc.alpha = alpha(rng);
        const int m = prbs(rng);
        const double l = pl(rng);
        const double ls = pl(rng);
        const double p = UplinkTxPower(pc, m, l, ls);
        REQUIRE(p <= pc.pMaxDbm + 1e-12);
        const double openLoop = 10.0 * std::log10(m) + pc.p0Dbm + pc.alpha * l;
        if (p < std::min(pc.pMaxDbm, openLoop) - 1e-9)
        {
            REQUIRE(p - ls - 10.0 * std::log10(m) <= pc.i0Dbm + 1e-9);
        }
        pc.regime = PowerControlRegime::OpenLoop;
        REQUIRE(UplinkTxPower(pc, m, l, ls) <= pc.pMaxDbm + 1e-12);
    }
}

TEST_CASE("uplink SINR in linear units")
{
    const double noise = 6.31e-12;
    // received power equal to noise
    const double txForUnity = MwToDbm(noise) + 100.0;
    CHECK(UplinkSinr(txForUnity, 1, -100.0, noise, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    const double a = UplinkSinr(txForUnity, 1, -100.0, noise, noise);
    const double b = UplinkSinr(txForUnity, 1, -100.0, noise, 2.0 * noise);
    CHECK(b / a == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    const double expected = (10.0 / 10.0) * 1e-11 / noise;
    CHECK(UplinkSinr(10.0, 10, -110.0, noise, 0.0) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(LinearToDb(UplinkSinr(10.0, 10, -110.0, noise, 0.0)) ==
          doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("SINR falls with interference and rises with power")
{
    const double noise = 1e-12;
    double last = UplinkSinr(0.0, 5, -100.0, noise, 0.0);
    for (double i = 1e-13; i < 1e-9; i *= 3.0)
    {
        const double s = UplinkSinr(0.0, 5, -100.0, noise, i);
        CHECK(s < last);
        last = s;
    }
    CHECK(UplinkSinr(1.0, 5, -100.0, noise, 1e-12) > UplinkSinr(0.0, 5, -100.0, noise, 1e-12));
}

TEST_CASE("achievable rate with the spectral-efficiency cap")
{
    const LinkBudget link;
    CHECK(AchievableRate(1.0, 1, link) == doctest::Approx(180e3).epsilon(1e-12));
    CHECK(AchievableRate(1e6, 1, link) == doctest::Approx(1.08e6).epsilon(1e-12));
    CHECK(AchievableRate(3.0, 100, link) == doctest::Approx(36e6).epsilon(1e-12));
    for (double s : {0.1, 1.0, 7.0, 1e3})
    {
        CHECK(AchievableRate(s, 37, link) ==
              doctest::Approx(37.0 * AchievableRate(s, 1, link)).epsilon(1e-12));
    }
    double last = 0.0;
    for (double s = 1e-3; s < 1e7; s *= 1.7)
    {
        const double r = AchievableRate(s, 10, link);
        CHECK(r >= last);
        last = r;
    }
}

TEST_CASE("noise per PRB")
{
    const LinkBudget link;
    CHECK(link.NoisePerPrbDbm() ==
          doctest::Approx(-174.0 + 10.0 * std::log10(180e3) + 5.0).epsilon(1e-12));
    LinkBudget bad;
    bad.prbCount = 200;
    CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
}

TEST_CASE("downlink RSRP budgets")
{
    const Cell macro{0, Tier::Macro, {}, 46.0, 17.8, kUnlimited};
    const Cell small{1, Tier::Small, {}, 30.0, 4.0, kUnlimited};
    CHECK(DlRsrp(macro, 100.0) == doctest::Approx(-36.2).epsilon(1e-12));
    CHECK(DlRsrp(small, 100.0) == doctest::Approx(-66.0).epsilon(1e-12));
    CHECK(DlRsrp(macro, 80.0) == DlRsrp(macro, 80.0));
}

TEST_CASE("interference field from a schedule")
{
    const std::vector<double> gains{1e-10, 1e-10};
    SUBCASE("a lone cell sees nothing")
    {
        const std::vector<Transmission> tx{{0, 0, 0, 10, 1.0, gains}};
        const auto f = AccumulateInterference(tx, 2, 100);
        for (int k = 0; k < 100; ++k)
        {
            CHECK(f.At(0, k) == 0.0);
        }
    }
    SUBCASE("one interferer lands on its PRBs only")
    {
        const std::vector<double> g{1.0, 1e-10};
        const std::vector<Transmission> tx{{0, 0, 20, 5, 1e-3, g}};
        const auto f = AccumulateInterference(tx, 2, 100);
        for (int k = 0; k < 100; ++k)
        {
            const double expected = (k >= 20 && k < 25) ? 1e-13 : 0.0;
            CHECK(f.At(1, k) == doctest::Approx(expected).epsilon(1e-12));
            CHECK(f.At(0, k) == 0.0);
        }
    }
}

TEST_CASE("interference is additive over disjoint interferer sets")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t cells = 6;
    std::vector<std::vector<double>> gains(8, std::vector<double>(cells));
    for (auto& row : gains)
    {
        for (auto& g : row)
        {
            g = 1e-9 * u(rng);
        }
    }
    std::vector<Transmission> first;
    std::vector<Transmission> second;
    for (std::uint32_t i = 0; i < 8; ++i)
    {
        // two UEs per cell in the first four cells, disjoint PRBs within a cell
        const Transmission tx{i, i / 2, static_cast<int>(i % 2) * 50, 50, u(rng), gains[i]};
        (i % 4 < 2 ? first : second).push_back(tx);
    }
    std::vector<Transmission> all = first;
    all.insert(all.end(), second.begin(), second.end());
    const auto a = AccumulateInterference(first, cells, 100);
    const auto b = AccumulateInterference(second, cells, 100);
    const auto c = AccumulateInterference(all, cells, 100);
    for (std::size_t j = 0; j < cells; ++j)
    {
        for (int k = 0; k < 100; ++k)
        {
            CHECK(c.At(j, k) == doctest::Approx(a.At(j, k) + b.At(j, k)).epsilon(1e-12));
            CHECK(c.At(j, k) >= 0.0);
        }
    }
}

TEST_CASE("overlapping PRBs within a cell are rejected")
{
    const std::vector<double> g{1.0, 1.0};
    const std::vector<Transmission> tx{{0, 0, 0, 10, 1.0, g}, {1, 0, 5, 10, 1.0, g}};
    CHECK_THROWS_AS(AccumulateInterference(tx, 2, 100), InvariantViolation);
}
