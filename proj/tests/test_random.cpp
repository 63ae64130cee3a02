#include "dude/random.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace dude;

namespace
{

double
Correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

std::vector<double>
Draw(RandomStream rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v)
    {
        x = u(rng);
    }
    return v;
}

} // namespace

TEST_CASE("the same seed, purpose and entity give the same sequence")
{
    const StreamFamily f(42);
    auto a = f.Stream(StreamPurpose::Traffic, 7);
    auto b = RandomStreams(42).Stream(StreamPurpose::Traffic, 7);
    for (int i = 0; i < 1000; ++i)
    {
        REQUIRE(a() == b());
    }
}

TEST_CASE("seed 0 is an ordinary seed")
{
    auto a = StreamFamily(0).Stream(StreamPurpose::Traffic, 0);
    auto b = StreamFamily(1).Stream(StreamPurpose::Traffic, 0);
    CHECK(a() != b());
}

TEST_CASE("streams for different UEs are uncorrelated")
{
    const StreamFamily f(3);
    const std::size_t n = 100000;
    const auto a = Draw(f.Stream(StreamPurpose::Traffic, 0), n);
    const auto b = Draw(f.Stream(StreamPurpose::Traffic, 1), n);
    const auto c = Draw(f.Stream(StreamPurpose::Fading, 0), n);
    CHECK(std::abs(Correlation(a, b)) < 0.01);
    CHECK(std::abs(Correlation(a, c)) < 0.01);
}

TEST_CASE("draining one stream leaves its siblings untouched")
{
    const StreamFamily f(9);
    auto reference = f.Stream(StreamPurpose::Traffic, 4);
    auto fading = f.Stream(StreamPurpose::Fading, 4);
    for (int i = 0; i < 12345; ++i)
    {
        fading();
    }
    auto traffic = f.Stream(StreamPurpose::Traffic, 4);
    for (int i = 0; i < 100; ++i)
    {
        CHECK(traffic() == reference());
    }
}

TEST_CASE("high entity bits are part of the stream identity")
{
    const StreamFamily f(1);
    auto low = f.Stream(StreamPurpose::Mobility, 5);
    auto high = f.Stream(StreamPurpose::Mobility, 5 + (std::uint64_t{1} << 32));
    CHECK(low() != high());
}
