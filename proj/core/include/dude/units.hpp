#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace dude
{

inline constexpr double kSubframeSeconds = 1e-3;
inline constexpr double kThermalNoiseDbmPerHz = -174.0;
inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

inline double
DbToLinear(double db)
{
    return std::pow(10.0, db / 10.0);
}

inline double
LinearToDb(double ratio)
{
    return 10.0 * std::log10(ratio);
}

/// dBm to milliwatts; all internal power sums are carried out in mW.
inline double
DbmToMw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

inline double
MwToDbm(double mw)
{
    return 10.0 * std::log10(mw);
}

enum class Tier : std::uint8_t
{
    Macro,
    Small,
};

inline const char*
ToString(Tier tier)
{
    return tier == Tier::Macro ? "macro" : "small";
}

struct Position
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

inline double
Distance(Position a, Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

} // namespace dude
