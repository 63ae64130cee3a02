#pragma once

#include <cstdint>
#include <random>

namespace dude
{

/// Purposes that own a dedicated family of random substreams.
enum class StreamPurpose : std::uint32_t
{
    Scenario = 1,
    Traffic = 2,
    Mobility = 3,
    Fading = 4,
};

using RandomStream = std::mt19937_64;

/**
 * Derives reproducible, mutually independent substreams from one master seed.
 *
 * A substream is addressed by (purpose, entity id); its state depends only on
 * the master seed and that address, so drawing more or fewer numbers from one
 * substream never shifts another one.
 */
class StreamFamily
{
  public:
    explicit StreamFamily(std::uint64_t seed)
        : m_seed(seed)
    {
    }

    std::uint64_t Seed() const
    {
        return m_seed;
    }

    RandomStream Stream(StreamPurpose purpose, std::uint64_t entity) const;

  private:
    std::uint64_t m_seed;
};

inline StreamFamily
RandomStreams(std::uint64_t seed)
{
    return StreamFamily(seed);
}

} // namespace dude
