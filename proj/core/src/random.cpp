#include "dude/random.hpp"

namespace dude
{

RandomStream
StreamFamily::Stream(StreamPurpose purpose, std::uint64_t entity) const
{
    std::seed_seq seq{static_cast<std::uint32_t>(m_seed),
                      static_cast<std::uint32_t>(m_seed >> 32),
                      static_cast<std::uint32_t>(purpose),
                      static_cast<std::uint32_t>(entity),
                      static_cast<std::uint32_t>(entity >> 32)};
    return RandomStream(seq);
}

} // namespace dude
