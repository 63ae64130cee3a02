#pragma once

#include <stdexcept>

namespace dude
{

/// A broken internal contract (scheduler handing out overlapping PRBs, serving an idle UE, ...).
class InvariantViolation : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

} // namespace dude
