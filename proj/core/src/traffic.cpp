#include "dude/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace dude
{

std::int64_t
DrawWait(const FlowModel& model, RandomStream& rng)
{
    std::exponential_distribution<double> dist(1.0 / model.meanWaitSubframes);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(dist(rng))));
}

std::uint64_t
DrawFlowSize(const FlowModel& model, RandomStream& rng)
{
    std::exponential_distribution<double> dist(1.0 / model.meanFlowBits);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(dist(rng))));
}

UeQueue
InitialQueue(const FlowModel& model, RandomStream& rng)
{
    UeQueue q;
    q.waitRemaining = DrawWait(model, rng);
    return q;
}

QueueEvents
TickQueue(UeQueue& queue, std::uint64_t servedBits, const FlowModel& model, RandomStream& rng)
{
    QueueEvents events;
    if (queue.state == QueueState::Active)
    {
        queue.pendingBits -= std::min(servedBits, queue.pendingBits);
        if (queue.pendingBits == 0)
        {
            events.flowCompleted = true;
            queue.state = QueueState::Idle;
            queue.waitRemaining = DrawWait(model, rng);
        }
        return events;
    }

    if (servedBits > 0)
    {
        throw InvariantViolation("served " + std::to_string(servedBits) + " bits to an idle UE");
    }
    if (--queue.waitRemaining <= 0)
    {
        queue.waitRemaining = 0;
        queue.pendingBits = DrawFlowSize(model, rng);
        queue.state = QueueState::Active;
        events.flowArrived = true;
        events.arrivedBits = queue.pendingBits;
    }
    return events;
}

} // namespace dude
