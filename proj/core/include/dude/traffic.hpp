#pragma once

#include "dude/errors.hpp"
#include "dude/random.hpp"

#include <cstdint>

namespace dude
{

/// Exponential flow sizes and exponential idle periods between flows.
struct FlowModel
{
    double meanFlowBits = 1e6;
    double meanWaitSubframes = 100.0;

    friend bool operator==(const FlowModel&, const FlowModel&) = default;
};

/// Idle period in whole subframes, at least one.
std::int64_t DrawWait(const FlowModel& model, RandomStream& rng);

/// Flow size in whole bits, at least one.
std::uint64_t DrawFlowSize(const FlowModel& model, RandomStream& rng);

enum class QueueState : std::uint8_t
{
    Idle,
    Active,
};

/// Uplink buffer of one UE: at most one flow at a time.
struct UeQueue
{
    std::uint64_t pendingBits = 0;
    std::int64_t waitRemaining = 0;
    QueueState state = QueueState::Idle;
};

struct QueueEvents
{
    bool flowArrived = false;
    bool flowCompleted = false;
    std::uint64_t arrivedBits = 0;
};

/// A fresh idle queue with a random initial wait.
UeQueue InitialQueue(const FlowModel& model, RandomStream& rng);

/**
 * Advances a queue by one subframe.
 *
 * Active: pending bits drop by `servedBits` (floored at zero); on reaching
 * zero the flow completes and the queue goes idle with a fresh wait.
 * Idle: the wait counts down; when it hits zero a new flow arrives.
 * Serving an idle queue throws InvariantViolation.
 */
QueueEvents TickQueue(UeQueue& queue, std::uint64_t servedBits, const FlowModel& model,
                      RandomStream& rng);

} // namespace dude
