#pragma once

#include "dude/association.hpp"
#include "dude/deployment.hpp"
#include "dude/metrics.hpp"
#include "dude/radio.hpp"
#include "dude/traffic.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dude
{

/// A submodule invariant broke during a run; the message carries the subframe.
class SimulationError : public std::runtime_error
{
  public:
    SimulationError(std::int64_t subframe, const std::string& what)
        : std::runtime_error("subframe " + std::to_string(subframe) + ": " + what),
          m_subframe(subframe)
    {
    }

    std::int64_t Subframe() const
    {
        return m_subframe;
    }

  private:
    std::int64_t m_subframe;
};

/// Which C_j^bk the cells advertise: the static capacity or capacity minus recent usage.
enum class BackhaulCriterion : std::uint8_t
{
    Total,
    Residual,
};

/// Per-tier backhaul capacities applied on top of the scenario's cell values.
struct BackhaulOverrides
{
    bool ideal = true; // every cell unlimited; wins over the per-tier values
    std::optional<double> macroBps;
    std::optional<double> smallBps;

    double Apply(const Cell& cell) const;

    friend bool operator==(const BackhaulOverrides&, const BackhaulOverrides&) = default;
};

struct SimConfig
{
    std::int64_t subframes = 10000;
    std::int64_t warmupSubframes = 1000;
    AssociationPolicy policy = AssociationPolicy::DudeLoad;
    PowerControlConfig pc = PowerControlConfig::Setting1();
    FlowModel flow;
    LinkBudget link;
    std::int64_t broadcastPeriod = 50;
    std::uint64_t seed = 1;
    BackhaulOverrides backhaul;
    BackhaulCriterion backhaulCriterion = BackhaulCriterion::Total;
    bool mobilityEnabled = true;
    std::int64_t mobilityPeriod = 100; // subframes between position updates
    bool fadingEnabled = false;
    double loadSmoothing = 0.01;
    double pfTimeConstant = 100.0;
    bool traceUeSubframes = true;
    /// Used when the scenario is generated rather than loaded.
    ScenarioParams scenario;

    /// Throws std::invalid_argument naming the offending field.
    void Validate() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/**
 * Runs the subframe loop. Each subframe, in order:
 *  (a) every broadcastPeriod subframes, cells refresh their broadcasts;
 *  (b) idle UEs count down, and UEs whose flow arrives pick an UL cell;
 *  (c) each cell schedules its active UEs;
 *  (d) SINRs against the previous subframe's interference give served bits,
 *      capped by the cell backhaul;
 *  (e) queues drain, completed UEs go idle;
 *  (f) this subframe's transmissions become the next interference field;
 *  (g) load estimators and PF averages update;
 *  (h) records are appended.
 * Identical (config, scenario) give identical logs.
 */
MetricsLog Run(const SimConfig& config, const Scenario& scenario);

} // namespace dude
