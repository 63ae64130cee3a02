#pragma once

#include "dude/radio.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dude
{

struct Grant
{
    std::uint32_t ueId = 0;
    int prbStart = 0;
    int prbLen = 0;
    double txPowerDbm = 0.0;

    friend bool operator==(const Grant&, const Grant&) = default;
};

/// Proportional-fair averages of the UEs currently associated with one cell.
class PfState
{
  public:
    explicit PfState(double timeConstantSubframes = 100.0, double floorBps = 1.0)
        : m_timeConstant(timeConstantSubframes),
          m_floorBps(floorBps)
    {
    }

    struct Entry
    {
        std::uint32_t ue;
        double avgBps;
    };

    /// Adds the UE at the floor average if it is not tracked yet.
    void Ensure(std::uint32_t ue);
    void Remove(std::uint32_t ue);
    bool Contains(std::uint32_t ue) const;

    /// Average throughput of a tracked UE; the floor for unknown UEs.
    double Average(std::uint32_t ue) const;

    double TimeConstant() const
    {
        return m_timeConstant;
    }

    double FloorBps() const
    {
        return m_floorBps;
    }

    const std::vector<Entry>& Entries() const
    {
        return m_entries;
    }

    std::vector<Entry>& Entries()
    {
        return m_entries;
    }

  private:
    double m_timeConstant;
    double m_floorBps;
    std::vector<Entry> m_entries; // sorted by ue
};

struct ServedBits
{
    std::uint32_t ue = 0;
    std::uint64_t bits = 0;
};

/**
 * avg <- (1 - 1/T) avg + (1/T) served / duration for every tracked UE
 * (UEs missing from `served` count as zero), clamped at the floor.
 */
void UpdatePf(PfState& pf, std::span<const ServedBits> served, double subframeSeconds);

/**
 * Largest grant a power-limited UE can use.
 *
 * Evaluates the UE's rate over M = 1..prbCount at the power its power control
 * would pick for M PRBs, against noise only. A grant whose per-PRB SNR falls
 * below the lowest decodable operating point (link.minSinrDb) contributes no
 * rate. Returns the M with the highest rate, the smallest one on ties.
 */
int MaxUsefulPrbs(double servingPathlossDb, double mostInterferedPathlossDb, double gainLinear,
                  const PowerControlConfig& pc, const LinkBudget& link);

/// Rate (bits/s) MaxUsefulPrbs attributes to a grant of m PRBs.
double UsefulRate(int m, double servingPathlossDb, double mostInterferedPathlossDb,
                  double gainLinear, const PowerControlConfig& pc, const LinkBudget& link);

struct SchedulingCandidate
{
    std::uint32_t ueId = 0;
    int maxUsefulPrbs = 1;
    double servingPathlossDb = 0.0;
    double mostInterferedPathlossDb = 0.0;
    double gainLinear = 0.0; // serving link, antenna gains included
};

/**
 * Proportional-fair uplink allocation for one cell and one subframe.
 *
 * Candidates are ranked by estimated instantaneous rate over PF average
 * (UE id breaks ties). In rank order each UE receives
 * min(max useful PRBs, ceil(prbCount / n), what is left) while one PRB is
 * held back for each lower-ranked UE, so everyone gets at least one PRB when
 * n <= prbCount. Allocations are contiguous and laid out in rank order from
 * PRB 0; PRBs nobody can use stay idle.
 */
std::vector<Grant> ScheduleCell(std::span<const SchedulingCandidate> candidates, const PfState& pf,
                                const PowerControlConfig& pc, const LinkBudget& link,
                                double meanInterferenceMw);

/// Proportionally scales per-UE bits down (flooring each) so their sum fits the budget.
void ApplyBackhaulCap(std::span<std::uint64_t> bits, double budgetBits);

} // namespace dude
