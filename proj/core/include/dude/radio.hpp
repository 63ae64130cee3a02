#pragma once

#include "dude/deployment.hpp"
#include "dude/errors.hpp"
#include "dude/units.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dude
{

enum class PowerControlRegime : std::uint8_t
{
    OpenLoop,
    InterferenceAware,
};

/// UE uplink power control parameters (alpha, P_0, P_MAX and the interference target I_0).
struct PowerControlConfig
{
    PowerControlRegime regime = PowerControlRegime::OpenLoop;
    double alpha = 1.0;
    double p0Dbm = -80.0;
    double pMaxDbm = 20.0;
    double i0Dbm = -100.0; // per PRB; only read by the interference-aware regime

    /// Loose control with full pathloss compensation.
    static PowerControlConfig Setting1()
    {
        return {PowerControlRegime::OpenLoop, 1.0, -80.0, 20.0, -100.0};
    }

    /// Conservative control with partial pathloss compensation.
    static PowerControlConfig Setting2()
    {
        return {PowerControlRegime::OpenLoop, 0.6, -70.0, 20.0, -100.0};
    }

    /// Full compensation, additionally capped by the interference caused at the nearest neighbour.
    static PowerControlConfig InterferenceAware()
    {
        return {PowerControlRegime::InterferenceAware, 1.0, -80.0, 20.0, -100.0};
    }

    friend bool operator==(const PowerControlConfig&, const PowerControlConfig&) = default;
};

struct LinkBudget
{
    double bandwidthHz = 20e6;
    int prbCount = 100;
    double prbBandwidthHz = 180e3;
    double noiseFigureDb = 5.0;
    double maxSpectralEfficiency = 6.0; // 64-QAM ceiling, bits/s/Hz
    double minSinrDb = -6.7;            // lowest decodable QPSK operating point

    double NoisePerPrbDbm() const
    {
        return kThermalNoiseDbmPerHz + LinearToDb(prbBandwidthHz) + noiseFigureDb;
    }

    double NoisePerPrbMw() const
    {
        return DbmToMw(NoisePerPrbDbm());
    }

    /// Throws std::invalid_argument naming the offending field.
    void Validate() const;

    friend bool operator==(const LinkBudget&, const LinkBudget&) = default;
};

/**
 * Out-of-cell received power (mW) at every base station on every PRB.
 *
 * Written once per subframe by AccumulateInterference and read during the
 * following subframe.
 */
class InterferenceField
{
  public:
    InterferenceField() = default;
    InterferenceField(std::size_t cellCount, int prbCount);

    std::size_t CellCount() const
    {
        return m_cellCount;
    }

    int PrbCount() const
    {
        return m_prbCount;
    }

    double At(std::size_t cell, int prb) const
    {
        return m_mw[cell * static_cast<std::size_t>(m_prbCount) + static_cast<std::size_t>(prb)];
    }

    std::span<const double> Row(std::size_t cell) const
    {
        return {m_mw.data() + cell * static_cast<std::size_t>(m_prbCount),
                static_cast<std::size_t>(m_prbCount)};
    }

    std::span<double> Row(std::size_t cell)
    {
        return {m_mw.data() + cell * static_cast<std::size_t>(m_prbCount),
                static_cast<std::size_t>(m_prbCount)};
    }

    /// Mean per-PRB interference over the whole carrier.
    double MeanMw(std::size_t cell) const;

    void Clear();

    std::int64_t subframe = -1;

  private:
    std::size_t m_cellCount = 0;
    int m_prbCount = 0;
    std::vector<double> m_mw;
};

/// One uplink transmission as seen by the interference computation.
struct Transmission
{
    std::uint32_t ue = 0;
    std::uint32_t cell = 0;
    int prbStart = 0;
    int prbLen = 0;
    double perPrbTxMw = 0.0;
    /// Linear channel gain (antenna gains included) from this UE to every cell.
    std::span<const double> gainToCell;
};

/**
 * Uplink transmit power in dBm for a grant of m PRBs.
 *
 * Open loop: min{P_MAX, 10 log10(M) + P_0 + alpha L}. The interference-aware
 * regime adds the term I_0 + L_s + 10 log10(M), where L_s is the pathloss to
 * the most interfered (closest non-serving) cell. Throws InvariantViolation
 * for m < 1.
 */
double UplinkTxPower(const PowerControlConfig& cfg, int m, double servingPathlossDb,
                     double mostInterferedPathlossDb);

/// Per-PRB SINR (linear) of a UE spreading p_tx over m PRBs through channel gain h_db.
double UplinkSinr(double txPowerDbm, int m, double channelGainDb, double noiseMw,
                  double interferenceMw);

/// Shannon rate over m PRBs, capped at the link's maximum spectral efficiency; bits/s.
double AchievableRate(double sinr, int m, const LinkBudget& link);

/// Spectral efficiency per PRB (bits/s/Hz) with the modulation ceiling applied.
inline double
SpectralEfficiency(double sinr, const LinkBudget& link)
{
    const double se = std::log2(1.0 + sinr);
    return se < link.maxSpectralEfficiency ? se : link.maxSpectralEfficiency;
}

double DlRsrp(const Cell& cell, double pathlossDb);

/// Linear UE->cell gain including both antenna gains.
inline double
LinkGainLinear(const Cell& cell, double pathlossDb, double ueAntennaGainDbi)
{
    return DbToLinear(cell.antennaGainDbi + ueAntennaGainDbi - pathlossDb);
}

/**
 * Sums out-of-cell contributions per (cell, PRB) into `field`.
 *
 * Throws InvariantViolation when two transmissions in the same cell overlap.
 */
void AccumulateInterference(std::span<const Transmission> schedule, InterferenceField& field);

InterferenceField AccumulateInterference(std::span<const Transmission> schedule,
                                         std::size_t cellCount, int prbCount);

} // namespace dude
