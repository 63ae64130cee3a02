#include "dude/radio.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dude
{

void
LinkBudget::Validate() const
{
    if (prbCount < 1)
    {
        throw std::invalid_argument("link.prb_count must be >= 1");
    }
    if (!(prbBandwidthHz > 0.0))
    {
        throw std::invalid_argument("link.prb_bandwidth_hz must be positive");
    }
    if (prbCount * prbBandwidthHz > bandwidthHz * (1.0 + 1e-12))
    {
        throw std::invalid_argument("link.prb_count x link.prb_bandwidth_hz exceeds "
                                    "link.bandwidth_hz");
    }
    if (!(maxSpectralEfficiency > 0.0))
    {
        throw std::invalid_argument("link.max_spectral_efficiency must be positive");
    }
}

InterferenceField::InterferenceField(std::size_t cellCount, int prbCount)
    : m_cellCount(cellCount),
      m_prbCount(prbCount),
      m_mw(cellCount * static_cast<std::size_t>(prbCount), 0.0)
{
}

double
InterferenceField::MeanMw(std::size_t cell) const
{
    const auto row = Row(cell);
    return std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(m_prbCount);
}

void
InterferenceField::Clear()
{
    std::fill(m_mw.begin(), m_mw.end(), 0.0);
}

double
UplinkTxPower(const PowerControlConfig& cfg, int m, double servingPathlossDb,
              double mostInterferedPathlossDb)
{
    if (m < 1)
    {
        throw InvariantViolation("uplink power requested for a grant of " + std::to_string(m) +
                                 " PRBs");
    }
    const double bandwidthTerm = 10.0 * std::log10(static_cast<double>(m));
    double p = std::min(cfg.pMaxDbm, bandwidthTerm + cfg.p0Dbm + cfg.alpha * servingPathlossDb);
    if (cfg.regime == PowerControlRegime::InterferenceAware)
    {
        p = std::min(p, cfg.i0Dbm + mostInterferedPathlossDb + bandwidthTerm);
    }
    return p;
}

double
UplinkSinr(double txPowerDbm, int m, double channelGainDb, double noiseMw, double interferenceMw)
{
    const double perPrbRx = DbmToMw(txPowerDbm) / static_cast<double>(m) * DbToLinear(channelGainDb);
    return perPrbRx / (noiseMw + interferenceMw);
}

double
AchievableRate(double sinr, int m, const LinkBudget& link)
{
    return static_cast<double>(m) * link.prbBandwidthHz * SpectralEfficiency(sinr, link);
}

double
DlRsrp(const Cell& cell, double pathlossDb)
{
    return cell.txPowerDlDbm + cell.antennaGainDbi - pathlossDb;
}

void
AccumulateInterference(std::span<const Transmission> schedule, InterferenceField& field)
{
    field.Clear();
    const int prbs = field.PrbCount();
    const std::size_t cells = field.CellCount();
    std::vector<std::uint32_t> owner(cells * static_cast<std::size_t>(prbs), 0);
    for (std::size_t t = 0; t < schedule.size(); ++t)
    {
        const auto& tx = schedule[t];
        if (tx.prbStart < 0 || tx.prbLen < 1 || tx.prbStart + tx.prbLen > prbs ||
            tx.cell >= cells)
        {
            throw InvariantViolation("transmission of UE " + std::to_string(tx.ue) +
                                     " lies outside the carrier");
        }
        // owner stores t + 1 so zero means free
        auto* occupied = owner.data() + tx.cell * static_cast<std::size_t>(prbs);
        for (int k = tx.prbStart; k < tx.prbStart + tx.prbLen; ++k)
        {
            if (occupied[k] != 0)
            {
                throw InvariantViolation("overlapping PRB " + std::to_string(k) + " in cell " +
                                         std::to_string(tx.cell) + " for UEs " +
                                         std::to_string(schedule[occupied[k] - 1].ue) + " and " +
                                         std::to_string(tx.ue));
            }
            occupied[k] = static_cast<std::uint32_t>(t + 1);
        }
        for (std::size_t j = 0; j < cells; ++j)
        {
            if (j == tx.cell)
            {
                continue;
            }
            const double contribution = tx.perPrbTxMw * tx.gainToCell[j];
            auto row = field.Row(j);
            for (int k = tx.prbStart; k < tx.prbStart + tx.prbLen; ++k)
            {
                row[static_cast<std::size_t>(k)] += contribution;
            }
        }
    }
}

InterferenceField
AccumulateInterference(std::span<const Transmission> schedule, std::size_t cellCount, int prbCount)
{
    InterferenceField field(cellCount, prbCount);
    AccumulateInterference(schedule, field);
    return field;
}

} // namespace dude
