#include "dude/association.hpp"

#include <algorithm>

namespace dude
{

std::string_view
ToString(AssociationPolicy policy)
{
    switch (policy)
    {
    case AssociationPolicy::DlRsrp:
        return "dl_rsrp";
    case AssociationPolicy::Dude:
        return "dude";
    case AssociationPolicy::DudeLoad:
        return "dude_load";
    }
    return "unknown";
}

std::optional<AssociationPolicy>
ParsePolicy(std::string_view name)
{
    for (auto p : {AssociationPolicy::DlRsrp, AssociationPolicy::Dude, AssociationPolicy::DudeLoad})
    {
        if (ToString(p) == name)
        {
            return p;
        }
    }
    return std::nullopt;
}

double
EstimateUtilization(const LoadEstimator& estimator)
{
    return estimator.emaFlows / (estimator.emaFlows + 1.0);
}

LoadEstimator
UpdateLoad(LoadEstimator estimator, std::uint32_t activeFlowsNow)
{
    const double beta = estimator.smoothingFactor;
    estimator.emaFlows = (1.0 - beta) * estimator.emaFlows + beta * activeFlowsNow;
    return estimator;
}

std::size_t
ArgmaxLowestIndex(std::span<const double> values)
{
    std::size_t best = 0;
    for (std::size_t j = 1; j < values.size(); ++j)
    {
        if (values[j] > values[best])
        {
            best = j;
        }
    }
    return best;
}

std::uint32_t
DlAnchor(std::span<const Cell> cells, std::span<const double> pathlossRow)
{
    std::size_t best = 0;
    double bestRsrp = DlRsrp(cells[0], pathlossRow[0]);
    for (std::size_t j = 1; j < cells.size(); ++j)
    {
        const double rsrp = DlRsrp(cells[j], pathlossRow[j]);
        if (rsrp > bestRsrp)
        {
            best = j;
            bestRsrp = rsrp;
        }
    }
    return static_cast<std::uint32_t>(best);
}

AssociationDecision
AssociateDlRsrp(std::uint32_t ue, std::span<const Cell> cells, std::span<const double> pathlossRow)
{
    AssociationDecision d;
    d.ueId = ue;
    d.criterionValues.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
    {
        d.criterionValues.push_back(DlRsrp(cells[j], pathlossRow[j]));
    }
    d.ulCell = static_cast<std::uint32_t>(ArgmaxLowestIndex(d.criterionValues));
    d.dlAnchor = d.ulCell;
    return d;
}

AssociationDecision
AssociateDude(std::uint32_t ue, std::span<const Cell> cells, std::span<const double> pathlossRow)
{
    AssociationDecision d;
    d.ueId = ue;
    d.criterionValues.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
    {
        d.criterionValues.push_back(-pathlossRow[j]);
    }
    d.ulCell = static_cast<std::uint32_t>(ArgmaxLowestIndex(d.criterionValues));
    d.dlAnchor = DlAnchor(cells, pathlossRow);
    return d;
}

AssociationDecision
AssociateDudeLoad(std::uint32_t ue, std::uint32_t dlAnchor,
                  std::span<const CellBroadcast> broadcasts, std::span<const double> accessRateBps)
{
    if (broadcasts.empty() || broadcasts.size() != accessRateBps.size())
    {
        throw StaleBroadcastError("load-aware association needs one broadcast per cell (got " +
                                  std::to_string(broadcasts.size()) + " for " +
                                  std::to_string(accessRateBps.size()) + " cells)");
    }
    const auto epoch = broadcasts.front().issuedAt;
    AssociationDecision d;
    d.ueId = ue;
    d.dlAnchor = dlAnchor;
    d.criterionValues.reserve(broadcasts.size());
    for (std::size_t j = 0; j < broadcasts.size(); ++j)
    {
        const auto& b = broadcasts[j];
        if (b.cellId != j || b.issuedAt != epoch)
        {
            throw StaleBroadcastError("missing or stale broadcast for cell " + std::to_string(j));
        }
        d.criterionValues.push_back(LoadAwareScore(accessRateBps[j], b.backhaulBps,
                                                   b.expectedFlows));
    }
    d.ulCell = static_cast<std::uint32_t>(ArgmaxLowestIndex(d.criterionValues));
    return d;
}

double
AccessRateEstimate(double servingPathlossDb, double mostInterferedPathlossDb, double gainLinear,
                   double interferenceMw, const PowerControlConfig& pc, const LinkBudget& link)
{
    const int m = link.prbCount;
    const double pTx = UplinkTxPower(pc, m, servingPathlossDb, mostInterferedPathlossDb);
    const double perPrbRx = DbmToMw(pTx) / m * gainLinear;
    return AchievableRate(perPrbRx / (link.NoisePerPrbMw() + interferenceMw), m, link);
}

} // namespace dude
