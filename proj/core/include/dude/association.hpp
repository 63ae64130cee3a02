#pragma once

#include "dude/deployment.hpp"
#include "dude/radio.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dude
{

enum class AssociationPolicy : std::uint8_t
{
    DlRsrp,
    Dude,
    DudeLoad,
};

std::string_view ToString(AssociationPolicy policy);

/// Accepts "dl_rsrp", "dude" and "dude_load".
std::optional<AssociationPolicy> ParsePolicy(std::string_view name);

/// Raised when a load-aware decision is attempted without a complete, consistent broadcast set.
class StaleBroadcastError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// What a base station advertises each broadcast period: E[N_j] and C_j^bk.
struct CellBroadcast
{
    std::uint32_t cellId = 0;
    double expectedFlows = 0.0;
    double backhaulBps = kUnlimited;
    std::int64_t issuedAt = 0;
};

/**
 * Online estimate of a cell's mean number of active flows E[N_j].
 *
 * Under the M/GI/1 processor-sharing model E[N] = eta / (1 - eta), so the
 * utilization follows as eta = E[N] / (E[N] + 1).
 */
struct LoadEstimator
{
    std::uint32_t cellId = 0;
    double emaFlows = 0.0;
    double smoothingFactor = 0.01;
};

double EstimateUtilization(const LoadEstimator& estimator);

/// ema <- (1 - beta) ema + beta n.
LoadEstimator UpdateLoad(LoadEstimator estimator, std::uint32_t activeFlowsNow);

struct AssociationDecision
{
    std::uint32_t ueId = 0;
    std::uint32_t ulCell = 0;
    std::uint32_t dlAnchor = 0;
    std::vector<double> criterionValues;
};

/// Index of the largest value; the lowest index wins ties.
std::size_t ArgmaxLowestIndex(std::span<const double> values);

/// DL anchor: the cell with the strongest reference signal.
std::uint32_t DlAnchor(std::span<const Cell> cells, std::span<const double> pathlossRow);

/// Conventional coupled access: UL follows the max-RSRP DL cell.
AssociationDecision AssociateDlRsrp(std::uint32_t ue, std::span<const Cell> cells,
                                    std::span<const double> pathlossRow);

/// Decoupled access: UL goes to the minimum-pathloss cell, DL stays on max RSRP.
AssociationDecision AssociateDude(std::uint32_t ue, std::span<const Cell> cells,
                                  std::span<const double> pathlossRow);

/**
 * Load and backhaul aware decoupled access.
 *
 * Picks argmax_j min(C_ij^Access, C_j^bk) / (E[N_j] + 1) from the broadcast
 * snapshot, lowest cell id on ties. `broadcasts` must hold exactly one entry
 * per cell, in cell-id order, all from the same epoch.
 */
AssociationDecision AssociateDudeLoad(std::uint32_t ue, std::uint32_t dlAnchor,
                                      std::span<const CellBroadcast> broadcasts,
                                      std::span<const double> accessRateBps);

/// Score of one cell under the flow-count form of the load-aware criterion.
inline double
LoadAwareScore(double accessRateBps, double backhaulBps, double expectedFlows)
{
    return std::min(accessRateBps, backhaulBps) / (expectedFlows + 1.0);
}

/**
 * Decision-time C_ij^Access: Shannon rate of a nominal full-band grant at the
 * power the UE would use towards that cell, against the cell's last measured
 * per-PRB interference.
 */
double AccessRateEstimate(double servingPathlossDb, double mostInterferedPathlossDb,
                          double gainLinear, double interferenceMw,
                          const PowerControlConfig& pc, const LinkBudget& link);

} // namespace dude
