#pragma once

#include "dude/random.hpp"
#include "dude/units.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dude
{

/// Raised for malformed scenario parameters, files or matrices.
class ScenarioError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct Cell
{
    std::uint32_t id = 0;
    Tier tier = Tier::Macro;
    Position position;
    double txPowerDlDbm = 46.0;
    double antennaGainDbi = 17.8;
    double backhaulBps = kUnlimited; // C_j^bk

    friend bool operator==(const Cell&, const Cell&) = default;
};

struct UePlacement
{
    std::uint32_t id = 0;
    Position position;
    std::optional<std::uint32_t> hotspot;

    friend bool operator==(const UePlacement&, const UePlacement&) = default;
};

struct BoundingBox
{
    double width = 1000.0;
    double height = 1000.0;

    bool Contains(Position p) const
    {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Log-distance law PL = PL_0 + 10 n log10(d / d_0).
struct PathlossModel
{
    double pl0Db = 34.0;
    double exponent = 3.7;
    double referenceDistanceM = 1.0;

    friend bool operator==(const PathlossModel&, const PathlossModel&) = default;
};

struct PropagationParams
{
    PathlossModel macro{34.0, 3.7, 1.0};
    PathlossModel small{37.0, 3.67, 1.0};
    double macroShadowSigmaDb = 8.0;
    double smallShadowSigmaDb = 10.0;
    double decorrelationDistanceM = 50.0;
    double carrierHz = 2.6e9;
    double shadowGridM = 5.0;

    const PathlossModel& ModelFor(Tier tier) const
    {
        return tier == Tier::Macro ? macro : small;
    }

    double SigmaFor(Tier tier) const
    {
        return tier == Tier::Macro ? macroShadowSigmaDb : smallShadowSigmaDb;
    }

    friend bool operator==(const PropagationParams&, const PropagationParams&) = default;
};

/// Everything GenerateScenario needs besides the seed.
struct ScenarioParams
{
    std::uint32_t macroCells = 5;
    std::uint32_t smallCells = 21;
    std::uint32_t ues = 330;
    double sideM = 1000.0;
    std::uint32_t hotspots = 21;
    double hotspotFraction = 0.7;
    double hotspotSigmaM = 40.0;
    double hotspotMinMacroDistanceM = 100.0;
    double macroTxPowerDbm = 46.0;
    double smallTxPowerDbm = 30.0;
    double macroAntennaGainDbi = 17.8;
    double smallAntennaGainDbi = 4.0;
    double ueAntennaGainDbi = 0.0;
    double macroBackhaulBps = 100e6;
    double smallBackhaulBps = 100e6;
    PropagationParams propagation;

    friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

/**
 * Row-major [ue x cell] pathloss matrix in dB, plus the shadowing statistics
 * it was drawn with.
 */
class PropagationMap
{
  public:
    PropagationMap() = default;
    PropagationMap(std::size_t ueCount, std::size_t cellCount);
    PropagationMap(std::size_t ueCount, std::size_t cellCount, std::vector<double> pathlossDb);

    std::size_t UeCount() const
    {
        return m_ueCount;
    }

    std::size_t CellCount() const
    {
        return m_cellCount;
    }

    double At(std::size_t ue, std::size_t cell) const
    {
        return m_pathlossDb[ue * m_cellCount + cell];
    }

    double& At(std::size_t ue, std::size_t cell)
    {
        return m_pathlossDb[ue * m_cellCount + cell];
    }

    std::span<const double> Row(std::size_t ue) const
    {
        return {m_pathlossDb.data() + ue * m_cellCount, m_cellCount};
    }

    const std::vector<double>& Values() const
    {
        return m_pathlossDb;
    }

    double macroShadowSigmaDb = 0.0;
    double smallShadowSigmaDb = 0.0;
    double decorrelationDistanceM = 0.0;

    friend bool operator==(const PropagationMap&, const PropagationMap&) = default;

  private:
    std::size_t m_ueCount = 0;
    std::size_t m_cellCount = 0;
    std::vector<double> m_pathlossDb;
};

/**
 * Spatially correlated log-normal shadowing, one zero-mean field per cell.
 *
 * Each field lives on a square grid and has exponential (Gudmundson)
 * correlation exp(-|dx|/d_c) exp(-|dy|/d_c) in each axis; values between
 * grid nodes are bilinearly interpolated.
 */
class ShadowingField
{
  public:
    ShadowingField(const BoundingBox& box,
                   double gridM,
                   double decorrelationM,
                   double sigmaDb,
                   RandomStream& rng);

    double At(Position p) const;

  private:
    double m_gridM;
    std::size_t m_nx;
    std::size_t m_ny;
    std::vector<float> m_values;
};

/// The analytic channel a generated scenario was built from; lets mobility recompute pathloss.
class AnalyticChannel
{
  public:
    AnalyticChannel(PropagationParams params, std::vector<ShadowingField> fields);

    /// Pathloss including shadowing, floored at free-space loss.
    double PathlossDb(const Cell& cell, Position ue) const;

    double ShadowDb(std::size_t cell, Position ue) const;

    const PropagationParams& Params() const
    {
        return m_params;
    }

  private:
    PropagationParams m_params;
    std::vector<ShadowingField> m_fields;
};

struct Scenario
{
    BoundingBox box;
    std::vector<Cell> cells;
    std::vector<UePlacement> ues;
    PropagationMap propagation;
    double ueAntennaGainDbi = 0.0;
    double carrierHz = 2.6e9;
    /// Present only for generated scenarios; file-loaded matrices have no model behind them.
    std::shared_ptr<const AnalyticChannel> channel;

    std::size_t CellCount() const
    {
        return cells.size();
    }

    std::size_t UeCount() const
    {
        return ues.size();
    }

    /// Throws ScenarioError if any structural invariant is violated.
    void Validate() const;

    /// Content equality; the analytic channel handle is not compared.
    friend bool operator==(const Scenario& a, const Scenario& b)
    {
        return a.box == b.box && a.cells == b.cells && a.ues == b.ues &&
               a.propagation == b.propagation && a.ueAntennaGainDbi == b.ueAntennaGainDbi &&
               a.carrierHz == b.carrierHz;
    }
};

/// Log-distance pathloss with the tier's default model; distance is clamped to >= 1 m.
double PathlossAt(double distanceM, Tier tier, double shadowDb, const PropagationParams& params = {});

double PathlossAt(double distanceM, const PathlossModel& model, double shadowDb);

/// Friis free-space loss, used as a physical floor for every map entry.
double FreeSpacePathloss(double distanceM, double carrierHz);

/// Regular staggered macro layout over a square of the given side.
std::vector<Position> MacroSites(std::uint32_t count, double sideM);

Scenario GenerateScenario(std::uint64_t seed, const ScenarioParams& params);

/// Persistent-heading pedestrian mobility with reflection at the box edges.
struct MobilityState
{
    std::vector<Position> positions;
    std::vector<double> headings; // radians
};

inline constexpr double kPedestrianSpeedMps = 3.0 / 3.6;

MobilityState InitMobility(const Scenario& scenario, const StreamFamily& streams);

void StepMobility(MobilityState& state, const BoundingBox& box, double dtSeconds,
                  double speedMps = kPedestrianSpeedMps);

} // namespace dude
