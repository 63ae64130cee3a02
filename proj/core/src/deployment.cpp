#include "dude/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dude
{

namespace
{

constexpr double kMinDistanceM = 1.0;
constexpr double kFloorToleranceDb = 1e-9;

// Reflect a coordinate into [0, limit]; returns true when the heading component flips.
bool
Reflect(double& v, double limit)
{
    bool flipped = false;
    while (v < 0.0 || v > limit)
    {
        v = v < 0.0 ? -v : 2.0 * limit - v;
        flipped = !flipped;
    }
    return flipped;
}

} // namespace

PropagationMap::PropagationMap(std::size_t ueCount, std::size_t cellCount)
    : m_ueCount(ueCount),
      m_cellCount(cellCount),
      m_pathlossDb(ueCount * cellCount, 0.0)
{
}

PropagationMap::PropagationMap(std::size_t ueCount,
                               std::size_t cellCount,
                               std::vector<double> pathlossDb)
    : m_ueCount(ueCount),
      m_cellCount(cellCount),
      m_pathlossDb(std::move(pathlossDb))
{
    if (m_pathlossDb.size() != ueCount * cellCount)
    {
        std::ostringstream os;
        os << "pathloss matrix has " << m_pathlossDb.size() << " entries, expected " << ueCount
           << " x " << cellCount;
        throw ScenarioError(os.str());
    }
}

ShadowingField::ShadowingField(const BoundingBox& box,
                               double gridM,
                               double decorrelationM,
                               double sigmaDb,
                               RandomStream& rng)
    : m_gridM(gridM),
      m_nx(static_cast<std::size_t>(std::ceil(box.width / gridM)) + 2),
      m_ny(static_cast<std::size_t>(std::ceil(box.height / gridM)) + 2),
      m_values(m_nx * m_ny)
{
    const double a = std::exp(-gridM / decorrelationM);
    const double innovation = std::sqrt(1.0 - a * a);
    std::normal_distribution<double> normal(0.0, 1.0);

    // AR(1) along y for every column, then AR(1) along x over the result: the
    // product correlation a^|dx| a^|dy| with unit marginal variance.
    std::vector<double> z(m_nx * m_ny);
    for (std::size_t ix = 0; ix < m_nx; ++ix)
    {
        z[ix] = normal(rng);
        for (std::size_t iy = 1; iy < m_ny; ++iy)
        {
            z[iy * m_nx + ix] = a * z[(iy - 1) * m_nx + ix] + innovation * normal(rng);
        }
    }
    for (std::size_t iy = 0; iy < m_ny; ++iy)
    {
        double prev = z[iy * m_nx];
        m_values[iy * m_nx] = static_cast<float>(sigmaDb * prev);
        for (std::size_t ix = 1; ix < m_nx; ++ix)
        {
            prev = a * prev + innovation * z[iy * m_nx + ix];
            m_values[iy * m_nx + ix] = static_cast<float>(sigmaDb * prev);
        }
    }
}

double
ShadowingField::At(Position p) const
{
    const double fx = std::clamp(p.x / m_gridM, 0.0, static_cast<double>(m_nx - 1));
    const double fy = std::clamp(p.y / m_gridM, 0.0, static_cast<double>(m_ny - 1));
    const auto ix = std::min(static_cast<std::size_t>(fx), m_nx - 2);
    const auto iy = std::min(static_cast<std::size_t>(fy), m_ny - 2);
    const double tx = fx - static_cast<double>(ix);
    const double ty = fy - static_cast<double>(iy);
    const double v00 = m_values[iy * m_nx + ix];
    const double v10 = m_values[iy * m_nx + ix + 1];
    const double v01 = m_values[(iy + 1) * m_nx + ix];
    const double v11 = m_values[(iy + 1) * m_nx + ix + 1];
    return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

AnalyticChannel::AnalyticChannel(PropagationParams params, std::vector<ShadowingField> fields)
    : m_params(std::move(params)),
      m_fields(std::move(fields))
{
}

double
AnalyticChannel::ShadowDb(std::size_t cell, Position ue) const
{
    return m_fields.at(cell).At(ue);
}

double
AnalyticChannel::PathlossDb(const Cell& cell, Position ue) const
{
    const double d = std::max(Distance(cell.position, ue), kMinDistanceM);
    const double pl = PathlossAt(d, m_params.ModelFor(cell.tier), ShadowDb(cell.id, ue));
    return std::max(pl, FreeSpacePathloss(d, m_params.carrierHz));
}

double
PathlossAt(double distanceM, const PathlossModel& model, double shadowDb)
{
    const double d = std::max(distanceM, kMinDistanceM);
    return model.pl0Db + 10.0 * model.exponent * std::log10(d / model.referenceDistanceM) +
           shadowDb;
}

double
PathlossAt(double distanceM, Tier tier, double shadowDb, const PropagationParams& params)
{
    return PathlossAt(distanceM, params.ModelFor(tier), shadowDb);
}

double
FreeSpacePathloss(double distanceM, double carrierHz)
{
    constexpr double kSpeedOfLight = 299792458.0;
    const double d = std::max(distanceM, kMinDistanceM);
    return 20.0 * std::log10(4.0 * std::numbers::pi * d * carrierHz / kSpeedOfLight);
}

std::vector<Position>
MacroSites(std::uint32_t count, double sideM)
{
    std::vector<Position> sites;
    if (count == 0)
    {
        return sites;
    }
    const auto cols = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    const std::uint32_t rows = (count + cols - 1) / cols;
    std::uint32_t placed = 0;
    for (std::uint32_t r = 0; r < rows; ++r)
    {
        // spread the remainder over the first rows so the layout is staggered
        const std::uint32_t inRow = count / rows + (r < count % rows ? 1 : 0);
        for (std::uint32_t c = 0; c < inRow; ++c, ++placed)
        {
            sites.push_back({sideM * (c + 0.5) / inRow, sideM * (r + 0.5) / rows});
        }
    }
    return sites;
}

namespace
{

void
CheckParams(const ScenarioParams& p)
{
    if (p.macroCells + p.smallCells == 0)
    {
        throw ScenarioError("scenario needs at least one cell");
    }
    if (p.ues == 0)
    {
        throw ScenarioError("scenario needs at least one UE");
    }
    if (p.ues > 65535 || p.macroCells + p.smallCells > 65535)
    {
        throw ScenarioError("at most 65535 UEs and 65535 cells are supported");
    }
    if (!(p.hotspotFraction >= 0.0 && p.hotspotFraction <= 1.0))
    {
        throw ScenarioError("hotspot concentration must lie in [0, 1]");
    }
    if (!(p.sideM > 0.0))
    {
        throw ScenarioError("area side length must be positive");
    }
    if (p.hotspots == 0 && (p.smallCells > 0 || p.hotspotFraction > 0.0))
    {
        throw ScenarioError("small cells and clustered UEs need at least one hotspot");
    }
    if (!(p.macroBackhaulBps > 0.0) || !(p.smallBackhaulBps > 0.0))
    {
        throw ScenarioError("backhaul capacity must be positive");
    }
    if (!(p.hotspotSigmaM > 0.0) || !(p.propagation.shadowGridM > 0.0) ||
        !(p.propagation.decorrelationDistanceM > 0.0))
    {
        throw ScenarioError("hotspot spread, shadowing grid and decorrelation distance must be "
                            "positive");
    }
}

Position
ClampToBox(Position p, const BoundingBox& box)
{
    return {std::clamp(p.x, 0.0, box.width), std::clamp(p.y, 0.0, box.height)};
}

} // namespace

Scenario
GenerateScenario(std::uint64_t seed, const ScenarioParams& params)
{
    CheckParams(params);
    const StreamFamily streams(seed);
    Scenario s;
    s.box = {params.sideM, params.sideM};
    s.ueAntennaGainDbi = params.ueAntennaGainDbi;

    auto layout = streams.Stream(StreamPurpose::Scenario, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto macroSites = MacroSites(params.macroCells, params.sideM);

    const double margin = std::min(50.0, params.sideM / 10.0);
    const double minHotspotSpacing = 2.0 * params.hotspotSigmaM;
    std::vector<Position> hotspots;
    for (std::uint32_t h = 0; h < params.hotspots; ++h)
    {
        Position candidate;
        for (int attempt = 0; attempt < 1000; ++attempt)
        {
            candidate = {margin + unit(layout) * (params.sideM - 2 * margin),
                         margin + unit(layout) * (params.sideM - 2 * margin)};
            const bool farFromMacros =
                std::all_of(macroSites.begin(), macroSites.end(), [&](Position m) {
                    return Distance(m, candidate) >= params.hotspotMinMacroDistanceM;
                });
            const bool farFromHotspots =
                std::all_of(hotspots.begin(), hotspots.end(), [&](Position o) {
                    return Distance(o, candidate) >= minHotspotSpacing;
                });
            if (farFromMacros && farFromHotspots)
            {
                break;
            }
        }
        hotspots.push_back(candidate);
    }
    std::vector<double> hotspotWeights;
    std::exponential_distribution<double> weightDist(1.0);
    for (std::size_t h = 0; h < hotspots.size(); ++h)
    {
        hotspotWeights.push_back(weightDist(layout));
    }

    std::uint32_t id = 0;
    for (const auto& site : macroSites)
    {
        s.cells.push_back({id++, Tier::Macro, site, params.macroTxPowerDbm,
                           params.macroAntennaGainDbi, params.macroBackhaulBps});
    }
    for (std::uint32_t k = 0; k < params.smallCells; ++k)
    {
        Position p = hotspots[k % hotspots.size()];
        if (k >= hotspots.size())
        {
            p = ClampToBox({p.x + params.hotspotSigmaM * normal(layout),
                            p.y + params.hotspotSigmaM * normal(layout)},
                           s.box);
        }
        s.cells.push_back({id++, Tier::Small, p, params.smallTxPowerDbm,
                           params.smallAntennaGainDbi, params.smallBackhaulBps});
    }

    auto placement = streams.Stream(StreamPurpose::Scenario, 1);
    const auto clustered = static_cast<std::uint32_t>(
        std::lround(params.hotspotFraction * static_cast<double>(params.ues)));
    std::discrete_distribution<std::uint32_t> pickHotspot(hotspotWeights.begin(),
                                                          hotspotWeights.end());
    for (std::uint32_t u = 0; u < params.ues; ++u)
    {
        UePlacement ue;
        ue.id = u;
        if (u < clustered)
        {
            const std::uint32_t h = pickHotspot(placement);
            Position p;
            int attempt = 0;
            do
            {
                p = {hotspots[h].x + params.hotspotSigmaM * normal(placement),
                     hotspots[h].y + params.hotspotSigmaM * normal(placement)};
            } while (!s.box.Contains(p) && ++attempt < 100);
            ue.position = ClampToBox(p, s.box);
            ue.hotspot = h;
        }
        else
        {
            ue.position = {unit(placement) * s.box.width, unit(placement) * s.box.height};
        }
        s.ues.push_back(ue);
    }

    const auto& prop = params.propagation;
    std::vector<ShadowingField> fields;
    fields.reserve(s.cells.size());
    for (const auto& cell : s.cells)
    {
        auto rng = streams.Stream(StreamPurpose::Scenario, 100 + cell.id);
        fields.emplace_back(s.box, prop.shadowGridM, prop.decorrelationDistanceM,
                            prop.SigmaFor(cell.tier), rng);
    }
    auto channel = std::make_shared<const AnalyticChannel>(prop, std::move(fields));

    s.propagation = PropagationMap(s.ues.size(), s.cells.size());
    s.propagation.macroShadowSigmaDb = prop.macroShadowSigmaDb;
    s.propagation.smallShadowSigmaDb = prop.smallShadowSigmaDb;
    s.propagation.decorrelationDistanceM = prop.decorrelationDistanceM;
    s.carrierHz = prop.carrierHz;
    for (const auto& ue : s.ues)
    {
        for (const auto& cell : s.cells)
        {
            s.propagation.At(ue.id, cell.id) = channel->PathlossDb(cell, ue.position);
        }
    }
    s.channel = std::move(channel);
    s.Validate();
    return s;
}

void
Scenario::Validate() const
{
    if (cells.empty())
    {
        throw ScenarioError("scenario has no cells");
    }
    if (!(box.width > 0.0) || !(box.height > 0.0))
    {
        throw ScenarioError("bounding box must have positive extent");
    }
    for (std::size_t j = 0; j < cells.size(); ++j)
    {
        if (cells[j].id != j)
        {
            throw ScenarioError("cell ids must be unique and dense in [0, B); cell at index " +
                                std::to_string(j) + " has id " + std::to_string(cells[j].id));
        }
        if (!(cells[j].backhaulBps > 0.0))
        {
            throw ScenarioError("cell " + std::to_string(j) + " has non-positive backhaul");
        }
        if (!std::isfinite(cells[j].txPowerDlDbm) || !std::isfinite(cells[j].antennaGainDbi))
        {
            throw ScenarioError("cell " + std::to_string(j) + " has a non-finite power budget");
        }
    }
    for (std::size_t i = 0; i < ues.size(); ++i)
    {
        if (ues[i].id != i)
        {
            throw ScenarioError("UE ids must be unique and dense in [0, N_u); UE at index " +
                                std::to_string(i) + " has id " + std::to_string(ues[i].id));
        }
        if (!box.Contains(ues[i].position))
        {
            throw ScenarioError("UE " + std::to_string(i) + " lies outside the bounding box");
        }
    }
    if (propagation.UeCount() != ues.size() || propagation.CellCount() != cells.size())
    {
        std::ostringstream os;
        os << "pathloss matrix is " << propagation.UeCount() << " x " << propagation.CellCount()
           << " but scenario has " << ues.size() << " UEs and " << cells.size() << " cells";
        throw ScenarioError(os.str());
    }
    for (const auto& ue : ues)
    {
        for (const auto& cell : cells)
        {
            const double pl = propagation.At(ue.id, cell.id);
            if (!std::isfinite(pl))
            {
                throw ScenarioError("non-finite pathloss for UE " + std::to_string(ue.id) +
                                    ", cell " + std::to_string(cell.id));
            }
            const double floor = FreeSpacePathloss(Distance(ue.position, cell.position), carrierHz);
            if (pl < floor - kFloorToleranceDb)
            {
                throw ScenarioError("pathloss for UE " + std::to_string(ue.id) + ", cell " +
                                    std::to_string(cell.id) + " is below free-space loss");
            }
        }
    }
}

MobilityState
InitMobility(const Scenario& scenario, const StreamFamily& streams)
{
    MobilityState state;
    state.positions.reserve(scenario.UeCount());
    state.headings.reserve(scenario.UeCount());
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (const auto& ue : scenario.ues)
    {
        auto rng = streams.Stream(StreamPurpose::Mobility, ue.id);
        state.positions.push_back(ue.position);
        state.headings.push_back(angle(rng));
    }
    return state;
}

void
StepMobility(MobilityState& state, const BoundingBox& box, double dtSeconds, double speedMps)
{
    const double step = speedMps * dtSeconds;
    for (std::size_t i = 0; i < state.positions.size(); ++i)
    {
        auto& p = state.positions[i];
        double& h = state.headings[i];
        p.x += step * std::cos(h);
        p.y += step * std::sin(h);
        if (Reflect(p.x, box.width))
        {
            h = std::numbers::pi - h;
        }
        if (Reflect(p.y, box.height))
        {
            h = -h;
        }
    }
}

} // namespace dude
