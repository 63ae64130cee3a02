#include "dude/engine.hpp"

#include "dude/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <queue>

namespace dude
{

double
BackhaulOverrides::Apply(const Cell& cell) const
{
    if (ideal)
    {
        return kUnlimited;
    }
    const auto& o = cell.tier == Tier::Macro ? macroBps : smallBps;
    return o ? *o : cell.backhaulBps;
}

void
SimConfig::Validate() const
{
    const auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (subframes < 1)
    {
        fail("subframes must be >= 1");
    }
    if (warmupSubframes < 0)
    {
        fail("warmup_subframes must be >= 0");
    }
    if (broadcastPeriod < 1)
    {
        fail("broadcast_period must be >= 1");
    }
    if (mobilityPeriod < 1)
    {
        fail("mobility_period must be >= 1");
    }
    if (!(pc.alpha >= 0.0 && pc.alpha <= 1.0))
    {
        fail("pc.alpha must lie in [0, 1]");
    }
    if (!std::isfinite(pc.p0Dbm) || !std::isfinite(pc.pMaxDbm) || !std::isfinite(pc.i0Dbm))
    {
        fail("pc powers must be finite");
    }
    if (!(flow.meanFlowBits > 0.0))
    {
        fail("traffic.mean_flow_bits must be positive");
    }
    if (!(flow.meanWaitSubframes > 0.0))
    {
        fail("traffic.mean_wait_ms must be positive");
    }
    if (!(loadSmoothing > 0.0 && loadSmoothing <= 1.0))
    {
        fail("load_smoothing must lie in (0, 1]");
    }
    if (!(pfTimeConstant >= 1.0))
    {
        fail("pf_time_constant must be >= 1");
    }
    if ((backhaul.macroBps && !(*backhaul.macroBps > 0.0)) ||
        (backhaul.smallBps && !(*backhaul.smallBps > 0.0)))
    {
        fail("backhaul capacities must be positive");
    }
    link.Validate();
}

namespace
{

constexpr std::uint32_t kNoCell = std::numeric_limits<std::uint32_t>::max();

struct UeState
{
    UeQueue queue;
    RandomStream traffic;
    RandomStream fading;
    std::uint32_t ulCell = kNoCell;
    std::uint32_t dlAnchor = 0;
    int maxUseful = 1;
    std::size_t flowIndex = 0;
    // cells with the smallest and second smallest pathloss, for L_s
    std::uint32_t bestCell = 0;
    std::uint32_t secondCell = kNoCell;
};

struct CellState
{
    LoadEstimator load;
    PfState pf;
    CellBroadcast broadcast;
    double backhaulBps = kUnlimited;
    double usageEmaBps = 0.0;
    std::vector<std::uint32_t> active; // ascending UE id
};

class Engine
{
  public:
    Engine(const SimConfig& cfg, const Scenario& scenario)
        : m_cfg(cfg),
          m_scenario(scenario),
          m_streams(cfg.seed),
          m_ueCount(scenario.UeCount()),
          m_cellCount(scenario.CellCount()),
          m_prbs(cfg.link.prbCount),
          m_noiseMw(cfg.link.NoisePerPrbMw()),
          m_prbBitsPerHz(cfg.link.prbBandwidthHz * kSubframeSeconds),
          m_pathloss(scenario.propagation.Values()),
          m_gain(m_pathloss.size()),
          m_fieldPrev(m_cellCount, m_prbs),
          m_fieldNext(m_cellCount, m_prbs),
          m_meanInterference(m_cellCount, 0.0),
          m_fadeScratch(m_cellCount, 1.0)
    {
    }

    MetricsLog Execute();

  private:
    double Pathloss(std::size_t ue, std::size_t cell) const
    {
        return m_pathloss[ue * m_cellCount + cell];
    }

    double Gain(std::size_t ue, std::size_t cell) const
    {
        return m_gain[ue * m_cellCount + cell];
    }

    std::span<const double> PathlossRow(std::size_t ue) const
    {
        return {m_pathloss.data() + ue * m_cellCount, m_cellCount};
    }

    std::span<const double> GainRow(std::size_t ue) const
    {
        return {m_gain.data() + ue * m_cellCount, m_cellCount};
    }

    /// Pathloss to the closest cell other than `serving` (L_s).
    double MostInterferedPathloss(std::size_t ue, std::uint32_t serving) const
    {
        const auto& s = m_ues[ue];
        const std::uint32_t k = s.bestCell != serving ? s.bestCell : s.secondCell;
        return k == kNoCell ? kUnlimited : Pathloss(ue, k);
    }

    void RefreshLinks(std::size_t ue);
    void Init();
    void Broadcast(std::int64_t t);
    AssociationDecision AssociationEpoch(std::uint32_t ue);
    void Arrive(std::int64_t t, std::uint32_t ue);
    void Move(std::int64_t t);
    void Step(std::int64_t t);

    const SimConfig& m_cfg;
    const Scenario& m_scenario;
    StreamFamily m_streams;
    std::size_t m_ueCount;
    std::size_t m_cellCount;
    int m_prbs;
    double m_noiseMw;
    double m_prbBitsPerHz;

    std::vector<double> m_pathloss;
    std::vector<double> m_gain;
    std::vector<UeState> m_ues;
    std::vector<CellState> m_cells;
    std::vector<CellBroadcast> m_broadcasts;
    std::optional<MobilityState> m_mobility;

    using Wake = std::pair<std::int64_t, std::uint32_t>;
    std::priority_queue<Wake, std::vector<Wake>, std::greater<>> m_calendar;

    InterferenceField m_fieldPrev;
    InterferenceField m_fieldNext;
    std::vector<double> m_meanInterference;
    std::vector<double> m_fadeScratch;

    // per-subframe scratch
    std::vector<SchedulingCandidate> m_candidates;
    std::vector<Grant> m_grants;
    std::vector<std::uint32_t> m_grantCell;
    std::vector<std::uint64_t> m_servedBits;
    std::vector<float> m_sinrDb;
    std::vector<Transmission> m_transmissions;
    std::vector<double> m_txGains; // m_grants.size() x m_cellCount when fading
    std::vector<ServedBits> m_servedForPf;
    std::vector<std::uint32_t> m_activeCount;

    MetricsLog m_log;
};

void
Engine::RefreshLinks(std::size_t ue)
{
    auto& s = m_ues[ue];
    s.bestCell = 0;
    s.secondCell = kNoCell;
    for (std::size_t j = 0; j < m_cellCount; ++j)
    {
        const double pl = Pathloss(ue, j);
        m_gain[ue * m_cellCount + j] =
            LinkGainLinear(m_scenario.cells[j], pl, m_scenario.ueAntennaGainDbi);
        if (j == 0)
        {
            continue;
        }
        if (pl < Pathloss(ue, s.bestCell))
        {
            s.secondCell = s.bestCell;
            s.bestCell = static_cast<std::uint32_t>(j);
        }
        else if (s.secondCell == kNoCell || pl < Pathloss(ue, s.secondCell))
        {
            s.secondCell = static_cast<std::uint32_t>(j);
        }
    }
    s.dlAnchor = DlAnchor(m_scenario.cells, PathlossRow(ue));
}

void
Engine::Init()
{
    m_log.subframes = m_cfg.subframes;
    m_log.warmupSubframes = m_cfg.warmupSubframes;
    m_log.ueCount = static_cast<std::uint32_t>(m_ueCount);
    m_log.cellCount = static_cast<std::uint32_t>(m_cellCount);

    m_log.servedBitsAfterWarmup.assign(m_ueCount, 0);
    m_cells.resize(m_cellCount);
    for (std::size_t j = 0; j < m_cellCount; ++j)
    {
        auto& c = m_cells[j];
        c.load = {static_cast<std::uint32_t>(j), 0.0, m_cfg.loadSmoothing};
        c.pf = PfState(m_cfg.pfTimeConstant);
        c.backhaulBps = m_cfg.backhaul.Apply(m_scenario.cells[j]);
    }
    m_broadcasts.resize(m_cellCount);
    m_activeCount.assign(m_cellCount, 0);

    m_ues.resize(m_ueCount);
    for (std::size_t i = 0; i < m_ueCount; ++i)
    {
        auto& u = m_ues[i];
        u.traffic = m_streams.Stream(StreamPurpose::Traffic, i);
        if (m_cfg.fadingEnabled)
        {
            u.fading = m_streams.Stream(StreamPurpose::Fading, i);
        }
        u.queue = InitialQueue(m_cfg.flow, u.traffic);
        // The countdown reaches zero in the tick of subframe wait - 1.
        m_calendar.emplace(u.queue.waitRemaining - 1, static_cast<std::uint32_t>(i));
        RefreshLinks(i);
    }

    if (m_cfg.mobilityEnabled)
    {
        if (m_scenario.channel)
        {
            m_mobility = InitMobility(m_scenario, m_streams);
        }
        else
        {
            const std::string msg = "mobility requested for a file-loaded scenario; "
                                    "UEs stay at their loaded positions";
            m_log.warnings.push_back(msg);
            std::clog << "warning: " << msg << '\n';
        }
    }
}

void
Engine::Broadcast(std::int64_t t)
{
    for (std::size_t j = 0; j < m_cellCount; ++j)
    {
        const auto& c = m_cells[j];
        double advertised = c.backhaulBps;
        if (m_cfg.backhaulCriterion == BackhaulCriterion::Residual && std::isfinite(advertised))
        {
            advertised = std::max(advertised - c.usageEmaBps, 0.0);
        }
        m_broadcasts[j] = {static_cast<std::uint32_t>(j), c.load.emaFlows, advertised, t};
    }
}

AssociationDecision
Engine::AssociationEpoch(std::uint32_t ue)
{
    const auto cells = std::span<const Cell>(m_scenario.cells);
    switch (m_cfg.policy)
    {
    case AssociationPolicy::DlRsrp:
        return AssociateDlRsrp(ue, cells, PathlossRow(ue));
    case AssociationPolicy::Dude:
        return AssociateDude(ue, cells, PathlossRow(ue));
    case AssociationPolicy::DudeLoad:
        break;
    }
    std::vector<double> access(m_cellCount);
    for (std::size_t j = 0; j < m_cellCount; ++j)
    {
        const auto cell = static_cast<std::uint32_t>(j);
        access[j] = AccessRateEstimate(Pathloss(ue, j), MostInterferedPathloss(ue, cell),
                                       Gain(ue, j), m_meanInterference[j], m_cfg.pc, m_cfg.link);
    }
    return AssociateDudeLoad(ue, m_ues[ue].dlAnchor, m_broadcasts, access);
}

void
Engine::Arrive(std::int64_t t, std::uint32_t ue)
{
    auto& u = m_ues[ue];
    u.queue.waitRemaining = 1;
    const auto events = TickQueue(u.queue, 0, m_cfg.flow, u.traffic);
    if (!events.flowArrived)
    {
        throw InvariantViolation("calendar wake-up without a flow arrival for UE " +
                                 std::to_string(ue));
    }
    const auto decision = AssociationEpoch(ue);
    u.ulCell = decision.ulCell;
    u.dlAnchor = decision.dlAnchor;
    u.maxUseful = MaxUsefulPrbs(Pathloss(ue, u.ulCell), MostInterferedPathloss(ue, u.ulCell),
                                Gain(ue, u.ulCell), m_cfg.pc, m_cfg.link);

    auto& cell = m_cells[u.ulCell];
    cell.active.insert(std::lower_bound(cell.active.begin(), cell.active.end(), ue), ue);
    cell.pf.Ensure(ue);

    u.flowIndex = m_log.flows.size();
    m_log.flows.push_back({ue, u.ulCell, events.arrivedBits, 0, t, -1});
    const bool usesBroadcast = m_cfg.policy == AssociationPolicy::DudeLoad;
    m_log.decisions.push_back({static_cast<std::uint32_t>(t), static_cast<std::uint16_t>(ue),
                               static_cast<std::uint16_t>(decision.ulCell),
                               static_cast<std::uint16_t>(decision.dlAnchor),
                               usesBroadcast ? m_broadcasts.front().issuedAt : -1});
}

void
Engine::Move(std::int64_t t)
{
    if (!m_mobility || t == 0 || t % m_cfg.mobilityPeriod != 0)
    {
        return;
    }
    StepMobility(*m_mobility, m_scenario.box,
                 static_cast<double>(m_cfg.mobilityPeriod) * kSubframeSeconds);
    const auto& channel = *m_scenario.channel;
    for (std::size_t i = 0; i < m_ueCount; ++i)
    {
        const Position p = m_mobility->positions[i];
        for (std::size_t j = 0; j < m_cellCount; ++j)
        {
            m_pathloss[i * m_cellCount + j] = channel.PathlossDb(m_scenario.cells[j], p);
        }
        RefreshLinks(i);
        auto& u = m_ues[i];
        if (u.queue.state == QueueState::Active)
        {
            u.maxUseful = MaxUsefulPrbs(Pathloss(i, u.ulCell), MostInterferedPathloss(i, u.ulCell),
                                        Gain(i, u.ulCell), m_cfg.pc, m_cfg.link);
        }
    }
}

void
Engine::Step(std::int64_t t)
{
    Move(t);
    for (std::size_t j = 0; j < m_cellCount; ++j)
    {
        m_meanInterference[j] = m_fieldPrev.MeanMw(j);
    }

    // (a) broadcasts
    if (t % m_cfg.broadcastPeriod == 0)
    {
        Broadcast(t);
    }

    // (b) arrivals and association
    while (!m_calendar.empty() && m_calendar.top().first <= t)
    {
        const auto ue = m_calendar.top().second;
        m_calendar.pop();
        Arrive(t, ue);
    }

    // (c) scheduling
    m_grants.clear();
    m_grantCell.clear();
    for (std::size_t j = 0; j < m_cellCount; ++j)
    {
        const auto& cell = m_cells[j];
        m_activeCount[j] = static_cast<std::uint32_t>(cell.active.size());
        if (cell.active.empty())
        {
            continue;
        }
        m_candidates.clear();
        const auto cellId = static_cast<std::uint32_t>(j);
        for (const auto ue : cell.active)
        {
            m_candidates.push_back({ue, m_ues[ue].maxUseful, Pathloss(ue, j),
                                    MostInterferedPathloss(ue, cellId), Gain(ue, j)});
        }
        for (const auto& g : ScheduleCell(m_candidates, cell.pf, m_cfg.pc, m_cfg.link,
                                          m_meanInterference[j]))
        {
            m_grants.push_back(g);
            m_grantCell.push_back(cellId);
        }
    }

    // (d) link quality against last subframe's interference, backhaul cap
    const std::size_t grants = m_grants.size();
    m_servedBits.assign(grants, 0);
    m_sinrDb.assign(grants, 0.0f);
    m_transmissions.clear();
    if (m_cfg.fadingEnabled)
    {
        m_txGains.resize(grants * m_cellCount);
    }
    std::exponential_distribution<double> rayleighPower(1.0);
    for (std::size_t g = 0; g < grants; ++g)
    {
        const auto& grant = m_grants[g];
        const std::uint32_t j = m_grantCell[g];
        auto& u = m_ues[grant.ueId];
        std::span<const double> gains = GainRow(grant.ueId);
        if (m_cfg.fadingEnabled)
        {
            double* faded = m_txGains.data() + g * m_cellCount;
            for (std::size_t k = 0; k < m_cellCount; ++k)
            {
                faded[k] = gains[k] * rayleighPower(u.fading);
            }
            gains = {faded, m_cellCount};
        }
        const double perPrbTx = DbmToMw(grant.txPowerDbm) / grant.prbLen;
        const double rx = perPrbTx * gains[j];
        const auto interference = m_fieldPrev.Row(j);
        double bits = 0.0;
        double interferenceSum = 0.0;
        for (int k = grant.prbStart; k < grant.prbStart + grant.prbLen; ++k)
        {
            const double i = interference[static_cast<std::size_t>(k)];
            interferenceSum += i;
            bits += m_prbBitsPerHz * SpectralEfficiency(rx / (m_noiseMw + i), m_cfg.link);
        }
        const double effective = rx / (m_noiseMw + interferenceSum / grant.prbLen);
        m_sinrDb[g] = static_cast<float>(LinearToDb(effective));
        m_servedBits[g] = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(bits)),
                                                  u.queue.pendingBits);
        m_transmissions.push_back({grant.ueId, j, grant.prbStart, grant.prbLen, perPrbTx, gains});
    }
    // grants are grouped by cell, in cell order
    for (std::size_t begin = 0; begin < grants;)
    {
        std::size_t end = begin;
        while (end < grants && m_grantCell[end] == m_grantCell[begin])
        {
            ++end;
        }
        const double budget = m_cells[m_grantCell[begin]].backhaulBps * kSubframeSeconds;
        ApplyBackhaulCap(std::span(m_servedBits).subspan(begin, end - begin), budget);
        begin = end;
    }

    // (e) queues
    std::vector<std::uint64_t> cellBits(m_cellCount, 0);
    std::vector<std::uint16_t> cellPrbs(m_cellCount, 0);
    for (std::size_t g = 0; g < grants; ++g)
    {
        const auto& grant = m_grants[g];
        const std::uint32_t j = m_grantCell[g];
        auto& u = m_ues[grant.ueId];
        cellBits[j] += m_servedBits[g];
        cellPrbs[j] = static_cast<std::uint16_t>(cellPrbs[j] + grant.prbLen);
        m_log.flows[u.flowIndex].servedBits += m_servedBits[g];
        if (!m_log.IsWarmup(t))
        {
            m_log.servedBitsAfterWarmup[grant.ueId] += m_servedBits[g];
        }
        if (m_cfg.traceUeSubframes)
        {
            m_log.ueRecords.push_back({static_cast<std::uint32_t>(t),
                                       static_cast<std::uint16_t>(grant.ueId),
                                       static_cast<std::uint16_t>(j),
                                       static_cast<std::uint32_t>(m_servedBits[g]), m_sinrDb[g],
                                       static_cast<std::uint16_t>(grant.prbLen)});
        }
        const auto events = TickQueue(u.queue, m_servedBits[g], m_cfg.flow, u.traffic);
        if (events.flowCompleted)
        {
            m_log.flows[u.flowIndex].end = t + 1;
            auto& cell = m_cells[j];
            cell.active.erase(std::lower_bound(cell.active.begin(), cell.active.end(),
                                               grant.ueId));
            cell.pf.Remove(grant.ueId);
            u.ulCell = kNoCell;
            m_calendar.emplace(t + u.queue.waitRemaining, grant.ueId);
        }
    }

    // (f) interference seen during the next subframe
    AccumulateInterference(m_transmissions, m_fieldNext);
    m_fieldNext.subframe = t;
    std::swap(m_fieldPrev, m_fieldNext);

    // (g) estimators, (h) per-cell records
    for (std::size_t begin = 0, j = 0; j < m_cellCount; ++j)
    {
        m_servedForPf.clear();
        while (begin < grants && m_grantCell[begin] == j)
        {
            m_servedForPf.push_back({m_grants[begin].ueId, m_servedBits[begin]});
            ++begin;
        }
        std::sort(m_servedForPf.begin(), m_servedForPf.end(),
                  [](const ServedBits& a, const ServedBits& b) { return a.ue < b.ue; });
        auto& cell = m_cells[j];
        UpdatePf(cell.pf, m_servedForPf, kSubframeSeconds);
        cell.load = UpdateLoad(cell.load, m_activeCount[j]);
        const double usage = static_cast<double>(cellBits[j]) / kSubframeSeconds;
        cell.usageEmaBps = (1.0 - m_cfg.loadSmoothing) * cell.usageEmaBps +
                           m_cfg.loadSmoothing * usage;
        m_log.cellRecords.push_back({static_cast<std::uint32_t>(t), static_cast<std::uint16_t>(j),
                                     static_cast<std::uint16_t>(m_activeCount[j]),
                                     static_cast<float>(cell.load.emaFlows),
                                     static_cast<std::uint32_t>(cellBits[j]), cellPrbs[j]});
    }
}

MetricsLog
Engine::Execute()
{
    if (m_ueCount == 0)
    {
        m_log.subframes = m_cfg.subframes;
        m_log.warmupSubframes = m_cfg.warmupSubframes;
        m_log.cellCount = static_cast<std::uint32_t>(m_cellCount);
        return std::move(m_log);
    }
    Init();
    if (m_cfg.traceUeSubframes)
    {
        m_log.ueRecords.reserve(static_cast<std::size_t>(m_cfg.subframes) * m_ueCount / 2);
    }
    m_log.cellRecords.reserve(static_cast<std::size_t>(m_cfg.subframes) * m_cellCount);
    for (std::int64_t t = 0; t < m_cfg.subframes; ++t)
    {
        try
        {
            Step(t);
        }
        catch (const SimulationError&)
        {
            throw;
        }
        catch (const std::exception& e)
        {
            throw SimulationError(t, e.what());
        }
    }
    return std::move(m_log);
}

} // namespace

MetricsLog
Run(const SimConfig& config, const Scenario& scenario)
{
    config.Validate();
    if (scenario.UeCount() > 65535 || scenario.CellCount() > 65535)
    {
        throw std::invalid_argument("at most 65535 UEs and 65535 cells are supported");
    }
    if (scenario.CellCount() == 0)
    {
        throw std::invalid_argument("scenario has no cells");
    }
    Engine engine(config, scenario);
    return engine.Execute();
}

} // namespace dude
