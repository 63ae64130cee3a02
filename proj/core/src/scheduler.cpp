#include "dude/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dude
{

namespace
{

auto
LowerBound(std::vector<PfState::Entry>& entries, std::uint32_t ue)
{
    return std::lower_bound(entries.begin(), entries.end(), ue,
                            [](const PfState::Entry& e, std::uint32_t u) { return e.ue < u; });
}

auto
LowerBound(const std::vector<PfState::Entry>& entries, std::uint32_t ue)
{
    return std::lower_bound(entries.begin(), entries.end(), ue,
                            [](const PfState::Entry& e, std::uint32_t u) { return e.ue < u; });
}

double
PerPrbSnr(int m, double servingPathlossDb, double mostInterferedPathlossDb, double gainLinear,
          const PowerControlConfig& pc, double noiseMw)
{
    const double pTx = UplinkTxPower(pc, m, servingPathlossDb, mostInterferedPathlossDb);
    return DbmToMw(pTx) / m * gainLinear / noiseMw;
}

} // namespace

void
PfState::Ensure(std::uint32_t ue)
{
    auto it = LowerBound(m_entries, ue);
    if (it == m_entries.end() || it->ue != ue)
    {
        m_entries.insert(it, Entry{ue, m_floorBps});
    }
}

void
PfState::Remove(std::uint32_t ue)
{
    auto it = LowerBound(m_entries, ue);
    if (it != m_entries.end() && it->ue == ue)
    {
        m_entries.erase(it);
    }
}

bool
PfState::Contains(std::uint32_t ue) const
{
    auto it = LowerBound(m_entries, ue);
    return it != m_entries.end() && it->ue == ue;
}

double
PfState::Average(std::uint32_t ue) const
{
    auto it = LowerBound(m_entries, ue);
    return it != m_entries.end() && it->ue == ue ? it->avgBps : m_floorBps;
}

void
UpdatePf(PfState& pf, std::span<const ServedBits> served, double subframeSeconds)
{
    std::vector<ServedBits> sorted;
    const auto byUe = [](const ServedBits& a, const ServedBits& b) { return a.ue < b.ue; };
    if (!std::is_sorted(served.begin(), served.end(), byUe))
    {
        sorted.assign(served.begin(), served.end());
        std::stable_sort(sorted.begin(), sorted.end(), byUe);
        served = sorted;
    }
    const double w = 1.0 / pf.TimeConstant();
    auto s = served.begin();
    for (auto& e : pf.Entries())
    {
        while (s != served.end() && s->ue < e.ue)
        {
            ++s;
        }
        std::uint64_t bits = 0;
        for (; s != served.end() && s->ue == e.ue; ++s)
        {
            bits += s->bits;
        }
        const double instantaneous = static_cast<double>(bits) / subframeSeconds;
        e.avgBps = std::max(pf.FloorBps(), (1.0 - w) * e.avgBps + w * instantaneous);
    }
}

double
UsefulRate(int m, double servingPathlossDb, double mostInterferedPathlossDb, double gainLinear,
           const PowerControlConfig& pc, const LinkBudget& link)
{
    const double snr = PerPrbSnr(m, servingPathlossDb, mostInterferedPathlossDb, gainLinear, pc,
                                 link.NoisePerPrbMw());
    if (LinearToDb(snr) < link.minSinrDb)
    {
        return 0.0;
    }
    return AchievableRate(snr, m, link);
}

int
MaxUsefulPrbs(double servingPathlossDb, double mostInterferedPathlossDb, double gainLinear,
              const PowerControlConfig& pc, const LinkBudget& link)
{
    // Per-PRB power is flat until P_MAX binds and falls as 1/M afterwards, so
    // the per-PRB SNR is non-increasing in M while M log2(1 + S/M) keeps
    // growing: the useful rate peaks at the largest M still above the
    // decoding threshold.
    const auto feasible = [&](int m) {
        return UsefulRate(m, servingPathlossDb, mostInterferedPathlossDb, gainLinear, pc, link) >
               0.0;
    };
    if (!feasible(1))
    {
        return 1;
    }
    const double noiseDbm = link.NoisePerPrbDbm();
    const double gainDb = LinearToDb(gainLinear);
    // P_MAX - 10 log10(M) + G - N >= minSinr  <=>  M <= 10^((P_MAX + G - N - minSinr) / 10)
    const double bound = std::pow(10.0, (pc.pMaxDbm + gainDb - noiseDbm - link.minSinrDb) / 10.0);
    int m = static_cast<int>(std::clamp(std::floor(bound), 1.0, static_cast<double>(link.prbCount)));
    while (m < link.prbCount && feasible(m + 1))
    {
        ++m;
    }
    while (m > 1 && !feasible(m))
    {
        --m;
    }
    return m;
}

std::vector<Grant>
ScheduleCell(std::span<const SchedulingCandidate> candidates, const PfState& pf,
             const PowerControlConfig& pc, const LinkBudget& link, double meanInterferenceMw)
{
    std::vector<Grant> grants;
    const auto n = static_cast<int>(candidates.size());
    if (n == 0)
    {
        return grants;
    }
    const int total = link.prbCount;
    const int share = (total + n - 1) / n;
    const double noiseMw = link.NoisePerPrbMw();

    struct Ranked
    {
        std::size_t index;
        double metric;
        int prbs;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
    {
        const auto& c = candidates[i];
        const int m = std::max(1, std::min(c.maxUsefulPrbs, share));
        const double pTx = UplinkTxPower(pc, m, c.servingPathlossDb, c.mostInterferedPathlossDb);
        const double sinr = DbmToMw(pTx) / m * c.gainLinear / (noiseMw + meanInterferenceMw);
        ranked.push_back({i, AchievableRate(sinr, m, link) / pf.Average(c.ueId), 0});
    }
    std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
        if (a.metric != b.metric)
        {
            return a.metric > b.metric;
        }
        return candidates[a.index].ueId < candidates[b.index].ueId;
    });

    int remaining = total;
    for (int r = 0; r < n && remaining > 0; ++r)
    {
        const int reserve = n <= total ? std::min(n - r - 1, remaining - 1) : 0;
        const int want = std::min(candidates[ranked[r].index].maxUsefulPrbs, share);
        ranked[r].prbs = std::max(1, std::min(want, remaining - reserve));
        remaining -= ranked[r].prbs;
    }
    int next = 0;
    for (const auto& r : ranked)
    {
        if (r.prbs == 0)
        {
            continue;
        }
        const auto& c = candidates[r.index];
        grants.push_back({c.ueId, next, r.prbs,
                          UplinkTxPower(pc, r.prbs, c.servingPathlossDb,
                                        c.mostInterferedPathlossDb)});
        next += r.prbs;
    }
    return grants;
}

void
ApplyBackhaulCap(std::span<std::uint64_t> bits, double budgetBits)
{
    const double total = std::accumulate(bits.begin(), bits.end(), 0.0,
                                         [](double acc, std::uint64_t b) { return acc + b; });
    if (total <= budgetBits)
    {
        return;
    }
    const double scale = std::max(0.0, budgetBits) / total;
    for (auto& b : bits)
    {
        b = static_cast<std::uint64_t>(std::floor(static_cast<double>(b) * scale));
    }
}

} // namespace dude
