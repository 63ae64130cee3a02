#include "dude/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <set>

namespace dude
{

namespace
{

using nlohmann::json;

std::string
JoinDiagnostics(const std::vector<ConfigDiagnostic>& diagnostics)
{
    std::string out;
    for (const auto& d : diagnostics)
    {
        if (!out.empty())
        {
            out += "; ";
        }
        out += d.path.empty() ? d.message : d.path + ": " + d.message;
    }
    return out;
}

std::string_view
TypeName(const json& j)
{
    return j.type_name();
}

/// Walks one JSON object, recording every problem instead of stopping at the first.
class ObjectReader
{
  public:
    ObjectReader(const json& object, std::string path, std::vector<ConfigDiagnostic>& diagnostics)
        : m_object(object),
          m_path(std::move(path)),
          m_diagnostics(diagnostics)
    {
        m_valid = m_object.is_object();
        if (!m_valid && !m_object.is_null())
        {
            Fail(m_path, "expected an object, got " + std::string(TypeName(m_object)));
        }
    }

    ~ObjectReader()
    {
        if (!m_valid)
        {
            return;
        }
        for (const auto& [key, value] : m_object.items())
        {
            if (!m_known.count(key))
            {
                Fail(Field(key), "unknown key");
            }
        }
    }

    ObjectReader(const ObjectReader&) = delete;
    ObjectReader& operator=(const ObjectReader&) = delete;

    std::string Field(const std::string& key) const
    {
        return m_path.empty() ? key : m_path + "." + key;
    }

    ObjectReader Child(const std::string& key)
    {
        return ObjectReader(Get(key), Field(key), m_diagnostics);
    }

    bool Present(const std::string& key) const
    {
        return m_valid && m_object.contains(key);
    }

    /// The member's JSON, or null when absent; marks the key as known.
    const json& Get(const std::string& key)
    {
        static const json kNull;
        m_known.insert(key);
        if (!m_valid)
        {
            return kNull;
        }
        const auto it = m_object.find(key);
        return it == m_object.end() ? kNull : *it;
    }

    void Number(const std::string& key, double& out, double lo, double hi, bool openLo = false)
    {
        const json& j = Get(key);
        if (j.is_null())
        {
            return;
        }
        if (!j.is_number())
        {
            Fail(Field(key), "expected a number, got " + std::string(TypeName(j)));
            return;
        }
        const double v = j.get<double>();
        if (!std::isfinite(v) || v < lo || v > hi || (openLo && v == lo))
        {
            Fail(Field(key), "value " + j.dump() + " out of range " + Range(lo, hi, openLo));
            return;
        }
        out = v;
    }

    template <typename Int>
    void Integer(const std::string& key, Int& out, std::int64_t lo, std::int64_t hi)
    {
        const json& j = Get(key);
        if (j.is_null())
        {
            return;
        }
        if (!j.is_number_integer())
        {
            Fail(Field(key), "expected an integer, got " + std::string(TypeName(j)));
            return;
        }
        if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
        {
            Fail(Field(key), "value " + j.dump() + " out of range " + IntRange(lo, hi));
            return;
        }
        const auto v = j.get<std::int64_t>();
        if (v < lo || v > hi)
        {
            Fail(Field(key), "value " + j.dump() + " out of range " + IntRange(lo, hi));
            return;
        }
        out = static_cast<Int>(v);
    }

    void Unsigned64(const std::string& key, std::uint64_t& out)
    {
        const json& j = Get(key);
        if (j.is_null())
        {
            return;
        }
        if (!j.is_number_unsigned())
        {
            Fail(Field(key), "expected a non-negative integer, got " + j.dump());
            return;
        }
        out = j.get<std::uint64_t>();
    }

    void Flag(const std::string& key, bool& out)
    {
        const json& j = Get(key);
        if (j.is_null())
        {
            return;
        }
        if (!j.is_boolean())
        {
            Fail(Field(key), "expected a boolean, got " + std::string(TypeName(j)));
            return;
        }
        out = j.get<bool>();
    }

    std::optional<std::string> String(const std::string& key)
    {
        const json& j = Get(key);
        if (j.is_null())
        {
            return std::nullopt;
        }
        if (!j.is_string())
        {
            Fail(Field(key), "expected a string, got " + std::string(TypeName(j)));
            return std::nullopt;
        }
        return j.get<std::string>();
    }

    void Fail(const std::string& path, const std::string& message)
    {
        m_diagnostics.push_back({path, message});
    }

  private:
    static std::string Format(double v)
    {
        if (std::isinf(v))
        {
            return v > 0 ? "inf" : "-inf";
        }
        return json(v).dump();
    }

    static std::string Range(double lo, double hi, bool openLo)
    {
        return std::string(openLo ? "(" : "[") + Format(lo) + ", " + Format(hi) + "]";
    }

    static std::string IntRange(std::int64_t lo, std::int64_t hi)
    {
        return "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    }

    const json& m_object;
    std::string m_path;
    std::vector<ConfigDiagnostic>& m_diagnostics;
    std::set<std::string> m_known;
    bool m_valid = false;
};


constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxSubframes = std::numeric_limits<std::uint32_t>::max();

void
ReadPowerControl(ObjectReader r, PowerControlConfig& pc)
{
    if (const auto preset = r.String("preset"))
    {
        if (const auto p = PowerControlPreset(*preset))
        {
            pc = *p;
        }
        else
        {
            r.Fail(r.Field("preset"), "unknown preset \"" + *preset +
                                          "\" (setting1, setting2, interference_aware)");
        }
    }
    if (const auto regime = r.String("regime"))
    {
        if (*regime == "open_loop")
        {
            pc.regime = PowerControlRegime::OpenLoop;
        }
        else if (*regime == "interference_aware")
        {
            pc.regime = PowerControlRegime::InterferenceAware;
        }
        else
        {
            r.Fail(r.Field("regime"),
                   "unknown regime \"" + *regime + "\" (open_loop, interference_aware)");
        }
    }
    r.Number("alpha", pc.alpha, 0.0, 1.0);
    r.Number("p0_dbm", pc.p0Dbm, -200.0, 100.0);
    r.Number("p_max_dbm", pc.pMaxDbm, -100.0, 100.0);
    r.Number("i0_dbm", pc.i0Dbm, -250.0, 100.0);
}

void
ReadLink(ObjectReader r, LinkBudget& link)
{
    r.Number("bandwidth_hz", link.bandwidthHz, 0.0, 1e12, true);
    r.Integer("prb_count", link.prbCount, 1, 10000);
    r.Number("prb_bandwidth_hz", link.prbBandwidthHz, 0.0, 1e12, true);
    r.Number("noise_figure_db", link.noiseFigureDb, 0.0, 100.0);
    r.Number("max_spectral_efficiency", link.maxSpectralEfficiency, 0.0, 100.0, true);
    r.Number("min_sinr_db", link.minSinrDb, -100.0, 100.0);
    if (r.Present("bandwidth_hz") || r.Present("prb_count") || r.Present("prb_bandwidth_hz"))
    {
        if (link.prbCount * link.prbBandwidthHz > link.bandwidthHz * (1.0 + 1e-12))
        {
            r.Fail(r.Field("prb_count"), "prb_count x prb_bandwidth_hz exceeds bandwidth_hz");
        }
    }
}

void
ReadBackhaul(ObjectReader r, BackhaulOverrides& bh, BackhaulCriterion& criterion)
{
    r.Flag("ideal", bh.ideal);
    const auto optionalRate = [&](const std::string& key, std::optional<double>& out) {
        if (r.Get(key).is_null())
        {
            return;
        }
        double v = 0.0;
        r.Number(key, v, 0.0, kInf, true);
        if (v > 0.0)
        {
            out = v;
        }
    };
    optionalRate("macro_bps", bh.macroBps);
    optionalRate("small_bps", bh.smallBps);
    if (const auto c = r.String("criterion"))
    {
        if (*c == "total")
        {
            criterion = BackhaulCriterion::Total;
        }
        else if (*c == "residual")
        {
            criterion = BackhaulCriterion::Residual;
        }
        else
        {
            r.Fail(r.Field("criterion"), "unknown criterion \"" + *c + "\" (total, residual)");
        }
    }
}

void
ReadPropagation(ObjectReader r, PropagationParams& p)
{
    r.Number("macro_pl0_db", p.macro.pl0Db, 0.0, 200.0);
    r.Number("macro_exponent", p.macro.exponent, 0.0, 10.0, true);
    r.Number("small_pl0_db", p.small.pl0Db, 0.0, 200.0);
    r.Number("small_exponent", p.small.exponent, 0.0, 10.0, true);
    r.Number("macro_shadow_sigma_db", p.macroShadowSigmaDb, 0.0, 50.0);
    r.Number("small_shadow_sigma_db", p.smallShadowSigmaDb, 0.0, 50.0);
    r.Number("decorrelation_m", p.decorrelationDistanceM, 0.0, 1e6, true);
    r.Number("shadow_grid_m", p.shadowGridM, 0.0, 1e6, true);
}

void
ReadScenario(ObjectReader r, ScenarioParams& s)
{
    r.Integer("macro_cells", s.macroCells, 0, 65535);
    r.Integer("small_cells", s.smallCells, 0, 65535);
    r.Integer("ues", s.ues, 0, 65535);
    r.Number("side_m", s.sideM, 0.0, 1e6, true);
    r.Integer("hotspots", s.hotspots, 0, 65535);
    r.Number("hotspot_fraction", s.hotspotFraction, 0.0, 1.0);
    r.Number("hotspot_sigma_m", s.hotspotSigmaM, 0.0, 1e6, true);
    r.Number("hotspot_min_macro_distance_m", s.hotspotMinMacroDistanceM, 0.0, 1e6);
    r.Number("macro_tx_power_dbm", s.macroTxPowerDbm, -100.0, 100.0);
    r.Number("small_tx_power_dbm", s.smallTxPowerDbm, -100.0, 100.0);
    r.Number("macro_antenna_gain_dbi", s.macroAntennaGainDbi, -50.0, 50.0);
    r.Number("small_antenna_gain_dbi", s.smallAntennaGainDbi, -50.0, 50.0);
    r.Number("ue_antenna_gain_dbi", s.ueAntennaGainDbi, -50.0, 50.0);
    r.Number("macro_backhaul_bps", s.macroBackhaulBps, 0.0, 1e15, true);
    r.Number("small_backhaul_bps", s.smallBackhaulBps, 0.0, 1e15, true);
    ReadPropagation(r.Child("propagation"), s.propagation);
    if (s.macroCells + s.smallCells == 0)
    {
        r.Fail(r.Field("macro_cells"), "scenario needs at least one cell");
    }
}

void
ReadSim(ObjectReader& r, SimConfig& c)
{
    r.Integer("subframes", c.subframes, 1, kMaxSubframes);
    r.Integer("warmup_subframes", c.warmupSubframes, 0, kMaxSubframes);
    r.Unsigned64("seed", c.seed);
    if (const auto p = r.String("association_policy"))
    {
        if (const auto policy = ParsePolicy(*p))
        {
            c.policy = *policy;
        }
        else
        {
            r.Fail(r.Field("association_policy"),
                   "unknown policy \"" + *p + "\" (dl_rsrp, dude, dude_load)");
        }
    }
    r.Integer("broadcast_period", c.broadcastPeriod, 1, kMaxSubframes);
    r.Flag("mobility_enabled", c.mobilityEnabled);
    r.Integer("mobility_period", c.mobilityPeriod, 1, kMaxSubframes);
    r.Flag("fading_enabled", c.fadingEnabled);
    r.Number("load_smoothing", c.loadSmoothing, 0.0, 1.0, true);
    r.Number("pf_time_constant", c.pfTimeConstant, 1.0, 1e9);
    r.Flag("trace_ue_subframes", c.traceUeSubframes);
    ReadPowerControl(r.Child("pc"), c.pc);
    {
        auto t = r.Child("traffic");
        t.Number("mean_flow_bits", c.flow.meanFlowBits, 0.0, 1e15, true);
        t.Number("mean_wait_ms", c.flow.meanWaitSubframes, 0.0, 1e9, true);
    }
    ReadLink(r.Child("link"), c.link);
    ReadBackhaul(r.Child("backhaul"), c.backhaul, c.backhaulCriterion);
    ReadScenario(r.Child("scenario"), c.scenario);
}

template <typename T, typename Fn>
void
ReadList(ObjectReader& r, const std::string& key, std::vector<T>& out, Fn convert)
{
    const json& j = r.Get(key);
    if (j.is_null())
    {
        return;
    }
    if (!j.is_array())
    {
        r.Fail(r.Field(key), "expected an array, got " + std::string(TypeName(j)));
        return;
    }
    std::vector<T> values;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        const auto path = r.Field(key) + "[" + std::to_string(i) + "]";
        std::string error;
        auto v = convert(j[i], error);
        if (!error.empty())
        {
            r.Fail(path, error);
            ok = false;
        }
        else
        {
            values.push_back(std::move(v));
        }
    }
    if (ok)
    {
        out = std::move(values);
    }
}

void
ReadExperiment(ObjectReader r, ExperimentSpec& spec)
{
    if (const auto name = r.String("name"))
    {
        if (const auto kind = ParseExperimentKind(*name))
        {
            spec.kind = *kind;
        }
        else
        {
            r.Fail(r.Field("name"), "unknown experiment \"" + *name +
                                        "\" (single, policy_comparison, "
                                        "power_control_comparison, backhaul_sweep)");
        }
    }
    ReadList(r, "seeds", spec.seeds, [](const json& j, std::string& error) -> std::uint64_t {
        if (!j.is_number_unsigned())
        {
            error = "expected a non-negative integer, got " + j.dump();
            return 0;
        }
        return j.get<std::uint64_t>();
    });
    ReadList(r, "policies", spec.policies,
             [](const json& j, std::string& error) -> AssociationPolicy {
                 const auto p = j.is_string() ? ParsePolicy(j.get<std::string>()) : std::nullopt;
                 if (!p)
                 {
                     error = "unknown policy " + j.dump() + " (dl_rsrp, dude, dude_load)";
                     return {};
                 }
                 return *p;
             });
    ReadList(r, "power_settings", spec.powerSettings,
             [](const json& j, std::string& error) -> std::string {
                 if (!j.is_string() || !PowerControlPreset(j.get<std::string>()))
                 {
                     error = "unknown power setting " + j.dump() +
                             " (setting1, setting2, interference_aware)";
                     return {};
                 }
                 return j.get<std::string>();
             });
    ReadList(r, "small_backhaul_mbps", spec.smallBackhaulMbps,
             [](const json& j, std::string& error) -> double {
                 if (!j.is_number() || !(j.get<double>() > 0.0) || !std::isfinite(j.get<double>()))
                 {
                     error = "expected a positive number, got " + j.dump();
                     return 0.0;
                 }
                 return j.get<double>();
             });
    r.Number("macro_backhaul_mbps", spec.macroBackhaulMbps, 0.0, 1e9, true);
    r.Integer("workers", spec.workers, 1, 1024);
}

void
ReadMetrics(ObjectReader r, MetricsOptions& m)
{
    if (const auto v = r.String("throughput"))
    {
        if (const auto t = ParseThroughputStatistic(*v))
        {
            m.throughput = *t;
        }
        else
        {
            r.Fail(r.Field("throughput"),
                   "unknown statistic \"" + *v + "\" (flow_rate, long_run)");
        }
    }
    if (const auto v = r.String("percentile"))
    {
        if (const auto p = ParsePercentileRule(*v))
        {
            m.percentile = *p;
        }
        else
        {
            r.Fail(r.Field("percentile"),
                   "unknown rule \"" + *v + "\" (nearest_rank, linear)");
        }
    }
    r.Integer("min_sinr_samples", m.minSinrSamples, 2, 1000000000);
}

json
PowerControlJson(const PowerControlConfig& pc)
{
    return {{"regime", pc.regime == PowerControlRegime::OpenLoop ? "open_loop"
                                                                  : "interference_aware"},
            {"alpha", pc.alpha},
            {"p0_dbm", pc.p0Dbm},
            {"p_max_dbm", pc.pMaxDbm},
            {"i0_dbm", pc.i0Dbm}};
}

json
OptionalRate(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json
SimJson(const SimConfig& c)
{
    const auto& s = c.scenario;
    const auto& p = s.propagation;
    return {
        {"subframes", c.subframes},
        {"warmup_subframes", c.warmupSubframes},
        {"seed", c.seed},
        {"association_policy", std::string(ToString(c.policy))},
        {"broadcast_period", c.broadcastPeriod},
        {"mobility_enabled", c.mobilityEnabled},
        {"mobility_period", c.mobilityPeriod},
        {"fading_enabled", c.fadingEnabled},
        {"load_smoothing", c.loadSmoothing},
        {"pf_time_constant", c.pfTimeConstant},
        {"trace_ue_subframes", c.traceUeSubframes},
        {"pc", PowerControlJson(c.pc)},
        {"traffic", {{"mean_flow_bits", c.flow.meanFlowBits},
                     {"mean_wait_ms", c.flow.meanWaitSubframes}}},
        {"link", {{"bandwidth_hz", c.link.bandwidthHz},
                  {"prb_count", c.link.prbCount},
                  {"prb_bandwidth_hz", c.link.prbBandwidthHz},
                  {"noise_figure_db", c.link.noiseFigureDb},
                  {"max_spectral_efficiency", c.link.maxSpectralEfficiency},
                  {"min_sinr_db", c.link.minSinrDb}}},
        {"backhaul", {{"ideal", c.backhaul.ideal},
                      {"macro_bps", OptionalRate(c.backhaul.macroBps)},
                      {"small_bps", OptionalRate(c.backhaul.smallBps)},
                      {"criterion", c.backhaulCriterion == BackhaulCriterion::Total ? "total"
                                                                                    : "residual"}}},
        {"scenario", {{"macro_cells", s.macroCells},
                      {"small_cells", s.smallCells},
                      {"ues", s.ues},
                      {"side_m", s.sideM},
                      {"hotspots", s.hotspots},
                      {"hotspot_fraction", s.hotspotFraction},
                      {"hotspot_sigma_m", s.hotspotSigmaM},
                      {"hotspot_min_macro_distance_m", s.hotspotMinMacroDistanceM},
                      {"macro_tx_power_dbm", s.macroTxPowerDbm},
                      {"small_tx_power_dbm", s.smallTxPowerDbm},
                      {"macro_antenna_gain_dbi", s.macroAntennaGainDbi},
                      {"small_antenna_gain_dbi", s.smallAntennaGainDbi},
                      {"ue_antenna_gain_dbi", s.ueAntennaGainDbi},
                      {"macro_backhaul_bps", s.macroBackhaulBps},
                      {"small_backhaul_bps", s.smallBackhaulBps},
                      {"propagation", {{"macro_pl0_db", p.macro.pl0Db},
                                       {"macro_exponent", p.macro.exponent},
                                       {"small_pl0_db", p.small.pl0Db},
                                       {"small_exponent", p.small.exponent},
                                       {"macro_shadow_sigma_db", p.macroShadowSigmaDb},
                                       {"small_shadow_sigma_db", p.smallShadowSigmaDb},
                                       {"decorrelation_m", p.decorrelationDistanceM},
                                       {"shadow_grid_m", p.shadowGridM}}}}},
    };
}

} // namespace

ConfigError::ConfigError(std::vector<ConfigDiagnostic> diagnostics)
    : std::invalid_argument(JoinDiagnostics(diagnostics)),
      m_diagnostics(std::move(diagnostics))
{
}

ExperimentSpec
ValidateExperimentConfig(std::string_view text)
{
    std::vector<ConfigDiagnostic> diagnostics;
    ExperimentSpec spec;
    json doc;
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
    if (!blank)
    {
        try
        {
            doc = json::parse(text);
        }
        catch (const json::parse_error& e)
        {
            throw ConfigError(std::vector<ConfigDiagnostic>{{"", std::string("malformed JSON: ") + e.what()}});
        }
        if (!doc.is_object())
        {
            throw ConfigError(std::vector<ConfigDiagnostic>{{"", "top level must be an object"}});
        }
    }
    {
        ObjectReader root(doc, "", diagnostics);
        ReadSim(root, spec.base);
        ReadMetrics(root.Child("metrics"), spec.metrics);
        ReadExperiment(root.Child("experiment"), spec);
    }
    if (diagnostics.empty())
    {
        try
        {
            spec.Validate();
        }
        catch (const std::invalid_argument& e)
        {
            diagnostics.push_back({"", e.what()});
        }
    }
    if (!diagnostics.empty())
    {
        throw ConfigError(std::move(diagnostics));
    }
    return spec;
}

SimConfig
ValidateConfig(std::string_view text)
{
    return ValidateExperimentConfig(text).base;
}

std::string
EffectiveConfigText(const ExperimentSpec& spec)
{
    json doc = SimJson(spec.base);
    json policies = json::array();
    for (const auto p : spec.policies)
    {
        policies.push_back(std::string(ToString(p)));
    }
    doc["metrics"] = {{"throughput", std::string(ToString(spec.metrics.throughput))},
                      {"percentile", std::string(ToString(spec.metrics.percentile))},
                      {"min_sinr_samples", spec.metrics.minSinrSamples}};
    doc["experiment"] = {{"name", std::string(ToString(spec.kind))},
                         {"seeds", spec.seeds},
                         {"policies", policies},
                         {"power_settings", spec.powerSettings},
                         {"small_backhaul_mbps", spec.smallBackhaulMbps},
                         {"macro_backhaul_mbps", spec.macroBackhaulMbps}};
    return doc.dump();
}

} // namespace dude
