#include "dude/scenario_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dude
{

using nlohmann::json;

namespace
{

constexpr const char* kFormat = "dudesim-scenario";
constexpr int kVersion = 1;

json
Bps(double v)
{
    return std::isinf(v) ? json(nullptr) : json(v);
}

double
BpsFrom(const json& j)
{
    return j.is_null() ? kUnlimited : j.get<double>();
}

Tier
TierFrom(const std::string& name)
{
    if (name == "macro")
    {
        return Tier::Macro;
    }
    if (name == "small")
    {
        return Tier::Small;
    }
    throw ScenarioError("unknown cell tier '" + name + "'");
}

} // namespace

std::string
ScenarioToText(const Scenario& scenario)
{
    json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    doc["bounding_box"] = {{"width_m", scenario.box.width}, {"height_m", scenario.box.height}};
    doc["carrier_hz"] = scenario.carrierHz;
    doc["ue_antenna_gain_dbi"] = scenario.ueAntennaGainDbi;

    json cells = json::array();
    for (const auto& c : scenario.cells)
    {
        cells.push_back({{"id", c.id},
                         {"tier", ToString(c.tier)},
                         {"x_m", c.position.x},
                         {"y_m", c.position.y},
                         {"tx_power_dbm", c.txPowerDlDbm},
                         {"antenna_gain_dbi", c.antennaGainDbi},
                         {"backhaul_bps", Bps(c.backhaulBps)}});
    }
    doc["cells"] = std::move(cells);

    json ues = json::array();
    for (const auto& u : scenario.ues)
    {
        ues.push_back({{"id", u.id},
                       {"x_m", u.position.x},
                       {"y_m", u.position.y},
                       {"hotspot", u.hotspot ? json(*u.hotspot) : json(nullptr)}});
    }
    doc["ues"] = std::move(ues);

    const auto& prop = scenario.propagation;
    json rows = json::array();
    for (std::size_t i = 0; i < prop.UeCount(); ++i)
    {
        const auto row = prop.Row(i);
        rows.push_back(json(std::vector<double>(row.begin(), row.end())));
    }
    doc["propagation"] = {{"macro_shadowing_sigma_db", prop.macroShadowSigmaDb},
                          {"small_shadowing_sigma_db", prop.smallShadowSigmaDb},
                          {"decorrelation_distance_m", prop.decorrelationDistanceM},
                          {"pathloss_db", std::move(rows)}};
    return doc.dump(1) + "\n";
}

Scenario
ScenarioFromText(std::string_view text)
{
    json doc;
    try
    {
        doc = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e)
    {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }

    try
    {
        if (doc.at("format").get<std::string>() != kFormat)
        {
            throw ScenarioError("not a dudesim scenario file");
        }
        if (doc.at("version").get<int>() != kVersion)
        {
            throw ScenarioError("unsupported scenario version");
        }
        Scenario s;
        s.box = {doc.at("bounding_box").at("width_m").get<double>(),
                 doc.at("bounding_box").at("height_m").get<double>()};
        s.carrierHz = doc.at("carrier_hz").get<double>();
        s.ueAntennaGainDbi = doc.at("ue_antenna_gain_dbi").get<double>();

        for (const auto& c : doc.at("cells"))
        {
            Cell cell;
            cell.id = c.at("id").get<std::uint32_t>();
            cell.tier = TierFrom(c.at("tier").get<std::string>());
            cell.position = {c.at("x_m").get<double>(), c.at("y_m").get<double>()};
            cell.txPowerDlDbm = c.at("tx_power_dbm").get<double>();
            cell.antennaGainDbi = c.at("antenna_gain_dbi").get<double>();
            cell.backhaulBps = BpsFrom(c.at("backhaul_bps"));
            s.cells.push_back(cell);
        }
        for (const auto& u : doc.at("ues"))
        {
            UePlacement ue;
            ue.id = u.at("id").get<std::uint32_t>();
            ue.position = {u.at("x_m").get<double>(), u.at("y_m").get<double>()};
            if (u.contains("hotspot") && !u.at("hotspot").is_null())
            {
                ue.hotspot = u.at("hotspot").get<std::uint32_t>();
            }
            s.ues.push_back(ue);
        }

        const auto& prop = doc.at("propagation");
        const auto& rows = prop.at("pathloss_db");
        if (rows.size() != s.ues.size())
        {
            std::ostringstream os;
            os << "dimension mismatch: pathloss matrix has " << rows.size() << " rows but "
               << s.ues.size() << " UEs are listed";
            throw ScenarioError(os.str());
        }
        std::vector<double> values;
        values.reserve(s.ues.size() * s.cells.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            const auto& row = rows[i];
            if (row.size() != s.cells.size())
            {
                std::ostringstream os;
                os << "dimension mismatch: pathloss row " << i << " has " << row.size()
                   << " entries but " << s.cells.size() << " cells are listed";
                throw ScenarioError(os.str());
            }
            for (const auto& v : row)
            {
                // JSON has no NaN/inf literal; null is how writers encode them
                if (!v.is_number())
                {
                    throw ScenarioError("non-finite pathloss entry in row " + std::to_string(i));
                }
                values.push_back(v.get<double>());
            }
        }
        s.propagation = PropagationMap(s.ues.size(), s.cells.size(), std::move(values));
        s.propagation.macroShadowSigmaDb = prop.at("macro_shadowing_sigma_db").get<double>();
        s.propagation.smallShadowSigmaDb = prop.at("small_shadowing_sigma_db").get<double>();
        s.propagation.decorrelationDistanceM = prop.at("decorrelation_distance_m").get<double>();
        s.Validate();
        return s;
    }
    catch (const json::exception& e)
    {
        throw ScenarioError(std::string("malformed scenario file: ") + e.what());
    }
}

void
SaveScenario(const Scenario& scenario, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ScenarioError("cannot open " + path.string() + " for writing");
    }
    out << ScenarioToText(scenario);
    if (!out)
    {
        throw ScenarioError("failed writing " + path.string());
    }
}

Scenario
LoadScenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ScenarioError("cannot open scenario file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return ScenarioFromText(buffer.str());
}

} // namespace dude
