#pragma once

#include "dude/deployment.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace dude
{

/*
 * Scenario file (JSON, "format": "dudesim-scenario", "version": 1):
 *
 *   bounding_box         {"width_m", "height_m"}
 *   carrier_hz           number
 *   ue_antenna_gain_dbi  number
 *   cells[]              {"id", "tier": "macro"|"small", "x_m", "y_m",
 *                         "tx_power_dbm", "antenna_gain_dbi",
 *                         "backhaul_bps": number | null (unlimited)}
 *   ues[]                {"id", "x_m", "y_m", "hotspot": integer | null}
 *   propagation          {"macro_shadowing_sigma_db", "small_shadowing_sigma_db",
 *                         "decorrelation_distance_m",
 *                         "pathloss_db": [[row for UE 0], [row for UE 1], ...]}
 *
 * Each pathloss row holds one dB value per cell, in cell-id order.
 * A loaded scenario never carries an analytic channel.
 */

std::string ScenarioToText(const Scenario& scenario);

Scenario ScenarioFromText(std::string_view text);

void SaveScenario(const Scenario& scenario, const std::filesystem::path& path);

Scenario LoadScenario(const std::filesystem::path& path);

} // namespace dude
