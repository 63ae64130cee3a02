#pragma once

#include "dude/experiment.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dude
{

struct ConfigDiagnostic
{
    std::string path; // dotted field path, e.g. "pc.alpha"; empty for document-level problems
    std::string message;
};

/// Raised when config text fails validation; carries every problem found.
class ConfigError : public std::invalid_argument
{
  public:
    explicit ConfigError(std::vector<ConfigDiagnostic> diagnostics);

    const std::vector<ConfigDiagnostic>& Diagnostics() const
    {
        return m_diagnostics;
    }

  private:
    std::vector<ConfigDiagnostic> m_diagnostics;
};

/**
 * Parses a JSON config. Absent fields keep their defaults, so "" and "{}"
 * both give the reference configuration. Unknown keys, wrong types and
 * out-of-range values are all reported, each with its field path.
 *
 *   {
 *     "subframes": 10000, "warmup_subframes": 1000, "seed": 1,
 *     "association_policy": "dl_rsrp" | "dude" | "dude_load",
 *     "broadcast_period": 50, "mobility_enabled": true, "mobility_period": 100,
 *     "fading_enabled": false, "load_smoothing": 0.01, "pf_time_constant": 100,
 *     "trace_ue_subframes": true,
 *     "pc": { "preset": "setting1" | "setting2" | "interference_aware",
 *             "regime": "open_loop" | "interference_aware",
 *             "alpha", "p0_dbm", "p_max_dbm", "i0_dbm" },
 *     "traffic": { "mean_flow_bits", "mean_wait_ms" },
 *     "link": { "bandwidth_hz", "prb_count", "prb_bandwidth_hz", "noise_figure_db",
 *               "max_spectral_efficiency", "min_sinr_db" },
 *     "backhaul": { "ideal", "macro_bps", "small_bps", "criterion": "total" | "residual" },
 *     "scenario": { "macro_cells", "small_cells", "ues", "side_m", "hotspots",
 *                   "hotspot_fraction", "hotspot_sigma_m", "hotspot_min_macro_distance_m",
 *                   "macro_tx_power_dbm", "small_tx_power_dbm", "macro_antenna_gain_dbi",
 *                   "small_antenna_gain_dbi", "ue_antenna_gain_dbi",
 *                   "macro_backhaul_bps", "small_backhaul_bps" },
 *     "metrics": { "throughput": "flow_rate" | "long_run",
 *                  "percentile": "nearest_rank" | "linear", "min_sinr_samples": 30 },
 *     "experiment": { "name", "seeds", "policies", "power_settings",
 *                     "small_backhaul_mbps", "macro_backhaul_mbps", "workers" }
 *   }
 *
 * A "pc.preset" is applied first and the explicit pc fields override it.
 */
ExperimentSpec ValidateExperimentConfig(std::string_view text);

/// The simulation part of ValidateExperimentConfig.
SimConfig ValidateConfig(std::string_view text);

/**
 * Canonical single-line JSON of the effective spec. The worker count is left
 * out so that outputs do not depend on it; parsing the text gives the same
 * spec back apart from that field.
 */
std::string EffectiveConfigText(const ExperimentSpec& spec);

} // namespace dude
