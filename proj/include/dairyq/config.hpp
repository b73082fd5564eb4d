#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dairyq/battery_env.hpp"
#include "dairyq/q_agent.hpp"
#include "dairyq/state_encoding.hpp"
#include "dairyq/timeseries.hpp"

namespace dairyq {

/// Encoding block: the kind plus optional explicit bin specs. Bins left unset
/// are derived from the dataset (99th percentile, 5 bins).
struct EncodingConfig {
    EncodingKind kind = EncodingKind::HourSoc;
    std::optional<BinSpec> load;
    std::optional<BinSpec> pv;
    std::optional<BinSpec> wind;
};

/// Everything one experiment needs, validated up front. Sections absent from
/// the file take their defaults.
struct RunConfig {
    std::optional<std::filesystem::path> dataset_path;
    SyntheticProfileConfig synthetic;
    TariffSchedule tariff = default_tariff();
    BatterySpec battery;
    Hyperparams hyperparams;
    EncodingConfig encoding;
    bool encoding_explicit = false;
    PenaltyTable penalties;
    int eval_initial_soc_level = 1;
    PenaltyMode eval_mode = PenaltyMode::CostOnly;
    std::filesystem::path output_dir = "out";
    std::vector<std::uint64_t> seeds = {0};

    /// Cross-field checks (SOC level ranges, hyperparameter bounds, ...).
    void validate() const;

    /// Resolved encoding spec for a dataset.
    EncodingSpec encoding_for(const HourlySeries& series) const;

    /// Loads the configured dataset, or generates the synthetic one.
    HourlySeries load_dataset() const;
};

/// Parses a config document. Unknown keys anywhere are a ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form of a resolved config (round-trips through parse_config).
nlohmann::json to_json(const RunConfig& config);

/// Hex FNV-1a of the canonical JSON; identifies a configuration in manifests.
std::string config_fingerprint(const RunConfig& config);

}  // namespace dairyq
