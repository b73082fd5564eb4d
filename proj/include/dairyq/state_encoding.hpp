#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dairyq/battery_spec.hpp"

namespace dairyq {

class HourlySeries;

/// What a controller sees at the start of an hour.
struct Observation {
    std::size_t hour_index = 0;
    int hour_of_day = 0;
    int soc_bin = 0;
    double energy_kwh = 0.0;
    double load_kwh = 0.0;
    double pv_kwh = 0.0;
    std::optional<double> wind_kwh;
};

enum class EncodingKind { HourSoc, HourSocLoadPv, HourSocLoadPvWind };

const char* to_string(EncodingKind kind) noexcept;
std::optional<EncodingKind> parse_encoding_kind(std::string_view name) noexcept;

/// Equal-width bins over [0, max_value); values at or above max clamp to the top bin.
struct BinSpec {
    int bin_count = 5;
    double max_value = 1.0;

    bool operator==(const BinSpec&) const = default;
};

struct EncodingSpec {
    EncodingKind kind = EncodingKind::HourSoc;
    int soc_levels = 11;
    BinSpec load;
    BinSpec pv;
    BinSpec wind;

    bool needs_wind() const noexcept { return kind == EncodingKind::HourSocLoadPvWind; }
    bool operator==(const EncodingSpec&) const = default;
};

struct Dimension {
    std::string name;
    int cardinality = 0;
};

struct StateIndex {
    std::size_t flat_index = 0;
    std::vector<Dimension> dims;
};

/// floor(energy / capacity * (soc_levels - 1)) with a 1e-9 tolerance so that
/// lattice energies (see BatterySpec::level_energy) map back to their own
/// level. Throws DataError outside [0, capacity].
int soc_bin(const BatterySpec& spec, double energy_kwh);

/// min(floor(value / max * count), count - 1). Throws DataError for negative input.
int value_bin(const BinSpec& spec, double value);

/// Dimensions in row-major order: hour, soc, then load/pv/wind as the kind requires.
std::vector<Dimension> dimensions(const EncodingSpec& spec);

std::size_t state_space_size(const EncodingSpec& spec);

/// Row-major composition of (hour, soc_bin[, load_bin, pv_bin[, wind_bin]]).
/// Throws DataError when the wind encoding is used on an observation without wind.
StateIndex encode(const EncodingSpec& spec, const Observation& obs);

/// Same as `encode` but returns only the flat index (hot path of training).
std::size_t encode_flat(const EncodingSpec& spec, const Observation& obs);

/// Flat index from explicit coordinates, one per dimension.
std::size_t compose(const EncodingSpec& spec, const std::vector<int>& coords);

/// Inverse of `compose`.
std::vector<int> decompose(const EncodingSpec& spec, std::size_t flat_index);

/// Default spec for a kind: 5 bins per extra dimension with the max set to the
/// series' 99th percentile of that column (1.0 when the percentile is 0).
EncodingSpec default_encoding(EncodingKind kind, const BatterySpec& battery, const HourlySeries& series);

}  // namespace dairyq
