#include "dairyq/state_encoding.hpp"

#include <algorithm>
#include <cmath>

#include "dairyq/errors.hpp"
#include "dairyq/timeseries.hpp"

namespace dairyq {

const char* to_string(EncodingKind kind) noexcept {
    switch (kind) {
        case EncodingKind::HourSoc: return "hour_soc";
        case EncodingKind::HourSocLoadPv: return "hour_soc_load_pv";
        case EncodingKind::HourSocLoadPvWind: return "hour_soc_load_pv_wind";
    }
    return "?";
}

std::optional<EncodingKind> parse_encoding_kind(std::string_view name) noexcept {
    if (name == "hour_soc") return EncodingKind::HourSoc;
    if (name == "hour_soc_load_pv") return EncodingKind::HourSocLoadPv;
    if (name == "hour_soc_load_pv_wind") return EncodingKind::HourSocLoadPvWind;
    return std::nullopt;
}

int soc_bin(const BatterySpec& spec, double energy_kwh) {
    constexpr double kTol = 1e-9;
    if (!(energy_kwh >= -kTol && energy_kwh <= spec.capacity_kwh + kTol)) {
        throw DataError("stored energy " + std::to_string(energy_kwh) + " outside [0, capacity]");
    }
    const int top = spec.soc_levels - 1;
    const int bin = static_cast<int>(std::floor(energy_kwh / spec.capacity_kwh * top + kTol));
    return std::clamp(bin, 0, top);
}

int value_bin(const BinSpec& spec, double value) {
    if (!(value >= 0.0)) throw DataError("cannot bin negative value");
    const double scaled = std::floor(value / spec.max_value * spec.bin_count);
    if (scaled >= spec.bin_count - 1) return spec.bin_count - 1;
    return static_cast<int>(scaled);
}

std::vector<Dimension> dimensions(const EncodingSpec& spec) {
    std::vector<Dimension> dims = {{"hour", 24}, {"soc", spec.soc_levels}};
    if (spec.kind != EncodingKind::HourSoc) {
        dims.push_back({"load", spec.load.bin_count});
        dims.push_back({"pv", spec.pv.bin_count});
    }
    if (spec.kind == EncodingKind::HourSocLoadPvWind) dims.push_back({"wind", spec.wind.bin_count});
    return dims;
}

std::size_t state_space_size(const EncodingSpec& spec) {
    std::size_t n = 1;
    for (const Dimension& d : dimensions(spec)) n *= static_cast<std::size_t>(d.cardinality);
    return n;
}

std::size_t encode_flat(const EncodingSpec& spec, const Observation& obs) {
    std::size_t idx = static_cast<std::size_t>(obs.hour_of_day) * spec.soc_levels + obs.soc_bin;
    if (spec.kind == EncodingKind::HourSoc) return idx;
    idx = idx * spec.load.bin_count + value_bin(spec.load, obs.load_kwh);
    idx = idx * spec.pv.bin_count + value_bin(spec.pv, obs.pv_kwh);
    if (spec.kind == EncodingKind::HourSocLoadPv) return idx;
    if (!obs.wind_kwh) throw DataError("wind encoding requires a wind_kwh column");
    return idx * spec.wind.bin_count + value_bin(spec.wind, *obs.wind_kwh);
}

StateIndex encode(const EncodingSpec& spec, const Observation& obs) {
    return StateIndex{encode_flat(spec, obs), dimensions(spec)};
}

std::size_t compose(const EncodingSpec& spec, const std::vector<int>& coords) {
    const auto dims = dimensions(spec);
    if (coords.size() != dims.size()) throw DataError("coordinate count does not match encoding");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= dims[i].cardinality) {
            throw DataError("coordinate " + dims[i].name + " out of range");
        }
        idx = idx * static_cast<std::size_t>(dims[i].cardinality) + static_cast<std::size_t>(coords[i]);
    }
    return idx;
}

std::vector<int> decompose(const EncodingSpec& spec, std::size_t flat_index) {
    const auto dims = dimensions(spec);
    std::vector<int> coords(dims.size());
    for (std::size_t i = dims.size(); i-- > 0;) {
        const auto card = static_cast<std::size_t>(dims[i].cardinality);
        coords[i] = static_cast<int>(flat_index % card);
        flat_index /= card;
    }
    if (flat_index != 0) throw DataError("flat index outside state space");
    return coords;
}

EncodingSpec default_encoding(EncodingKind kind, const BatterySpec& battery, const HourlySeries& series) {
    EncodingSpec spec;
    spec.kind = kind;
    spec.soc_levels = battery.soc_levels;
    if (kind == EncodingKind::HourSocLoadPvWind && !series.has_wind()) {
        throw DataError("wind encoding requires a wind_kwh column");
    }
    auto p99 = [&](auto field) {
        std::vector<double> v;
        v.reserve(series.size());
        for (const HourlyRecord& r : series.records()) v.push_back(field(r));
        const double p = percentile(std::move(v), 99.0);
        return p > 0.0 ? p : 1.0;
    };
    spec.load.max_value = p99([](const HourlyRecord& r) { return r.load_kwh; });
    spec.pv.max_value = p99([](const HourlyRecord& r) { return r.pv_kwh; });
    if (series.has_wind()) spec.wind.max_value = p99([](const HourlyRecord& r) { return r.wind_kwh.value_or(0.0); });
    return spec;
}

}  // namespace dairyq
