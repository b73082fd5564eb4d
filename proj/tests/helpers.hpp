#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dairyq/battery_env.hpp"
#include "dairyq/timeseries.hpp"
#include "oracles.hpp"

namespace testutil {

inline dairyq::HourlyRecord record(int hour, double load, double pv, double price = 0.1,
                                   std::optional<double> wind = std::nullopt) {
    dairyq::HourlyRecord r;
    r.hour_index = static_cast<std::size_t>(hour);
    r.hour_of_day = hour % 24;
    r.month = dairyq::month_of_hour(r.hour_index);
    r.load_kwh = load;
    r.pv_kwh = pv;
    r.wind_kwh = wind;
    r.price_per_kwh = price;
    return r;
}

// Whole days; load/pv are repeated cyclically, prices from the tariff.
inline dairyq::HourlySeries series(const std::vector<double>& load, const std::vector<double>& pv, int days = 1,
                                   const dairyq::TariffSchedule& tariff = dairyq::default_tariff()) {
    std::vector<dairyq::HourlyRecord> rs;
    for (int i = 0; i < days * 24; ++i) {
        rs.push_back(record(i, load[i % load.size()], pv[i % pv.size()], tariff.price_at(i % 24)));
    }
    return dairyq::HourlySeries(std::move(rs));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dairyq_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string fixture(const std::string& name) { return std::string(DAIRYQ_FIXTURE_DIR) + "/" + name; }
inline std::string config_file(const std::string& name) { return std::string(DAIRYQ_CONFIG_DIR) + "/" + name; }

inline const dairyq::BatterySpec kToySpec{10.0, 2.0, 2.0, 0.1, 11};

inline std::shared_ptr<const dairyq::HourlySeries> toy_day() {
    return std::make_shared<const dairyq::HourlySeries>(
        dairyq::load_csv(fixture("toy_day.csv"), dairyq::default_tariff()));
}

inline oracle::Battery oracle_battery(const dairyq::BatterySpec& s) {
    return {s.capacity_kwh, s.charge_rate_kw, s.discharge_rate_kw, s.min_energy_kwh()};
}

inline std::vector<oracle::Hour> oracle_hours(const dairyq::HourlySeries& s, const dairyq::TariffSchedule& t) {
    std::vector<oracle::Hour> hs;
    for (const auto& r : s.records()) {
        const dairyq::Tier tier = t.tier_of(r.hour_of_day);
        hs.push_back({r.load_kwh, r.renewables_kwh(), r.price_per_kwh,
                      tier == dairyq::Tier::OffPeak ? 0 : tier == dairyq::Tier::Standard ? 1 : 2});
    }
    return hs;
}

}  // namespace testutil
