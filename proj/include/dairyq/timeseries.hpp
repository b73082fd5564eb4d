#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dairyq {

/// One hour of farm data. Energies are kWh over the hour.
struct HourlyRecord {
    std::size_t hour_index = 0;
    int hour_of_day = 0;
    int month = 1;
    double load_kwh = 0.0;
    double pv_kwh = 0.0;
    std::optional<double> wind_kwh;
    double price_per_kwh = 0.0;

    /// Renewable supply available this hour (PV plus wind when present).
    double renewables_kwh() const noexcept { return pv_kwh + wind_kwh.value_or(0.0); }
};

/// Calendar month (1..12) for a zero-based hour index, assuming the series
/// starts on 1 January of a non-leap year. Days past 365 wrap to the next year.
int month_of_hour(std::size_t hour_index) noexcept;

/// Contiguous, validated hourly series whose length is a whole number of days.
class HourlySeries {
public:
    /// Validates contiguity, non-negativity, day alignment and wind presence.
    /// Throws DataError.
    explicit HourlySeries(std::vector<HourlyRecord> records);

    std::span<const HourlyRecord> records() const noexcept { return records_; }
    const HourlyRecord& operator[](std::size_t i) const { return records_[i]; }
    std::size_t size() const noexcept { return records_.size(); }
    std::size_t days() const noexcept { return records_.size() / 24; }
    bool has_wind() const noexcept { return has_wind_; }

    /// The 24 records of day `day_index`.
    std::span<const HourlyRecord> day(std::size_t day_index) const;

    /// Copy with the wind column dropped.
    HourlySeries without_wind() const;

private:
    std::vector<HourlyRecord> records_;
    bool has_wind_ = false;
};

enum class Tier { OffPeak, Standard, Peak };

const char* to_string(Tier tier) noexcept;

/// Three-tier time-of-use tariff. The hour sets partition 0..23.
class TariffSchedule {
public:
    struct Rates {
        double off_peak = 0.05;
        double standard = 0.10;
        double peak = 0.20;
    };

    /// Throws DataError unless the hour sets partition 0..23 and the rates
    /// are positive and ordered off-peak <= standard <= peak.
    TariffSchedule(std::span<const int> off_peak_hours, std::span<const int> standard_hours,
                   std::span<const int> peak_hours, Rates rates);

    Tier tier_of(int hour_of_day) const;
    double price_at(int hour_of_day) const;
    double rate(Tier tier) const noexcept;
    const Rates& rates() const noexcept { return rates_; }
    std::vector<int> hours_in(Tier tier) const;

private:
    std::array<Tier, 24> tiers_{};
    Rates rates_;
};

/// Off-peak 23:00-07:00, peak 17:00-19:00, standard otherwise; hours are
/// read as [start, end) on whole hours. Rates are arbitrary defaults.
TariffSchedule default_tariff();

inline Tier tier_of(const TariffSchedule& tariff, int hour_of_day) { return tariff.tier_of(hour_of_day); }
inline double price_at(const TariffSchedule& tariff, int hour_of_day) { return tariff.price_at(hour_of_day); }

/// Parameters for the synthetic dairy-farm year.
struct SyntheticProfileConfig {
    int days = 365;
    double base_load_kwh = 25.0;
    double load_amplitude_kwh = 15.0;
    double pv_peak_kwh = 45.0;
    double wind_mean_kwh = 6.0;
    double noise_fraction = 0.05;
    bool include_wind = true;
    std::uint64_t rng_seed = 7;

    void validate() const;
};

/// Noise-free load shape: a base plus two milking-time humps (a smaller
/// morning one around 08:00, a larger and narrower evening one spanning
/// 17:00-19:00).
double synthetic_load_profile(const SyntheticProfileConfig& config, int hour_of_day);

/// Noise-free PV shape for a day of year: zero at night, a sine bell over a
/// seasonally varying daylight window.
double synthetic_pv_profile(const SyntheticProfileConfig& config, int day_of_year, int hour_of_day);

/// Deterministic in (config, tariff). Load and PV do not depend on
/// `include_wind`, so the windless and windy variants share them exactly.
HourlySeries generate_synthetic(const SyntheticProfileConfig& config, const TariffSchedule& tariff);

/// Reads `hour,load_kwh,pv_kwh[,wind_kwh][,price_per_kwh]`. When the price
/// column is absent `tariff` must be given and fills it. Throws DataError/IoError.
HourlySeries load_csv(const std::filesystem::path& path,
                      const std::optional<TariffSchedule>& tariff = std::nullopt);

/// Writes the series in the same schema `load_csv` reads (shortest
/// round-trip number formatting).
void write_csv(const HourlySeries& series, const std::filesystem::path& path);

/// Nearest-rank percentile (p in [0,100]) of a non-empty sample.
double percentile(std::vector<double> values, double p);

}  // namespace dairyq
