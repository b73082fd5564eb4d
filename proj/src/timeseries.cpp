#include "dairyq/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dairyq/detail/io_util.hpp"
#include "dairyq/errors.hpp"
#include "dairyq/rng.hpp"

namespace dairyq {

namespace {

constexpr std::array<int, 12> kDaysInMonth = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

int month_of_hour(std::size_t hour_index) noexcept {
    int day = static_cast<int>((hour_index / 24) % 365);
    for (int m = 0; m < 12; ++m) {
        if (day < kDaysInMonth[m]) return m + 1;
        day -= kDaysInMonth[m];
    }
    return 12;
}

// ---------------------------------------------------------------------------
// HourlySeries

HourlySeries::HourlySeries(std::vector<HourlyRecord> records) : records_(std::move(records)) {
    if (records_.empty() || records_.size() % 24 != 0) {
        throw DataError("series length " + std::to_string(records_.size()) +
                        " is not a positive multiple of 24");
    }
    const bool first_wind = records_.front().wind_kwh.has_value();
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const HourlyRecord& r = records_[i];
        const std::string where = " at row " + std::to_string(i + 1);
        if (r.hour_index != i) throw DataError("non-contiguous hour index" + where);
        if (r.hour_of_day != static_cast<int>(i % 24)) throw DataError("hour_of_day mismatch" + where);
        if (r.month < 1 || r.month > 12) throw DataError("month out of range" + where);
        if (!finite_non_negative(r.load_kwh) || !finite_non_negative(r.pv_kwh) ||
            !finite_non_negative(r.price_per_kwh) ||
            (r.wind_kwh && !finite_non_negative(*r.wind_kwh))) {
            throw DataError("negative or non-finite value" + where);
        }
        if (r.wind_kwh.has_value() != first_wind) throw DataError("wind column only partially present" + where);
    }
    has_wind_ = first_wind;
}

std::span<const HourlyRecord> HourlySeries::day(std::size_t day_index) const {
    if (day_index >= days()) throw DataError("day index " + std::to_string(day_index) + " out of range");
    return std::span<const HourlyRecord>(records_).subspan(day_index * 24, 24);
}

HourlySeries HourlySeries::without_wind() const {
    std::vector<HourlyRecord> copy = records_;
    for (auto& r : copy) r.wind_kwh.reset();
    return HourlySeries(std::move(copy));
}

// ---------------------------------------------------------------------------
// Tariff

const char* to_string(Tier tier) noexcept {
    switch (tier) {
        case Tier::OffPeak: return "off-peak";
        case Tier::Standard: return "standard";
        case Tier::Peak: return "peak";
    }
    return "?";
}

TariffSchedule::TariffSchedule(std::span<const int> off_peak_hours, std::span<const int> standard_hours,
                               std::span<const int> peak_hours, Rates rates)
    : rates_(rates) {
    std::array<int, 24> seen{};
    auto assign = [&](std::span<const int> hours, Tier tier) {
        for (int h : hours) {
            if (h < 0 || h > 23) throw DataError("tariff hour " + std::to_string(h) + " outside 0..23");
            if (seen[h]++ != 0) throw DataError("tariff hour " + std::to_string(h) + " assigned twice");
            tiers_[h] = tier;
        }
    };
    assign(off_peak_hours, Tier::OffPeak);
    assign(standard_hours, Tier::Standard);
    assign(peak_hours, Tier::Peak);
    for (int h = 0; h < 24; ++h) {
        if (seen[h] == 0) throw DataError("tariff hour " + std::to_string(h) + " not assigned to any tier");
    }
    if (!(rates.off_peak > 0.0 && rates.standard > 0.0 && rates.peak > 0.0)) {
        throw DataError("tariff rates must be positive");
    }
    if (!(rates.off_peak <= rates.standard && rates.standard <= rates.peak)) {
        throw DataError("tariff rates must satisfy off-peak <= standard <= peak");
    }
}

Tier TariffSchedule::tier_of(int hour_of_day) const {
    if (hour_of_day < 0 || hour_of_day > 23) throw DataError("hour_of_day outside 0..23");
    return tiers_[static_cast<std::size_t>(hour_of_day)];
}

double TariffSchedule::rate(Tier tier) const noexcept {
    switch (tier) {
        case Tier::OffPeak: return rates_.off_peak;
        case Tier::Standard: return rates_.standard;
        case Tier::Peak: return rates_.peak;
    }
    return rates_.standard;
}

double TariffSchedule::price_at(int hour_of_day) const { return rate(tier_of(hour_of_day)); }

std::vector<int> TariffSchedule::hours_in(Tier tier) const {
    std::vector<int> out;
    for (int h = 0; h < 24; ++h) {
        if (tiers_[h] == tier) out.push_back(h);
    }
    return out;
}

TariffSchedule default_tariff() {
    const std::array<int, 8> off_peak = {23, 0, 1, 2, 3, 4, 5, 6};
    const std::array<int, 2> peak = {17, 18};
    const std::array<int, 14> standard = {7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 19, 20, 21, 22};
    return TariffSchedule(off_peak, standard, peak, TariffSchedule::Rates{});
}

// ---------------------------------------------------------------------------
// Synthetic generator

void SyntheticProfileConfig::validate() const {
    if (days <= 0) throw ConfigError("synthetic days must be > 0");
    auto non_neg = [](double v, const char* name) {
        if (!(std::isfinite(v) && v >= 0.0)) throw ConfigError(std::string(name) + " must be finite and >= 0");
    };
    non_neg(base_load_kwh, "base_load_kwh");
    non_neg(load_amplitude_kwh, "load_amplitude_kwh");
    non_neg(pv_peak_kwh, "pv_peak_kwh");
    non_neg(wind_mean_kwh, "wind_mean_kwh");
    if (!(noise_fraction >= 0.0 && noise_fraction < 1.0)) throw ConfigError("noise_fraction must be in [0,1)");
}

namespace {

double hump(double hour, double centre, double width) {
    const double d = hour - centre;
    return std::exp(-d * d / (2.0 * width * width));
}

// Seasonal phase: +1 at midsummer, -1 at midwinter.
double season(int day_of_year) {
    return std::sin(2.0 * std::numbers::pi * (day_of_year - 80) / 365.0);
}

}  // namespace

double synthetic_load_profile(const SyntheticProfileConfig& config, int hour_of_day) {
    const double h = hour_of_day + 0.5;
    return config.base_load_kwh +
           config.load_amplitude_kwh * (0.7 * hump(h, 8.0, 1.5) + hump(h, 18.0, 0.9));
}

double synthetic_pv_profile(const SyntheticProfileConfig& config, int day_of_year, int hour_of_day) {
    const double s = season(day_of_year);
    const double daylight = 12.0 + 6.0 * s;
    const double sunrise = 12.5 - daylight / 2.0;
    const double x = (hour_of_day + 0.5 - sunrise) / daylight;
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double scale = 0.35 + 0.65 * (0.5 + 0.5 * s);
    return config.pv_peak_kwh * scale * std::sin(std::numbers::pi * x);
}

HourlySeries generate_synthetic(const SyntheticProfileConfig& config, const TariffSchedule& tariff) {
    config.validate();
    // Separate streams so that toggling wind leaves load and PV untouched.
    Rng load_rng(config.rng_seed);
    Rng pv_rng(config.rng_seed ^ 0x9e3779b97f4a7c15ULL);
    Rng wind_rng(config.rng_seed ^ 0xc2b2ae3d27d4eb4fULL);

    const std::size_t hours = static_cast<std::size_t>(config.days) * 24;
    std::vector<HourlyRecord> records;
    records.reserve(hours);
    double wind_state = 0.0;
    for (std::size_t i = 0; i < hours; ++i) {
        HourlyRecord r;
        r.hour_index = i;
        r.hour_of_day = static_cast<int>(i % 24);
        r.month = month_of_hour(i);
        const int day_of_year = static_cast<int>((i / 24) % 365);

        const double load_noise = load_rng.normal();
        const double pv_noise = pv_rng.normal();
        r.load_kwh = std::max(0.0, synthetic_load_profile(config, r.hour_of_day) *
                                       (1.0 + config.noise_fraction * load_noise));
        const double pv = synthetic_pv_profile(config, day_of_year, r.hour_of_day);
        r.pv_kwh = pv > 0.0 ? std::max(0.0, pv * (1.0 + config.noise_fraction * pv_noise)) : 0.0;

        // AR(1) multiplicative fluctuation around the mean.
        wind_state = 0.9 * wind_state + 0.6 * std::sqrt(1.0 - 0.81) * wind_rng.normal();
        if (config.include_wind) r.wind_kwh = std::max(0.0, config.wind_mean_kwh * (1.0 + wind_state));

        r.price_per_kwh = tariff.price_at(r.hour_of_day);
        records.push_back(r);
    }
    return HourlySeries(std::move(records));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

enum class Column { Hour, Load, Pv, Wind, Price };

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
        out.push_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(std::string_view field, std::size_t row, std::string_view column) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw DataError("malformed value '" + std::string(field) + "' in column " + std::string(column) +
                        " at row " + std::to_string(row));
    }
    return value;
}

}  // namespace

HourlySeries load_csv(const std::filesystem::path& path, const std::optional<TariffSchedule>& tariff) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file " + path.string());
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    std::vector<Column> columns;
    bool seen[5] = {};
    for (std::string_view name : split_commas(line)) {
        Column c;
        if (name == "hour") c = Column::Hour;
        else if (name == "load_kwh") c = Column::Load;
        else if (name == "pv_kwh") c = Column::Pv;
        else if (name == "wind_kwh") c = Column::Wind;
        else if (name == "price_per_kwh") c = Column::Price;
        else throw DataError("unknown column '" + std::string(name) + "'");
        if (seen[static_cast<int>(c)]) throw DataError("duplicate column '" + std::string(name) + "'");
        seen[static_cast<int>(c)] = true;
        columns.push_back(c);
    }
    for (auto [c, name] : {std::pair{Column::Hour, "hour"}, {Column::Load, "load_kwh"}, {Column::Pv, "pv_kwh"}}) {
        if (!seen[static_cast<int>(c)]) throw DataError(std::string("missing required column '") + name + "'");
    }
    const bool has_price = seen[static_cast<int>(Column::Price)];
    if (!has_price && !tariff) throw DataError("no price_per_kwh column and no tariff supplied");

    std::vector<HourlyRecord> records;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        const auto fields = split_commas(line);
        if (fields.size() != columns.size()) {
            throw DataError("malformed row " + std::to_string(row) + ": expected " +
                            std::to_string(columns.size()) + " fields, got " + std::to_string(fields.size()));
        }
        HourlyRecord r;
        double hour = -1.0;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            switch (columns[i]) {
                case Column::Hour: hour = parse_number(fields[i], row, "hour"); break;
                case Column::Load: r.load_kwh = parse_number(fields[i], row, "load_kwh"); break;
                case Column::Pv: r.pv_kwh = parse_number(fields[i], row, "pv_kwh"); break;
                case Column::Wind: r.wind_kwh = parse_number(fields[i], row, "wind_kwh"); break;
                case Column::Price: r.price_per_kwh = parse_number(fields[i], row, "price_per_kwh"); break;
            }
        }
        if (!(r.load_kwh >= 0.0) || !(r.pv_kwh >= 0.0) || (r.wind_kwh && !(*r.wind_kwh >= 0.0)) ||
            !(r.price_per_kwh >= 0.0)) {
            throw DataError("negative value at row " + std::to_string(row));
        }
        if (hour != std::floor(hour) || hour != static_cast<double>(row - 1)) {
            throw DataError("non-contiguous hour at row " + std::to_string(row));
        }
        r.hour_index = row - 1;
        r.hour_of_day = static_cast<int>(r.hour_index % 24);
        r.month = month_of_hour(r.hour_index);
        if (!has_price) r.price_per_kwh = tariff->price_at(r.hour_of_day);
        records.push_back(r);
    }
    return HourlySeries(std::move(records));
}

void write_csv(const HourlySeries& series, const std::filesystem::path& path) {
    using detail::format_double;
    std::ostringstream out;
    out << (series.has_wind() ? "hour,load_kwh,pv_kwh,wind_kwh,price_per_kwh\n"
                              : "hour,load_kwh,pv_kwh,price_per_kwh\n");
    for (const HourlyRecord& r : series.records()) {
        out << r.hour_index << ',' << format_double(r.load_kwh) << ',' << format_double(r.pv_kwh) << ',';
        if (r.wind_kwh) out << format_double(*r.wind_kwh) << ',';
        out << format_double(r.price_per_kwh) << '\n';
    }
    detail::write_file_atomic(path, out.str());
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw DataError("percentile of empty sample");
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(p / 100.0 * static_cast<double>(values.size()));
    const std::size_t idx = rank <= 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
    return values[std::min(idx, values.size() - 1)];
}

}  // namespace dairyq
