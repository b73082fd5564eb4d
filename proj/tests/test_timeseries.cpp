#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dairyq/errors.hpp"
#include "dairyq/timeseries.hpp"
#include "helpers.hpp"

using namespace dairyq;

TEST_SUITE("timeseries") {

TEST_CASE("default tariff tiers and prices") {
    const TariffSchedule t = default_tariff();
    CHECK(t.tier_of(3) == Tier::OffPeak);
    CHECK(t.tier_of(23) == Tier::OffPeak);
    CHECK(t.tier_of(17) == Tier::Peak);
    CHECK(t.tier_of(18) == Tier::Peak);
    CHECK(t.tier_of(9) == Tier::Standard);
    CHECK(t.tier_of(12) == Tier::Standard);
    CHECK(t.price_at(3) == t.rates().off_peak);
    CHECK(t.price_at(18) == t.rates().peak);
    CHECK(t.price_at(12) == t.rates().standard);
    CHECK(t.hours_in(Tier::OffPeak).size() + t.hours_in(Tier::Standard).size() + t.hours_in(Tier::Peak).size() == 24);
    CHECK_THROWS_AS(t.tier_of(24), DataError);
}

TEST_CASE("tariff must partition the day with ordered rates") {
    const std::vector<int> off = {0, 1, 2, 3, 4, 5, 6, 23};
    const std::vector<int> peak = {17, 18};
    std::vector<int> std_hours;
    for (int h = 7; h < 17; ++h) std_hours.push_back(h);
    std_hours.push_back(19);
    std_hours.push_back(20);
    std_hours.push_back(21);
    CHECK_THROWS_AS(TariffSchedule(off, std_hours, peak, {}), DataError);  // hour 22 missing
    std_hours.push_back(22);
    CHECK_NOTHROW(TariffSchedule(off, std_hours, peak, {}));
    std_hours.push_back(17);
    CHECK_THROWS_AS(TariffSchedule(off, std_hours, peak, {}), DataError);
    std_hours.pop_back();
    CHECK_THROWS_AS(TariffSchedule(off, std_hours, peak, {0.3, 0.1, 0.2}), DataError);
}

TEST_CASE("month_of_hour follows a non-leap calendar") {
    CHECK(month_of_hour(0) == 1);
    CHECK(month_of_hour(31 * 24 - 1) == 1);
    CHECK(month_of_hour(31 * 24) == 2);
    CHECK(month_of_hour(8759) == 12);
    CHECK(month_of_hour(8760) == 1);
}

TEST_CASE("series validation") {
    std::vector<HourlyRecord> rs;
    for (int i = 0; i < 23; ++i) rs.push_back(testutil::record(i, 1, 0));
    CHECK_THROWS_AS(HourlySeries{rs}, DataError);
    rs.push_back(testutil::record(23, 1, 0));
    CHECK_NOTHROW(HourlySeries{rs});
    rs[5].hour_index = 7;
    CHECK_THROWS_AS(HourlySeries{rs}, DataError);
    rs[5] = testutil::record(5, -1, 0);
    CHECK_THROWS_AS(HourlySeries{rs}, DataError);
    rs[5] = testutil::record(5, 1, 0, 0.1, 2.0);
    CHECK_THROWS_AS(HourlySeries{rs}, DataError);  // wind on one row only
}

TEST_CASE("load_csv with price column") {
    const auto dir = testutil::scratch_dir("csv_price");
    std::ostringstream s;
    s << "hour,load_kwh,pv_kwh,price_per_kwh\n";
    for (int i = 0; i < 8760; ++i) s << i << ",3.5,1.25,0.1\n";
    testutil::write_text(dir / "year.csv", s.str());
    const HourlySeries series = load_csv(dir / "year.csv");
    CHECK(series.size() == 8760);
    CHECK_FALSE(series.has_wind());
    CHECK(series.days() == 365);
    for (std::size_t i = 0; i < series.size(); ++i) REQUIRE(series[i].hour_of_day == static_cast<int>(i % 24));
}

TEST_CASE("load_csv rejects bad input") {
    const auto dir = testutil::scratch_dir("csv_bad");
    auto day_with = [](int bad_row, const std::string& bad_line) {
        std::ostringstream s;
        s << "hour,load_kwh,pv_kwh,price_per_kwh\n";
        for (int i = 0; i < 24; ++i) {
            if (i + 1 == bad_row) s << bad_line << '\n';
            else s << i << ",2,0,0.1\n";
        }
        return s.str();
    };
    auto message = [&](const std::string& text) -> std::string {
        testutil::write_text(dir / "bad.csv", text);
        try {
            load_csv(dir / "bad.csv");
        } catch (const DataError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(message(day_with(6, "5,-1,0,0.1")) == "negative value at row 6");
    CHECK(message(day_with(3, "2,1,0")).find("malformed row 3") == 0);
    CHECK(message(day_with(4, "9,1,0,0.1")) == "non-contiguous hour at row 4");
    CHECK(message("hour,load_kwh,pv_kwh,price_per_kwh,colour\n").find("colour") != std::string::npos);
    CHECK(message("hour,load_kwh,price_per_kwh\n").find("pv_kwh") != std::string::npos);
    CHECK(message("hour,load_kwh,pv_kwh\n0,1,0\n").find("price") != std::string::npos);
    CHECK_THROWS_AS(load_csv(dir / "missing.csv"), IoError);
}

TEST_CASE("load_csv without price column takes the tariff") {
    const auto dir = testutil::scratch_dir("csv_tariff");
    std::ostringstream s;
    s << "load_kwh,hour,pv_kwh\n";  // column order is free
    for (int i = 0; i < 48; ++i) s << (i % 7) << ',' << i << ",0.5\n";
    testutil::write_text(dir / "two_days.csv", s.str());
    const TariffSchedule t = default_tariff();
    const HourlySeries series = load_csv(dir / "two_days.csv", t);
    REQUIRE(series.size() == 48);
    for (const HourlyRecord& r : series.records()) {
        CHECK(r.price_per_kwh == t.price_at(r.hour_of_day));
        if (r.hour_of_day == 18) CHECK(r.price_per_kwh == t.rates().peak);
    }
}

TEST_CASE("write_csv round-trips") {
    const auto dir = testutil::scratch_dir("csv_roundtrip");
    SyntheticProfileConfig cfg;
    cfg.days = 3;
    const HourlySeries a = generate_synthetic(cfg, default_tariff());
    write_csv(a, dir / "a.csv");
    const HourlySeries b = load_csv(dir / "a.csv");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].load_kwh == b[i].load_kwh);
        CHECK(a[i].pv_kwh == b[i].pv_kwh);
        CHECK(a[i].wind_kwh == b[i].wind_kwh);
        CHECK(a[i].price_per_kwh == b[i].price_per_kwh);
        CHECK(a[i].month == b[i].month);
    }
}

TEST_CASE("synthetic generator with no generation") {
    SyntheticProfileConfig cfg;
    cfg.days = 1;
    cfg.pv_peak_kwh = 0.0;
    cfg.wind_mean_kwh = 0.0;
    cfg.noise_fraction = 0.0;
    const HourlySeries s = generate_synthetic(cfg, default_tariff());
    REQUIRE(s.size() == 24);
    for (const HourlyRecord& r : s.records()) {
        CHECK(r.pv_kwh == 0.0);
        CHECK(r.wind_kwh.value() == 0.0);
        CHECK(r.load_kwh == doctest::Approx(synthetic_load_profile(cfg, r.hour_of_day)).epsilon(1e-12));
    }
}

TEST_CASE("synthetic generator is deterministic and pure") {
    SyntheticProfileConfig cfg;
    cfg.days = 30;
    const HourlySeries a = generate_synthetic(cfg, default_tariff());
    const HourlySeries b = generate_synthetic(cfg, default_tariff());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].load_kwh == b[i].load_kwh);
        REQUIRE(a[i].pv_kwh == b[i].pv_kwh);
        REQUIRE(a[i].wind_kwh == b[i].wind_kwh);
    }
    cfg.rng_seed = 8;
    const HourlySeries c = generate_synthetic(cfg, default_tariff());
    CHECK(c[10].load_kwh != a[10].load_kwh);
}

TEST_CASE("windless variant shares load and pv") {
    SyntheticProfileConfig cfg;
    cfg.days = 20;
    const HourlySeries with = generate_synthetic(cfg, default_tariff());
    cfg.include_wind = false;
    const HourlySeries without = generate_synthetic(cfg, default_tariff());
    CHECK(with.has_wind());
    CHECK_FALSE(without.has_wind());
    for (std::size_t i = 0; i < with.size(); ++i) {
        REQUIRE(with[i].load_kwh == without[i].load_kwh);
        REQUIRE(with[i].pv_kwh == without[i].pv_kwh);
    }
    CHECK_FALSE(with.without_wind().has_wind());
}

TEST_CASE("synthetic year matches the closed-form profile") {
    const SyntheticProfileConfig cfg;
    const TariffSchedule t = default_tariff();
    const HourlySeries s = generate_synthetic(cfg, t);
    REQUIRE(s.size() == 8760);
    double load = 0.0;
    for (const HourlyRecord& r : s.records()) {
        load += r.load_kwh;
        REQUIRE(r.hour_of_day == static_cast<int>(r.hour_index % 24));
        REQUIRE(r.price_per_kwh == t.price_at(r.hour_of_day));
        if (r.hour_of_day < 3) REQUIRE(r.pv_kwh == 0.0);
    }
    const double expected = oracle::closed_form_load(cfg.base_load_kwh, cfg.load_amplitude_kwh, 365);
    CHECK(std::abs(load - expected) <= 0.2 * expected);
    CHECK(std::abs(load - expected) <= 0.01 * expected);  // noise is zero-mean
    double profile = 0.0;
    for (int h = 0; h < 24; ++h) profile += synthetic_load_profile(cfg, h);
    CHECK(profile * 365 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("synthetic config validation") {
    SyntheticProfileConfig cfg;
    cfg.days = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.days = 1;
    cfg.noise_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("nearest-rank percentile") {
    std::vector<double> v;
    for (int i = 100; i >= 1; --i) v.push_back(i);
    CHECK(percentile(v, 99.0) == 99.0);
    CHECK(percentile(v, 50.0) == 50.0);
    CHECK(percentile(v, 100.0) == 100.0);
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK_THROWS_AS(percentile({}, 50.0), DataError);
}

}
