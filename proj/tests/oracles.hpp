#pragma once
// Reference computations written independently of the library code paths.
// Tests compare library results against these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dairyq/timeseries.hpp"

namespace oracle {

// Q-learning update written out by hand.
inline double td(double q, double reward, double max_next, double alpha, double discount) {
    return q + alpha * (reward + discount * max_next - q);
}

inline double gauss_hump(double x, double mu, double sigma) {
    return std::exp(-0.5 * std::pow((x - mu) / sigma, 2));
}

// Noise-free annual load: the daily profile summed over the year.
inline double closed_form_load(double base, double amp, int days) {
    double day = 0.0;
    for (int h = 0; h < 24; ++h) {
        const double x = h + 0.5;
        day += base + amp * (0.7 * gauss_hump(x, 8.0, 1.5) + gauss_hump(x, 18.0, 0.9));
    }
    return day * days;
}

// Cost of serving every deficit from the grid.
inline double no_battery_cost(const dairyq::HourlySeries& s) {
    double total = 0.0;
    for (const auto& r : s.records()) total += std::max(0.0, r.load_kwh - r.pv_kwh - r.wind_kwh.value_or(0.0)) * r.price_per_kwh;
    return total;
}

inline double no_battery_import(const dairyq::HourlySeries& s) {
    double total = 0.0;
    for (const auto& r : s.records()) total += std::max(0.0, r.load_kwh - r.pv_kwh - r.wind_kwh.value_or(0.0));
    return total;
}

// Minimal battery model: 0 = charge, 1 = discharge, 2 = idle.
struct Battery {
    double cap, rate_in, rate_out, reserve;
};

struct Hour {
    double load, renew, price;
    int tier;  // 0 off-peak, 1 standard, 2 peak
};

struct Step {
    double next_energy;
    double grid;
    double reward;
};

inline Step step(const Battery& b, const Hour& h, double e, int action, bool shaped) {
    double grid = std::max(0.0, h.load - h.renew);
    const double spare = std::max(0.0, h.renew - h.load);
    double next = e;
    if (action == 0) {
        const double in = std::min(b.rate_in, b.cap - e);
        grid += std::max(0.0, in - spare);
        next = e + in;
    } else if (action == 1) {
        const double out = std::min({b.rate_out, std::max(0.0, e - b.reserve), grid});
        grid -= out;
        next = e - out;
    }
    double pen = 0.0;
    if (shaped) {
        const double eps = 1e-9;
        const bool full = e >= b.cap - eps;
        if (action == 0) {
            pen = full && h.tier == 2 ? -15 : full ? -10 : h.tier == 2 ? -10 : h.tier == 0 ? 5 : 0;
        } else if (action == 1) {
            pen = e <= b.reserve + eps ? -10 : h.tier == 0 ? -5 : h.tier == 2 ? 5 : 0;
        } else {
            pen = (h.tier == 2 && e >= b.reserve - eps) ? -10 : 0;
        }
    }
    return {next, grid, -grid * h.price + pen};
}

// Best undiscounted return over every action sequence, enumerated forward
// with memoisation on (hour, stored energy rounded to 1e-7 kWh).
inline double best_return(const Battery& b, const std::vector<Hour>& hours, double e0, bool shaped) {
    std::map<std::pair<std::size_t, std::int64_t>, double> memo;
    std::function<double(std::size_t, double)> go = [&](std::size_t t, double e) -> double {
        if (t == hours.size()) return 0.0;
        const auto key = std::make_pair(t, static_cast<std::int64_t>(std::llround(e * 1e7)));
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        double best = -1e300;
        for (int a = 0; a < 3; ++a) {
            const Step s = step(b, hours[t], e, a, shaped);
            best = std::max(best, s.reward + go(t + 1, s.next_energy));
        }
        memo[key] = best;
        return best;
    };
    return go(0, e0);
}

// Exhaustive 3^n enumeration; only for short horizons.
inline double brute_force_return(const Battery& b, const std::vector<Hour>& hours, double e0, bool shaped) {
    const std::size_t n = hours.size();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 3;
    double best = -1e300;
    for (std::size_t code = 0; code < combos; ++code) {
        std::size_t c = code;
        double e = e0, total = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const Step s = step(b, hours[t], e, static_cast<int>(c % 3), shaped);
            c /= 3;
            total += s.reward;
            e = s.next_energy;
        }
        best = std::max(best, total);
    }
    return best;
}

}  // namespace oracle
