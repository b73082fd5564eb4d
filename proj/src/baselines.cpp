#include "dairyq/baselines.hpp"

#include <algorithm>

namespace dairyq {

namespace {
constexpr double kEnergyTol = 1e-9;

bool is_full(BatteryState b, const BatterySpec& spec) { return b.energy_kwh >= spec.capacity_kwh - kEnergyTol; }
bool above_reserve(BatteryState b, const BatterySpec& spec) {
    return b.energy_kwh > spec.min_energy_kwh() + kEnergyTol;
}
}  // namespace

const char* to_string(BaselineKind kind) noexcept {
    switch (kind) {
        case BaselineKind::NoBattery: return "no-battery";
        case BaselineKind::Msc: return "msc";
        case BaselineKind::Tou: return "tou";
    }
    return "?";
}

std::optional<BaselineKind> parse_baseline_kind(std::string_view name) noexcept {
    if (name == "no-battery") return BaselineKind::NoBattery;
    if (name == "msc") return BaselineKind::Msc;
    if (name == "tou") return BaselineKind::Tou;
    return std::nullopt;
}

ControlDecision msc_action(const HourlyRecord& record, BatteryState battery, const BatterySpec& spec) {
    const double supply = record.renewables_kwh();
    if (supply > record.load_kwh && !is_full(battery, spec)) {
        return {Action::Charge, supply - record.load_kwh};
    }
    if (supply < record.load_kwh && above_reserve(battery, spec)) return {Action::Discharge, std::nullopt};
    return {Action::Idle, std::nullopt};
}

ControlDecision tou_action(const HourlyRecord& record, BatteryState battery, const BatterySpec& spec,
                           const TariffSchedule& tariff) {
    const double supply = record.renewables_kwh();
    const Tier tier = tariff.tier_of(record.hour_of_day);
    if (!is_full(battery, spec)) {
        // Off-peak: surplus first, the rest of the rate from the grid (the
        // environment already fills from surplus before the grid).
        if (tier == Tier::OffPeak) return {Action::Charge, std::nullopt};
        if (supply > record.load_kwh) return {Action::Charge, supply - record.load_kwh};
    }
    if (tier == Tier::Peak && record.load_kwh > supply && above_reserve(battery, spec)) {
        return {Action::Discharge, std::nullopt};
    }
    return {Action::Idle, std::nullopt};
}

ControlDecision no_battery_action() noexcept { return {Action::Idle, std::nullopt}; }

ControlDecision baseline_action(BaselineKind kind, const HourlyRecord& record, BatteryState battery,
                                const BatterySpec& spec, const TariffSchedule& tariff) {
    switch (kind) {
        case BaselineKind::NoBattery: return no_battery_action();
        case BaselineKind::Msc: return msc_action(record, battery, spec);
        case BaselineKind::Tou: return tou_action(record, battery, spec, tariff);
    }
    return no_battery_action();
}

}  // namespace dairyq
