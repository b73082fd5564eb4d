#pragma once

#include <optional>
#include <string_view>

#include "dairyq/battery_env.hpp"

namespace dairyq {

enum class BaselineKind { NoBattery, Msc, Tou };

const char* to_string(BaselineKind kind) noexcept;
std::optional<BaselineKind> parse_baseline_kind(std::string_view name) noexcept;

/// An action plus an optional limit on how much a Charge may store. The
/// environment honours the cap, which is how a rule-based controller picks the
/// charging source (renewable surplus only, or grid at full rate).
struct ControlDecision {
    Action action = Action::Idle;
    std::optional<double> charge_cap_kwh;
};

/// Maximise self-consumption: store renewable surplus, cover deficits from
/// the battery, never charge from the grid.
ControlDecision msc_action(const HourlyRecord& record, BatteryState battery, const BatterySpec& spec);

/// Time-of-use: grid-charge at full rate off-peak, store surplus at any hour,
/// discharge to cover the peak-hour shortfall, otherwise hold.
ControlDecision tou_action(const HourlyRecord& record, BatteryState battery, const BatterySpec& spec,
                           const TariffSchedule& tariff);

ControlDecision no_battery_action() noexcept;

ControlDecision baseline_action(BaselineKind kind, const HourlyRecord& record, BatteryState battery,
                                const BatterySpec& spec, const TariffSchedule& tariff);

}  // namespace dairyq
