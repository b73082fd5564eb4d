#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string_view>

#include "dairyq/battery_spec.hpp"
#include "dairyq/state_encoding.hpp"
#include "dairyq/timeseries.hpp"

namespace dairyq {

enum class Action : int { Charge = 0, Discharge = 1, Idle = 2 };

inline constexpr std::array<Action, 3> kAllActions = {Action::Charge, Action::Discharge, Action::Idle};
inline constexpr int kActionCount = 3;

const char* to_string(Action action) noexcept;
std::optional<Action> parse_action(std::string_view name) noexcept;

/// Per-hour energy accounting produced by `apply_action`. Every term is >= 0 and
/// load + battery_charge_in == renewables_used + battery_discharge_out + grid_import.
struct EnergyFlows {
    double renewables_used = 0.0;
    double battery_charge_in = 0.0;
    double battery_discharge_out = 0.0;
    double grid_import_kwh = 0.0;
    /// Part of battery_charge_in that came from the grid.
    double grid_charge_kwh = 0.0;
    double curtailed_kwh = 0.0;
    BatteryState next_battery;

    double battery_delta_kwh() const noexcept { return battery_charge_in - battery_discharge_out; }
};

/// Shaping terms added to the negative import cost. First matching row wins
/// within each action's list, in declaration order.
struct PenaltyTable {
    double charge_full_peak = -15.0;
    double charge_full = -10.0;
    double charge_peak = -10.0;
    double charge_off_peak_bonus = 5.0;
    double discharge_empty = -10.0;
    double discharge_off_peak = -5.0;
    double discharge_peak_bonus = 5.0;
    double idle_peak_with_charge = -10.0;

    /// All-zero table: rewards reduce to pure electricity cost.
    static PenaltyTable zero() noexcept;
};

enum class PenaltyMode { Shaped, CostOnly };

/// Battery dynamics for one hour. Renewables serve load first, then (on Charge)
/// the battery, and the rest is curtailed. `charge_cap_kwh`, when given, further
/// limits how much a Charge may store; controllers use it to restrict the
/// charging source.
EnergyFlows apply_action(const BatterySpec& spec, BatteryState battery, const HourlyRecord& record,
                         Action action, std::optional<double> charge_cap_kwh = std::nullopt);

/// Signed shaping term for `action` taken in `tier` with `energy_before` stored.
double penalty_for(Action action, Tier tier, double energy_before, const BatterySpec& spec,
                   const PenaltyTable& penalties);

struct RewardTerms {
    double reward = 0.0;
    double penalty_applied = 0.0;
};

/// reward = -(grid_import * price) + penalty.
RewardTerms compute_reward(Action action, Tier tier, double price, double grid_import_kwh,
                           double energy_before, const BatterySpec& spec, const PenaltyTable& penalties);

struct StepOutcome {
    double reward = 0.0;
    double grid_import_kwh = 0.0;
    double grid_charge_kwh = 0.0;
    double cost = 0.0;
    double battery_delta_kwh = 0.0;
    double curtailed_kwh = 0.0;
    BatteryState next_battery;
    double penalty_applied = 0.0;
    EnergyFlows flows;
};

/// Single-threaded MDP cursor over a shared series. Copies are independent.
class BatteryEnv {
public:
    BatteryEnv(std::shared_ptr<const HourlySeries> series, BatterySpec spec, TariffSchedule tariff,
               PenaltyTable penalties, std::size_t horizon);

    /// Positions at hour 0 of `day_index` with the battery at the lattice
    /// energy of `initial_soc_level`. Throws EnvError on out-of-range input.
    Observation reset(std::size_t day_index, int initial_soc_level);

    /// Positions at an arbitrary hour with an explicit stored energy.
    Observation reset_at(std::size_t hour_index, double energy_kwh);

    /// Advances one hour. The returned observation is for the following hour
    /// (wrapping to the start of the series after its last record). Throws
    /// EnvError after `horizon` steps.
    std::pair<StepOutcome, Observation> step(Action action, std::optional<double> charge_cap_kwh = std::nullopt);

    Observation observe() const;
    const HourlyRecord& current_record() const;
    BatteryState battery() const noexcept { return battery_; }
    std::size_t steps_taken() const noexcept { return steps_; }
    std::size_t horizon() const noexcept { return horizon_; }
    bool done() const noexcept { return steps_ >= horizon_; }

    const HourlySeries& series() const noexcept { return *series_; }
    const std::shared_ptr<const HourlySeries>& series_ptr() const noexcept { return series_; }
    const BatterySpec& spec() const noexcept { return spec_; }
    const TariffSchedule& tariff() const noexcept { return tariff_; }
    const PenaltyTable& penalties() const noexcept { return penalties_; }

    void set_horizon(std::size_t horizon) noexcept { horizon_ = horizon; }
    void set_penalties(const PenaltyTable& penalties) noexcept { penalties_ = penalties; }

private:
    Observation observe_at(std::size_t hour_index) const;

    std::shared_ptr<const HourlySeries> series_;
    BatterySpec spec_;
    TariffSchedule tariff_;
    PenaltyTable penalties_;
    std::size_t horizon_;
    std::size_t cursor_ = 0;
    std::size_t steps_ = 0;
    BatteryState battery_;
};

}  // namespace dairyq
