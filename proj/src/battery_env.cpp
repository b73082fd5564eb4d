#include "dairyq/battery_env.hpp"

#include <algorithm>
#include <cmath>

#include "dairyq/errors.hpp"

namespace dairyq {

namespace {
// Comparisons against the capacity and reserve thresholds tolerate the
// rounding left by lattice arithmetic.
constexpr double kEnergyTol = 1e-9;
}  // namespace

double BatterySpec::level_energy(int level) const {
    if (level < 0 || level >= soc_levels) throw DataError("SOC level " + std::to_string(level) + " out of range");
    if (level == soc_levels - 1) return capacity_kwh;
    return capacity_kwh * level / (soc_levels - 1);
}

void BatterySpec::validate() const {
    if (!(std::isfinite(capacity_kwh) && capacity_kwh > 0.0)) throw ConfigError("capacity_kwh must be > 0");
    if (!(std::isfinite(charge_rate_kw) && charge_rate_kw > 0.0)) throw ConfigError("charge_rate_kw must be > 0");
    if (!(std::isfinite(discharge_rate_kw) && discharge_rate_kw > 0.0)) {
        throw ConfigError("discharge_rate_kw must be > 0");
    }
    if (!(reserve_fraction >= 0.0 && reserve_fraction < 1.0)) throw ConfigError("reserve_fraction must be in [0,1)");
    if (soc_levels < 2) throw ConfigError("soc_levels must be >= 2");
}

const char* to_string(Action action) noexcept {
    switch (action) {
        case Action::Charge: return "charge";
        case Action::Discharge: return "discharge";
        case Action::Idle: return "idle";
    }
    return "?";
}

std::optional<Action> parse_action(std::string_view name) noexcept {
    if (name == "charge") return Action::Charge;
    if (name == "discharge") return Action::Discharge;
    if (name == "idle") return Action::Idle;
    return std::nullopt;
}

PenaltyTable PenaltyTable::zero() noexcept {
    return PenaltyTable{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
}

EnergyFlows apply_action(const BatterySpec& spec, BatteryState battery, const HourlyRecord& record, Action action,
                         std::optional<double> charge_cap_kwh) {
    const double load = record.load_kwh;
    const double supply = record.renewables_kwh();
    const double surplus = std::max(0.0, supply - load);
    const double deficit = std::max(0.0, load - supply);
    const double energy = battery.energy_kwh;

    EnergyFlows f;
    f.renewables_used = std::min(supply, load);
    f.grid_import_kwh = deficit;
    f.curtailed_kwh = surplus;
    f.next_battery = battery;

    switch (action) {
        case Action::Charge: {
            const double room = std::max(0.0, spec.capacity_kwh - energy);
            double accepted = std::min(spec.charge_rate_kw, room);
            if (charge_cap_kwh) accepted = std::min(accepted, std::max(0.0, *charge_cap_kwh));
            const double from_surplus = std::min(accepted, surplus);
            f.battery_charge_in = accepted;
            f.grid_charge_kwh = accepted - from_surplus;
            f.renewables_used += from_surplus;
            f.curtailed_kwh = surplus - from_surplus;
            f.grid_import_kwh = deficit + f.grid_charge_kwh;
            f.next_battery.energy_kwh = accepted == room ? std::max(energy, spec.capacity_kwh) : energy + accepted;
            break;
        }
        case Action::Discharge: {
            const double available = std::max(0.0, energy - spec.min_energy_kwh());
            const double delivered = std::min({spec.discharge_rate_kw, available, deficit});
            f.battery_discharge_out = delivered;
            f.grid_import_kwh = std::max(0.0, deficit - delivered);
            f.next_battery.energy_kwh =
                (delivered > 0.0 && delivered == available) ? spec.min_energy_kwh() : energy - delivered;
            break;
        }
        case Action::Idle:
            break;
    }
    return f;
}

double penalty_for(Action action, Tier tier, double energy_before, const BatterySpec& spec,
                   const PenaltyTable& p) {
    const bool full = energy_before >= spec.capacity_kwh - kEnergyTol;
    const double reserve = spec.min_energy_kwh();
    switch (action) {
        case Action::Charge:
            if (full && tier == Tier::Peak) return p.charge_full_peak;
            if (full) return p.charge_full;
            if (tier == Tier::Peak) return p.charge_peak;
            if (tier == Tier::OffPeak) return p.charge_off_peak_bonus;
            return 0.0;
        case Action::Discharge:
            if (energy_before <= reserve + kEnergyTol) return p.discharge_empty;
            if (tier == Tier::OffPeak) return p.discharge_off_peak;
            if (tier == Tier::Peak) return p.discharge_peak_bonus;
            return 0.0;
        case Action::Idle:
            if (tier == Tier::Peak && energy_before >= reserve - kEnergyTol) return p.idle_peak_with_charge;
            return 0.0;
    }
    return 0.0;
}

RewardTerms compute_reward(Action action, Tier tier, double price, double grid_import_kwh, double energy_before,
                           const BatterySpec& spec, const PenaltyTable& penalties) {
    RewardTerms t;
    t.penalty_applied = penalty_for(action, tier, energy_before, spec, penalties);
    t.reward = -(grid_import_kwh * price) + t.penalty_applied;
    return t;
}

// ---------------------------------------------------------------------------

BatteryEnv::BatteryEnv(std::shared_ptr<const HourlySeries> series, BatterySpec spec, TariffSchedule tariff,
                       PenaltyTable penalties, std::size_t horizon)
    : series_(std::move(series)),
      spec_(spec),
      tariff_(std::move(tariff)),
      penalties_(penalties),
      horizon_(horizon) {
    if (!series_) throw EnvError("environment needs a series");
    spec_.validate();
}

Observation BatteryEnv::reset(std::size_t day_index, int initial_soc_level) {
    if (day_index >= series_->days()) throw EnvError("day index " + std::to_string(day_index) + " out of range");
    if (initial_soc_level < 0 || initial_soc_level >= spec_.soc_levels) {
        throw EnvError("initial SOC level " + std::to_string(initial_soc_level) + " out of range");
    }
    return reset_at(day_index * 24, spec_.level_energy(initial_soc_level));
}

Observation BatteryEnv::reset_at(std::size_t hour_index, double energy_kwh) {
    if (hour_index >= series_->size()) throw EnvError("hour index out of range");
    if (!(energy_kwh >= 0.0 && energy_kwh <= spec_.capacity_kwh)) throw EnvError("initial energy out of range");
    cursor_ = hour_index;
    steps_ = 0;
    battery_.energy_kwh = energy_kwh;
    return observe();
}

const HourlyRecord& BatteryEnv::current_record() const { return (*series_)[cursor_]; }

Observation BatteryEnv::observe() const { return observe_at(cursor_); }

Observation BatteryEnv::observe_at(std::size_t hour_index) const {
    const HourlyRecord& r = (*series_)[hour_index];
    Observation o;
    o.hour_index = r.hour_index;
    o.hour_of_day = r.hour_of_day;
    o.energy_kwh = battery_.energy_kwh;
    o.soc_bin = soc_bin(spec_, battery_.energy_kwh);
    o.load_kwh = r.load_kwh;
    o.pv_kwh = r.pv_kwh;
    o.wind_kwh = r.wind_kwh;
    return o;
}

std::pair<StepOutcome, Observation> BatteryEnv::step(Action action, std::optional<double> charge_cap_kwh) {
    if (steps_ >= horizon_) {
        throw EnvError("step past episode horizon of " + std::to_string(horizon_) + " hours");
    }
    const HourlyRecord& r = current_record();
    const double energy_before = battery_.energy_kwh;
    const EnergyFlows flows = apply_action(spec_, battery_, r, action, charge_cap_kwh);
    const RewardTerms terms =
        compute_reward(action, tariff_.tier_of(r.hour_of_day), r.price_per_kwh, flows.grid_import_kwh,
                       energy_before, spec_, penalties_);

    StepOutcome out;
    out.reward = terms.reward;
    out.penalty_applied = terms.penalty_applied;
    out.grid_import_kwh = flows.grid_import_kwh;
    out.grid_charge_kwh = flows.grid_charge_kwh;
    out.cost = flows.grid_import_kwh * r.price_per_kwh;
    out.battery_delta_kwh = flows.battery_delta_kwh();
    out.curtailed_kwh = flows.curtailed_kwh;
    out.next_battery = flows.next_battery;
    out.flows = flows;

    battery_ = flows.next_battery;
    cursor_ = (cursor_ + 1) % series_->size();
    ++steps_;
    return {out, observe()};
}

}  // namespace dairyq
