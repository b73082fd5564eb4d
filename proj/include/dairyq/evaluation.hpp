#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dairyq/baselines.hpp"
#include "dairyq/battery_env.hpp"
#include "dairyq/q_agent.hpp"

namespace dairyq {

/// Greedy policy read from a trained table.
struct GreedyPolicy {
    std::shared_ptr<const QTable> table;
    std::string label = "q-learning";
};

using Controller = std::variant<GreedyPolicy, BaselineKind>;

std::string controller_label(const Controller& controller);

struct TraceRow {
    std::size_t hour_index = 0;
    int hour_of_day = 0;
    int month = 1;
    Action action = Action::Idle;
    double grid_import_kwh = 0.0;
    double grid_charge_kwh = 0.0;
    double cost = 0.0;
    double reward = 0.0;
    double soc_after_kwh = 0.0;
};

struct MonthStats {
    int month = 1;
    double import_kwh = 0.0;
    double cost = 0.0;
    double peak_import_kwh = 0.0;
};

struct EvalReport {
    std::string label;
    std::vector<TraceRow> trace;
    double total_import_kwh = 0.0;
    double total_cost = 0.0;
    double total_reward = 0.0;
    /// Months in order of first appearance in the trace.
    std::vector<MonthStats> monthly;

    double mean_monthly_peak() const;
};

struct RolloutOptions {
    int initial_soc_level = 1;
    PenaltyMode mode = PenaltyMode::CostOnly;
    PenaltyTable penalties;  ///< used in Shaped mode
};

/// One sequential pass over the whole series; the battery carries across
/// midnight. Throws FormatError if a greedy policy's encoding does not fit the
/// battery or series.
EvalReport rollout(const Controller& controller, std::shared_ptr<const HourlySeries> series, const BatterySpec& spec,
                   const TariffSchedule& tariff, const RolloutOptions& options = {});

/// Rolls a greedy policy over an arbitrary environment until its horizon and
/// returns the undiscounted return. The environment must already be reset.
double greedy_episode_return(const QTable& q, BatteryEnv& env);

struct ComparisonReport {
    std::string base_label;
    std::string candidate_label;
    /// Percent reductions; empty when the base quantity is zero.
    std::optional<double> import_reduction_pct;
    std::optional<double> cost_reduction_pct;
    /// Mean over months of (peak_base - peak_candidate) / peak_base, in percent.
    std::optional<double> peak_reduction_pct;
};

std::optional<double> reduction_pct(double base, double candidate);

ComparisonReport compare(const EvalReport& base, const EvalReport& candidate);

struct OracleResult {
    double optimal_return = 0.0;
    std::vector<Action> actions;
    /// value[t * soc_levels + level]: optimal return-to-go from hour t.
    std::vector<double> value;
};

/// Exact backward induction over (hour, SOC level) for the given records.
/// Each level stands for its lattice energy (BatterySpec::level_energy), as in
/// BatteryEnv::reset; transitions and rewards come from apply_action and
/// compute_reward. `discount` = 1 gives the undiscounted finite-horizon optimum.
/// Ties go to the earlier action in Charge, Discharge, Idle order.
OracleResult dp_oracle(std::span<const HourlyRecord> records, const BatterySpec& spec, const TariffSchedule& tariff,
                       const PenaltyTable& penalties, int initial_soc_level, double discount = 1.0);

struct AblationRow {
    EncodingKind kind = EncodingKind::HourSoc;
    std::size_t state_space_size = 0;
    EvalReport report;
    ComparisonReport vs_base;
};

/// Trains one agent per encoding with the same hyperparameters and seed,
/// evaluates each greedily, and compares against the no-battery rollout.
std::vector<AblationRow> ablation_run(std::shared_ptr<const HourlySeries> series, const BatterySpec& spec,
                                      const TariffSchedule& tariff, std::span<const EncodingKind> encodings,
                                      const Hyperparams& hp, const PenaltyTable& penalties,
                                      const RolloutOptions& eval_options = {});

// Serialisation -------------------------------------------------------------

/// hour_index,hour_of_day,month,action,grid_import_kwh,grid_charge_kwh,cost,reward,soc_after_kwh
void write_trace_csv(const EvalReport& report, const std::filesystem::path& path);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const ComparisonReport& report);
/// Fixed-width text table, one row per comparison.
std::string format_comparison_table(std::span<const ComparisonReport> rows);

}  // namespace dairyq
