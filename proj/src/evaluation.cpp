#include "dairyq/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

#include "dairyq/detail/io_util.hpp"
#include "dairyq/errors.hpp"
#include "dairyq/parallel.hpp"

namespace dairyq {

std::string controller_label(const Controller& controller) {
    if (const auto* g = std::get_if<GreedyPolicy>(&controller)) return g->label;
    return to_string(std::get<BaselineKind>(controller));
}

double EvalReport::mean_monthly_peak() const {
    if (monthly.empty()) return 0.0;
    double sum = 0.0;
    for (const MonthStats& m : monthly) sum += m.peak_import_kwh;
    return sum / static_cast<double>(monthly.size());
}

namespace {

void check_policy_fits(const QTable& q, const BatterySpec& spec, const HourlySeries& series) {
    if (q.encoding().soc_levels != spec.soc_levels) {
        throw FormatError("encoding mismatch: table has " + std::to_string(q.encoding().soc_levels) +
                          " SOC levels, battery has " + std::to_string(spec.soc_levels));
    }
    if (q.encoding().needs_wind() && !series.has_wind()) {
        throw FormatError("encoding mismatch: table uses wind but the series has no wind_kwh column");
    }
}

}  // namespace

EvalReport rollout(const Controller& controller, std::shared_ptr<const HourlySeries> series, const BatterySpec& spec,
                   const TariffSchedule& tariff, const RolloutOptions& options) {
    const PenaltyTable penalties = options.mode == PenaltyMode::Shaped ? options.penalties : PenaltyTable::zero();
    const std::size_t hours = series->size();
    BatteryEnv env(std::move(series), spec, tariff, penalties, hours);

    const GreedyPolicy* policy = std::get_if<GreedyPolicy>(&controller);
    if (policy) {
        if (!policy->table) throw FormatError("greedy policy without a table");
        check_policy_fits(*policy->table, spec, env.series());
    }

    EvalReport report;
    report.label = controller_label(controller);
    report.trace.reserve(hours);

    Observation obs = env.reset(0, options.initial_soc_level);
    while (!env.done()) {
        const HourlyRecord& record = env.current_record();
        ControlDecision decision;
        if (policy) {
            decision.action = greedy_action(*policy->table, encode_flat(policy->table->encoding(), obs));
        } else {
            decision = baseline_action(std::get<BaselineKind>(controller), record, env.battery(), spec, tariff);
        }
        const auto [outcome, next] = env.step(decision.action, decision.charge_cap_kwh);

        TraceRow row;
        row.hour_index = record.hour_index;
        row.hour_of_day = record.hour_of_day;
        row.month = record.month;
        row.action = decision.action;
        row.grid_import_kwh = outcome.grid_import_kwh;
        row.grid_charge_kwh = outcome.grid_charge_kwh;
        row.cost = outcome.cost;
        row.reward = outcome.reward;
        row.soc_after_kwh = outcome.next_battery.energy_kwh;
        report.trace.push_back(row);
        obs = next;
    }

    for (const TraceRow& row : report.trace) {
        report.total_import_kwh += row.grid_import_kwh;
        report.total_cost += row.cost;
        report.total_reward += row.reward;
        auto it = std::find_if(report.monthly.begin(), report.monthly.end(),
                               [&](const MonthStats& m) { return m.month == row.month; });
        if (it == report.monthly.end()) {
            report.monthly.push_back({row.month, 0.0, 0.0, 0.0});
            it = std::prev(report.monthly.end());
        }
        it->import_kwh += row.grid_import_kwh;
        it->cost += row.cost;
        it->peak_import_kwh = std::max(it->peak_import_kwh, row.grid_import_kwh);
    }
    return report;
}

double greedy_episode_return(const QTable& q, BatteryEnv& env) {
    Observation obs = env.observe();
    double ret = 0.0;
    while (!env.done()) {
        const auto [outcome, next] = env.step(greedy_action(q, encode_flat(q.encoding(), obs)));
        ret += outcome.reward;
        obs = next;
    }
    return ret;
}

std::optional<double> reduction_pct(double base, double candidate) {
    if (base == 0.0) return std::nullopt;
    return (base - candidate) / base * 100.0;
}

ComparisonReport compare(const EvalReport& base, const EvalReport& candidate) {
    ComparisonReport c;
    c.base_label = base.label;
    c.candidate_label = candidate.label;
    c.import_reduction_pct = reduction_pct(base.total_import_kwh, candidate.total_import_kwh);
    c.cost_reduction_pct = reduction_pct(base.total_cost, candidate.total_cost);

    double sum = 0.0;
    int counted = 0;
    for (const MonthStats& b : base.monthly) {
        auto it = std::find_if(candidate.monthly.begin(), candidate.monthly.end(),
                               [&](const MonthStats& m) { return m.month == b.month; });
        if (it == candidate.monthly.end() || b.peak_import_kwh == 0.0) continue;
        sum += (b.peak_import_kwh - it->peak_import_kwh) / b.peak_import_kwh;
        ++counted;
    }
    if (counted > 0) c.peak_reduction_pct = sum / counted * 100.0;
    return c;
}

OracleResult dp_oracle(std::span<const HourlyRecord> records, const BatterySpec& spec, const TariffSchedule& tariff,
                       const PenaltyTable& penalties, int initial_soc_level, double discount) {
    spec.validate();
    const int levels = spec.soc_levels;
    if (initial_soc_level < 0 || initial_soc_level >= levels) throw EnvError("initial SOC level out of range");
    const std::size_t horizon = records.size();

    OracleResult out;
    out.value.assign((horizon + 1) * levels, 0.0);
    std::vector<Action> best_action(horizon * levels, Action::Idle);
    std::vector<int> next_level(horizon * levels * kActionCount, 0);

    for (std::size_t t = horizon; t-- > 0;) {
        const HourlyRecord& r = records[t];
        const Tier tier = tariff.tier_of(r.hour_of_day);
        for (int k = 0; k < levels; ++k) {
            const BatteryState battery{spec.level_energy(k)};
            double best = -std::numeric_limits<double>::infinity();
            for (Action a : kAllActions) {
                const EnergyFlows flows = apply_action(spec, battery, r, a);
                const int k_next = soc_bin(spec, flows.next_battery.energy_kwh);
                const RewardTerms terms = compute_reward(a, tier, r.price_per_kwh, flows.grid_import_kwh,
                                                         battery.energy_kwh, spec, penalties);
                const double q = terms.reward + discount * out.value[(t + 1) * levels + k_next];
                next_level[(t * levels + k) * kActionCount + static_cast<int>(a)] = k_next;
                if (q > best) {
                    best = q;
                    best_action[t * levels + k] = a;
                }
            }
            out.value[t * levels + k] = best;
        }
    }

    out.optimal_return = out.value[initial_soc_level];
    int k = initial_soc_level;
    for (std::size_t t = 0; t < horizon; ++t) {
        const Action a = best_action[t * levels + k];
        out.actions.push_back(a);
        k = next_level[(t * levels + k) * kActionCount + static_cast<int>(a)];
    }
    return out;
}

std::vector<AblationRow> ablation_run(std::shared_ptr<const HourlySeries> series, const BatterySpec& spec,
                                      const TariffSchedule& tariff, std::span<const EncodingKind> encodings,
                                      const Hyperparams& hp, const PenaltyTable& penalties,
                                      const RolloutOptions& eval_options) {
    std::vector<TrainJob> jobs;
    jobs.reserve(encodings.size());
    for (EncodingKind kind : encodings) {
        if (kind == EncodingKind::HourSocLoadPvWind && !series->has_wind()) {
            throw DataError("wind encoding requires a wind_kwh column");
        }
        jobs.push_back(TrainJob{BatteryEnv(series, spec, tariff, penalties, static_cast<std::size_t>(hp.steps_per_episode)),
                                hp, default_encoding(kind, spec, *series)});
    }
    std::vector<TrainResult> trained = train_all_parallel(jobs);

    const EvalReport base = rollout(BaselineKind::NoBattery, series, spec, tariff, eval_options);
    std::vector<AblationRow> rows;
    for (std::size_t i = 0; i < trained.size(); ++i) {
        AblationRow row;
        row.kind = encodings[i];
        row.state_space_size = state_space_size(trained[i].table.encoding());
        auto table = std::make_shared<const QTable>(std::move(trained[i].table));
        row.report = rollout(GreedyPolicy{table, std::string("q-learning/") + to_string(row.kind)}, series, spec,
                             tariff, eval_options);
        row.vs_base = compare(base, row.report);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------

void write_trace_csv(const EvalReport& report, const std::filesystem::path& path) {
    using detail::format_double;
    std::ostringstream out;
    out << "hour_index,hour_of_day,month,action,grid_import_kwh,grid_charge_kwh,cost,reward,soc_after_kwh\n";
    for (const TraceRow& r : report.trace) {
        out << r.hour_index << ',' << r.hour_of_day << ',' << r.month << ',' << to_string(r.action) << ','
            << format_double(r.grid_import_kwh) << ',' << format_double(r.grid_charge_kwh) << ','
            << format_double(r.cost) << ',' << format_double(r.reward) << ',' << format_double(r.soc_after_kwh)
            << '\n';
    }
    detail::write_file_atomic(path, out.str());
}

namespace {
nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
}  // namespace

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json months = nlohmann::json::array();
    for (const MonthStats& m : report.monthly) {
        months.push_back(
            {{"month", m.month}, {"import_kwh", m.import_kwh}, {"cost", m.cost}, {"peak_import_kwh", m.peak_import_kwh}});
    }
    return {{"controller", report.label},
            {"hours", report.trace.size()},
            {"total_import_kwh", report.total_import_kwh},
            {"total_cost", report.total_cost},
            {"total_reward", report.total_reward},
            {"mean_monthly_peak_kwh", report.mean_monthly_peak()},
            {"monthly", months}};
}

nlohmann::json to_json(const ComparisonReport& report) {
    return {{"base", report.base_label},
            {"candidate", report.candidate_label},
            {"import_reduction_pct", optional_number(report.import_reduction_pct)},
            {"cost_reduction_pct", optional_number(report.cost_reduction_pct)},
            {"peak_reduction_pct", optional_number(report.peak_reduction_pct)}};
}

std::string format_comparison_table(std::span<const ComparisonReport> rows) {
    std::size_t width = std::string("candidate").size();
    for (const auto& r : rows) width = std::max(width, r.candidate_label.size());
    auto cell = [](const std::optional<double>& v) {
        std::ostringstream s;
        if (v) s << std::fixed << std::setprecision(2) << *v;
        else s << "undefined";
        return s.str();
    };
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width)) << "candidate" << std::right << std::setw(14) << "import_%"
        << std::setw(14) << "cost_%" << std::setw(14) << "peak_%" << "  base\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(static_cast<int>(width)) << r.candidate_label << std::right << std::setw(14)
            << cell(r.import_reduction_pct) << std::setw(14) << cell(r.cost_reduction_pct) << std::setw(14)
            << cell(r.peak_reduction_pct) << "  " << r.base_label << '\n';
    }
    return out.str();
}

}  // namespace dairyq
