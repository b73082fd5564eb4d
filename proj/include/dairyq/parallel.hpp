#pragma once

#include <span>
#include <vector>

#include "dairyq/evaluation.hpp"
#include "dairyq/q_agent.hpp"

// Fan-out of independent work items. Each `*_parallel` kernel uses OpenMP
// across items and must produce results identical to its `*_serial`
// reference; the tests compare them bit for bit.

namespace dairyq {

struct TrainJob {
    BatteryEnv env;
    Hyperparams hyperparams;
    EncodingSpec encoding;
};

std::vector<TrainResult> train_all_serial(std::span<const TrainJob> jobs);
std::vector<TrainResult> train_all_parallel(std::span<const TrainJob> jobs);

/// Daily oracle optimum for every day in the series, each starting from
/// `initial_soc_level`.
std::vector<OracleResult> oracle_all_days_serial(const HourlySeries& series, const BatterySpec& spec,
                                                 const TariffSchedule& tariff, const PenaltyTable& penalties,
                                                 int initial_soc_level);
std::vector<OracleResult> oracle_all_days_parallel(const HourlySeries& series, const BatterySpec& spec,
                                                   const TariffSchedule& tariff, const PenaltyTable& penalties,
                                                   int initial_soc_level);

/// Number of worker threads the parallel kernels will use.
int worker_threads();

}  // namespace dairyq
