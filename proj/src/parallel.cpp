#include "dairyq/parallel.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dairyq {

int worker_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<TrainResult> train_all_serial(std::span<const TrainJob> jobs) {
    std::vector<TrainResult> out;
    out.reserve(jobs.size());
    for (const TrainJob& job : jobs) out.push_back(train(job.env, job.hyperparams, job.encoding));
    return out;
}

std::vector<TrainResult> train_all_parallel(std::span<const TrainJob> jobs) {
    std::vector<TrainResult> out(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = train(jobs[i].env, jobs[i].hyperparams, jobs[i].encoding);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::vector<OracleResult> oracle_all_days_serial(const HourlySeries& series, const BatterySpec& spec,
                                                 const TariffSchedule& tariff, const PenaltyTable& penalties,
                                                 int initial_soc_level) {
    std::vector<OracleResult> out;
    out.reserve(series.days());
    for (std::size_t d = 0; d < series.days(); ++d) {
        out.push_back(dp_oracle(series.day(d), spec, tariff, penalties, initial_soc_level));
    }
    return out;
}

std::vector<OracleResult> oracle_all_days_parallel(const HourlySeries& series, const BatterySpec& spec,
                                                   const TariffSchedule& tariff, const PenaltyTable& penalties,
                                                   int initial_soc_level) {
    std::vector<OracleResult> out(series.days());
    std::vector<std::exception_ptr> errors(series.days());
    const auto n = static_cast<std::ptrdiff_t>(series.days());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t d = 0; d < n; ++d) {
        try {
            out[d] = dp_oracle(series.day(static_cast<std::size_t>(d)), spec, tariff, penalties, initial_soc_level);
        } catch (...) {
            errors[d] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace dairyq
