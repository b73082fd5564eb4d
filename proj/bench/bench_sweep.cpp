// Times the serial reference kernels against their OpenMP versions.

#include <chrono>
#include <cstdio>

#include <CLI11.hpp>

#include "dairyq/parallel.hpp"

using namespace dairyq;

namespace {

template <typename F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel sweep benchmark"};
    int jobs = 8;
    std::int64_t episodes = 200'000;
    int days = 365;
    app.add_option("--jobs", jobs, "independent training runs (seeds)");
    app.add_option("--episodes", episodes, "episodes per run");
    app.add_option("--days", days, "synthetic days");
    CLI11_PARSE(app, argc, argv);

    SyntheticProfileConfig cfg;
    cfg.days = days;
    auto series = std::make_shared<const HourlySeries>(generate_synthetic(cfg, default_tariff()));
    const BatterySpec spec;
    const EncodingSpec enc = default_encoding(EncodingKind::HourSoc, spec, *series);

    std::vector<TrainJob> work;
    for (int i = 0; i < jobs; ++i) {
        Hyperparams hp;
        hp.total_episodes = episodes;
        hp.rng_seed = static_cast<std::uint64_t>(i);
        work.push_back({BatteryEnv(series, spec, default_tariff(), PenaltyTable{}, 24), hp, enc});
    }

    std::printf("threads %d, %d runs x %lld episodes, %d days\n", worker_threads(), jobs,
                static_cast<long long>(episodes), days);

    std::vector<TrainResult> a, b;
    const double ts = seconds([&] { a = train_all_serial(work); });
    const double tp = seconds([&] { b = train_all_parallel(work); });
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].table == b[i].table;
    std::printf("train   serial %8.3f s  parallel %8.3f s  speedup %5.2fx  identical %s\n", ts, tp, ts / tp,
                same ? "yes" : "NO");

    std::vector<OracleResult> oa, ob;
    const double os = seconds([&] { oa = oracle_all_days_serial(*series, spec, default_tariff(), PenaltyTable{}, 1); });
    const double op = seconds([&] { ob = oracle_all_days_parallel(*series, spec, default_tariff(), PenaltyTable{}, 1); });
    bool osame = oa.size() == ob.size();
    for (std::size_t i = 0; osame && i < oa.size(); ++i) osame = oa[i].value == ob[i].value;
    std::printf("oracle  serial %8.3f s  parallel %8.3f s  speedup %5.2fx  identical %s\n", os, op, os / op,
                osame ? "yes" : "NO");
    return same && osame ? 0 : 1;
}
