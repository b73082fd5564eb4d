#include "dairyq/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dairyq/config.hpp"
#include "dairyq/detail/io_util.hpp"
#include "dairyq/errors.hpp"
#include "dairyq/evaluation.hpp"
#include "dairyq/parallel.hpp"

namespace dairyq {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string data_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> episodes;
    std::string encoding;
};

struct Resolved {
    RunConfig config;
    fs::path out_dir;
};

// flag > environment > config file > default
Resolved resolve(const CommonFlags& f) {
    Resolved r;
    if (!f.config_path.empty()) r.config = load_config(f.config_path);
    RunConfig& c = r.config;
    if (!f.data_path.empty()) c.dataset_path = fs::path(f.data_path);
    if (f.episodes) c.hyperparams.total_episodes = *f.episodes;
    if (f.seed) c.seeds = {*f.seed};
    if (!f.encoding.empty()) {
        const auto kind = parse_encoding_kind(f.encoding);
        if (!kind) throw ConfigError("unknown encoding kind '" + f.encoding + "'");
        if (*kind != c.encoding.kind) c.encoding = EncodingConfig{*kind, {}, {}, {}};
        c.encoding_explicit = true;
    }
    c.validate();

    r.out_dir = c.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) r.out_dir = env;
    if (!f.out_dir.empty()) r.out_dir = f.out_dir;
    return r;
}

const fs::path& ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

void write_text(const fs::path& path, const std::string& text) { detail::write_file_atomic(path, text); }

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string training_log_csv(const TrainingLog& log) {
    using detail::format_double;
    std::ostringstream out;
    out << "episode,return,alpha,epsilon,day_index,initial_soc_level\n";
    for (std::size_t i = 0; i < log.size(); ++i) {
        const EpisodeLog& e = log[i];
        out << i << ',' << format_double(e.episode_return) << ',' << format_double(e.alpha) << ','
            << format_double(e.epsilon) << ',' << e.day_index << ',' << e.initial_soc_level << '\n';
    }
    return out.str();
}

RolloutOptions rollout_options(const RunConfig& c) {
    RolloutOptions o;
    o.initial_soc_level = c.eval_initial_soc_level;
    o.mode = c.eval_mode;
    o.penalties = c.penalties;
    return o;
}

int cmd_gen_data(const CommonFlags& flags, std::optional<int> days, bool no_wind, const std::string& output,
                 std::ostream& out) {
    Resolved r = resolve(CommonFlags{flags.config_path, flags.out_dir, "", std::nullopt, std::nullopt, ""});
    SyntheticProfileConfig syn = r.config.synthetic;
    if (days) syn.days = *days;
    if (flags.seed) syn.rng_seed = *flags.seed;
    if (no_wind) syn.include_wind = false;
    try {
        syn.validate();
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    const HourlySeries series = generate_synthetic(syn, r.config.tariff);
    const fs::path path = output.empty() ? ensure_dir(r.out_dir) / "synthetic.csv" : fs::path(output);
    write_csv(series, path);

    double load = 0.0, pv = 0.0, wind = 0.0;
    for (const HourlyRecord& rec : series.records()) {
        load += rec.load_kwh;
        pv += rec.pv_kwh;
        wind += rec.wind_kwh.value_or(0.0);
    }
    out << "wrote " << path.string() << " (" << series.size() << " rows)\n";
    out << std::fixed << std::setprecision(1);
    out << "load_kwh " << load << "\npv_kwh " << pv << '\n';
    if (series.has_wind()) out << "wind_kwh " << wind << '\n';
    return 0;
}

int cmd_train(const CommonFlags& flags, std::ostream& out) {
    const Resolved r = resolve(flags);
    const RunConfig& c = r.config;
    auto series = std::make_shared<const HourlySeries>(c.load_dataset());
    const EncodingSpec encoding = c.encoding_for(*series);

    std::vector<TrainJob> jobs;
    for (std::uint64_t seed : c.seeds) {
        Hyperparams hp = c.hyperparams;
        hp.rng_seed = seed;
        jobs.push_back(TrainJob{
            BatteryEnv(series, c.battery, c.tariff, c.penalties, static_cast<std::size_t>(hp.steps_per_episode)), hp,
            encoding});
    }
    std::vector<TrainResult> results = train_all_parallel(jobs);
    ensure_dir(r.out_dir);

    const std::string hash = config_fingerprint(c);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const std::uint64_t seed = c.seeds[i];
        const std::string suffix = "_s" + std::to_string(seed);
        const fs::path qt = r.out_dir / ("qtable" + suffix + ".qt");
        const fs::path log = r.out_dir / ("training_log" + suffix + ".csv");
        const fs::path manifest = r.out_dir / ("manifest" + suffix + ".json");
        save_qtable(results[i].table, qt);
        write_text(log, training_log_csv(results[i].log));

        RunConfig single = c;
        single.seeds = {seed};
        json m = {{"config_hash", hash},
                  {"seed", seed},
                  {"episodes", c.hyperparams.total_episodes},
                  {"encoding", to_string(encoding.kind)},
                  {"state_space_size", state_space_size(encoding)},
                  {"qtable_format_version", kQTableFormatVersion},
                  {"files", {qt.filename().string(), log.filename().string()}},
                  {"config", to_json(single)}};
        write_json(manifest, m);
        out << "seed " << seed << ": " << qt.string() << '\n';
    }
    return 0;
}

struct Evaluated {
    EvalReport report;
    std::string stem;
};

Evaluated evaluate_ref(const std::string& ref, const RunConfig& c, const std::shared_ptr<const HourlySeries>& series) {
    const auto colon = ref.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("controller ref must be qtable:<path> or baseline:<kind>, got '" + ref + "'");
    }
    const std::string scheme = ref.substr(0, colon);
    const std::string arg = ref.substr(colon + 1);
    const RolloutOptions opts = rollout_options(c);
    if (scheme == "baseline") {
        const auto kind = parse_baseline_kind(arg);
        if (!kind) throw ConfigError("unknown baseline '" + arg + "' (expected no-battery, msc or tou)");
        return {rollout(*kind, series, c.battery, c.tariff, opts), arg};
    }
    if (scheme == "qtable") {
        if (!fs::exists(arg)) throw IoError("missing Q-table " + arg);
        auto table = std::make_shared<const QTable>(load_qtable(arg));
        if (c.encoding_explicit) check_compatible(*table, c.encoding_for(*series));
        const std::string stem = fs::path(arg).stem().string();
        return {rollout(GreedyPolicy{table, "q-learning:" + stem}, series, c.battery, c.tariff, opts), stem};
    }
    throw ConfigError("unknown controller scheme '" + scheme + "'");
}

int cmd_evaluate(const CommonFlags& flags, const std::string& ref, std::ostream& out) {
    const Resolved r = resolve(flags);
    auto series = std::make_shared<const HourlySeries>(r.config.load_dataset());
    const Evaluated ev = evaluate_ref(ref, r.config, series);
    ensure_dir(r.out_dir);
    const fs::path csv = r.out_dir / ("eval_" + ev.stem + ".csv");
    const fs::path js = r.out_dir / ("eval_" + ev.stem + ".json");
    write_trace_csv(ev.report, csv);
    write_json(js, to_json(ev.report));
    out << std::fixed << std::setprecision(3) << ev.report.label << ": import_kwh " << ev.report.total_import_kwh
        << ", cost " << ev.report.total_cost << ", mean_monthly_peak_kwh " << ev.report.mean_monthly_peak() << '\n';
    return 0;
}

int cmd_compare(const CommonFlags& flags, const std::vector<std::string>& refs, std::ostream& out) {
    const Resolved r = resolve(flags);
    const RunConfig& c = r.config;
    auto series = std::make_shared<const HourlySeries>(c.load_dataset());

    std::vector<Evaluated> evals;
    for (const std::string& ref : refs) evals.push_back(evaluate_ref(ref, c, series));
    std::vector<ComparisonReport> rows;
    for (std::size_t i = 1; i < evals.size(); ++i) rows.push_back(compare(evals[0].report, evals[i].report));

    json doc = {{"base", evals[0].report.label}, {"rows", json::array()}};
    for (const auto& row : rows) doc["rows"].push_back(to_json(row));
    const std::string table = format_comparison_table(rows);
    ensure_dir(r.out_dir);
    write_json(r.out_dir / "comparison.json", doc);
    write_text(r.out_dir / "comparison.txt", table);
    out << table;
    return 0;
}

int cmd_ablation(const CommonFlags& flags, std::ostream& out) {
    const Resolved r = resolve(flags);
    const RunConfig& c = r.config;
    auto series = std::make_shared<const HourlySeries>(c.load_dataset());

    std::vector<EncodingKind> kinds = {EncodingKind::HourSoc, EncodingKind::HourSocLoadPv};
    if (series->has_wind()) kinds.push_back(EncodingKind::HourSocLoadPvWind);
    Hyperparams hp = c.hyperparams;
    hp.rng_seed = c.seeds.front();
    const auto rows = ablation_run(series, c.battery, c.tariff, kinds, hp, c.penalties, rollout_options(c));

    json doc = {{"seed", hp.rng_seed}, {"episodes", hp.total_episodes}, {"rows", json::array()}};
    std::ostringstream text;
    text << std::left << std::setw(24) << "encoding" << std::right << std::setw(10) << "states" << std::setw(14)
         << "import_kwh" << std::setw(14) << "cost" << std::setw(12) << "import_%" << std::setw(12) << "cost_%"
         << std::setw(12) << "peak_%" << '\n';
    auto pct = [](const std::optional<double>& v) {
        std::ostringstream s;
        if (v) s << std::fixed << std::setprecision(2) << *v;
        else s << "undefined";
        return s.str();
    };
    for (const AblationRow& row : rows) {
        doc["rows"].push_back({{"encoding", to_string(row.kind)},
                               {"state_space_size", row.state_space_size},
                               {"total_import_kwh", row.report.total_import_kwh},
                               {"total_cost", row.report.total_cost},
                               {"mean_monthly_peak_kwh", row.report.mean_monthly_peak()},
                               {"vs_no_battery", to_json(row.vs_base)}});
        text << std::left << std::setw(24) << to_string(row.kind) << std::right << std::setw(10)
             << row.state_space_size << std::fixed << std::setprecision(2) << std::setw(14)
             << row.report.total_import_kwh << std::setw(14) << row.report.total_cost << std::setw(12)
             << pct(row.vs_base.import_reduction_pct) << std::setw(12) << pct(row.vs_base.cost_reduction_pct)
             << std::setw(12) << pct(row.vs_base.peak_reduction_pct) << '\n';
    }
    ensure_dir(r.out_dir);
    write_json(r.out_dir / "ablation.json", doc);
    write_text(r.out_dir / "ablation.txt", text.str());
    out << text.str();
    return 0;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool training_flags) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--out", f.out_dir, "output directory (overrides config and " + std::string(kOutputDirEnv) + ")");
    if (training_flags) {
        cmd->add_option("--data", f.data_path, "hourly CSV; replaces the configured dataset");
        cmd->add_option("--episodes", f.episodes, "training episodes");
        cmd->add_option("--encoding", f.encoding, "hour_soc | hour_soc_load_pv | hour_soc_load_pv_wind");
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tabular Q-learning battery scheduling for dairy farms", "dairyq"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* gen = app.add_subcommand("gen-data", "write a synthetic hourly CSV");
    add_common(gen, flags, false);
    std::optional<int> days;
    bool no_wind = false;
    std::string output;
    gen->add_option("--days", days, "number of days");
    gen->add_option("--seed", flags.seed, "generator seed");
    gen->add_flag("--no-wind", no_wind, "omit the wind column");
    gen->add_option("--output", output, "CSV path (default <out>/synthetic.csv)");

    auto* train_cmd = app.add_subcommand("train", "train one Q-table per seed");
    add_common(train_cmd, flags, true);
    train_cmd->add_option("--seed", flags.seed, "single training seed (replaces the seed list)");

    auto* eval_cmd = app.add_subcommand("evaluate", "roll a controller over the whole dataset");
    add_common(eval_cmd, flags, true);
    std::string ref;
    eval_cmd->add_option("ref", ref, "qtable:<path> or baseline:<no-battery|msc|tou>")->required();

    auto* cmp_cmd = app.add_subcommand("compare", "compare controllers against the first one");
    add_common(cmp_cmd, flags, true);
    std::vector<std::string> refs;
    bool ablation = false;
    cmp_cmd->add_option("refs", refs, "controller refs; the first is the base");
    cmp_cmd->add_flag("--ablation", ablation, "train and compare the state encodings instead");
    cmp_cmd->add_option("--seed", flags.seed, "training seed for --ablation");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: usage: " << msg << '\n';
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(flags, days, no_wind, output, out);
        if (train_cmd->parsed()) return cmd_train(flags, out);
        if (eval_cmd->parsed()) return cmd_evaluate(flags, ref, out);
        if (ablation) {
            if (!refs.empty()) throw ConfigError("--ablation takes no controller refs");
            return cmd_ablation(flags, out);
        }
        if (refs.size() < 2) throw ConfigError("compare needs at least two controller refs");
        return cmd_compare(flags, refs, out);
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << e.kind() << ": " << msg << '\n';
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
    }
    return 1;
}

}  // namespace dairyq
