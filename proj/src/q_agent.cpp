#include "dairyq/q_agent.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dairyq/detail/io_util.hpp"
#include "dairyq/errors.hpp"

namespace dairyq {

void Hyperparams::validate() const {
    if (!(learning_rate_init > 0.0 && learning_rate_init <= 1.0)) throw ConfigError("learning_rate must be in (0,1]");
    if (!(epsilon_init >= 0.0 && epsilon_init <= 1.0)) throw ConfigError("epsilon must be in [0,1]");
    if (!(discount_factor >= 0.0 && discount_factor < 1.0)) throw ConfigError("discount_factor must be in [0,1)");
    if (!(decay >= 0.0 && std::isfinite(decay))) throw ConfigError("decay must be >= 0");
    if (!(floor <= learning_rate_init && floor <= epsilon_init)) {
        throw ConfigError("floor must not exceed the initial learning rate or epsilon");
    }
    if (total_episodes < 0) throw ConfigError("total_episodes must be >= 0");
    if (steps_per_episode <= 0) throw ConfigError("steps_per_episode must be > 0");
}

QTable::QTable(EncodingSpec encoding)
    : encoding_(encoding), values_(state_space_size(encoding) * kActionCount, 0.0) {}

Action greedy_action(const QTable& q, std::size_t state) {
    const auto row = q.row(state);
    int best = 0;
    for (int a = 1; a < kActionCount; ++a) {
        if (row[a] > row[best]) best = a;
    }
    return static_cast<Action>(best);
}

Selection select_action(const QTable& q, std::size_t state, double epsilon, Rng& rng) {
    if (rng.uniform() < epsilon) return {static_cast<Action>(rng.below(kActionCount)), true};
    return {greedy_action(q, state), false};
}

double td_update(QTable& q, std::size_t state, Action action, double reward, std::size_t next_state, double alpha,
                 double discount) {
    if (!std::isfinite(reward)) throw std::invalid_argument("non-finite reward");
    const auto next = q.row(next_state);
    const double best_next = std::max({next[0], next[1], next[2]});
    double& value = q.at(state, action);
    value += alpha * (reward + discount * best_next - value);
    return value;
}

double decay_step(double value, double decay, double floor) { return std::max(value - decay, floor); }

double decayed(double initial, double decay, double floor, std::int64_t steps) {
    return std::max(initial - static_cast<double>(steps) * decay, floor);
}

TrainResult train(BatteryEnv env, const Hyperparams& hp, const EncodingSpec& encoding) {
    hp.validate();
    if (encoding.soc_levels != env.spec().soc_levels) {
        throw FormatError("encoding has " + std::to_string(encoding.soc_levels) + " SOC levels but battery has " +
                          std::to_string(env.spec().soc_levels));
    }
    if (encoding.needs_wind() && !env.series().has_wind()) {
        throw DataError("wind encoding requires a wind_kwh column");
    }
    env.set_horizon(static_cast<std::size_t>(hp.steps_per_episode));

    TrainResult result{QTable(encoding), {}};
    result.table.hyperparams = hp;
    result.log.reserve(static_cast<std::size_t>(hp.total_episodes));

    Rng rng(hp.rng_seed);
    const std::uint64_t days = env.series().days();
    const int first_level = hp.soc_sampling == SocSampling::ExcludeEmpty ? 1 : 0;
    const auto level_span = static_cast<std::uint64_t>(env.spec().soc_levels - first_level);

    QTable& q = result.table;
    for (std::int64_t episode = 0; episode < hp.total_episodes; ++episode) {
        const std::size_t day = rng.below(days);
        const int level = first_level + static_cast<int>(rng.below(level_span));
        std::size_t state = encode_flat(encoding, env.reset(day, level));
        const double alpha = decayed(hp.learning_rate_init, hp.decay, hp.floor, episode);
        const double epsilon = decayed(hp.epsilon_init, hp.decay, hp.floor, episode);

        double ret = 0.0;
        for (int t = 0; t < hp.steps_per_episode; ++t) {
            const Action action = select_action(q, state, epsilon, rng).action;
            const auto [outcome, next_obs] = env.step(action);
            const std::size_t next_state = encode_flat(encoding, next_obs);
            td_update(q, state, action, outcome.reward, next_state, alpha, hp.discount_factor);
            ret += outcome.reward;
            state = next_state;
        }
        result.log.push_back({ret, alpha, epsilon, day, level});
    }
    return result;
}

void check_compatible(const QTable& q, const EncodingSpec& expected) {
    const EncodingSpec& have = q.encoding();
    if (have.kind != expected.kind) {
        throw FormatError(std::string("dimension mismatch: table encoding ") + to_string(have.kind) +
                          " but configured " + to_string(expected.kind));
    }
    if (state_space_size(have) != state_space_size(expected) || have.soc_levels != expected.soc_levels) {
        throw FormatError("dimension mismatch: table has " + std::to_string(state_space_size(have)) +
                          " states, configuration implies " + std::to_string(state_space_size(expected)));
    }
    if (!(have == expected)) throw FormatError("dimension mismatch: bin ranges differ from configuration");
}

// ---------------------------------------------------------------------------
// File format
//
//   dairyq-qtable <version>
//   encoding <kind>
//   soc_levels <n>
//   load_bins <count> <max>
//   pv_bins <count> <max>
//   wind_bins <count> <max>
//   hyperparams <lr> <eps> <discount> <decay> <floor> <episodes> <steps> <seed> <soc_sampling>   (optional)
//   shape <states> <actions>
//   <q_charge> <q_discharge> <q_idle>      one line per state, row-major
//
// Numbers use the shortest decimal form that round-trips exactly.

void save_qtable(const QTable& q, const std::filesystem::path& path) {
    using detail::format_double;
    const EncodingSpec& e = q.encoding();
    std::ostringstream out;
    out << "dairyq-qtable " << kQTableFormatVersion << '\n';
    out << "encoding " << to_string(e.kind) << '\n';
    out << "soc_levels " << e.soc_levels << '\n';
    out << "load_bins " << e.load.bin_count << ' ' << format_double(e.load.max_value) << '\n';
    out << "pv_bins " << e.pv.bin_count << ' ' << format_double(e.pv.max_value) << '\n';
    out << "wind_bins " << e.wind.bin_count << ' ' << format_double(e.wind.max_value) << '\n';
    if (q.hyperparams) {
        const Hyperparams& h = *q.hyperparams;
        out << "hyperparams " << format_double(h.learning_rate_init) << ' ' << format_double(h.epsilon_init) << ' '
            << format_double(h.discount_factor) << ' ' << format_double(h.decay) << ' ' << format_double(h.floor)
            << ' ' << h.total_episodes << ' ' << h.steps_per_episode << ' ' << h.rng_seed << ' '
            << (h.soc_sampling == SocSampling::AllLevels ? "all" : "exclude_empty") << '\n';
    }
    out << "shape " << q.states() << ' ' << kActionCount << '\n';
    const auto v = q.values();
    for (std::size_t s = 0; s < q.states(); ++s) {
        out << format_double(v[s * 3]) << ' ' << format_double(v[s * 3 + 1]) << ' ' << format_double(v[s * 3 + 2])
            << '\n';
    }
    detail::write_file_atomic(path, out.str());
}

namespace {

template <typename T>
T expect_value(std::istringstream& line, const std::string& what) {
    T value{};
    if constexpr (std::is_same_v<T, double>) {
        std::string token;
        if (!(line >> token)) throw FormatError("qtable: missing " + what);
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size()) throw FormatError("qtable: bad " + what);
    } else {
        if (!(line >> value)) throw FormatError("qtable: missing " + what);
    }
    return value;
}

std::istringstream next_line(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("qtable: truncated before '" + key + "'");
    std::istringstream ls(line);
    std::string got;
    ls >> got;
    if (got != key) throw FormatError("qtable: expected '" + key + "', found '" + got + "'");
    return ls;
}

BinSpec read_bins(std::istream& in, const std::string& key) {
    auto ls = next_line(in, key);
    BinSpec b;
    b.bin_count = expect_value<int>(ls, key + " count");
    b.max_value = expect_value<double>(ls, key + " max");
    if (b.bin_count < 1 || !(b.max_value > 0.0)) throw FormatError("qtable: invalid " + key);
    return b;
}

}  // namespace

QTable load_qtable(const std::filesystem::path& path) {
    std::istringstream in(detail::read_file(path));
    {
        auto ls = next_line(in, "dairyq-qtable");
        const int version = expect_value<int>(ls, "format version");
        if (version > kQTableFormatVersion) {
            throw FormatError("qtable format version " + std::to_string(version) +
                              " is newer than supported version " + std::to_string(kQTableFormatVersion));
        }
        if (version < 1) throw FormatError("qtable format version " + std::to_string(version) + " is invalid");
    }
    EncodingSpec e;
    {
        auto ls = next_line(in, "encoding");
        const auto name = expect_value<std::string>(ls, "encoding kind");
        const auto kind = parse_encoding_kind(name);
        if (!kind) throw FormatError("qtable: unknown encoding '" + name + "'");
        e.kind = *kind;
    }
    {
        auto ls = next_line(in, "soc_levels");
        e.soc_levels = expect_value<int>(ls, "soc_levels");
        if (e.soc_levels < 2) throw FormatError("qtable: invalid soc_levels");
    }
    e.load = read_bins(in, "load_bins");
    e.pv = read_bins(in, "pv_bins");
    e.wind = read_bins(in, "wind_bins");

    std::optional<Hyperparams> hp;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("qtable: truncated before 'shape'");
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "hyperparams") {
        Hyperparams h;
        h.learning_rate_init = expect_value<double>(ls, "learning rate");
        h.epsilon_init = expect_value<double>(ls, "epsilon");
        h.discount_factor = expect_value<double>(ls, "discount");
        h.decay = expect_value<double>(ls, "decay");
        h.floor = expect_value<double>(ls, "floor");
        h.total_episodes = expect_value<std::int64_t>(ls, "episodes");
        h.steps_per_episode = expect_value<int>(ls, "steps");
        h.rng_seed = expect_value<std::uint64_t>(ls, "seed");
        const auto sampling = expect_value<std::string>(ls, "soc sampling");
        h.soc_sampling = sampling == "exclude_empty" ? SocSampling::ExcludeEmpty : SocSampling::AllLevels;
        hp = h;
        ls = next_line(in, "shape");
    } else if (key != "shape") {
        throw FormatError("qtable: expected 'shape', found '" + key + "'");
    }
    const auto states = expect_value<std::size_t>(ls, "state count");
    const auto actions = expect_value<int>(ls, "action count");
    if (actions != kActionCount || states != state_space_size(e)) {
        throw FormatError("dimension mismatch: header declares " + std::to_string(states) + "x" +
                          std::to_string(actions) + " but encoding implies " + std::to_string(state_space_size(e)) +
                          "x3");
    }

    QTable q(e);
    q.hyperparams = hp;
    auto values = q.values();
    for (std::size_t s = 0; s < states; ++s) {
        if (!std::getline(in, line)) throw FormatError("qtable: truncated at state " + std::to_string(s));
        std::istringstream row(line);
        for (int a = 0; a < kActionCount; ++a) {
            const double v = expect_value<double>(row, "value at state " + std::to_string(s));
            if (!std::isfinite(v)) throw FormatError("qtable: non-finite value at state " + std::to_string(s));
            values[s * kActionCount + a] = v;
        }
    }
    return q;
}

}  // namespace dairyq
