#include <doctest.h>

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dairyq/errors.hpp"
#include "dairyq/q_agent.hpp"
#include "helpers.hpp"

using namespace dairyq;

namespace {

QTable one_state(double c, double d, double i) {
    QTable q(EncodingSpec{});
    q.at(0, Action::Charge) = c;
    q.at(0, Action::Discharge) = d;
    q.at(0, Action::Idle) = i;
    return q;
}

BatteryEnv toy_env() {
    return BatteryEnv(testutil::toy_day(), testutil::kToySpec, default_tariff(), PenaltyTable{}, 24);
}

EncodingSpec toy_encoding() {
    EncodingSpec e;
    e.soc_levels = testutil::kToySpec.soc_levels;
    return e;
}

Hyperparams small_run(std::int64_t episodes, std::uint64_t seed = 0) {
    Hyperparams hp;
    hp.total_episodes = episodes;
    hp.rng_seed = seed;
    return hp;
}

}  // namespace

TEST_SUITE("q_agent") {

TEST_CASE("greedy action and tie-breaking") {
    CHECK(greedy_action(one_state(1.0, 0.5, -2.0), 0) == Action::Charge);
    CHECK(greedy_action(one_state(0, 0, 0), 0) == Action::Charge);
    CHECK(greedy_action(one_state(-1, 3.5, 3.5), 0) == Action::Discharge);
    CHECK(greedy_action(one_state(-1, 3.5, 3.6), 0) == Action::Idle);
}

TEST_CASE("epsilon zero is always greedy") {
    const QTable q = one_state(-1, 2, 0);
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const Selection s = select_action(q, 0, 0.0, rng);
        REQUIRE(s.action == Action::Discharge);
        REQUIRE_FALSE(s.explored);
    }
}

TEST_CASE("epsilon one picks actions uniformly") {
    const QTable q = one_state(5, 0, 0);
    Rng rng(11);
    std::array<int, 3> counts{};
    const int n = 30000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<int>(select_action(q, 0, 1.0, rng).action)];
    for (int c : counts) CHECK(std::abs(c / double(n) - 1.0 / 3.0) <= 0.01);
}

TEST_CASE("exploration frequency matches epsilon") {
    const QTable q = one_state(5, 0, 0);
    Rng rng(12);
    int explored = 0;
    const int n = 30000;
    for (int i = 0; i < n; ++i) explored += select_action(q, 0, 0.1, rng).explored ? 1 : 0;
    CHECK(std::abs(explored / double(n) - 0.1) <= 0.01);
}

TEST_CASE("td update arithmetic") {
    QTable q(EncodingSpec{});
    CHECK(td_update(q, 0, Action::Charge, -1.0, 1, 0.8, 0.9) == doctest::Approx(-0.8).epsilon(1e-15));

    QTable fixed(EncodingSpec{});
    fixed.at(3, Action::Idle) = 2.0;
    fixed.at(4, Action::Charge) = 2.0 / 0.9;
    // reward 0 and discount * max Q' equal to Q leaves the value unchanged
    CHECK(td_update(fixed, 3, Action::Idle, 0.0, 4, 0.5, 0.9) == doctest::Approx(2.0).epsilon(1e-15));
    QTable self(EncodingSpec{});
    self.at(7, Action::Discharge) = 0.0;
    CHECK(td_update(self, 7, Action::Discharge, 0.0, 7, 0.5, 0.9) == 0.0);

    QTable p(EncodingSpec{});
    p.at(0, Action::Idle) = 2.0;
    p.at(1, Action::Discharge) = 3.0;
    p.at(1, Action::Charge) = -4.0;
    CHECK(std::abs(td_update(p, 0, Action::Idle, 1.0, 1, 0.5, 0.9) - 2.85) <= 1e-12);
}

TEST_CASE("td update against the closed form on random cases") {
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        QTable q(EncodingSpec{});
        for (double& v : q.values()) v = (rng.uniform() - 0.5) * 40.0;
        const std::size_t s = rng.below(q.states());
        const std::size_t s2 = rng.below(q.states());
        const Action a = kAllActions[rng.below(3)];
        const double r = (rng.uniform() - 0.5) * 30.0;
        const double alpha = rng.uniform();
        const double gamma = rng.uniform() * 0.99;
        const auto row = q.row(s2);
        const double max_next = std::max({row[0], row[1], row[2]});
        const double expected = oracle::td(q.at(s, a), r, max_next, alpha, gamma);
        const std::vector<double> before(q.values().begin(), q.values().end());
        const double got = td_update(q, s, a, r, s2, alpha, gamma);
        REQUIRE(std::abs(got - expected) <= 1e-12);
        std::size_t changed = 0;
        for (std::size_t k = 0; k < before.size(); ++k) changed += before[k] != q.values()[k] ? 1 : 0;
        REQUIRE(changed <= 1);
        for (std::size_t k = 0; k < before.size(); ++k) {
            if (k != s * 3 + static_cast<std::size_t>(a)) REQUIRE(before[k] == q.values()[k]);
        }
    }
}

TEST_CASE("td update rejects non-finite rewards") {
    QTable q(EncodingSpec{});
    CHECK_THROWS_AS(td_update(q, 0, Action::Idle, std::numeric_limits<double>::quiet_NaN(), 0, 0.5, 0.9),
                    std::invalid_argument);
    CHECK_THROWS_AS(td_update(q, 0, Action::Idle, std::numeric_limits<double>::infinity(), 0, 0.5, 0.9),
                    std::invalid_argument);
}

TEST_CASE("linear decay schedule") {
    CHECK(decay_step(0.8, 0.0001, 0.1) == doctest::Approx(0.7999).epsilon(1e-15));
    CHECK(decay_step(0.1, 0.0001, 0.1) == 0.1);
    CHECK(decayed(0.8, 0.0001, 0.1, 1) == decay_step(0.8, 0.0001, 0.1));
    CHECK(decayed(0.8, 0.0001, 0.1, 6999) > 0.1);
    CHECK(decayed(0.8, 0.0001, 0.1, 7000) == 0.1);
    for (std::int64_t n = 7000; n < 20000; n += 37) REQUIRE(decayed(0.8, 0.0001, 0.1, n) == 0.1);
    double v = 0.8;
    for (int i = 0; i < 7000; ++i) v = decay_step(v, 0.0001, 0.1);
    CHECK(v == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("zero episodes gives a zero table") {
    const TrainResult r = train(toy_env(), small_run(0), toy_encoding());
    CHECK(r.log.empty());
    CHECK(r.table.states() == 264);
    for (double v : r.table.values()) CHECK(v == 0.0);
}

TEST_CASE("training is reproducible for a seed") {
    const TrainResult a = train(toy_env(), small_run(3000, 4), toy_encoding());
    const TrainResult b = train(toy_env(), small_run(3000, 4), toy_encoding());
    CHECK(a.table == b.table);
    CHECK(a.log == b.log);
    const TrainResult c = train(toy_env(), small_run(3000, 5), toy_encoding());
    CHECK_FALSE(a.table == c.table);
}

TEST_CASE("without exploration or decay training is deterministic") {
    Hyperparams hp = small_run(500, 1);
    hp.epsilon_init = 0.0;
    hp.floor = 0.0;
    hp.decay = 0.0;
    const TrainResult a = train(toy_env(), hp, toy_encoding());
    const TrainResult b = train(toy_env(), hp, toy_encoding());
    CHECK(a.log == b.log);
    for (const EpisodeLog& e : a.log) {
        REQUIRE(e.epsilon == 0.0);
        REQUIRE(e.alpha == hp.learning_rate_init);
    }
}

TEST_CASE("log records the schedule and sampling") {
    Hyperparams hp = small_run(20000, 2);
    hp.decay = 0.001;
    const TrainResult r = train(toy_env(), hp, toy_encoding());
    REQUIRE(r.log.size() == 20000);
    CHECK(r.log[0].alpha == 0.8);
    CHECK(r.log[1].alpha == doctest::Approx(0.799).epsilon(1e-14));
    CHECK(r.log[19999].alpha == 0.1);
    std::array<int, 11> levels{};
    for (const EpisodeLog& e : r.log) {
        REQUIRE(e.day_index == 0);
        ++levels[e.initial_soc_level];
    }
    for (int c : levels) CHECK(c > 1500);

    hp.soc_sampling = SocSampling::ExcludeEmpty;
    hp.total_episodes = 5000;
    for (const EpisodeLog& e : train(toy_env(), hp, toy_encoding()).log) REQUIRE(e.initial_soc_level >= 1);
}

TEST_CASE("q-values stay finite and bounded") {
    BatteryEnv env = toy_env();
    const Hyperparams hp = small_run(20000, 3);
    const TrainResult r = train(env, hp, toy_encoding());
    // Largest per-step reward magnitude on this day: import cost plus the biggest penalty.
    double max_import = 0.0;
    for (const auto& rec : env.series().records()) max_import = std::max(max_import, rec.load_kwh + 2.0);
    const double bound = (max_import * 0.2 + 15.0) / (1.0 - hp.discount_factor);
    for (double v : r.table.values()) {
        REQUIRE(std::isfinite(v));
        REQUIRE(std::abs(v) <= bound);
    }
}

TEST_CASE("greedy policy is invariant under positive affine maps") {
    const TrainResult r = train(toy_env(), small_run(5000, 6), toy_encoding());
    QTable scaled = r.table;
    for (double& v : scaled.values()) v = 2.5 * v + 7.0;
    for (std::size_t s = 0; s < r.table.states(); ++s) REQUIRE(greedy_action(r.table, s) == greedy_action(scaled, s));
}

TEST_CASE("hyperparameter validation") {
    Hyperparams hp;
    CHECK_NOTHROW(hp.validate());
    hp.discount_factor = 1.0;
    CHECK_THROWS_AS(hp.validate(), ConfigError);
    hp = {};
    hp.learning_rate_init = 0.0;
    CHECK_THROWS_AS(hp.validate(), ConfigError);
    hp = {};
    hp.steps_per_episode = 0;
    CHECK_THROWS_AS(hp.validate(), ConfigError);
}

TEST_CASE("training rejects a wind encoding on windless data") {
    EncodingSpec e = toy_encoding();
    e.kind = EncodingKind::HourSocLoadPvWind;
    CHECK_THROWS_WITH_AS(train(toy_env(), small_run(10), e), doctest::Contains("wind_kwh"), DataError);
}

TEST_CASE("q-table file round trip") {
    const auto dir = testutil::scratch_dir("qtable");
    EncodingSpec e = toy_encoding();
    e.kind = EncodingKind::HourSocLoadPv;
    e.load = {5, 7.25};
    e.pv = {4, 6.0};
    auto series = testutil::toy_day();
    BatteryEnv env(series, testutil::kToySpec, default_tariff(), PenaltyTable{}, 24);
    const TrainResult r = train(env, small_run(2000, 9), e);
    save_qtable(r.table, dir / "t.qt");
    const QTable back = load_qtable(dir / "t.qt");
    CHECK(back == r.table);
    REQUIRE(back.hyperparams.has_value());
    CHECK(back.hyperparams->rng_seed == 9);
    CHECK(back.hyperparams->total_episodes == 2000);
    CHECK_NOTHROW(check_compatible(back, e));

    EncodingSpec other = e;
    other.kind = EncodingKind::HourSoc;
    CHECK_THROWS_WITH_AS(check_compatible(back, other), doctest::Contains("dimension mismatch"), FormatError);
    other = e;
    other.pv.bin_count = 5;
    CHECK_THROWS_WITH_AS(check_compatible(back, other), doctest::Contains("dimension mismatch"), FormatError);
    other = e;
    other.pv.max_value = 9.0;
    CHECK_THROWS_AS(check_compatible(back, other), FormatError);
}

TEST_CASE("q-table format errors") {
    const auto dir = testutil::scratch_dir("qtable_bad");
    save_qtable(QTable(toy_encoding()), dir / "zero.qt");
    std::string text;
    {
        std::ifstream in(dir / "zero.qt");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    CHECK(text.rfind("dairyq-qtable 1\n", 0) == 0);

    std::string newer = text;
    newer.replace(0, 15, "dairyq-qtable 2");
    testutil::write_text(dir / "newer.qt", newer);
    CHECK_THROWS_WITH_AS(load_qtable(dir / "newer.qt"),
                         "qtable format version 2 is newer than supported version 1", FormatError);

    testutil::write_text(dir / "truncated.qt", text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(load_qtable(dir / "truncated.qt"), FormatError);
    testutil::write_text(dir / "junk.qt", "hello\n");
    CHECK_THROWS_AS(load_qtable(dir / "junk.qt"), FormatError);
    CHECK_THROWS_AS(load_qtable(dir / "absent.qt"), IoError);
}

}
