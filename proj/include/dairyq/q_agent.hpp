#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dairyq/battery_env.hpp"
#include "dairyq/rng.hpp"
#include "dairyq/state_encoding.hpp"

namespace dairyq {

/// Which initial SOC levels an episode may start from.
enum class SocSampling {
    AllLevels,     ///< uniform over 0..soc_levels-1
    ExcludeEmpty,  ///< uniform over 1..soc_levels-1
};

struct Hyperparams {
    double learning_rate_init = 0.8;
    double epsilon_init = 0.8;
    double discount_factor = 0.9;
    double decay = 0.0001;
    double floor = 0.1;
    std::int64_t total_episodes = 1'000'000;
    int steps_per_episode = 24;
    std::uint64_t rng_seed = 0;
    SocSampling soc_sampling = SocSampling::AllLevels;

    void validate() const;
};

/// Dense state x action table, zero-initialised.
class QTable {
public:
    QTable() = default;
    explicit QTable(EncodingSpec encoding);

    const EncodingSpec& encoding() const noexcept { return encoding_; }
    std::size_t states() const noexcept { return values_.size() / kActionCount; }

    double& at(std::size_t state, Action a) { return values_[state * kActionCount + static_cast<int>(a)]; }
    double at(std::size_t state, Action a) const { return values_[state * kActionCount + static_cast<int>(a)]; }
    std::span<const double, kActionCount> row(std::size_t state) const {
        return std::span<const double, kActionCount>(values_.data() + state * kActionCount, kActionCount);
    }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Hyperparameters the table was trained with, when known.
    std::optional<Hyperparams> hyperparams;

    bool operator==(const QTable& other) const {
        return encoding_ == other.encoding_ && values_ == other.values_;
    }

private:
    EncodingSpec encoding_;
    std::vector<double> values_;
};

struct EpisodeLog {
    double episode_return = 0.0;
    double alpha = 0.0;
    double epsilon = 0.0;
    std::size_t day_index = 0;
    int initial_soc_level = 0;

    bool operator==(const EpisodeLog&) const = default;
};

using TrainingLog = std::vector<EpisodeLog>;

/// Argmax over the three action values; ties go to the earlier action in
/// Charge, Discharge, Idle order.
Action greedy_action(const QTable& q, std::size_t state);

struct Selection {
    Action action = Action::Idle;
    bool explored = false;
};

/// Epsilon-greedy: one uniform draw decides exploration, then (if exploring)
/// one more picks a uniformly random action.
Selection select_action(const QTable& q, std::size_t state, double epsilon, Rng& rng);

/// Q(s,a) += alpha * (reward + discount * max_a' Q(s',a') - Q(s,a)). Returns the
/// written value. Throws std::invalid_argument for a non-finite reward.
double td_update(QTable& q, std::size_t state, Action action, double reward, std::size_t next_state, double alpha,
                 double discount);

/// max(value - decay, floor)
double decay_step(double value, double decay, double floor);

/// Value after `steps` decays from `initial`, computed as
/// max(initial - steps * decay, floor) so it lands exactly on the floor.
double decayed(double initial, double decay, double floor, std::int64_t steps);

struct TrainResult {
    QTable table;
    TrainingLog log;
};

/// Episodic Q-learning. Each episode samples a day and an initial SOC level,
/// runs `steps_per_episode` epsilon-greedy steps with TD updates, then decays
/// the learning and exploration rates once. The environment's horizon is
/// overridden with `steps_per_episode`. Deterministic for a fixed seed.
TrainResult train(BatteryEnv env, const Hyperparams& hp, const EncodingSpec& encoding);

/// Throws FormatError when `q` cannot be used with `expected` (kind, SOC
/// levels, or bin specs differ).
void check_compatible(const QTable& q, const EncodingSpec& expected);

inline constexpr int kQTableFormatVersion = 1;

/// Plain-text, line-oriented format; see README for the layout.
void save_qtable(const QTable& q, const std::filesystem::path& path);
QTable load_qtable(const std::filesystem::path& path);

}  // namespace dairyq
