#pragma once

#include "maser/env/environment.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace maser::env {

enum class RewardMode { kDense, kSparse };

std::string to_string(RewardMode mode);
RewardMode reward_mode_from_string(const std::string& s);

enum class Side { kAlly, kEnemy };

/// Discrete action set shared by every unit.
enum Action : int { kNoOp = 0, kNorth = 1, kSouth = 2, kEast = 3, kWest = 4, kAttack = 5 };
inline constexpr int kNumActions = 6;

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct Rect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0; // inclusive
    int y1 = 0; // inclusive
};

struct Unit {
    Side side = Side::kAlly;
    Cell pos;
    int health = 0;
    int max_health = 0;
    int damage = 0;
    bool alive = false;
};

/// Units are indexed allies first, then enemies; that index is the movement priority.
struct GlobalState {
    int width = 0;
    int height = 0;
    std::vector<Unit> units;
    int t = 0;
};

struct SkirmishConfig {
    std::string name = "skirmish-2v2";
    int width = 7;
    int height = 7;
    int n_allies = 2;
    int n_enemies = 2;
    int episode_limit = 30;
    double sight_radius = 3.0;
    int attack_range = 1;
    int damage = 2;
    int max_health = 6;
    /// Optional per-unit overrides, indexed like GlobalState::units.
    std::vector<int> unit_max_health;
    std::vector<int> unit_damage;
    RewardMode reward_mode = RewardMode::kSparse;
    double health_scale = 1.0;
    double win_bonus = 200.0;
    double kill_bonus = 10.0;
    double death_penalty = 5.0;
    Rect ally_spawn{0, 0, 1, 6};
    Rect enemy_spawn{5, 0, 6, 6};
    std::vector<Cell> cliff;

    int n_units() const { return n_allies + n_enemies; }
    int obs_dim() const { return (n_units() - 1) * 4 + 3 + kNumActions; }
    int state_dim() const { return n_units() * 3 + 1; }

    /// Throws ConfigError on an inconsistent layout.
    void validate() const;
};

/// Built-in maps: "skirmish-2v2", "skirmish-3v3", "cliff-2v2".
SkirmishConfig preset(const std::string& name);
std::vector<std::string> preset_names();

nlohmann::json to_json(const SkirmishConfig& config);
/// Keys absent from `j` keep the values of the preset named by j["preset"]
/// (default "skirmish-2v2"). Unknown keys are rejected.
SkirmishConfig skirmish_config_from_json(const nlohmann::json& j);

struct DamageEvent {
    int attacker = 0;
    int target = 0;
    int amount = 0;
};

struct StepResult {
    GlobalState state;
    Matrix observations;
    double reward = 0.0;
    /// Event terms only: win bonus, kill bonuses and death penalties.
    double sparse_reward = 0.0;
    /// Health lost by enemies and by allies during this step.
    int damage_dealt = 0;
    int damage_received = 0;
    int enemy_deaths = 0;
    int ally_deaths = 0;
    bool done = false;
    bool won = false;
    std::vector<DamageEvent> damage_events;
};

/// Deterministic opponent: attack the nearest visible ally when it is within
/// attack range, otherwise step toward it; hold when no ally is visible.
/// Ties go to the lower unit index, then to N/S/E/W order.
std::vector<int> scripted_enemy_policy(const SkirmishConfig& config, const GlobalState& state);

/// One simultaneous step: moves in unit-index order, then all attacks at once
/// on the post-move layout. Throws UsageError on a terminal state or an
/// illegal ally action.
StepResult advance(const SkirmishConfig& config, const GlobalState& state, std::span<const int> ally_actions);

/// Initial layout: units at distinct random cells of their spawn regions, full health, t = 0.
GlobalState spawn(const SkirmishConfig& config, std::uint64_t seed);
bool is_terminal(const SkirmishConfig& config, const GlobalState& state);

Matrix observe(const SkirmishConfig& config, const GlobalState& state, std::span<const int> last_ally_actions);
RowVector state_features(const SkirmishConfig& config, const GlobalState& state);
bool is_cliff(const SkirmishConfig& config, Cell c);

class SkirmishEnv final : public Environment {
public:
    explicit SkirmishEnv(SkirmishConfig config);

    EnvInfo info() const override;
    std::string name() const override { return config_.name; }
    void reset(std::uint64_t seed) override;
    StepOutcome step(std::span<const int> actions) override;
    Matrix observations() const override;
    RowVector state_vector() const override;
    Matrix available_actions() const override;
    int timestep() const override { return state_.t; }
    bool terminal() const override { return done_; }
    std::unique_ptr<Environment> clone() const override { return std::make_unique<SkirmishEnv>(*this); }

    const SkirmishConfig& config() const { return config_; }
    const GlobalState& state() const { return state_; }
    const std::optional<StepResult>& last_step() const { return last_; }

private:
    SkirmishConfig config_;
    GlobalState state_;
    std::vector<int> last_actions_;
    std::optional<StepResult> last_;
    bool done_ = false;
    bool won_ = false;
};

} // namespace maser::env
