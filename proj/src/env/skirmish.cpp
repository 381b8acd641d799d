#include "maser/env/skirmish.hpp"

#include "maser/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <array>
#include <cstdlib>
#include <random>

namespace maser::env {

namespace {

constexpr std::array<Action, 4> kMoveOrder = {kNorth, kSouth, kEast, kWest};

Cell shifted(Cell c, int action) {
    switch (action) {
    case kNorth:
        return {c.x, c.y - 1};
    case kSouth:
        return {c.x, c.y + 1};
    case kEast:
        return {c.x + 1, c.y};
    case kWest:
        return {c.x - 1, c.y};
    default:
        return c;
    }
}

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

bool visible(const SkirmishConfig& config, Cell from, Cell to) {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    return std::sqrt(dx * dx + dy * dy) <= config.sight_radius + 1e-12;
}

bool in_bounds(const SkirmishConfig& config, Cell c) {
    return c.x >= 0 && c.y >= 0 && c.x < config.width && c.y < config.height;
}

bool occupied(const GlobalState& state, Cell c) {
    return std::any_of(state.units.begin(), state.units.end(), [&](const Unit& u) { return u.alive && u.pos == c; });
}

bool free_cell(const SkirmishConfig& config, const GlobalState& state, Cell c) {
    return in_bounds(config, c) && !is_cliff(config, c) && !occupied(state, c);
}

/// Nearest alive, visible unit of side `side` seen from unit `self`; -1 if none.
int nearest_visible(const SkirmishConfig& config, const GlobalState& state, int self, Side side) {
    const Unit& me = state.units[self];
    int best = -1;
    int best_dist = 0;
    for (int j = 0; j < static_cast<int>(state.units.size()); ++j) {
        const Unit& u = state.units[j];
        if (j == self || !u.alive || u.side != side || !visible(config, me.pos, u.pos)) {
            continue;
        }
        const int d = manhattan(me.pos, u.pos);
        if (best < 0 || d < best_dist) {
            best = j;
            best_dist = d;
        }
    }
    return best;
}

int count_alive(const GlobalState& state, Side side) {
    return static_cast<int>(
        std::count_if(state.units.begin(), state.units.end(), [&](const Unit& u) { return u.alive && u.side == side; }));
}

double centered(int v, int extent) { return extent > 1 ? 2.0 * v / (extent - 1) - 1.0 : 0.0; }

} // namespace

std::string to_string(RewardMode mode) { return mode == RewardMode::kDense ? "dense" : "sparse"; }

RewardMode reward_mode_from_string(const std::string& s) {
    if (s == "dense") {
        return RewardMode::kDense;
    }
    if (s == "sparse") {
        return RewardMode::kSparse;
    }
    throw ConfigError("reward_mode must be dense or sparse, got '" + s + "'");
}

bool is_cliff(const SkirmishConfig& config, Cell c) {
    return std::find(config.cliff.begin(), config.cliff.end(), c) != config.cliff.end();
}

void SkirmishConfig::validate() const {
    if (width < 2 || height < 2) {
        throw ConfigError("grid must be at least 2x2");
    }
    if (n_allies < 1 || n_enemies < 1) {
        throw ConfigError("need at least one ally and one enemy");
    }
    if (episode_limit < 1) {
        throw ConfigError("episode_limit must be positive");
    }
    if (sight_radius <= 0.0 || attack_range < 1) {
        throw ConfigError("sight_radius and attack_range must be positive");
    }
    if (sight_radius < attack_range) {
        throw ConfigError("sight_radius must cover attack_range");
    }
    if (damage < 1 || max_health < 1) {
        throw ConfigError("damage and max_health must be positive");
    }
    if (!unit_max_health.empty() && static_cast<int>(unit_max_health.size()) != n_units()) {
        throw ConfigError("unit_max_health needs one entry per unit");
    }
    if (!unit_damage.empty() && static_cast<int>(unit_damage.size()) != n_units()) {
        throw ConfigError("unit_damage needs one entry per unit");
    }
    if (health_scale < 0.0) {
        throw ConfigError("health_scale must be non-negative");
    }
    auto free_cells = [&](const Rect& r) {
        int n = 0;
        for (int y = r.y0; y <= r.y1; ++y) {
            for (int x = r.x0; x <= r.x1; ++x) {
                if (!in_bounds(*this, {x, y})) {
                    throw ConfigError("spawn region leaves the grid");
                }
                n += is_cliff(*this, {x, y}) ? 0 : 1;
            }
        }
        return n;
    };
    if (free_cells(ally_spawn) < n_allies || free_cells(enemy_spawn) < n_enemies) {
        throw ConfigError("spawn region too small for its units");
    }
    for (const Cell& c : cliff) {
        if (!in_bounds(*this, c)) {
            throw ConfigError("cliff cell outside the grid");
        }
    }
}

SkirmishConfig preset(const std::string& name) {
    SkirmishConfig c;
    if (name == "skirmish-2v2") {
        return c;
    }
    if (name == "skirmish-3v3") {
        c.name = name;
        c.width = 9;
        c.height = 9;
        c.n_allies = 3;
        c.n_enemies = 3;
        c.episode_limit = 40;
        c.ally_spawn = {0, 0, 1, 8};
        c.enemy_spawn = {7, 0, 8, 8};
        return c;
    }
    if (name == "cliff-2v2") {
        // Impassable column between the spawn regions, open only at the top row.
        c.name = name;
        for (int y = 1; y < c.height; ++y) {
            c.cliff.push_back({3, y});
        }
        return c;
    }
    throw ConfigError("unknown environment '" + name + "'; expected one of skirmish-2v2, skirmish-3v3, cliff-2v2");
}

std::vector<std::string> preset_names() { return {"skirmish-2v2", "skirmish-3v3", "cliff-2v2"}; }

nlohmann::json to_json(const SkirmishConfig& c) {
    nlohmann::json cliff = nlohmann::json::array();
    for (const Cell& cell : c.cliff) {
        cliff.push_back({cell.x, cell.y});
    }
    return {
        {"name", c.name},
        {"width", c.width},
        {"height", c.height},
        {"n_allies", c.n_allies},
        {"n_enemies", c.n_enemies},
        {"episode_limit", c.episode_limit},
        {"sight_radius", c.sight_radius},
        {"attack_range", c.attack_range},
        {"damage", c.damage},
        {"max_health", c.max_health},
        {"unit_max_health", c.unit_max_health},
        {"unit_damage", c.unit_damage},
        {"reward_mode", to_string(c.reward_mode)},
        {"health_scale", c.health_scale},
        {"win_bonus", c.win_bonus},
        {"kill_bonus", c.kill_bonus},
        {"death_penalty", c.death_penalty},
        {"ally_spawn", {c.ally_spawn.x0, c.ally_spawn.y0, c.ally_spawn.x1, c.ally_spawn.y1}},
        {"enemy_spawn", {c.enemy_spawn.x0, c.enemy_spawn.y0, c.enemy_spawn.x1, c.enemy_spawn.y1}},
        {"cliff", cliff},
    };
}

SkirmishConfig skirmish_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("environment spec must be a JSON object");
    }
    SkirmishConfig c = preset(j.value("preset", std::string("skirmish-2v2")));
    auto rect = [](const nlohmann::json& v) {
        if (!v.is_array() || v.size() != 4) {
            throw ConfigError("spawn rectangle must be [x0, y0, x1, y1]");
        }
        return Rect{v[0].get<int>(), v[1].get<int>(), v[2].get<int>(), v[3].get<int>()};
    };
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "preset") {
            } else if (key == "name") {
                c.name = v.get<std::string>();
            } else if (key == "width") {
                c.width = v.get<int>();
            } else if (key == "height") {
                c.height = v.get<int>();
            } else if (key == "n_allies") {
                c.n_allies = v.get<int>();
            } else if (key == "n_enemies") {
                c.n_enemies = v.get<int>();
            } else if (key == "episode_limit") {
                c.episode_limit = v.get<int>();
            } else if (key == "sight_radius") {
                c.sight_radius = v.get<double>();
            } else if (key == "attack_range") {
                c.attack_range = v.get<int>();
            } else if (key == "damage") {
                c.damage = v.get<int>();
            } else if (key == "max_health") {
                c.max_health = v.get<int>();
            } else if (key == "unit_max_health") {
                c.unit_max_health = v.get<std::vector<int>>();
            } else if (key == "unit_damage") {
                c.unit_damage = v.get<std::vector<int>>();
            } else if (key == "reward_mode") {
                c.reward_mode = reward_mode_from_string(v.get<std::string>());
            } else if (key == "health_scale") {
                c.health_scale = v.get<double>();
            } else if (key == "win_bonus") {
                c.win_bonus = v.get<double>();
            } else if (key == "kill_bonus") {
                c.kill_bonus = v.get<double>();
            } else if (key == "death_penalty") {
                c.death_penalty = v.get<double>();
            } else if (key == "ally_spawn") {
                c.ally_spawn = rect(v);
            } else if (key == "enemy_spawn") {
                c.enemy_spawn = rect(v);
            } else if (key == "cliff") {
                c.cliff.clear();
                for (const auto& cell : v) {
                    c.cliff.push_back({cell.at(0).get<int>(), cell.at(1).get<int>()});
                }
            } else {
                throw ConfigError("unknown environment key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("environment spec: ") + e.what());
    }
    c.validate();
    return c;
}

GlobalState spawn(const SkirmishConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    GlobalState s;
    s.width = config.width;
    s.height = config.height;
    s.t = 0;
    auto place = [&](const Rect& r, int count, Side side) {
        std::vector<Cell> cells;
        for (int y = r.y0; y <= r.y1; ++y) {
            for (int x = r.x0; x <= r.x1; ++x) {
                if (!is_cliff(config, {x, y})) {
                    cells.push_back({x, y});
                }
            }
        }
        // Partial Fisher-Yates: the first `count` cells become the spawn points.
        for (int k = 0; k < count; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, cells.size() - 1);
            std::swap(cells[k], cells[pick(rng)]);
            Unit u;
            u.side = side;
            u.pos = cells[k];
            s.units.push_back(u);
        }
    };
    place(config.ally_spawn, config.n_allies, Side::kAlly);
    place(config.enemy_spawn, config.n_enemies, Side::kEnemy);
    for (int j = 0; j < config.n_units(); ++j) {
        Unit& u = s.units[j];
        u.max_health = config.unit_max_health.empty() ? config.max_health : config.unit_max_health[j];
        u.damage = config.unit_damage.empty() ? config.damage : config.unit_damage[j];
        u.health = u.max_health;
        u.alive = true;
    }
    return s;
}

bool is_terminal(const SkirmishConfig& config, const GlobalState& state) {
    return state.t >= config.episode_limit || count_alive(state, Side::kEnemy) == 0 ||
           count_alive(state, Side::kAlly) == 0;
}

std::vector<int> scripted_enemy_policy(const SkirmishConfig& config, const GlobalState& state) {
    std::vector<int> actions(config.n_enemies, kNoOp);
    for (int e = 0; e < config.n_enemies; ++e) {
        const int self = config.n_allies + e;
        const Unit& me = state.units[self];
        if (!me.alive) {
            continue;
        }
        const int target = nearest_visible(config, state, self, Side::kAlly);
        if (target < 0) {
            continue;
        }
        const Cell goal = state.units[target].pos;
        const int dist = manhattan(me.pos, goal);
        if (dist <= config.attack_range) {
            actions[e] = kAttack;
            continue;
        }
        for (Action a : kMoveOrder) {
            const Cell next = shifted(me.pos, a);
            if (manhattan(next, goal) < dist && free_cell(config, state, next)) {
                actions[e] = a;
                break;
            }
        }
    }
    return actions;
}

StepResult advance(const SkirmishConfig& config, const GlobalState& state, std::span<const int> ally_actions) {
    if (is_terminal(config, state)) {
        throw UsageError("step() on a terminal state");
    }
    if (static_cast<int>(ally_actions.size()) != config.n_allies) {
        throw UsageError("expected " + std::to_string(config.n_allies) + " ally actions, got " +
                         std::to_string(ally_actions.size()));
    }
    for (int i = 0; i < config.n_allies; ++i) {
        const int a = ally_actions[i];
        if (a < 0 || a >= kNumActions) {
            throw UsageError("ally " + std::to_string(i) + ": action " + std::to_string(a) + " out of range");
        }
        if (!state.units[i].alive && a != kNoOp) {
            throw UsageError("ally " + std::to_string(i) + " is dead and may only no-op");
        }
    }

    std::vector<int> actions(ally_actions.begin(), ally_actions.end());
    const std::vector<int> enemy = scripted_enemy_policy(config, state);
    actions.insert(actions.end(), enemy.begin(), enemy.end());

    StepResult r;
    r.state = state;
    GlobalState& s = r.state;

    for (int j = 0; j < config.n_units(); ++j) {
        Unit& u = s.units[j];
        if (!u.alive || actions[j] < kNorth || actions[j] > kWest) {
            continue;
        }
        const Cell next = shifted(u.pos, actions[j]);
        if (free_cell(config, s, next)) {
            u.pos = next;
        }
    }

    // Targets are chosen on the post-move layout before any damage lands.
    for (int j = 0; j < config.n_units(); ++j) {
        const Unit& u = s.units[j];
        if (!u.alive || actions[j] != kAttack) {
            continue;
        }
        const Side foe = u.side == Side::kAlly ? Side::kEnemy : Side::kAlly;
        const int target = nearest_visible(config, s, j, foe);
        if (target >= 0 && manhattan(u.pos, s.units[target].pos) <= config.attack_range) {
            r.damage_events.push_back({j, target, u.damage});
        }
    }
    for (DamageEvent& ev : r.damage_events) {
        Unit& target = s.units[ev.target];
        ev.amount = std::min(ev.amount, target.health);
        target.health -= ev.amount;
        if (target.side == Side::kEnemy) {
            r.damage_dealt += ev.amount;
        } else {
            r.damage_received += ev.amount;
        }
    }
    for (Unit& u : s.units) {
        if (u.alive && u.health <= 0) {
            u.alive = false;
            u.health = 0;
            (u.side == Side::kEnemy ? r.enemy_deaths : r.ally_deaths) += 1;
        }
    }
    s.t = state.t + 1;

    r.won = count_alive(s, Side::kEnemy) == 0;
    r.done = is_terminal(config, s);
    r.sparse_reward = (r.won ? config.win_bonus : 0.0) + config.kill_bonus * r.enemy_deaths -
                      config.death_penalty * r.ally_deaths;
    r.reward = r.sparse_reward;
    if (config.reward_mode == RewardMode::kDense) {
        r.reward += config.health_scale * (r.damage_dealt - r.damage_received);
    }
    r.observations = observe(config, s, ally_actions);
    return r;
}

Matrix observe(const SkirmishConfig& config, const GlobalState& state, std::span<const int> last_ally_actions) {
    Matrix obs = Matrix::Zero(config.n_allies, config.obs_dim());
    for (int i = 0; i < config.n_allies; ++i) {
        const Unit& me = state.units[i];
        if (!me.alive) {
            continue;
        }
        int col = 0;
        for (int j = 0; j < config.n_units(); ++j) {
            if (j == i) {
                continue;
            }
            const Unit& u = state.units[j];
            if (u.alive && visible(config, me.pos, u.pos)) {
                obs(i, col + 0) = (u.pos.x - me.pos.x) / config.sight_radius;
                obs(i, col + 1) = (u.pos.y - me.pos.y) / config.sight_radius;
                obs(i, col + 2) = static_cast<double>(u.health) / u.max_health;
                obs(i, col + 3) = u.side == Side::kAlly ? 1.0 : -1.0;
            }
            col += 4;
        }
        obs(i, col++) = static_cast<double>(me.health) / me.max_health;
        obs(i, col++) = centered(me.pos.x, config.width);
        obs(i, col++) = centered(me.pos.y, config.height);
        if (!last_ally_actions.empty()) {
            const int a = last_ally_actions[i];
            if (a >= 0 && a < kNumActions) {
                obs(i, col + a) = 1.0;
            }
        }
    }
    return obs;
}

RowVector state_features(const SkirmishConfig& config, const GlobalState& state) {
    RowVector v = RowVector::Zero(config.state_dim());
    for (int j = 0; j < config.n_units(); ++j) {
        const Unit& u = state.units[j];
        if (u.alive) {
            v(3 * j + 0) = centered(u.pos.x, config.width);
            v(3 * j + 1) = centered(u.pos.y, config.height);
            v(3 * j + 2) = static_cast<double>(u.health) / u.max_health;
        }
    }
    v(config.state_dim() - 1) = static_cast<double>(state.t) / config.episode_limit;
    return v;
}

SkirmishEnv::SkirmishEnv(SkirmishConfig config) : config_(std::move(config)) {
    config_.validate();
    reset(0);
}

EnvInfo SkirmishEnv::info() const {
    return {config_.n_allies, kNumActions, config_.obs_dim(), config_.state_dim(), config_.episode_limit};
}

void SkirmishEnv::reset(std::uint64_t seed) {
    state_ = spawn(config_, seed);
    last_actions_.clear();
    last_.reset();
    done_ = false;
    won_ = false;
}

StepOutcome SkirmishEnv::step(std::span<const int> actions) {
    StepResult r = advance(config_, state_, actions);
    state_ = r.state;
    last_actions_.assign(actions.begin(), actions.end());
    done_ = r.done;
    won_ = r.won;
    StepOutcome out{r.reward, r.done, r.won};
    last_ = std::move(r);
    return out;
}

Matrix SkirmishEnv::observations() const { return observe(config_, state_, last_actions_); }

RowVector SkirmishEnv::state_vector() const { return state_features(config_, state_); }

Matrix SkirmishEnv::available_actions() const {
    Matrix avail = Matrix::Zero(config_.n_allies, kNumActions);
    for (int i = 0; i < config_.n_allies; ++i) {
        if (state_.units[i].alive) {
            avail.row(i).setOnes();
        } else {
            avail(i, kNoOp) = 1.0;
        }
    }
    return avail;
}

} // namespace maser::env
