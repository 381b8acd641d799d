#include "oracles.hpp"

#include "maser/env/skirmish.hpp"
#include "maser/errors.hpp"
#include "maser/train/rollout.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace maser;
using namespace maser::env;

namespace {

Unit unit(Side side, int x, int y, int health = 6) {
    Unit u;
    u.side = side;
    u.pos = {x, y};
    u.health = health;
    u.max_health = 6;
    u.damage = 2;
    u.alive = health > 0;
    return u;
}

GlobalState layout(const SkirmishConfig& c, std::vector<Unit> units) {
    GlobalState s;
    s.width = c.width;
    s.height = c.height;
    s.units = std::move(units);
    return s;
}

int alive(const GlobalState& s, Side side) {
    int n = 0;
    for (const Unit& u : s.units) {
        n += (u.alive && u.side == side) ? 1 : 0;
    }
    return n;
}

} // namespace

TEST_CASE("reset places two allies and two enemies at full health") {
    const SkirmishConfig c = preset("skirmish-2v2");
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const GlobalState s = spawn(c, seed);
        CHECK(alive(s, Side::kAlly) == 2);
        CHECK(alive(s, Side::kEnemy) == 2);
        CHECK(s.t == 0);
        for (const Unit& u : s.units) {
            CHECK(u.health == c.max_health);
        }
        CHECK_FALSE(s.units[0].pos == s.units[1].pos);
        CHECK_FALSE(s.units[2].pos == s.units[3].pos);
    }
}

TEST_CASE("reset is deterministic in the seed") {
    SkirmishEnv a(preset("skirmish-2v2"));
    SkirmishEnv b(preset("skirmish-2v2"));
    a.reset(17);
    b.reset(17);
    CHECK(a.observations() == b.observations());
    CHECK(a.state_vector() == b.state_vector());
}

TEST_CASE("cliff cells are never occupied") {
    const SkirmishConfig c = preset("cliff-2v2");
    SkirmishEnv env(c);
    std::mt19937_64 rng(3);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        env.reset(seed);
        while (!env.terminal()) {
            for (const Unit& u : env.state().units) {
                CHECK_FALSE(is_cliff(c, u.pos));
            }
            const Matrix avail = env.available_actions();
            std::vector<int> a;
            for (int i = 0; i < c.n_allies; ++i) {
                a.push_back(avail(i, 1) > 0 ? std::uniform_int_distribution<int>(0, kNumActions - 1)(rng) : kNoOp);
            }
            env.step(a);
        }
    }
}

TEST_CASE("sparse reward is zero for moves without deaths") {
    const SkirmishConfig c = preset("skirmish-2v2");
    const GlobalState s = layout(c, {unit(Side::kAlly, 0, 0), unit(Side::kAlly, 0, 6), unit(Side::kEnemy, 6, 0),
                                     unit(Side::kEnemy, 6, 6)});
    const std::vector<int> a{kEast, kEast};
    const StepResult r = advance(c, s, a);
    CHECK(r.reward == 0.0);
    CHECK_FALSE(r.done);
}

TEST_CASE("one enemy death pays the kill bonus") {
    const SkirmishConfig c = preset("skirmish-2v2");
    const GlobalState s = layout(c, {unit(Side::kAlly, 3, 3), unit(Side::kAlly, 0, 6), unit(Side::kEnemy, 4, 3, 2),
                                     unit(Side::kEnemy, 6, 6)});
    const std::vector<int> a{kAttack, kNoOp};
    const StepResult r = advance(c, s, a);
    CHECK(r.enemy_deaths == 1);
    CHECK(r.reward == 10.0);
    CHECK_FALSE(r.won);
}

TEST_CASE("the last enemy death stacks the win bonus on the kill bonus") {
    const SkirmishConfig c = preset("skirmish-2v2");
    const GlobalState s = layout(c, {unit(Side::kAlly, 3, 3), unit(Side::kAlly, 0, 6), unit(Side::kEnemy, 4, 3, 2),
                                     unit(Side::kEnemy, 6, 6, 0)});
    const std::vector<int> a{kAttack, kNoOp};
    const StepResult r = advance(c, s, a);
    CHECK(r.reward == 210.0);
    CHECK(r.won);
    CHECK(r.done);
}

TEST_CASE("an ally death costs the death penalty") {
    const SkirmishConfig c = preset("skirmish-2v2");
    const GlobalState s = layout(c, {unit(Side::kAlly, 3, 3, 2), unit(Side::kAlly, 0, 6), unit(Side::kEnemy, 4, 3),
                                     unit(Side::kEnemy, 6, 6)});
    const std::vector<int> a{kNoOp, kNoOp};
    const StepResult r = advance(c, s, a);
    CHECK(r.ally_deaths == 1);
    CHECK(r.reward == -5.0);
}

TEST_CASE("stepping a terminal state is a usage error") {
    SkirmishConfig c = preset("skirmish-2v2");
    c.episode_limit = 1;
    SkirmishEnv env(c);
    env.reset(0);
    const std::vector<int> a{kNoOp, kNoOp};
    env.step(a);
    CHECK(env.terminal());
    CHECK_THROWS_AS(env.step(a), UsageError);
}

TEST_CASE("dead allies may only no-op") {
    const SkirmishConfig c = preset("skirmish-2v2");
    const GlobalState s = layout(c, {unit(Side::kAlly, 3, 3, 0), unit(Side::kAlly, 0, 6), unit(Side::kEnemy, 6, 0),
                                     unit(Side::kEnemy, 6, 6)});
    const std::vector<int> move{kEast, kNoOp};
    CHECK_THROWS_AS(advance(c, s, move), UsageError);
    const std::vector<int> out_of_range{7, kNoOp};
    CHECK_THROWS_AS(advance(c, s, out_of_range), UsageError);
}

TEST_CASE("scripted enemy attacks an adjacent ally") {
    const SkirmishConfig c = preset("skirmish-2v2");
    const GlobalState s = layout(c, {unit(Side::kAlly, 3, 3), unit(Side::kAlly, 0, 6), unit(Side::kEnemy, 4, 3),
                                     unit(Side::kEnemy, 6, 0)});
    const std::vector<int> e = scripted_enemy_policy(c, s);
    CHECK(e[0] == kAttack);
}

TEST_CASE("scripted enemy holds when no ally is visible") {
    const SkirmishConfig c = preset("skirmish-2v2");
    const GlobalState s = layout(c, {unit(Side::kAlly, 0, 0), unit(Side::kAlly, 0, 6), unit(Side::kEnemy, 6, 3),
                                     unit(Side::kEnemy, 6, 0)});
    const std::vector<int> e = scripted_enemy_policy(c, s);
    CHECK(e[0] == kNoOp);
    CHECK(e[1] == kNoOp);
}

TEST_CASE("scripted enemy chases the lower-indexed of two equidistant allies") {
    const SkirmishConfig c = preset("skirmish-2v2");
    // Enemy at (4,3); allies at (4,1) and (4,5), both two cells away.
    const GlobalState s = layout(c, {unit(Side::kAlly, 4, 1), unit(Side::kAlly, 4, 5), unit(Side::kEnemy, 4, 3),
                                     unit(Side::kEnemy, 6, 6)});
    CHECK(scripted_enemy_policy(c, s)[0] == kNorth);
}

TEST_CASE("observations have a fixed width with entries in [-1, 1]") {
    SkirmishEnv env(preset("skirmish-3v3"));
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        env.reset(seed);
        while (!env.terminal()) {
            const Matrix o = env.observations();
            CHECK(o.cols() == env.config().obs_dim());
            CHECK(o.cwiseAbs().maxCoeff() <= 1.0);
            const Matrix avail = env.available_actions();
            std::vector<int> a;
            for (int i = 0; i < env.config().n_allies; ++i) {
                a.push_back(avail(i, 1) > 0 ? std::uniform_int_distribution<int>(0, kNumActions - 1)(rng) : kNoOp);
            }
            env.step(a);
        }
    }
}

TEST_CASE("trajectory properties hold under random play") {
    SkirmishConfig sparse = preset("skirmish-2v2");
    SkirmishConfig dense = sparse;
    dense.reward_mode = RewardMode::kDense;
    std::mt19937_64 rng(9);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GlobalState s = spawn(sparse, seed);
        while (!is_terminal(sparse, s)) {
            std::vector<int> a;
            for (int i = 0; i < sparse.n_allies; ++i) {
                a.push_back(s.units[i].alive ? std::uniform_int_distribution<int>(0, kNumActions - 1)(rng) : kNoOp);
            }
            const StepResult rs = advance(sparse, s, a);
            const StepResult rd = advance(dense, s, a);
            // Sparse equals dense minus the health terms.
            CHECK(rs.reward == doctest::Approx(rd.reward - (rd.damage_dealt - rd.damage_received)));
            // Health drops only by recorded damage.
            std::vector<int> lost(s.units.size(), 0);
            for (const DamageEvent& ev : rs.damage_events) {
                lost[ev.target] += ev.amount;
            }
            for (std::size_t j = 0; j < s.units.size(); ++j) {
                CHECK(rs.state.units[j].health == s.units[j].health - lost[j]);
                CHECK(rs.state.units[j].alive == (rs.state.units[j].health > 0));
            }
            CHECK(rs.won == (alive(rs.state, Side::kEnemy) == 0));
            s = rs.state;
        }
        CHECK(s.t <= sparse.episode_limit);
    }
}

TEST_CASE("environment spec round-trips through json and rejects unknown keys") {
    const SkirmishConfig c = preset("cliff-2v2");
    nlohmann::json j = to_json(c);
    const SkirmishConfig back = skirmish_config_from_json(j);
    CHECK(to_json(back) == j);
    j["bogus"] = 1;
    CHECK_THROWS_AS(skirmish_config_from_json(j), ConfigError);
    CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("the lookahead hand policy wins every evaluation episode") {
    SkirmishEnv env(preset("skirmish-2v2"));
    const double win = train::evaluate_policy([] { return oracle::skirmish_lookahead_policy(); }, env, 64, 2024);
    CHECK(win == 1.0);
}

TEST_CASE("always no-op loses every evaluation episode") {
    SkirmishEnv env(preset("skirmish-2v2"));
    const double win = train::evaluate_policy(
        [] {
            return train::JointPolicy([](const Environment& e) { return std::vector<int>(e.info().n_agents, kNoOp); });
        },
        env, 32, 7);
    CHECK(win == 0.0);
}
