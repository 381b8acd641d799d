#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace maser;
using nn::Matrix;
using oracle::TabularSpec;

namespace {

TabularSpec looping(double reward) {
    TabularSpec s;
    s.n_states = 2;
    s.next.assign(2, {{{0, 0}, {0, 0}}});
    s.reward.assign(2, {{{0.0, 0.0}, {0.0, 0.0}}});
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            s.next[0][a][b] = 0;
            s.next[1][a][b] = 0;
            s.reward[0][a][b] = reward;
        }
    }
    return s;
}

} // namespace

TEST_CASE("central differences of p^2 at 3 give 6") {
    nn::Parameter p("p", Matrix::Constant(1, 1, 3.0));
    std::vector<nn::Parameter*> ps{&p};
    const std::vector<oracle::Coordinate> c{{0, 0}};
    const auto g = oracle::finite_diff_grad([&] { return p.value(0, 0) * p.value(0, 0); }, ps, c);
    CHECK(std::abs(g[0] - 6.0) <= 1e-8);
    CHECK(p.value(0, 0) == 3.0);
}

TEST_CASE("value iteration with zero rewards gives zero values") {
    const oracle::JointQ q = oracle::value_iteration(looping(0.0), 0.99);
    for (const auto& table : q) {
        for (const auto& row : table) {
            CHECK(row[0] == 0.0);
            CHECK(row[1] == 0.0);
        }
    }
}

TEST_CASE("an absorbing unit reward gives the geometric sum") {
    const double gamma = 0.99;
    const oracle::JointQ q = oracle::value_iteration(looping(1.0), gamma);
    CHECK(std::abs(q[0][0][0] - 1.0 / (1.0 - gamma)) <= 1e-7);
    // One step away: no reward now, the loop from the next step on.
    CHECK(std::abs(q[1][1][0] - gamma / (1.0 - gamma)) <= 1e-7);
    CHECK(oracle::bellman_residual(looping(1.0), q, gamma) <= 1e-10);
}

TEST_CASE("the chain game has hand-checkable values and policy") {
    const TabularSpec spec = TabularSpec::chain();
    const oracle::JointQ q = oracle::value_iteration(spec, 0.99);
    CHECK(std::abs(q[2][0][0] - 10.0) <= 1e-9);
    CHECK(std::abs(q[1][0][1] - 10.9) <= 1e-9);
    CHECK(std::abs(q[0][1][1] - 0.99 * 10.9) <= 1e-9);
    CHECK(std::abs(q[2][1][1] - 9.9) <= 1e-9);
    CHECK(oracle::bellman_residual(spec, q, 0.99) <= 1e-10);
    const auto pi = oracle::greedy_joint_policy(q);
    CHECK(pi[0] == std::array<int, 2>{1, 1});
    CHECK(pi[1] == std::array<int, 2>{0, 1});
    CHECK(pi[2] == std::array<int, 2>{0, 0});
    CHECK_THROWS_AS(oracle::value_iteration(spec, 1.0), ConfigError);
}

TEST_CASE("the tabular game steps through its tables") {
    oracle::TabularGame g(TabularSpec::chain());
    g.reset_to(0);
    CHECK(g.observations()(0, 0) == 1.0);
    const std::vector<int> go{1, 1};
    CHECK(g.step(go).reward == 0.0);
    CHECK(g.state() == 1);
    const std::vector<int> go2{0, 1};
    CHECK(g.step(go2).reward == 1.0);
    const std::vector<int> finish{0, 0};
    const env::StepOutcome r = g.step(finish);
    CHECK(r.reward == 10.0);
    CHECK(r.done);
    CHECK(r.won);
    CHECK(g.observations().isZero(0.0));
    CHECK_THROWS_AS(g.step(finish), UsageError);
}

TEST_CASE("brute-force subgoal on a single-step episode picks that step") {
    const env::EnvInfo info{3, 4, 5, 6, 7};
    ParamSet params(info, {8, 4, 8}, false, 1);
    subgoal::BlockSnapshot snap(params, 0);
    std::mt19937_64 rng(2);
    const replay::Episode e = testing::random_episode(rng, 3, 4, 5, 6, 7, 1);
    CHECK(oracle::brute_force_subgoal(snap, e, 0.5).t_star == std::vector<int>{0, 0, 0});
}

TEST_CASE("brute-force subgoal at alpha zero agrees across agents") {
    const env::EnvInfo info{3, 4, 5, 6, 7};
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        ParamSet params(info, {8, 4, 8}, k % 2 == 0, 10 + k);
        subgoal::BlockSnapshot snap(params, 0);
        const replay::Episode e = testing::random_episode(rng, 3, 4, 5, 6, 7);
        const auto a = oracle::brute_force_subgoal(snap, e, 0.0);
        CHECK(a.t_star[0] == a.t_star[1]);
        CHECK(a.t_star[1] == a.t_star[2]);
    }
}
