#include "helpers.hpp"
#include "oracles.hpp"

#include "maser/errors.hpp"
#include "maser/subgoal/subgoal.hpp"

#include <doctest.h>

#include <sstream>

using namespace maser;
using subgoal::EpisodeValues;
using nn::Matrix;

namespace {

const env::EnvInfo kInfo{2, 4, 5, 6, 8};

replay::Episode episode_for(std::mt19937_64& rng, int valid = 0) {
    return testing::random_episode(rng, kInfo.n_agents, kInfo.n_actions, kInfo.obs_dim, kInfo.state_dim,
                                   kInfo.episode_limit, valid);
}

/// Values with given per-agent max-Q columns and Q^tot sequence.
EpisodeValues values(const Matrix& max_q, std::vector<double> q_tot) {
    EpisodeValues v;
    v.valid_steps = static_cast<int>(max_q.rows());
    v.max_q = max_q;
    v.q_tot = std::move(q_tot);
    for (int i = 0; i < max_q.cols(); ++i) {
        v.q.push_back(max_q.col(i).replicate(1, 2));
    }
    return v;
}

replay::Episode plain_episode(int agents, int steps) {
    replay::Episode e = replay::Episode::empty(agents, 2, 1, 1, steps);
    for (int t = 0; t < steps; ++t) {
        e.valid[t] = 1;
        for (int i = 0; i < agents; ++i) {
            e.observations[i](t, 0) = 10 * i + t;
        }
    }
    e.done[steps - 1] = 1;
    return e;
}

} // namespace

TEST_CASE("handcrafted three-step scores match hand evaluation") {
    Matrix mq(3, 2);
    mq << 1.0, 4.0, 3.0, 0.0, 2.0, 2.0;
    const EpisodeValues v = values(mq, {2.0, 6.0, -2.0});
    // alpha = 0.25: 0.25 * maxq + 0.75 * qtot / 2
    CHECK(subgoal::score_timestep(v, 0, 0, 0.25) == doctest::Approx(0.25 + 0.75).epsilon(1e-15));
    CHECK(subgoal::score_timestep(v, 0, 1, 0.25) == doctest::Approx(0.75 + 2.25).epsilon(1e-15));
    CHECK(subgoal::score_timestep(v, 0, 2, 0.25) == doctest::Approx(0.5 - 0.75).epsilon(1e-15));
    CHECK(subgoal::score_timestep(v, 1, 0, 0.25) == doctest::Approx(1.0 + 0.75).epsilon(1e-15));
    CHECK(subgoal::score_timestep(v, 1, 1, 0.25) == doctest::Approx(0.0 + 2.25).epsilon(1e-15));
    CHECK(subgoal::score_timestep(v, 1, 2, 0.25) == doctest::Approx(0.5 - 0.75).epsilon(1e-15));
    const auto a = subgoal::select_subgoals(v, plain_episode(2, 3), 0.25);
    CHECK(a.t_star == std::vector<int>{1, 1});
}

TEST_CASE("alpha one scores with the local maximum and alpha zero with the shared total") {
    Matrix mq(3, 2);
    mq << 1.0, 4.0, 3.0, 0.0, 2.0, 2.0;
    const EpisodeValues v = values(mq, {2.0, 6.0, -2.0});
    for (int t = 0; t < 3; ++t) {
        CHECK(subgoal::score_timestep(v, 0, t, 1.0) == mq(t, 0));
        CHECK(subgoal::score_timestep(v, 1, t, 1.0) == mq(t, 1));
        CHECK(subgoal::score_timestep(v, 0, t, 0.0) == subgoal::score_timestep(v, 1, t, 0.0));
    }
    CHECK_THROWS_AS(subgoal::score_timestep(v, 0, 3, 0.5), UsageError);
}

TEST_CASE("alpha one lets agents peak at different steps") {
    Matrix mq = Matrix::Zero(10, 2);
    mq(2, 0) = 5.0;
    mq(7, 1) = 5.0;
    const EpisodeValues v = values(mq, std::vector<double>(10, 0.0));
    const auto a = subgoal::select_subgoals(v, plain_episode(2, 10), 1.0);
    CHECK(a.t_star == std::vector<int>{2, 7});
    CHECK(a.goal_obs[0](0) == 2.0);
    CHECK(a.goal_obs[1](0) == 17.0);
}

TEST_CASE("constant scores pick the first step") {
    const EpisodeValues v = values(Matrix::Constant(5, 3, 1.5), std::vector<double>(5, 4.0));
    const auto a = subgoal::select_subgoals(v, plain_episode(3, 5), 0.5);
    CHECK(a.t_star == std::vector<int>{0, 0, 0});
}

TEST_CASE("select_subgoals agrees with the exhaustive oracle") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const bool shared = k % 2 == 1;
        ParamSet params(kInfo, {16, 8, 16}, shared, 100 + k);
        subgoal::BlockSnapshot snap(params, k);
        const replay::Episode e = episode_for(rng);
        double alpha = unit(rng);
        alpha = k % 10 == 0 ? 0.0 : (k % 10 == 1 ? 1.0 : alpha);
        const auto got = subgoal::select_subgoals(snap, e, alpha);
        const auto want = oracle::brute_force_subgoal(snap, e, alpha);
        CHECK(got.t_star == want.t_star);
        for (int i = 0; i < kInfo.n_agents; ++i) {
            CHECK(got.goal_obs[i] == e.observations[i].row(got.t_star[i]));
            CHECK(got.t_star[i] < e.valid_steps());
        }
        if (alpha == 0.0) {
            CHECK(got.t_star[0] == got.t_star[1]);
        }
    }
}

TEST_CASE("snapshot assignments ignore later changes to the online networks") {
    std::mt19937_64 rng(2);
    ParamSet params(kInfo, {16, 8, 16}, false, 7);
    subgoal::BlockSnapshot snap(params, 0);
    const replay::Episode e = episode_for(rng, 8);
    const auto before = subgoal::select_subgoals(snap, e, 0.5);
    const EpisodeValues v_before = subgoal::evaluate(snap, e);
    for (nn::Parameter* p : params.online_parameters()) {
        p->value.array() *= -1.7;
    }
    const auto after = subgoal::select_subgoals(snap, e, 0.5);
    CHECK(before.t_star == after.t_star);
    CHECK(subgoal::evaluate(snap, e).q_tot == v_before.q_tot);
}

TEST_CASE("batched evaluation equals per-episode evaluation") {
    std::mt19937_64 rng(3);
    ParamSet params(kInfo, {16, 8, 16}, false, 8);
    subgoal::BlockSnapshot snap(params, 0);
    std::vector<replay::EpisodePtr> eps;
    for (int k = 0; k < 4; ++k) {
        eps.push_back(std::make_shared<replay::Episode>(episode_for(rng)));
    }
    const auto batched = subgoal::evaluate(snap, eps);
    for (int k = 0; k < 4; ++k) {
        const EpisodeValues single = subgoal::evaluate(snap, *eps[k]);
        CHECK(batched[k].valid_steps == single.valid_steps);
        CHECK((batched[k].max_q - single.max_q).cwiseAbs().maxCoeff() <= 1e-12);
        for (int t = 0; t < single.valid_steps; ++t) {
            CHECK(batched[k].q_tot[t] == doctest::Approx(single.q_tot[t]).epsilon(1e-12));
        }
    }
}

TEST_CASE("random subgoals with one valid step pick that step") {
    std::mt19937_64 rng(4);
    const replay::Episode e = episode_for(rng, 1);
    for (int k = 0; k < 20; ++k) {
        CHECK(subgoal::select_subgoals_random(e, rng).t_star == std::vector<int>{0, 0});
    }
}

TEST_CASE("random subgoals are uniform and reproducible") {
    std::mt19937_64 rng(5);
    const replay::Episode e = episode_for(rng, 5);
    std::vector<int> counts(5, 0);
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
        counts[subgoal::select_subgoals_random(e, rng).t_star[0]] += 1;
    }
    const double sigma = std::sqrt(draws * 0.2 * 0.8);
    for (int c : counts) {
        CHECK(std::abs(c - draws * 0.2) <= 3.0 * sigma);
    }
    std::mt19937_64 a(77);
    std::mt19937_64 b(77);
    CHECK(subgoal::select_subgoals_random(e, a).t_star == subgoal::select_subgoals_random(e, b).t_star);
}

TEST_CASE("diagnostic lines name block, episode, agent and the score curve") {
    Matrix mq(2, 2);
    mq << 1.0, 0.0, 0.0, 1.0;
    const EpisodeValues v = values(mq, {0.0, 0.0});
    const auto a = subgoal::select_subgoals(v, plain_episode(2, 2), 1.0, 3);
    std::ostringstream out;
    subgoal::write_subgoal_diagnostics(out, 12, a, v, 1.0);
    CHECK(out.str() == "block=12 episode=3 agent=0 t_star=0 scores=1,0\n"
                       "block=12 episode=3 agent=1 t_star=1 scores=0,1\n");
}
