#include "helpers.hpp"
#include "oracles.hpp"

#include "maser/agents/policy.hpp"
#include "maser/agents/utility_net.hpp"
#include "maser/errors.hpp"
#include "maser/param_set.hpp"

#include <doctest.h>

#include <cmath>

using namespace maser;
using agents::QVector;
using nn::Matrix;
using nn::RowVector;

namespace {

RowVector vec(std::initializer_list<double> v) {
    RowVector r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) {
        r(k++) = x;
    }
    return r;
}

Matrix random_history(std::mt19937_64& rng, int steps, int width) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(steps, width);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        m.data()[k] = u(rng);
    }
    return m;
}

} // namespace

TEST_CASE("zero parameters give a zero q-vector") {
    nn::Rng rng(1);
    agents::UtilityNet net("agent0", 5, 8, 6, rng);
    for (nn::Parameter* p : net.parameters()) {
        p->value.setZero();
    }
    std::mt19937_64 g(2);
    CHECK(agents::local_q(net, random_history(g, 4, 5)).isZero(0.0));
}

TEST_CASE("same history twice gives the same q-vector") {
    nn::Rng rng(3);
    agents::UtilityNet net("agent0", 5, 8, 6, rng);
    std::mt19937_64 g(4);
    const Matrix h = random_history(g, 7, 5);
    CHECK(agents::local_q(net, h) == agents::local_q(net, h));
}

TEST_CASE("utility network matches the scalar oracle and its golden value") {
    nn::Rng rng(5);
    agents::UtilityNet net("agent0", 4, 6, 3, rng);
    std::mt19937_64 g(6);
    const Matrix h = random_history(g, 5, 4);
    const QVector q = agents::local_q(net, h);
    const auto ref = oracle::utility_forward(oracle::collect(net.parameters()), "agent0", h);
    for (int a = 0; a < 3; ++a) {
        CHECK(q(a) == doctest::Approx(ref.back()[a]).epsilon(1e-12));
    }
    CHECK(q(0) == doctest::Approx(-0.0076781835572422002).epsilon(1e-12));
    CHECK(q(2) == doctest::Approx(-0.042676144347001989).epsilon(1e-12));
}

TEST_CASE("batched unroll matches one-step inference and the oracle row by row") {
    nn::Rng rng(7);
    agents::UtilityNet net("agent1", 4, 6, 3, rng);
    std::mt19937_64 g(8);
    const int steps = 4;
    const int batch = 3;
    const Matrix inputs = random_history(g, steps * batch, 4);
    nn::Tape tape(nn::Tape::Mode::kInference);
    const Matrix q = net.unroll(tape, inputs, batch).value();
    Matrix hidden = Matrix::Zero(batch, 6);
    const auto arrays = oracle::collect(net.parameters());
    for (int t = 0; t < steps; ++t) {
        const Matrix qt = net.step(inputs.middleRows(t * batch, batch), hidden);
        CHECK((qt - q.middleRows(t * batch, batch)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    for (int b = 0; b < batch; ++b) {
        Matrix seq(steps, 4);
        for (int t = 0; t < steps; ++t) {
            seq.row(t) = inputs.row(t * batch + b);
        }
        const auto ref = oracle::utility_forward(arrays, "agent1", seq);
        for (int t = 0; t < steps; ++t) {
            for (int a = 0; a < 3; ++a) {
                CHECK(q(t * batch + b, a) == doctest::Approx(ref[t][a]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("wrong input width is a configuration error") {
    nn::Rng rng(9);
    agents::UtilityNet net("agent0", 4, 6, 3, rng);
    std::mt19937_64 g(10);
    CHECK_THROWS_AS(agents::local_q(net, random_history(g, 2, 5)), ConfigError);
    CHECK_THROWS_AS(agents::local_q(net, Matrix(0, 4)), ConfigError);
}

TEST_CASE("greedy selection at epsilon zero") {
    std::mt19937_64 rng(11);
    const RowVector all = RowVector::Ones(6);
    CHECK(agents::act_epsilon_greedy(vec({0, 5, 1, 0, 0, 0}), 0.0, rng, all) == 1);
    CHECK(agents::act_epsilon_greedy(vec({0, 0, 3, 0, 3, 0}), 0.0, rng, all) == 2);
}

TEST_CASE("masked actions are never chosen") {
    std::mt19937_64 rng(12);
    const RowVector mask = vec({1, 0, 0, 0, 0, 0});
    CHECK(agents::act_epsilon_greedy(vec({0, 5, 1, 0, 0, 0}), 0.0, rng, mask) == 0);
    for (int k = 0; k < 200; ++k) {
        CHECK(agents::act_epsilon_greedy(vec({0, 5, 1, 0, 0, 0}), 1.0, rng, mask) == 0);
    }
    CHECK_THROWS_AS(agents::act_epsilon_greedy(vec({0, 5}), 0.0, rng, vec({0, 0})), UsageError);
}

TEST_CASE("epsilon one is uniform over available actions within three sigma") {
    std::mt19937_64 rng(13);
    const RowVector mask = vec({1, 1, 0, 1, 1, 1});
    std::vector<int> counts(6, 0);
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
        counts[agents::act_epsilon_greedy(vec({0, 9, 0, 0, 0, 0}), 1.0, rng, mask)] += 1;
    }
    CHECK(counts[2] == 0);
    const double p = 0.2;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (int a : {0, 1, 3, 4, 5}) {
        CHECK(std::abs(counts[a] - draws * p) <= 3.0 * sigma);
    }
}

TEST_CASE("greedy action is invariant to a constant shift") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const RowVector all = RowVector::Ones(6);
    for (int k = 0; k < 500; ++k) {
        RowVector q(6);
        for (int a = 0; a < 6; ++a) {
            q(a) = u(rng);
        }
        const RowVector shifted = q.array() + u(rng);
        CHECK(agents::greedy_action(q, all) == agents::greedy_action(shifted, all));
    }
}

TEST_CASE("epsilon schedule anneals linearly and then stays flat") {
    const agents::EpsilonSchedule s;
    CHECK(s.value(0) == 1.0);
    CHECK(s.value(25000) == doctest::Approx(0.525));
    CHECK(s.value(50000) == 0.05);
    CHECK(s.value(1000000) == 0.05);
    double prev = 2.0;
    for (long long t = 0; t <= 60000; t += 1000) {
        CHECK(s.value(t) <= prev);
        prev = s.value(t);
    }
}

TEST_CASE("masked max ignores unavailable actions") {
    Matrix q(2, 3);
    q << 1, 5, 2, -1, -2, -3;
    Matrix m(2, 3);
    m << 1, 0, 1, 0, 1, 1;
    const Matrix r = agents::masked_max(q, m);
    CHECK(r(0, 0) == 2.0);
    CHECK(r(1, 0) == -2.0);
}

TEST_CASE("shared parameters serve every agent with an id one-hot") {
    const env::EnvInfo info{3, 6, 5, 10, 20};
    ParamSet shared(info, {}, true, 1);
    CHECK(shared.utility.size() == 1);
    CHECK(shared.agent_id_slots() == 3);
    CHECK(&shared.utility_for(2) == &shared.utility_for(0));
    CHECK(shared.utility_for(0).input_dim() == 8);
    ParamSet separate(info, {}, false, 1);
    CHECK(separate.utility.size() == 3);
    CHECK(separate.agent_id_slots() == 0);
    CHECK(separate.utility_for(1).input_dim() == 5);
}

TEST_CASE("agent inputs append the id one-hot and zero-pad short episodes") {
    std::mt19937_64 rng(15);
    std::vector<replay::EpisodePtr> eps{
        std::make_shared<replay::Episode>(testing::random_episode(rng, 2, 4, 3, 5, 8, 2)),
        std::make_shared<replay::Episode>(testing::random_episode(rng, 2, 4, 3, 5, 8, 4)),
    };
    CHECK(agents::max_valid_steps(eps) == 4);
    const Matrix in = agents::agent_inputs(eps, 1, 4, 2);
    CHECK(in.rows() == 8);
    CHECK(in.cols() == 5);
    CHECK(in.block(0, 0, 1, 3) == eps[0]->observations[1].row(0));
    CHECK(in(3 * 2 + 1, 4) == 1.0);
    CHECK(in(3 * 2 + 1, 3) == 0.0);
    CHECK(in.block(3 * 2 + 0, 0, 1, 3).isZero(0.0));
}
