#include "oracles.hpp"

#include "maser/errors.hpp"
#include "maser/mix/qmixer.hpp"

#include <doctest.h>

#include <random>

using namespace maser;
using nn::Matrix;
using nn::Tape;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        m.data()[k] = u(rng);
    }
    return m;
}

double mix_one(mix::QMixer& m, const Matrix& q, const Matrix& s) {
    Tape tape(Tape::Mode::kInference);
    return m.mix(tape, tape.constant(q), tape.constant(s)).scalar();
}

void randomize(mix::QMixer& m, std::mt19937_64& rng) {
    for (nn::Parameter* p : m.parameters()) {
        p->value = random_matrix(rng, p->value.rows(), p->value.cols());
    }
}

} // namespace

TEST_CASE("identity-equivalent hypernetworks reduce the mixer to a sum") {
    nn::Rng rng(1);
    mix::QMixer m("mixer", 3, 4, 1, rng);
    for (nn::Parameter* p : m.parameters()) {
        p->value.setZero();
    }
    m.hyper_w1().bias().value.setOnes();
    m.hyper_w2().bias().value.setOnes();
    std::mt19937_64 g(2);
    // The inner activation is the identity on non-negative inputs.
    for (int k = 0; k < 100; ++k) {
        const Matrix q = random_matrix(g, 1, 3).cwiseAbs();
        CHECK(mix_one(m, q, random_matrix(g, 1, 4)) == doctest::Approx(q.sum()).epsilon(1e-14));
    }
}

TEST_CASE("mixer matches the scalar oracle") {
    nn::Rng rng(3);
    mix::QMixer m("mixer", 2, 5, 4, rng);
    std::mt19937_64 g(4);
    randomize(m, g);
    const auto arrays = oracle::collect(m.parameters());
    for (int k = 0; k < 50; ++k) {
        const Matrix q = random_matrix(g, 1, 2, 3.0);
        const Matrix s = random_matrix(g, 1, 5);
        const std::vector<double> qv(q.data(), q.data() + 2);
        const std::vector<double> sv(s.data(), s.data() + 5);
        CHECK(mix_one(m, q, s) == doctest::Approx(oracle::mixer_forward(arrays, "mixer", qv, sv)).epsilon(1e-12));
    }
}

TEST_CASE("raising one local value never lowers the total") {
    nn::Rng rng(5);
    mix::QMixer m("mixer", 3, 6, 8, rng);
    std::mt19937_64 g(6);
    for (int k = 0; k < 200; ++k) {
        randomize(m, g);
        const Matrix q = random_matrix(g, 1, 3, 4.0);
        const Matrix s = random_matrix(g, 1, 6);
        Matrix up = q;
        up(0, k % 3) += 0.5;
        CHECK(mix_one(m, up, s) >= mix_one(m, q, s) - 1e-12);
    }
}

TEST_CASE("analytic partial derivatives are non-negative") {
    nn::Rng rng(7);
    mix::QMixer m("mixer", 3, 6, 8, rng);
    std::mt19937_64 g(8);
    for (int k = 0; k < 100; ++k) {
        randomize(m, g);
        Tape tape;
        nn::Parameter q("q", random_matrix(g, 1, 3, 4.0));
        m.mix(tape, tape.parameter(q), tape.constant(random_matrix(g, 1, 6)));
        tape.backward(m.mix(tape, tape.parameter(q), tape.constant(random_matrix(g, 1, 6))));
        CHECK(q.grad.minCoeff() >= 0.0);
    }
}

TEST_CASE("mixer rejects mismatched shapes") {
    nn::Rng rng(9);
    mix::QMixer m("mixer", 2, 4, 3, rng);
    Tape tape;
    CHECK_THROWS_AS(m.mix(tape, tape.constant(Matrix::Zero(1, 3)), tape.constant(Matrix::Zero(1, 4))), ConfigError);
    CHECK_THROWS_AS(m.mix(tape, tape.constant(Matrix::Zero(2, 2)), tape.constant(Matrix::Zero(1, 4))), ConfigError);
}
