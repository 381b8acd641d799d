#include "maser/mix/qmixer.hpp"

#include "maser/errors.hpp"

namespace maser::mix {

QMixer::QMixer(const std::string& name, int n_agents, int state_dim, int embed_dim, nn::Rng& rng)
    : n_agents_(n_agents), embed_(embed_dim), hyper_w1_(name + ".hyper_w1", state_dim, n_agents * embed_dim, rng),
      hyper_b1_(name + ".hyper_b1", state_dim, embed_dim, rng), hyper_w2_(name + ".hyper_w2", state_dim, embed_dim, rng),
      value_hidden_(name + ".value_hidden", state_dim, embed_dim, rng), value_out_(name + ".value_out", embed_dim, 1, rng) {}

Var QMixer::mix(Tape& tape, const Var& q, const Var& states) {
    if (q.cols() != n_agents_ || q.rows() != states.rows()) {
        throw ConfigError("mixer: got " + std::to_string(q.rows()) + "x" + std::to_string(q.cols()) + " q-values for " +
                          std::to_string(states.rows()) + " states and " + std::to_string(n_agents_) + " agents");
    }
    const Var w1 = nn::abs(hyper_w1_.forward(tape, states));
    const Var b1 = hyper_b1_.forward(tape, states);
    const Var hidden = nn::elu(nn::add(nn::batched_row_matmul(q, w1, embed_), b1));
    const Var w2 = nn::abs(hyper_w2_.forward(tape, states));
    const Var v = value_out_.forward(tape, nn::relu(value_hidden_.forward(tape, states)));
    return nn::add(nn::row_sum(nn::mul(hidden, w2)), v);
}

std::vector<nn::Parameter*> QMixer::parameters() {
    std::vector<nn::Parameter*> out;
    for (nn::Linear* l : {&hyper_w1_, &hyper_b1_, &hyper_w2_, &value_hidden_, &value_out_}) {
        for (nn::Parameter* p : l->parameters()) {
            out.push_back(p);
        }
    }
    return out;
}

std::vector<const nn::Parameter*> QMixer::parameters() const {
    std::vector<const nn::Parameter*> out;
    for (const nn::Linear* l : {&hyper_w1_, &hyper_b1_, &hyper_w2_, &value_hidden_, &value_out_}) {
        for (const nn::Parameter* p : l->parameters()) {
            out.push_back(p);
        }
    }
    return out;
}

} // namespace maser::mix
