#include "maser/reward/repr_net.hpp"

namespace maser::reward {

ReprNet::ReprNet(const std::string& name, int obs_dim, int hidden, int out_dim, nn::Rng& rng)
    : hidden_(name + ".hidden", obs_dim, hidden, rng), out_(name + ".out", hidden, out_dim, rng) {}

Var ReprNet::forward(Tape& tape, const Var& obs) { return out_.forward(tape, nn::relu(hidden_.forward(tape, obs))); }

Matrix ReprNet::embed(const Matrix& obs) {
    Tape tape(Tape::Mode::kInference);
    return forward(tape, tape.constant(obs)).value();
}

std::vector<nn::Parameter*> ReprNet::parameters() {
    std::vector<nn::Parameter*> out = hidden_.parameters();
    for (nn::Parameter* p : out_.parameters()) {
        out.push_back(p);
    }
    return out;
}

std::vector<const nn::Parameter*> ReprNet::parameters() const {
    std::vector<const nn::Parameter*> out = hidden_.parameters();
    for (const nn::Parameter* p : out_.parameters()) {
        out.push_back(p);
    }
    return out;
}

} // namespace maser::reward
