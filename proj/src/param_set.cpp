#include "maser/param_set.hpp"

#include "maser/errors.hpp"

#include <algorithm>

namespace maser {

ParamSet::ParamSet(const env::EnvInfo& info, const NetworkDims& dims, bool share_agent_params, std::uint64_t seed)
    : n_agents_(info.n_agents), n_actions_(info.n_actions), shared_(share_agent_params) {
    if (info.n_agents < 1 || info.n_actions < 1 || info.obs_dim < 1 || info.state_dim < 1) {
        throw ConfigError("environment reports empty dimensions");
    }
    nn::Rng rng(seed);
    const int n_nets = shared_ ? 1 : n_agents_;
    const int input_dim = info.obs_dim + agent_id_slots();
    for (int i = 0; i < n_nets; ++i) {
        utility.emplace_back("agent" + std::to_string(i), input_dim, dims.hidden, n_actions_, rng);
    }
    mixer = mix::QMixer("mixer", n_agents_, info.state_dim, dims.mixer_embed, rng);
    for (int i = 0; i < n_agents_; ++i) {
        repr.emplace_back("repr" + std::to_string(i), info.obs_dim, dims.repr_hidden, n_actions_, rng);
    }
    target_utility = utility;
    target_mixer = mixer;
    for (auto& net : target_utility) {
        for (nn::Parameter* p : net.parameters()) {
            p->name = "target." + p->name;
        }
    }
    for (nn::Parameter* p : target_mixer.parameters()) {
        p->name = "target." + p->name;
    }
}

std::vector<nn::Parameter*> ParamSet::online_parameters() {
    std::vector<nn::Parameter*> out;
    for (auto& net : utility) {
        for (nn::Parameter* p : net.parameters()) {
            out.push_back(p);
        }
    }
    for (nn::Parameter* p : mixer.parameters()) {
        out.push_back(p);
    }
    for (auto& net : repr) {
        for (nn::Parameter* p : net.parameters()) {
            out.push_back(p);
        }
    }
    return out;
}

std::vector<const nn::Parameter*> ParamSet::online_parameters() const {
    std::vector<const nn::Parameter*> out;
    for (const auto& net : utility) {
        for (const nn::Parameter* p : net.parameters()) {
            out.push_back(p);
        }
    }
    for (const nn::Parameter* p : mixer.parameters()) {
        out.push_back(p);
    }
    for (const auto& net : repr) {
        for (const nn::Parameter* p : net.parameters()) {
            out.push_back(p);
        }
    }
    return out;
}

std::vector<const nn::Parameter*> ParamSet::target_parameters() const {
    std::vector<const nn::Parameter*> out;
    for (const auto& net : target_utility) {
        for (const nn::Parameter* p : net.parameters()) {
            out.push_back(p);
        }
    }
    for (const nn::Parameter* p : target_mixer.parameters()) {
        out.push_back(p);
    }
    return out;
}

std::vector<const nn::Parameter*> ParamSet::all_parameters() const {
    std::vector<const nn::Parameter*> out = online_parameters();
    for (const nn::Parameter* p : target_parameters()) {
        out.push_back(p);
    }
    return out;
}

std::vector<nn::Parameter*> ParamSet::all_parameters() {
    std::vector<nn::Parameter*> out = online_parameters();
    for (auto& net : target_utility) {
        for (nn::Parameter* p : net.parameters()) {
            out.push_back(p);
        }
    }
    for (nn::Parameter* p : target_mixer.parameters()) {
        out.push_back(p);
    }
    return out;
}

namespace {

void copy_values(std::vector<nn::Parameter*> from, std::vector<nn::Parameter*> to) {
    if (from.size() != to.size()) {
        throw ConfigError("target/online parameter count mismatch");
    }
    for (std::size_t k = 0; k < from.size(); ++k) {
        if (from[k]->value.rows() != to[k]->value.rows() || from[k]->value.cols() != to[k]->value.cols()) {
            throw ConfigError("target/online shape mismatch at " + from[k]->name);
        }
        to[k]->value = from[k]->value;
    }
}

double max_gap(std::vector<const nn::Parameter*> a, std::vector<const nn::Parameter*> b) {
    double gap = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        gap = std::max(gap, (a[k]->value - b[k]->value).cwiseAbs().maxCoeff());
    }
    return gap;
}

} // namespace

void ParamSet::sync_targets() {
    for (std::size_t i = 0; i < utility.size(); ++i) {
        copy_values(utility[i].parameters(), target_utility[i].parameters());
    }
    copy_values(mixer.parameters(), target_mixer.parameters());
}

double ParamSet::target_gap() const {
    double gap = 0.0;
    for (std::size_t i = 0; i < utility.size(); ++i) {
        gap = std::max(gap, max_gap(utility[i].parameters(), target_utility[i].parameters()));
    }
    return std::max(gap, max_gap(mixer.parameters(), target_mixer.parameters()));
}

} // namespace maser
