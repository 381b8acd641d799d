#include "maser/cli/config_io.hpp"

#include "maser/errors.hpp"

#include <algorithm>
#include <fstream>

namespace maser::cli {

using nlohmann::json;

namespace {

const char* const kEnvironmentKey = "environment";

template <typename T>
T get(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("invalid value for '" + key + "': " + j.dump());
    }
}

} // namespace

json config_to_json(const train::TrainConfig& c) {
    return json{
        {"alpha", c.alpha},
        {"lambda", c.lambda},
        {"lambda_i", c.lambda_i},
        {"lambda_e", c.lambda_e},
        {"lambda_d", c.lambda_d},
        {"gamma", c.gamma},
        {"lr", c.optim.lr},
        {"rms_decay", c.optim.decay},
        {"rms_eps", c.optim.eps},
        {"grad_clip", c.grad_clip},
        {"buffer_capacity", c.buffer_capacity},
        {"batch_size", c.batch_size},
        {"target_interval", c.target_interval},
        {"epsilon_start", c.epsilon.start},
        {"epsilon_end", c.epsilon.end},
        {"epsilon_anneal_steps", c.epsilon.anneal_steps},
        {"subgoal_mode", train::to_string(c.subgoal_mode)},
        {"correction", train::to_string(c.correction)},
        {"disable_li", c.disable_li},
        {"disable_repr", c.disable_repr},
        {"env", c.env},
        {"reward_mode", env::to_string(c.reward_mode)},
        {"max_env_steps", c.max_env_steps},
        {"seed", c.seed},
        {"eval_interval", c.eval_interval},
        {"eval_episodes", c.eval_episodes},
        {"checkpoint_interval", c.checkpoint_interval},
        {"hidden", c.dims.hidden},
        {"mixer_embed", c.dims.mixer_embed},
        {"repr_hidden", c.dims.repr_hidden},
        {"share_params", c.share_params},
    };
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    const json defaults = config_to_json({});
    for (const auto& item : defaults.items()) {
        keys.push_back(item.key());
    }
    keys.push_back(kEnvironmentKey);
    std::sort(keys.begin(), keys.end());
    return keys;
}

train::TrainConfig config_from_json(const json& j, train::TrainConfig c) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& [key, v] : j.items()) {
        if (key == "alpha") c.alpha = get<double>(v, key);
        else if (key == "lambda") c.lambda = get<double>(v, key);
        else if (key == "lambda_i") c.lambda_i = get<double>(v, key);
        else if (key == "lambda_e") c.lambda_e = get<double>(v, key);
        else if (key == "lambda_d") c.lambda_d = get<double>(v, key);
        else if (key == "gamma") c.gamma = get<double>(v, key);
        else if (key == "lr") c.optim.lr = get<double>(v, key);
        else if (key == "rms_decay") c.optim.decay = get<double>(v, key);
        else if (key == "rms_eps") c.optim.eps = get<double>(v, key);
        else if (key == "grad_clip") c.grad_clip = get<double>(v, key);
        else if (key == "buffer_capacity") c.buffer_capacity = get<int>(v, key);
        else if (key == "batch_size") c.batch_size = get<int>(v, key);
        else if (key == "target_interval") c.target_interval = get<int>(v, key);
        else if (key == "epsilon_start") c.epsilon.start = get<double>(v, key);
        else if (key == "epsilon_end") c.epsilon.end = get<double>(v, key);
        else if (key == "epsilon_anneal_steps") c.epsilon.anneal_steps = get<long long>(v, key);
        else if (key == "subgoal_mode") c.subgoal_mode = train::subgoal_mode_from_string(get<std::string>(v, key));
        else if (key == "correction") c.correction = train::correction_mode_from_string(get<std::string>(v, key));
        else if (key == "disable_li") c.disable_li = get<bool>(v, key);
        else if (key == "disable_repr") c.disable_repr = get<bool>(v, key);
        else if (key == "env") c.env = get<std::string>(v, key);
        else if (key == "reward_mode") c.reward_mode = env::reward_mode_from_string(get<std::string>(v, key));
        else if (key == "max_env_steps") c.max_env_steps = get<long long>(v, key);
        else if (key == "seed") c.seed = get<std::uint64_t>(v, key);
        else if (key == "eval_interval") c.eval_interval = get<int>(v, key);
        else if (key == "eval_episodes") c.eval_episodes = get<int>(v, key);
        else if (key == "checkpoint_interval") c.checkpoint_interval = get<int>(v, key);
        else if (key == "hidden") c.dims.hidden = get<int>(v, key);
        else if (key == "mixer_embed") c.dims.mixer_embed = get<int>(v, key);
        else if (key == "repr_hidden") c.dims.repr_hidden = get<int>(v, key);
        else if (key == "share_params") c.share_params = get<bool>(v, key);
        else if (key == kEnvironmentKey) continue;
        else {
            std::string valid;
            for (const std::string& k : config_keys()) {
                valid += (valid.empty() ? "" : ", ") + k;
            }
            throw ConfigError("unknown config key '" + key + "'; valid keys: " + valid);
        }
    }
    c.validate();
    return c;
}

env::SkirmishConfig RunSpec::resolved_environment() const {
    env::SkirmishConfig e = environment ? *environment : env::preset(config.env);
    e.reward_mode = config.reward_mode;
    e.validate();
    return e;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
}

RunSpec parse_config(const std::optional<std::filesystem::path>& file, const json& overrides) {
    RunSpec spec;
    if (file) {
        json j = read_json_file(*file);
        if (j.is_object() && j.contains("config") && j["config"].is_object()) {
            // A run manifest.
            json inner = j["config"];
            if (j.contains(kEnvironmentKey)) {
                inner[kEnvironmentKey] = j[kEnvironmentKey];
            }
            j = inner;
        }
        spec.config = config_from_json(j);
        if (j.contains(kEnvironmentKey) && !j[kEnvironmentKey].is_null()) {
            spec.environment = env::skirmish_config_from_json(j[kEnvironmentKey]);
        }
    }
    spec.config = config_from_json(overrides, spec.config);
    if (spec.environment && overrides.contains("env")) {
        // An explicit --env names a built-in map and wins over the file's map.
        spec.environment.reset();
    }
    spec.resolved_environment();
    return spec;
}

} // namespace maser::cli
