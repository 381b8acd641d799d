// maser: train, evaluate and ablate from the command line.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include "maser/cli/run.hpp"
#include "maser/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace maser;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

/// One flag per config key, stored as text until the subcommand runs.
struct Overrides {
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;

    void attach(CLI::App& app) {
        const json defaults = cli::config_to_json({});
        for (const auto& [key, def] : defaults.items()) {
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (def.is_boolean()) {
                app.add_flag(flag, flags[key], "set " + key + " to true");
            } else {
                std::string names = flag;
                if (key == "max_env_steps") {
                    names += ",--steps";
                }
                app.add_option(names, values[key], "override " + key + " (default " + def.dump() + ")");
            }
        }
    }

    json to_json() const {
        const json defaults = cli::config_to_json({});
        json out = json::object();
        for (const auto& [key, text] : values) {
            if (text.empty()) {
                continue;
            }
            const json& def = defaults.at(key);
            try {
                std::size_t used = 0;
                if (def.is_number_unsigned()) {
                    out[key] = std::stoull(text, &used);
                } else if (def.is_number_integer()) {
                    out[key] = std::stoll(text, &used);
                } else if (def.is_number_float()) {
                    out[key] = std::stod(text, &used);
                } else {
                    out[key] = text;
                    used = text.size();
                }
                if (used != text.size()) {
                    throw std::invalid_argument(text);
                }
            } catch (const std::logic_error&) {
                throw ConfigError("invalid value for --" + key + ": '" + text + "'");
            }
        }
        for (const auto& [key, set] : flags) {
            if (set) {
                out[key] = true;
            }
        }
        return out;
    }
};

fs::path output_root() {
    const char* root = std::getenv("MASER_OUTPUT_ROOT");
    return root && *root ? fs::path(root) : fs::current_path();
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            seeds.push_back(std::stoull(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw ConfigError("invalid seed '" + item + "' in --seeds");
        }
    }
    if (seeds.empty()) {
        throw ConfigError("--seeds needs at least one seed");
    }
    return seeds;
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(item);
    }
    return out;
}

std::optional<fs::path> optional_path(const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<fs::path>(s);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent Q-learning with subgoals from replay"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cli::version_string());

    std::string config_path;
    std::string out;

    CLI::App* train = app.add_subcommand("train", "train one run to the configured step budget");
    Overrides train_overrides;
    bool subgoal_log = false;
    bool quiet = false;
    train->add_option("--config", config_path, "JSON config file or run manifest");
    train->add_option("--out", out, "run directory, relative to $MASER_OUTPUT_ROOT when set");
    train->add_flag("--subgoal-log", subgoal_log, "write per-block subgoal diagnostics to subgoals.log");
    train->add_flag("--quiet", quiet, "no progress lines");
    train_overrides.attach(*train);

    CLI::App* eval = app.add_subcommand("eval", "greedy win rate of a checkpoint");
    std::string checkpoint;
    int episodes = 32;
    eval->add_option("--checkpoint", checkpoint, "checkpoint file inside a run directory")->required();
    eval->add_option("--episodes", episodes, "evaluation episodes");

    CLI::App* ablate = app.add_subcommand("ablate", "run the ablation matrix over several seeds");
    Overrides ablate_overrides;
    std::string seeds_text;
    std::string variants_text;
    bool fresh = false;
    ablate->add_option("--config", config_path, "base JSON config file");
    ablate->add_option("--seeds", seeds_text, "comma separated seeds")->required();
    ablate->add_option("--variants", variants_text, "comma separated subset of the variants");
    ablate->add_option("--out", out, "matrix directory, relative to $MASER_OUTPUT_ROOT when set");
    ablate->add_flag("--fresh", fresh, "rerun runs that already finished");
    ablate_overrides.attach(*ablate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*train) {
            const cli::RunSpec spec = cli::parse_config(optional_path(config_path), train_overrides.to_json());
            const fs::path dir = output_root() / (out.empty() ? "runs/" + spec.config.env + "-seed" +
                                                                    std::to_string(spec.config.seed)
                                                              : out);
            cli::TrainOptions options;
            options.subgoal_log = subgoal_log;
            options.progress = quiet ? nullptr : &std::cout;
            const cli::TrainResult r = cli::run_train(spec, dir, options);
            if (!r.ok) {
                std::cerr << "training failed: " << r.error << " (see " << (dir / "failure.txt").string() << ")\n";
                return kRuntimeError;
            }
            std::cout << "final_win_rate=" << r.final_win_rate << " env_steps=" << r.env_steps
                      << " dir=" << dir.string() << '\n';
        } else if (*eval) {
            const cli::EvalResult r = cli::run_eval(checkpoint, episodes);
            std::cout << "win_rate=" << r.win_rate << " episodes=" << r.episodes << " seed=" << r.seed << '\n';
        } else if (*ablate) {
            const cli::RunSpec spec = cli::parse_config(optional_path(config_path), ablate_overrides.to_json());
            cli::AblationOptions options;
            if (!variants_text.empty()) {
                options.variants = split(variants_text);
            }
            options.resume = !fresh;
            options.progress = &std::cout;
            const fs::path dir = output_root() / (out.empty() ? "ablations/" + spec.config.env : out);
            const auto rows = cli::run_ablation_matrix(spec, parse_seeds(seeds_text), dir, options);
            cli::write_summary(std::cout, rows);
            for (const auto& row : rows) {
                if (!row.result.ok) {
                    return kRuntimeError;
                }
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
