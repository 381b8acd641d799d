#include "maser/cli/run.hpp"

#include "maser/errors.hpp"
#include "maser/nn/checkpoint.hpp"
#include "maser/train/rollout.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#ifndef MASER_VERSION
#define MASER_VERSION "unknown"
#endif

namespace maser::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() { return MASER_VERSION; }

json RunManifest::to_json() const {
    return json{{"version", version},
                {"config", config_to_json(config)},
                {"environment", env::to_json(environment)},
                {"seeds", seeds},
                {"layout", layout}};
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    try {
        m.version = j.value("version", std::string());
        m.config = config_from_json(j.at("config"));
        m.environment = env::skirmish_config_from_json(j.at("environment"));
        m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
        m.layout = j.value("layout", json::object());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

std::unique_ptr<env::Environment> make_environment(const env::SkirmishConfig& config) {
    return std::make_unique<env::SkirmishEnv>(config);
}

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

json layout_json() {
    return json{{"manifest", "manifest.json"},
                {"metrics", "metrics.csv"},
                {"checkpoints", "checkpoints/"},
                {"final_checkpoint", "checkpoints/final.ckpt"},
                {"result", "result.json"},
                {"failure", "failure.txt"},
                {"subgoal_log", "subgoals.log"}};
}

RunManifest manifest_for(const RunSpec& spec) {
    RunManifest m;
    m.version = version_string();
    m.config = spec.config;
    m.environment = spec.resolved_environment();
    m.seeds = {spec.config.seed};
    m.layout = layout_json();
    return m;
}

json result_to_json(const TrainResult& r) {
    return json{{"ok", r.ok},
                {"error", r.error},
                {"final_win_rate", r.final_win_rate},
                {"env_steps", r.env_steps},
                {"episodes", r.episodes},
                {"blocks", r.blocks},
                {"seconds", r.seconds}};
}

TrainResult result_from_json(const json& j) {
    TrainResult r;
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.final_win_rate = j.at("final_win_rate").get<double>();
    r.env_steps = j.at("env_steps").get<long long>();
    r.episodes = j.at("episodes").get<long long>();
    r.blocks = j.at("blocks").get<long long>();
    r.seconds = j.at("seconds").get<double>();
    return r;
}

/// Running sums of the block reports since the last metrics row.
struct Window {
    int blocks = 0;
    double l_td = 0.0;
    double sum_li = 0.0;
    double sum_le = 0.0;
    double sum_ld = 0.0;
    double mean_rt = 0.0;

    void add(const train::BlockReport& r) {
        ++blocks;
        l_td += r.l_td;
        sum_li += r.sum_li;
        sum_le += r.sum_le;
        sum_ld += r.sum_ld;
        mean_rt += r.mean_rt;
    }
};

void write_row(std::ostream& out, const train::Trainer& t, double win_rate, const Window& w) {
    const double n = std::max(w.blocks, 1);
    out << t.env_steps() << ',' << t.blocks() << ',' << num(win_rate) << ','
        << num(w.l_td / n) << ',' << num(w.sum_li / n) << ',' << num(w.sum_le / n) << ',' << num(w.sum_ld / n)
        << ',' << num(w.mean_rt / n) << ',' << num(t.epsilon()) << ',' << t.episodes() << '\n';
    out.flush();
}

void write_failure(const fs::path& path, const std::string& what, const train::Trainer& t,
                   const train::BlockReport& last, const RunManifest& manifest) {
    std::ofstream out(path);
    out << "error: " << what << '\n';
    out << "block: " << t.blocks() << '\n';
    out << "env_steps: " << t.env_steps() << '\n';
    out << "episodes: " << t.episodes() << '\n';
    out << "last completed block:\n";
    out << "  block=" << last.block << " loss=" << num(last.loss) << " l_td=" << num(last.l_td)
        << " sum_li=" << num(last.sum_li) << " sum_le=" << num(last.sum_le) << " sum_ld=" << num(last.sum_ld)
        << " mean_rt=" << num(last.mean_rt) << " grad_norm=" << num(last.grad_norm)
        << " epsilon=" << num(last.epsilon) << '\n';
    out << "manifest:\n" << manifest.to_json().dump(2) << '\n';
}

} // namespace

TrainResult run_train(const RunSpec& spec, const fs::path& out_dir, const TrainOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const RunManifest manifest = manifest_for(spec);
    fs::create_directories(out_dir / "checkpoints");
    fs::remove(out_dir / "failure.txt");
    fs::remove(out_dir / "result.json");
    write_json(out_dir / "manifest.json", manifest.to_json());

    const train::TrainConfig& c = spec.config;
    train::Trainer t(c, make_environment(manifest.environment));
    std::ofstream subgoals;
    if (options.subgoal_log) {
        subgoals.open(out_dir / "subgoals.log");
        t.set_subgoal_log(&subgoals);
    }
    std::ofstream metrics(out_dir / "metrics.csv");
    metrics << kMetricsHeader << '\n';

    TrainResult result;
    Window window;
    train::BlockReport last;
    long long evals = 0;
    long long checkpoints = 0;
    double win_rate = 0.0;
    try {
        while (t.env_steps() < c.max_env_steps) {
            last = t.train_block();
            window.add(last);
            if (c.eval_interval > 0 && t.episodes() / c.eval_interval > evals) {
                evals = t.episodes() / c.eval_interval;
                win_rate = t.evaluate(c.eval_episodes);
                write_row(metrics, t, win_rate, window);
                window = {};
                if (options.progress) {
                    *options.progress << "steps=" << t.env_steps() << " episodes=" << t.episodes()
                                      << " win_rate=" << win_rate << " l_td=" << last.l_td << std::endl;
                }
            }
            if (c.checkpoint_interval > 0 && t.episodes() / c.checkpoint_interval > checkpoints) {
                checkpoints = t.episodes() / c.checkpoint_interval;
                nn::save_checkpoint(out_dir / "checkpoints" / ("episode-" + std::to_string(t.episodes()) + ".ckpt"),
                                    t.params().all_parameters());
            }
        }
        if (window.blocks > 0 || evals == 0) {
            win_rate = t.evaluate(c.eval_episodes);
            write_row(metrics, t, win_rate, window);
        }
        nn::save_checkpoint(out_dir / "checkpoints" / "final.ckpt", t.params().all_parameters());
    } catch (const NumericalError& e) {
        result.ok = false;
        result.error = e.what();
        write_failure(out_dir / "failure.txt", e.what(), t, last, manifest);
    }
    result.final_win_rate = result.ok ? win_rate : 0.0;
    result.env_steps = t.env_steps();
    result.episodes = t.episodes();
    result.blocks = t.blocks();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(out_dir / "result.json", result_to_json(result));
    return result;
}

EvalResult run_eval(const fs::path& checkpoint, int episodes) {
    if (episodes < 1) {
        throw ConfigError("episodes must be >= 1");
    }
    fs::path manifest_path;
    for (const fs::path& dir : {checkpoint.parent_path(), checkpoint.parent_path().parent_path()}) {
        if (fs::exists(dir / "manifest.json")) {
            manifest_path = dir / "manifest.json";
            break;
        }
    }
    if (manifest_path.empty()) {
        throw ConfigError("no manifest.json next to " + checkpoint.string());
    }
    const RunManifest m = RunManifest::from_json(read_json_file(manifest_path));
    const auto environment = make_environment(m.environment);
    ParamSet params(environment->info(), m.config.dims, m.config.share_params, 0);
    nn::restore(params.all_parameters(), nn::load_checkpoint(checkpoint));
    EvalResult r;
    r.episodes = episodes;
    r.seed = train::RngStreams(m.config.seed).eval_seed;
    r.win_rate = train::evaluate_policy(params, *environment, episodes, r.seed);
    return r;
}

std::vector<std::string> ablation_variants() {
    return {"maser",   "random-subgoal", "alpha0",  "alpha1",        "no-li",
            "no-correction", "over-correction", "no-repr", "qmix-reduction"};
}

train::TrainConfig apply_variant(train::TrainConfig c, const std::string& variant) {
    if (variant == "maser") {
    } else if (variant == "random-subgoal") {
        c.subgoal_mode = train::SubgoalMode::kRandom;
    } else if (variant == "alpha0") {
        c.alpha = 0.0;
    } else if (variant == "alpha1") {
        c.alpha = 1.0;
    } else if (variant == "no-li") {
        c.disable_li = true;
    } else if (variant == "no-correction") {
        c.correction = train::CorrectionMode::kNone;
    } else if (variant == "over-correction") {
        c.correction = train::CorrectionMode::kOver;
    } else if (variant == "no-repr") {
        c.disable_repr = true;
    } else if (variant == "qmix-reduction") {
        c.lambda = c.lambda_i = c.lambda_e = c.lambda_d = 0.0;
    } else {
        std::string valid;
        for (const std::string& v : ablation_variants()) {
            valid += (valid.empty() ? "" : ", ") + v;
        }
        throw ConfigError("unknown variant '" + variant + "'; expected one of " + valid);
    }
    return c;
}

std::vector<AblationAggregate> aggregate(const std::vector<AblationRow>& rows) {
    std::vector<AblationAggregate> out;
    for (const AblationRow& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& a) { return a.variant == row.variant; });
        if (it == out.end()) {
            out.push_back({row.variant});
        }
    }
    for (AblationAggregate& a : out) {
        std::vector<double> wins;
        for (const AblationRow& row : rows) {
            if (row.variant != a.variant) {
                continue;
            }
            if (row.result.ok) {
                wins.push_back(row.result.final_win_rate);
            } else {
                ++a.runs_failed;
            }
        }
        a.runs_ok = static_cast<int>(wins.size());
        if (wins.empty()) {
            a.mean = a.std = a.median = std::nan("");
            continue;
        }
        double sum = 0.0;
        for (double w : wins) {
            sum += w;
        }
        a.mean = sum / static_cast<double>(wins.size());
        double var = 0.0;
        for (double w : wins) {
            var += (w - a.mean) * (w - a.mean);
        }
        a.std = std::sqrt(var / static_cast<double>(wins.size()));
        std::sort(wins.begin(), wins.end());
        const std::size_t n = wins.size();
        a.median = n % 2 == 1 ? wins[n / 2] : 0.5 * (wins[n / 2 - 1] + wins[n / 2]);
    }
    return out;
}

void write_summary(std::ostream& out, const std::vector<AblationRow>& rows) {
    out << "row,variant,seed,status,final_win_rate,std_win_rate,median_win_rate,runs_ok,runs_failed,env_steps,"
           "seconds\n";
    for (const AblationRow& r : rows) {
        out << "run," << r.variant << ',' << r.seed << ',' << (r.result.ok ? "ok" : "failed") << ','
            << (r.result.ok ? num(r.result.final_win_rate) : "") << ",,,,," << r.result.env_steps << ','
            << num(r.result.seconds) << '\n';
    }
    for (const AblationAggregate& a : aggregate(rows)) {
        const bool any = a.runs_ok > 0;
        out << "aggregate," << a.variant << ",,," << (any ? num(a.mean) : "") << ',' << (any ? num(a.std) : "")
            << ',' << (any ? num(a.median) : "") << ',' << a.runs_ok << ',' << a.runs_failed << ",,\n";
    }
}

std::vector<AblationRow> run_ablation_matrix(const RunSpec& base, const std::vector<std::uint64_t>& seeds,
                                             const fs::path& out_dir, const AblationOptions& options) {
    if (seeds.empty()) {
        throw ConfigError("ablation needs at least one seed");
    }
    for (const std::string& v : options.variants) {
        apply_variant(base.config, v);
    }
    fs::create_directories(out_dir);
    std::vector<AblationRow> rows;
    for (const std::string& variant : options.variants) {
        for (std::uint64_t seed : seeds) {
            RunSpec spec = base;
            spec.config = apply_variant(base.config, variant);
            spec.config.seed = seed;
            const fs::path dir = out_dir / variant / ("seed-" + std::to_string(seed));
            AblationRow row{variant, seed, {}};
            const bool done = options.resume && fs::exists(dir / "result.json") && fs::exists(dir / "manifest.json");
            bool reused = false;
            if (done) {
                try {
                    const json old = read_json_file(dir / "manifest.json");
                    const json now = manifest_for(spec).to_json();
                    if (old.at("config") == now.at("config") && old.at("environment") == now.at("environment")) {
                        row.result = result_from_json(read_json_file(dir / "result.json"));
                        reused = true;
                    }
                } catch (const std::exception&) {
                    reused = false;
                }
            }
            if (!reused) {
                try {
                    row.result = run_train(spec, dir);
                } catch (const std::exception& e) {
                    row.result.ok = false;
                    row.result.error = e.what();
                }
            }
            if (options.progress) {
                *options.progress << variant << " seed=" << seed << (reused ? " (cached)" : "")
                                  << (row.result.ok ? " win_rate=" + num(row.result.final_win_rate)
                                                    : " failed: " + row.result.error)
                                  << std::endl;
            }
            rows.push_back(row);
            std::ofstream summary(out_dir / "summary.csv");
            write_summary(summary, rows);
        }
    }
    return rows;
}

} // namespace maser::cli
