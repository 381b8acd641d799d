#include "maser/train/trainer.hpp"

#include "maser/errors.hpp"
#include "maser/replay/batch.hpp"
#include "maser/reward/shaping.hpp"
#include "maser/train/rollout.hpp"

#include <cmath>
#include <sstream>

namespace maser::train {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

} // namespace

RngStreams::RngStreams(std::uint64_t seed)
    : init_seed(derive_seed(seed, 0)), sampling(derive_seed(seed, 1)), exploration(derive_seed(seed, 2)),
      env_seeds(derive_seed(seed, 3)), subgoals(derive_seed(seed, 4)), eval_seed(derive_seed(seed, 5)) {}

BlockTargets compute_block_targets(const BatchForward& fwd, ParamSet& params, const TrainConfig& config,
                                   std::mt19937_64& subgoal_rng, std::ostream* log, long long block) {
    const replay::Batch& batch = *fwd.batch;
    const int n = batch.n_agents;
    const int rows = batch.rows();
    const double lambda = config.lambda;
    const double alpha = config.effective_alpha();
    const bool normal_window = config.correction == CorrectionMode::kNormal && config.effective_lambda_e() > 0.0;
    const bool need_subgoals = lambda > 0.0 || normal_window || config.effective_lambda_d() > 0.0;
    const bool need_credit = config.effective_lambda_i() > 0.0;

    BlockTargets out;
    out.proxy = batch.rewards;
    out.individual.assign(n, Matrix::Zero(rows, 1));
    out.correction_window.assign(n, Matrix::Zero(rows, 1));
    out.distance_targets.assign(n, Matrix::Zero(rows, 1));
    out.goal_rows.assign(n, std::vector<int>(rows));
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < rows; ++r) {
            out.goal_rows[i][r] = r;
        }
    }
    std::vector<reward::ReprNet>* repr = config.disable_repr ? nullptr : &params.repr;

    for (int b = 0; b < batch.size; ++b) {
        const replay::Episode& ep = *batch.episodes[b];
        const int steps = batch.valid_steps[b];
        if (!need_subgoals && !need_credit) {
            continue;
        }
        const subgoal::EpisodeValues values = episode_values(fwd, b);
        if (need_subgoals) {
            const subgoal::SubgoalAssignment assignment =
                config.subgoal_mode == SubgoalMode::kRandom ? subgoal::select_subgoals_random(ep, subgoal_rng, b)
                                                            : subgoal::select_subgoals(values, ep, alpha, b);
            if (log != nullptr) {
                subgoal::write_subgoal_diagnostics(*log, block, assignment, values, alpha);
            }
            const reward::RewardBundle bundle = reward::shape_rewards(ep, values, assignment, repr, lambda);
            for (int t = 0; t < steps; ++t) {
                const int r = batch.row(t, b);
                out.proxy(r, 0) = bundle.proxy[t];
                for (int i = 0; i < n; ++i) {
                    out.individual[i](r, 0) = bundle.individual(t, i);
                    out.distance_targets[i](r, 0) = bundle.distance_targets(t, i);
                    out.goal_rows[i][r] = batch.row(assignment.t_star[i], b);
                    if (t >= assignment.t_star[i]) {
                        out.correction_window[i](r, 0) = 1.0;
                    }
                }
            }
            out.assignments.push_back(assignment);
        } else {
            std::vector<double> max_q(n);
            for (int t = 0; t < steps; ++t) {
                const int r = batch.row(t, b);
                for (int i = 0; i < n; ++i) {
                    max_q[i] = values.max_q(t, i);
                }
                const std::vector<double> credit = reward::credit_weights(max_q);
                for (int i = 0; i < n; ++i) {
                    out.individual[i](r, 0) = credit[i] * out.proxy(r, 0);
                }
            }
        }
    }
    if (config.correction == CorrectionMode::kOver) {
        for (int i = 0; i < n; ++i) {
            out.correction_window[i] = batch.valid;
        }
    } else if (config.correction == CorrectionMode::kNone) {
        for (int i = 0; i < n; ++i) {
            out.correction_window[i].setZero();
        }
    }
    double total = 0.0;
    double count = 0.0;
    for (int r = 0; r < rows; ++r) {
        total += batch.valid(r, 0) * out.proxy(r, 0);
        count += batch.valid(r, 0);
    }
    out.mean_proxy = total / count;
    return out;
}

BlockLoss block_loss(const BatchForward& fwd, const BlockTargets& targets, const TrainConfig& config) {
    const int n = fwd.batch->n_agents;
    BlockLoss out;
    out.terms.l_td = total_td_loss(fwd, targets.proxy, config.gamma);
    const LossWeights w{config.effective_lambda_i(), config.effective_lambda_e(), config.effective_lambda_d()};
    if (w.lambda_i > 0.0) {
        for (int i = 0; i < n; ++i) {
            out.terms.l_i.push_back(individual_td_loss(fwd, i, targets.individual[i], config.gamma));
        }
    }
    if (w.lambda_e > 0.0) {
        for (int i = 0; i < n; ++i) {
            out.terms.l_e.push_back(entropy_correction_loss(fwd.q[i], targets.correction_window[i]));
        }
    }
    if (w.lambda_d > 0.0) {
        if (fwd.phi.size() != static_cast<std::size_t>(n)) {
            throw ConfigError("block_loss: representation term requested without embeddings");
        }
        for (int i = 0; i < n; ++i) {
            out.terms.l_d.push_back(reward::distance_regression_loss(fwd.phi[i], targets.goal_rows[i],
                                                                     targets.distance_targets[i], fwd.mean_weights));
        }
    }
    out.total = composite_loss(out.terms, w);
    return out;
}

Trainer::Trainer(TrainConfig config, std::unique_ptr<env::Environment> env)
    : config_(std::move(config)), env_(std::move(env)), rng_(config_.seed) {
    config_.validate();
    if (!env_) {
        throw ConfigError("trainer needs an environment");
    }
    params_ = ParamSet(env_->info(), config_.dims, config_.share_params, rng_.init_seed);
    buffer_ = replay::ReplayBuffer(config_.buffer_capacity);
    optimizer_ = nn::RmsProp(config_.optim);
}

void Trainer::collect_episode() {
    const double eps = epsilon();
    const std::uint64_t seed = rng_.env_seeds();
    replay::Episode ep = rollout(params_, *env_, seed, eps, rng_.exploration);
    env_steps_ += ep.valid_steps();
    ++episodes_;
    buffer_.push(std::move(ep));
}

double Trainer::evaluate(int episodes) {
    const std::unique_ptr<env::Environment> copy = env_->clone();
    return evaluate_policy(params_, *copy, episodes, rng_.eval_seed);
}

BlockReport Trainer::train_block() {
    if (buffer_.empty()) {
        collect_episode();
    }
    const std::vector<replay::EpisodePtr> sample = buffer_.sample(config_.batch_size, rng_.sampling);
    const replay::Batch batch = replay::make_batch(sample);

    Tape tape;
    const BatchForward fwd = forward_batch(tape, params_, batch, config_.effective_lambda_d() > 0.0);
    const BlockTargets targets = compute_block_targets(fwd, params_, config_, rng_.subgoals, subgoal_log_, blocks_);
    const BlockLoss loss = block_loss(fwd, targets, config_);

    BlockReport report;
    report.block = blocks_;
    report.loss = loss.total.scalar();
    report.l_td = loss.terms.l_td.scalar();
    for (const Var& v : loss.terms.l_i) {
        report.sum_li += v.scalar();
    }
    for (const Var& v : loss.terms.l_e) {
        report.sum_le += v.scalar();
    }
    for (const Var& v : loss.terms.l_d) {
        report.sum_ld += v.scalar();
    }
    report.mean_rt = targets.mean_proxy;
    for (const subgoal::SubgoalAssignment& a : targets.assignments) {
        report.t_star.push_back(a.t_star);
    }
    if (!std::isfinite(report.loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at block " << blocks_ << " (env_steps=" << env_steps_ << "): L=" << report.loss
            << " L_TD=" << report.l_td << " sum_Li=" << report.sum_li << " sum_LE=" << report.sum_le
            << " sum_LD=" << report.sum_ld << " mean_Rt=" << report.mean_rt;
        throw NumericalError(msg.str());
    }

    const std::vector<nn::Parameter*> online = params_.online_parameters();
    nn::zero_grad(online);
    tape.backward(loss.total);
    report.grad_norm = nn::clip_grad_norm(online, config_.grad_clip);
    optimizer_.step(online);
    ++blocks_;

    const long long due = episodes_ / config_.target_interval;
    if (due > syncs_) {
        params_.sync_targets();
        syncs_ = due;
        report.targets_synced = true;
    }
    report.epsilon = epsilon();
    collect_episode();
    report.env_steps = env_steps_;
    report.episodes = episodes_;
    return report;
}

} // namespace maser::train
