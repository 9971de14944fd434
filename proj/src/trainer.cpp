#include "pia3c/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "pia3c/rule_based.hpp"
#include "pia3c/run_config.hpp"

namespace pia3c {

namespace {

Action sample_from(const PolicyVector& p, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return static_cast<Action>(i);
    }
    return static_cast<Action>(p.size() - 1);
}

Action greedy_from(const PolicyVector& p, Rng& rng) {
    const double best = *std::max_element(p.begin(), p.end());
    std::array<Action, kNumActions> ties{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == best) ties[n++] = static_cast<Action>(i);
    }
    return n == 1 ? ties[0] : ties[rng.below(n)];
}

Action opponent_action(OpponentKind kind, const GameState& s, Rng& rng) {
    if (kind == OpponentKind::RuleBased) return rule_based_policy(s, 1, rng.fork());
    return static_policy();
}

EpisodeOutcome outcome_for_agent0(const GameState& s) {
    switch (*s.terminal) {
        case Outcome::Agent0Wins: return EpisodeOutcome::Win;
        case Outcome::Agent1Wins: return EpisodeOutcome::Loss;
        case Outcome::Tie: return EpisodeOutcome::Tie;
    }
    return EpisodeOutcome::Tie;
}

bool agent0_suicide(const GameState& s) {
    return !s.agents[0].alive && s.last_death_cause[0] == DeathCause::OwnBomb;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string format_record(const EpisodeRecord& r) {
    std::ostringstream out;
    out << fixed(r.wallclock_s, 3) << ',' << r.global_step << ',' << r.env_steps << ',' << r.worker_id << ','
        << (r.is_demonstrator ? 1 : 0) << ',' << outcome_name(r.outcome) << ',' << fixed(r.reward, 1) << ','
        << r.length << ',' << (r.suicide ? 1 : 0);
    return out.str();
}

}  // namespace

NetworkArch TrainConfig::network_arch() const {
    return arch == ArchPreset::Full ? NetworkArch::full(board_size) : NetworkArch::desk(board_size);
}

std::string TrainConfig::label() const {
    if (k_demonstrators == 0) return "A3C";
    return planner.rollout_policy == RolloutPolicy::NetworkBiased ? "PI-A3C-NN" : "PI-A3C";
}

void validate(const TrainConfig& c) {
    if (c.n_workers < 1) throw ContractViolation("n_workers must be at least 1");
    if (c.k_demonstrators < 0 || c.k_demonstrators > c.n_workers) {
        throw ContractViolation("k_demonstrators must lie in [0, n_workers]");
    }
    if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ContractViolation("gamma must lie in (0, 1]");
    if (c.t_max < 1) throw ContractViolation("t_max must be at least 1");
    if (c.total_env_steps < 1 || c.eval_every < 1) throw ContractViolation("step budgets must be positive");
    if (c.eval_episodes < 1) throw ContractViolation("eval_episodes must be at least 1");
    if (c.board_size < 5) throw ContractViolation("board size must be at least 5");
    if (c.rules.max_ticks < 1) throw ContractViolation("max_ticks must be positive");
    validate(c.planner);
}

std::string_view outcome_name(EpisodeOutcome o) {
    switch (o) {
        case EpisodeOutcome::Win: return "win";
        case EpisodeOutcome::Loss: return "loss";
        case EpisodeOutcome::Tie: return "tie";
    }
    return "tie";
}

void compute_returns_and_advantages(TrajectorySegment& segment, double gamma) {
    if (segment.steps.empty()) throw ContractViolation("returns requested for an empty segment");
    double running = segment.terminal ? 0.0 : segment.bootstrap_value;
    for (auto it = segment.steps.rbegin(); it != segment.steps.rend(); ++it) {
        running = it->reward + gamma * running;
        it->ret = running;
        it->advantage = running - it->value_estimate;
    }
}

GlobalStore::GlobalStore(NetworkParams initial, AdamConfig adam)
    : params_(std::make_shared<const NetworkParams>(std::move(initial))), adam_(adam) {}

GlobalStore::Snapshot GlobalStore::snapshot() const {
    std::lock_guard lock(mu_);
    return {params_, step_};
}

std::optional<std::int64_t> GlobalStore::apply_gradients(const GradientSet& grads) {
    for (double g : grads.values) {
        if (!std::isfinite(g)) {
            record_rejection();
            return std::nullopt;
        }
    }
    std::lock_guard lock(mu_);
    auto next = std::make_shared<NetworkParams>(*params_);
    adam_step(*next, grads, adam_state_, adam_);
    params_ = std::move(next);
    return ++step_;
}

void GlobalStore::record_rejection() {
    std::lock_guard lock(mu_);
    ++rejected_;
}

std::int64_t GlobalStore::global_step() const {
    std::lock_guard lock(mu_);
    return step_;
}

std::int64_t GlobalStore::rejected() const {
    std::lock_guard lock(mu_);
    return rejected_;
}

Worker::Worker(int worker_id, bool demonstrator, const TrainConfig& config, GlobalStore& store, std::uint64_t seed,
               WorkerShared* shared)
    : id_(worker_id), demonstrator_(demonstrator), config_(config), store_(store), shared_(shared), rng_(seed) {}

void Worker::start_episode() {
    state_ = generate_board(rng_.fork(), config_.board_size, config_.density, config_.rules);
    episode_length_ = 0;
    segment_ = TrajectorySegment{};
    local_ = store_.snapshot().params;
}

void Worker::close_segment(bool terminal) {
    segment_.terminal = terminal;
    segment_.bootstrap_value = terminal ? 0.0 : forward(*local_, encode_observation(*state_, 0)).value;
    compute_returns_and_advantages(segment_, config_.gamma);
    LossWeights weights = config_.loss;
    weights.imitation = demonstrator_ ? config_.lambda_pi : 0.0;
    try {
        const LossAndGradient lg = backward(*local_, segment_, weights, config_.clip_norm);
        if (on_segment) on_segment(segment_, lg.loss);
        if (store_.apply_gradients(lg.grads)) ++updates_;
    } catch (const NonFiniteGradient&) {
        store_.record_rejection();
    }
    local_ = store_.snapshot().params;
    segment_.steps.clear();
    segment_.bootstrap_value = 0.0;
    segment_.terminal = false;
}

std::optional<EpisodeRecord> Worker::step_once() {
    if (!state_) start_episode();
    const GameState& s = *state_;

    Observation obs = encode_observation(s, 0);
    const ForwardOutput out = forward(*local_, obs);
    Action action;
    if (demonstrator_) {
        const NetworkParams* net =
            config_.planner.rollout_policy == RolloutPolicy::NetworkBiased ? local_.get() : nullptr;
        action = plan(s, 0, config_.planner, net, rng_.fork()).action;
    } else {
        action = sample_from(out.policy, rng_);
    }
    const Action other = opponent_action(config_.opponent, s, rng_);
    StepResult res = step(s, {action, other});

    TrajectoryStep st;
    st.observation = std::move(obs);
    st.action_taken = action;
    st.reward = res.rewards[0];
    st.value_estimate = out.value;
    st.policy_snapshot = out.policy;
    if (demonstrator_) st.demonstrator_action = action;
    segment_.steps.push_back(std::move(st));

    state_ = std::move(res.next);
    ++episode_length_;
    ++env_steps_;

    if (shared_) {
        const bool counts = !demonstrator_ || config_.k_demonstrators == config_.n_workers;
        if (counts) {
            const std::int64_t n = ++shared_->model_free_steps;
            if (n <= config_.total_env_steps && n % config_.eval_every == 0 && shared_->on_eval_point) {
                shared_->on_eval_point(n);
            }
            if (n >= config_.total_env_steps) shared_->stop = true;
        } else {
            ++shared_->demonstrator_steps;
        }
    }

    if (res.done || static_cast<int>(segment_.steps.size()) >= config_.t_max) close_segment(res.done);

    if (!res.done) return std::nullopt;
    EpisodeRecord rec;
    rec.worker_id = id_;
    rec.is_demonstrator = demonstrator_;
    rec.outcome = outcome_for_agent0(*state_);
    rec.reward = res.rewards[0];
    rec.length = episode_length_;
    rec.suicide = agent0_suicide(*state_);
    rec.global_step = store_.global_step();
    if (shared_) {
        rec.env_steps = shared_->model_free_steps.load();
        rec.wallclock_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - shared_->start).count();
    } else {
        rec.env_steps = env_steps_;
    }
    state_.reset();
    return rec;
}

std::vector<EpisodeRecord> Worker::run_episodes(int n) {
    std::vector<EpisodeRecord> out;
    while (static_cast<int>(out.size()) < n) {
        if (auto rec = step_once()) out.push_back(*rec);
    }
    return out;
}

EvalResult evaluate_policy(const AgentPolicy& policy, const EvalSetup& setup, int n_episodes, std::uint64_t seed) {
    if (n_episodes < 1) throw ContractViolation("evaluation needs at least one episode");
    Rng rng(seed);
    int wins = 0, ties = 0, suicides = 0;
    double reward = 0.0, length = 0.0;
    for (int ep = 0; ep < n_episodes; ++ep) {
        GameState s = generate_board(rng.fork(), setup.board_size, setup.density, setup.rules);
        double r = 0.0;
        while (!s.is_terminal()) {
            const Action a0 = policy(s, rng);
            const Action a1 = opponent_action(setup.opponent, s, rng);
            StepResult res = step(s, {a0, a1});
            r = res.rewards[0];
            s = std::move(res.next);
        }
        switch (outcome_for_agent0(s)) {
            case EpisodeOutcome::Win: ++wins; break;
            case EpisodeOutcome::Tie: ++ties; break;
            case EpisodeOutcome::Loss: break;
        }
        suicides += agent0_suicide(s) ? 1 : 0;
        reward += r;
        length += s.tick;
    }
    const auto n = static_cast<double>(n_episodes);
    EvalResult out;
    out.win_rate = wins / n;
    out.tie_rate = ties / n;
    out.loss_rate = 1.0 - (out.win_rate + out.tie_rate);
    out.suicide_rate = suicides / n;
    out.mean_reward = reward / n;
    out.mean_length = length / n;
    return out;
}

EvalResult evaluate(const NetworkParams& params, const EvalSetup& setup, int n_episodes, std::uint64_t seed) {
    return evaluate_policy(
        [&params](const GameState& s, Rng& rng) { return greedy_from(forward(params, encode_observation(s, 0)).policy, rng); },
        setup, n_episodes, seed);
}

std::string format_eval_row(std::int64_t env_steps, const EvalResult& r) {
    std::ostringstream out;
    out << env_steps << ',' << fixed(r.win_rate, 6) << ',' << fixed(r.tie_rate, 6) << ',' << fixed(r.loss_rate, 6)
        << ',' << fixed(r.suicide_rate, 6) << ',' << fixed(r.mean_reward, 6);
    return out.str();
}

std::int64_t TrainResult::model_free_suicides() const {
    return std::count_if(episodes.begin(), episodes.end(),
                         [](const EpisodeRecord& r) { return !r.is_demonstrator && r.suicide; });
}

TrainResult train(const TrainConfig& config, const std::filesystem::path& out_dir) {
    validate(config);
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream cfg(out_dir / "config.txt");
        cfg << serialize_config(config);
    }

    TrainResult result;
    result.label = config.label();
    GlobalStore store(init_params(config.network_arch(), Rng::mix(config.seed)), config.adam);
    save_checkpoint((out_dir / "ckpt_0.bin").string(), *store.snapshot().params, 0);

    std::ofstream metrics(out_dir / "metrics.csv");
    metrics << kMetricsHeader << '\n' << std::flush;
    std::ofstream eval_csv(out_dir / "eval.csv");
    eval_csv << kEvalHeader << '\n' << std::flush;

    std::mutex io_mu;
    const EvalSetup setup{config.opponent, config.board_size, config.density, config.rules};
    WorkerShared shared;
    shared.on_eval_point = [&](std::int64_t env_steps) {
        const auto snap = store.snapshot();
        const EvalResult r =
            evaluate(*snap.params, setup, config.eval_episodes, Rng::mix(config.seed ^ Rng::mix(env_steps)));
        std::lock_guard lock(io_mu);
        eval_csv << format_eval_row(env_steps, r) << '\n' << std::flush;
        save_checkpoint((out_dir / ("ckpt_" + std::to_string(env_steps) + ".bin")).string(), *snap.params,
                        snap.step);
        result.evals.push_back({env_steps, r});
    };

    std::vector<std::unique_ptr<Worker>> workers;
    Rng seeder(Rng::mix(config.seed + 0x5eed));
    for (int i = 0; i < config.n_workers; ++i) {
        workers.push_back(
            std::make_unique<Worker>(i, i < config.k_demonstrators, config, store, seeder.fork(), &shared));
    }

    std::string first_error;
    auto run = [&](Worker& w) {
        try {
            while (!shared.stop) {
                if (auto rec = w.step_once()) {
                    if (!config.log_wallclock) rec->wallclock_s = 0.0;
                    std::lock_guard lock(io_mu);
                    metrics << format_record(*rec) << '\n';
                    result.episodes.push_back(*rec);
                }
            }
        } catch (const std::exception& e) {
            std::lock_guard lock(io_mu);
            if (first_error.empty()) first_error = "worker " + std::to_string(w.is_demonstrator()) + ": " + e.what();
            shared.stop = true;
        }
    };

    if (workers.size() == 1) {
        run(*workers.front());
    } else {
        std::vector<std::thread> threads;
        for (auto& w : workers) threads.emplace_back(run, std::ref(*w));
        for (auto& t : threads) t.join();
    }
    metrics.flush();

    const auto final_snap = store.snapshot();
    save_checkpoint((out_dir / "ckpt_final.bin").string(), *final_snap.params, final_snap.step);
    result.final_params = *final_snap.params;
    result.global_step = final_snap.step;
    result.model_free_steps = shared.model_free_steps.load();
    result.demonstrator_steps = shared.demonstrator_steps.load();
    result.rejected_updates = store.rejected();
    result.aborted = !first_error.empty();
    result.error = first_error;

    std::sort(result.evals.begin(), result.evals.end(),
              [](const EvalRow& a, const EvalRow& b) { return a.env_steps < b.env_steps; });
    {
        std::ofstream out(out_dir / "eval.csv", std::ios::trunc);
        out << kEvalHeader << '\n';
        for (const auto& row : result.evals) out << format_eval_row(row.env_steps, row.result) << '\n';
    }

    // Learning curve from model-free episodes only, bucketed by eval_every.
    {
        struct Bucket {
            int episodes = 0;
            int wins = 0;
            int suicides = 0;
            double reward = 0.0;
        };
        std::map<std::int64_t, Bucket> buckets;
        for (const auto& r : result.episodes) {
            if (r.is_demonstrator) continue;
            const std::int64_t end = ((r.env_steps + config.eval_every - 1) / config.eval_every) * config.eval_every;
            Bucket& b = buckets[end];
            ++b.episodes;
            b.wins += r.outcome == EpisodeOutcome::Win ? 1 : 0;
            b.suicides += r.suicide ? 1 : 0;
            b.reward += r.reward;
        }
        std::ofstream out(out_dir / "curve.csv");
        out << "label,env_steps,episodes,mean_reward,win_rate,suicide_rate\n";
        for (const auto& [end, b] : buckets) {
            out << result.label << ',' << end << ',' << b.episodes << ',' << fixed(b.reward / b.episodes, 6) << ','
                << fixed(static_cast<double>(b.wins) / b.episodes, 6) << ','
                << fixed(static_cast<double>(b.suicides) / b.episodes, 6) << '\n';
        }
    }
    {
        std::ofstream out(out_dir / "summary.txt");
        out << "label=" << result.label << '\n'
            << "global_step=" << result.global_step << '\n'
            << "model_free_steps=" << result.model_free_steps << '\n'
            << "demonstrator_steps=" << result.demonstrator_steps << '\n'
            << "rejected_updates=" << result.rejected_updates << '\n'
            << "model_free_suicides=" << result.model_free_suicides() << '\n'
            << "aborted=" << (result.aborted ? 1 : 0) << '\n';
        if (result.aborted) out << "error=" << result.error << '\n';
    }
    return result;
}

}  // namespace pia3c
