#pragma once

// Asynchronous actor-critic training with optional planner-driven
// demonstrator workers. Workers 0..k-1 act through the planner and add the
// imitation loss; the rest sample from the network. All workers push
// gradients to one GlobalStore, which applies them one at a time.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pia3c/engine.hpp"
#include "pia3c/net.hpp"
#include "pia3c/planner.hpp"
#include "pia3c/rng.hpp"
#include "pia3c/trajectory.hpp"

namespace pia3c {

enum class OpponentKind : std::uint8_t { Static, RuleBased };
enum class ArchPreset : std::uint8_t { Desk, Full };

struct TrainConfig {
    int n_workers = 8;
    int k_demonstrators = 0;
    PlannerConfig planner;
    double gamma = 0.999;
    int t_max = 20;
    double lambda_pi = 1.0;  // used by demonstrator workers only
    LossWeights loss;        // value 0.5, policy 1.0, entropy 0.01
    AdamConfig adam;
    double clip_norm = 40.0;
    OpponentKind opponent = OpponentKind::Static;
    std::int64_t total_env_steps = 200000;
    std::int64_t eval_every = 20000;
    int eval_episodes = 50;
    std::uint64_t seed = 1;
    ArchPreset arch = ArchPreset::Desk;
    int board_size = 8;
    BoardDensity density;
    GameRules rules;
    bool log_wallclock = true;

    bool operator==(const TrainConfig&) const = default;

    NetworkArch network_arch() const;
    /// "A3C" without demonstrators, "PI-A3C" otherwise (suffixed "-NN" for network-biased rollouts).
    std::string label() const;
};

void validate(const TrainConfig& config);

enum class EpisodeOutcome : std::uint8_t { Win, Loss, Tie };
std::string_view outcome_name(EpisodeOutcome o);

struct EpisodeRecord {
    int worker_id = 0;
    bool is_demonstrator = false;
    EpisodeOutcome outcome = EpisodeOutcome::Tie;
    double reward = 0.0;
    int length = 0;
    bool suicide = false;
    double wallclock_s = 0.0;
    std::int64_t global_step = 0;
    std::int64_t env_steps = 0;  // model-free steps counted when the episode ended
    bool operator==(const EpisodeRecord&) const = default;
};

/// R_t = sum_k gamma^k r_{t+k} + gamma^(n-t) * bootstrap, A_t = R_t - V(s_t).
void compute_returns_and_advantages(TrajectorySegment& segment, double gamma);

class GlobalStore {
public:
    GlobalStore(NetworkParams initial, AdamConfig adam);

    struct Snapshot {
        std::shared_ptr<const NetworkParams> params;
        std::int64_t step = 0;
    };

    /// Parameters as of some completed update; never a partially applied one.
    Snapshot snapshot() const;

    /// Applies one Adam step under the store lock. Returns the post-update step
    /// index, or nullopt when the gradient is non-finite (counted, params untouched).
    std::optional<std::int64_t> apply_gradients(const GradientSet& grads);

    void record_rejection();
    std::int64_t global_step() const;
    std::int64_t rejected() const;

private:
    mutable std::mutex mu_;
    std::shared_ptr<const NetworkParams> params_;
    AdamState adam_state_;
    AdamConfig adam_;
    std::int64_t step_ = 0;
    std::int64_t rejected_ = 0;
};

/// Shared between the workers of one run.
struct WorkerShared {
    std::atomic<std::int64_t> model_free_steps{0};
    std::atomic<std::int64_t> demonstrator_steps{0};
    std::atomic<bool> stop{false};
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    // Called by the model-free worker whose step reaches a multiple of eval_every.
    std::function<void(std::int64_t env_steps)> on_eval_point;
};

class Worker {
public:
    Worker(int worker_id, bool demonstrator, const TrainConfig& config, GlobalStore& store, std::uint64_t seed,
           WorkerShared* shared = nullptr);

    /// One environment step (and a gradient push when a segment closes).
    /// Returns the episode record when this step ended an episode.
    std::optional<EpisodeRecord> step_once();

    std::vector<EpisodeRecord> run_episodes(int n);

    bool is_demonstrator() const { return demonstrator_; }
    std::int64_t env_steps() const { return env_steps_; }
    std::int64_t updates() const { return updates_; }

    /// Observer for every closed segment and the loss it produced (tests, diagnostics).
    std::function<void(const TrajectorySegment&, const LossParts&)> on_segment;

private:
    void start_episode();
    void close_segment(bool terminal);

    int id_;
    bool demonstrator_;
    const TrainConfig& config_;
    GlobalStore& store_;
    WorkerShared* shared_;
    Rng rng_;
    std::shared_ptr<const NetworkParams> local_;
    std::optional<GameState> state_;
    TrajectorySegment segment_;
    int episode_length_ = 0;
    std::int64_t env_steps_ = 0;
    std::int64_t updates_ = 0;
};

struct EvalResult {
    double win_rate = 0.0;
    double tie_rate = 0.0;
    double loss_rate = 0.0;
    double suicide_rate = 0.0;
    double mean_reward = 0.0;
    double mean_length = 0.0;
    bool operator==(const EvalResult&) const = default;
};

struct EvalSetup {
    OpponentKind opponent = OpponentKind::Static;
    int board_size = 8;
    BoardDensity density;
    GameRules rules;
};

using AgentPolicy = std::function<Action(const GameState&, Rng&)>;

/// Plays n_episodes on fresh boards as agent 0 against the scripted opponent.
EvalResult evaluate_policy(const AgentPolicy& policy, const EvalSetup& setup, int n_episodes, std::uint64_t seed);

/// Greedy (argmax, seeded tie-break) play with the given parameters.
EvalResult evaluate(const NetworkParams& params, const EvalSetup& setup, int n_episodes, std::uint64_t seed);

struct EvalRow {
    std::int64_t env_steps = 0;
    EvalResult result;
};

struct TrainResult {
    std::string label;
    std::vector<EpisodeRecord> episodes;
    std::vector<EvalRow> evals;
    std::int64_t global_step = 0;
    std::int64_t model_free_steps = 0;
    std::int64_t demonstrator_steps = 0;
    std::int64_t rejected_updates = 0;
    bool aborted = false;
    std::string error;
    NetworkParams final_params;

    std::int64_t model_free_suicides() const;
};

/// Runs the configured workers until total_env_steps model-free steps have
/// been taken (demonstrator steps are not counted unless every worker is a
/// demonstrator). Writes into out_dir: config.txt, metrics.csv, eval.csv,
/// curve.csv, summary.txt and checkpoints (ckpt_0.bin, one per evaluation,
/// ckpt_final.bin). A worker failure stops the run; the artifacts written so
/// far plus a final checkpoint are kept and the result is marked aborted.
TrainResult train(const TrainConfig& config, const std::filesystem::path& out_dir);

inline constexpr const char* kMetricsHeader =
    "wallclock_s,global_step,env_steps,worker_id,is_demo,outcome,reward,ep_len,suicide";
inline constexpr const char* kEvalHeader = "env_steps,win_rate,tie_rate,loss_rate,suicide_rate,mean_reward";

std::string format_eval_row(std::int64_t env_steps, const EvalResult& r);

}  // namespace pia3c
