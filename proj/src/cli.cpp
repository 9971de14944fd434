#include "pia3c/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <algorithm>

#include "pia3c/board_io.hpp"
#include "pia3c/hazard.hpp"
#include "pia3c/planner.hpp"
#include "pia3c/rule_based.hpp"
#include "pia3c/run_config.hpp"
#include "pia3c/trainer.hpp"

namespace pia3c {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

struct TrainArgs {
    std::string config;
    std::string out;
    std::vector<std::string> set;
};

struct EvalArgs {
    std::string checkpoint;
    std::string opponent = "static";
    int episodes = 50;
    std::uint64_t seed = 1;
    int board_size = 0;  // 0: take it from the checkpoint's architecture
    std::string record;
};

struct HazardArgs {
    int length = 10;
    int strength = 10;
    int horizon = 9;
    std::uint64_t seed = 1;
    int size = 8;
    int agent = 0;
    double p = 0.4;
    int b = 1;
};

struct PlanArgs {
    std::string board;
    int agent = 0;
    int rollouts = 75;
    int depth = 24;
    std::uint64_t seed = 1;
    bool dump_tree = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    std::string text;
    TrainConfig config;
    try {
        text = read_file(a.config);
        config = parse_config(text);
        for (const auto& s : a.set) apply_setting(config, s);
        validate(config);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        std::filesystem::create_directories(a.out);
        std::ofstream(std::filesystem::path(a.out) / "config.input.txt") << text;
        const TrainResult r = train(config, a.out);
        out << "label=" << r.label << " global_step=" << r.global_step << " model_free_steps=" << r.model_free_steps
            << " demonstrator_steps=" << r.demonstrator_steps << " episodes=" << r.episodes.size() << '\n';
        if (r.aborted) {
            err << "training aborted: " << r.error << '\n';
            return kExitRuntime;
        }
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    if (a.episodes < 1) {
        err << "--episodes must be at least 1\n";
        return kExitUsage;
    }
    EvalSetup setup;
    if (a.opponent == "static") setup.opponent = OpponentKind::Static;
    else if (a.opponent == "rule_based") setup.opponent = OpponentKind::RuleBased;
    else {
        err << "--opponent must be static or rule_based\n";
        return kExitUsage;
    }
    NetworkParams params;
    try {
        params = load_checkpoint(a.checkpoint);
    } catch (const std::exception& e) {
        err << "cannot load checkpoint: " << e.what() << '\n';
        return kExitConfig;
    }
    setup.board_size = a.board_size > 0 ? a.board_size : params.arch().board_size;
    if (setup.board_size != params.arch().board_size) {
        err << "board size " << setup.board_size << " does not match the checkpoint (" << params.arch().board_size
            << ")\n";
        return kExitConfig;
    }
    try {
        const EvalResult r = evaluate(params, setup, a.episodes, a.seed);
        out << kEvalHeader << '\n' << format_eval_row(a.episodes, r) << '\n';
        if (!a.record.empty()) {
            // Records the first evaluation episode: same board and same choices.
            Rng rng(a.seed);
            Replay replay;
            replay.initial = generate_board(rng.fork(), setup.board_size, setup.density, setup.rules);
            GameState s = replay.initial;
            while (!s.is_terminal()) {
                const PolicyVector p = forward(params, encode_observation(s, 0)).policy;
                const double best = *std::max_element(p.begin(), p.end());
                std::vector<Action> ties;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    if (p[i] == best) ties.push_back(static_cast<Action>(i));
                }
                const Action a0 = ties.size() == 1 ? ties[0] : ties[rng.below(ties.size())];
                const Action a1 =
                    setup.opponent == OpponentKind::RuleBased ? rule_based_policy(s, 1, rng.fork()) : static_policy();
                replay.actions.push_back({a0, a1});
                s = step(s, {a0, a1}).next;
            }
            std::ofstream(a.record) << serialize_replay(replay);
        }
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

void print_hazard(const HazardResult& r, const GameState& s, std::ostream& out) {
    out << hazard_heatmap_csv(r, s);
    out << "suicide_probability=" << fixed(r.suicide_probability, 9) << '\n';
    if (r.total_paths > 0) {
        std::uint64_t dead = 0;
        for (std::size_t i = 0; i < r.path_counts.size(); ++i) {
            if (r.flame_mask[i]) dead += r.path_counts[i];
        }
        out << "fatal_paths=" << dead << '/' << r.total_paths << '\n';
    }
}

int cmd_hazard_corridor(const HazardArgs& a, std::ostream& out, std::ostream& err) {
    GameState s;
    try {
        s = corridor_scenario(a.length, a.strength);
    } catch (const std::exception& e) {
        err << "bad geometry: " << e.what() << '\n';
        return kExitConfig;
    }
    HazardQuery q;
    q.state = s;
    q.agent_id = 0;
    q.horizon = a.horizon;
    try {
        print_hazard(survival_distribution(q), s, out);
    } catch (const std::exception& e) {
        err << "bad geometry: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

int cmd_hazard_board(const HazardArgs& a, std::ostream& out, std::ostream& err) {
    try {
        const GameState board = generate_board(a.seed, a.size);
        const HazardQuery q = bomb_placement_query(board, a.agent, a.horizon);
        print_hazard(survival_distribution(q), q.state, out);
    } catch (const std::exception& e) {
        err << "bad geometry: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

int cmd_hazard_survival(const HazardArgs& a, std::ostream& out, std::ostream& err) {
    try {
        out << "survival=" << fixed(survival_after_bombs(a.p, a.b), 9) << '\n';
    } catch (const std::exception& e) {
        err << "bad arguments: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_plan(const PlanArgs& a, std::ostream& out, std::ostream& err) {
    GameState s;
    try {
        s = parse_state(read_file(a.board));
    } catch (const std::exception& e) {
        err << "cannot read board: " << e.what() << '\n';
        return kExitConfig;
    }
    if (s.is_terminal()) {
        err << "board is terminal\n";
        return kExitConfig;
    }
    if (a.agent < 0 || a.agent >= kNumAgents || !s.agents[static_cast<std::size_t>(a.agent)].alive) {
        err << "agent " << a.agent << " is not alive on this board\n";
        return kExitConfig;
    }
    PlannerConfig config;
    config.n_rollouts = a.rollouts;
    config.rollout_depth = a.depth;
    try {
        validate(config);
    } catch (const std::exception& e) {
        err << "bad arguments: " << e.what() << '\n';
        return kExitUsage;
    }
    std::string dump;
    const PlanResult r = plan(s, a.agent, config, nullptr, a.seed, a.dump_tree ? &dump : nullptr);
    out << "action=" << action_name(r.action) << '\n' << "action,visits,q\n";
    for (Action act : kAllActions) {
        const auto i = static_cast<std::size_t>(act);
        out << action_name(act) << ',' << r.visit_counts[i] << ',' << fixed(r.q_values[i], 6) << '\n';
    }
    if (a.dump_tree) out << dump;
    return kExitOk;
}

int cmd_replay(const std::string& file, std::ostream& out, std::ostream& err) {
    Replay replay;
    std::vector<GameState> states;
    try {
        replay = parse_replay(read_file(file));
        states = replay_states(replay);
    } catch (const std::exception& e) {
        err << "cannot read replay: " << e.what() << '\n';
        return kExitConfig;
    }
    for (std::size_t t = 0; t < states.size(); ++t) {
        out << "tick " << states[t].tick;
        if (t > 0) {
            out << "  actions " << action_name(replay.actions[t - 1][0]) << ' ' << action_name(replay.actions[t - 1][1]);
        }
        out << '\n' << render_state(states[t]);
    }
    const GameState& last = states.back();
    if (last.terminal) {
        static constexpr const char* names[] = {"agent0 wins", "agent1 wins", "tie"};
        out << "result: " << names[static_cast<int>(*last.terminal)] << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"PI-A3C on Mini-Pommerman: training, evaluation, hazard analysis, planning, replays", "pia3c"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Run a training job");
    train_cmd->add_option("--config", train_args.config, "key=value config file")->required();
    train_cmd->add_option("--out", train_args.out, "Output directory")->required();
    train_cmd->add_option("--set", train_args.set, "Override one key (key=value); repeatable");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint greedily");
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint)->required();
    eval_cmd->add_option("--opponent", eval_args.opponent, "static or rule_based");
    eval_cmd->add_option("--episodes", eval_args.episodes);
    eval_cmd->add_option("--seed", eval_args.seed);
    eval_cmd->add_option("--board-size", eval_args.board_size);
    eval_cmd->add_option("--record", eval_args.record, "Write the first episode as a replay file");

    HazardArgs hz;
    auto* hazard_cmd = app.add_subcommand("hazard", "Exact bomb-placement hazard analysis");
    hazard_cmd->require_subcommand(1);
    auto* corridor_cmd = hazard_cmd->add_subcommand("corridor", "Corridor worst case");
    corridor_cmd->add_option("--length", hz.length);
    corridor_cmd->add_option("--strength", hz.strength);
    corridor_cmd->add_option("--horizon", hz.horizon);
    auto* board_cmd = hazard_cmd->add_subcommand("board", "Bomb under an agent on a generated board");
    board_cmd->add_option("--seed", hz.seed);
    board_cmd->add_option("--horizon", hz.horizon);
    board_cmd->add_option("--size", hz.size);
    board_cmd->add_option("--agent", hz.agent);
    auto* survival_cmd = hazard_cmd->add_subcommand("survival", "Survival probability after b bombs");
    survival_cmd->add_option("--p", hz.p)->required();
    survival_cmd->add_option("--b", hz.b)->required();

    PlanArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "Run the planner on one position");
    plan_cmd->add_option("--board", plan_args.board)->required();
    plan_cmd->add_option("--agent", plan_args.agent);
    plan_cmd->add_option("--rollouts", plan_args.rollouts);
    plan_cmd->add_option("--depth", plan_args.depth);
    plan_cmd->add_option("--seed", plan_args.seed);
    plan_cmd->add_flag("--dump-tree", plan_args.dump_tree);

    std::string replay_file;
    auto* replay_cmd = app.add_subcommand("replay", "Pretty-print a logged episode");
    replay_cmd->add_option("--file", replay_file)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }

    if (*train_cmd) return cmd_train(train_args, out, err);
    if (*eval_cmd) return cmd_eval(eval_args, out, err);
    if (*corridor_cmd) return cmd_hazard_corridor(hz, out, err);
    if (*board_cmd) return cmd_hazard_board(hz, out, err);
    if (*survival_cmd) return cmd_hazard_survival(hz, out, err);
    if (*plan_cmd) return cmd_plan(plan_args, out, err);
    if (*replay_cmd) return cmd_replay(replay_file, out, err);
    return kExitUsage;
}

}  // namespace pia3c
