#pragma once

// Vanilla UCT used as a black-box demonstrator: a fresh tree per call, a fixed
// number of select/expand/rollout/back-propagate iterations, and the most
// visited root action as the answer. Inside the search the opponent is a
// uniformly random agent; its move is sampled once when a child is created.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pia3c/engine.hpp"
#include "pia3c/net.hpp"

namespace pia3c {

class Rng;

enum class RolloutPolicy : std::uint8_t { UniformRandom, NetworkBiased };
enum class OpponentModel : std::uint8_t { UniformRandom };

struct PlannerConfig {
    int n_rollouts = 75;
    int rollout_depth = 24;
    double exploration_c = std::sqrt(2.0);
    RolloutPolicy rollout_policy = RolloutPolicy::UniformRandom;
    OpponentModel opponent_model = OpponentModel::UniformRandom;
    bool operator==(const PlannerConfig&) const = default;
};

void validate(const PlannerConfig& config);

/// q + c * sqrt(ln(n_parent) / n_child); +infinity for an unvisited child.
/// n_parent is real-valued so that ln(n_parent) = 1 can be exercised exactly.
double ucb_score(double q, double n_parent, double n_child, double c);

struct SearchNode {
    GameState state;
    int visits = 0;                       // n(s)
    std::array<int, kNumActions> child{};  // node index, -1 when not expanded
    std::array<int, kNumActions> edge_visits{};
    std::array<double, kNumActions> q{};   // running mean of backed-up values
    std::vector<Action> untried;
    int depth = 0;
    int parent_action = -1;

    SearchNode() { child.fill(-1); }
};

class SearchTree {
public:
    SearchTree(GameState root_state, int agent_id);

    const SearchNode& node(int index) const { return nodes_[static_cast<std::size_t>(index)]; }
    SearchNode& node(int index) { return nodes_[static_cast<std::size_t>(index)]; }
    std::size_t size() const { return nodes_.size(); }
    int agent_id() const { return agent_id_; }

    /// Expands `action` from node `parent` with the opponent move supplied.
    int expand(int parent, Action action, Action opponent_action);

    /// Child action maximizing ucb_score; actions never visited come first.
    Action select(int index, double c) const;

    /// Adds one visit and the undiscounted value to every (node, action) edge.
    void backpropagate(const std::vector<std::pair<int, Action>>& path, double value);

    /// One line per node, depth-first: depth, action from parent, n, Q of the incoming edge.
    std::string dump() const;

private:
    std::vector<SearchNode> nodes_;
    int agent_id_;
};

struct PlanResult {
    Action action = Action::Stop;
    std::array<int, kNumActions> visit_counts{};
    std::array<double, kNumActions> q_values{};
    std::size_t tree_size = 0;
};

/// net is required iff config.rollout_policy == NetworkBiased.
PlanResult plan(const GameState& state, int agent_id, const PlannerConfig& config, const NetworkParams* net,
                std::uint64_t seed, std::string* tree_dump = nullptr);

/// Simulates up to depth ticks: the planning agent follows the rollout policy
/// (uniform over all six actions, or sampled from the network), the opponent
/// acts uniformly at random. Returns the terminal reward for agent_id, or 0 at
/// the depth cutoff.
double run_rollout(const GameState& state, int agent_id, int depth, RolloutPolicy policy, const NetworkParams* net,
                   Rng& rng);
double run_rollout(const GameState& state, int agent_id, int depth, RolloutPolicy policy, const NetworkParams* net,
                   std::uint64_t seed);

/// +1 / -1 from agent_id's point of view on a terminal state (ties are -1).
double terminal_value(const GameState& state, int agent_id);

}  // namespace pia3c
