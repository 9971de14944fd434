#include "pia3c/planner.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "pia3c/rng.hpp"

namespace pia3c {

namespace {

Action random_action(Rng& rng) { return static_cast<Action>(rng.below(kNumActions)); }

Action sample_policy(const PolicyVector& p, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return static_cast<Action>(i);
    }
    return static_cast<Action>(p.size() - 1);
}

std::array<Action, kNumAgents> joint(int agent_id, Action self, Action other) {
    std::array<Action, kNumAgents> a{};
    a[static_cast<std::size_t>(agent_id)] = self;
    a[static_cast<std::size_t>(1 - agent_id)] = other;
    return a;
}

}  // namespace

void validate(const PlannerConfig& config) {
    if (config.n_rollouts < 1) throw ContractViolation("planner needs at least one rollout");
    if (config.rollout_depth < 1) throw ContractViolation("rollout depth must be at least 1");
    if (!(config.exploration_c >= 0.0)) throw ContractViolation("exploration constant must be non-negative");
}

double ucb_score(double q, double n_parent, double n_child, double c) {
    if (n_parent < 1.0) throw ContractViolation("ucb_score needs n_parent >= 1");
    if (n_child <= 0.0) return std::numeric_limits<double>::infinity();
    return q + c * std::sqrt(std::log(n_parent) / n_child);
}

double terminal_value(const GameState& state, int agent_id) {
    if (!state.terminal) return 0.0;
    switch (*state.terminal) {
        case Outcome::Agent0Wins: return agent_id == 0 ? 1.0 : -1.0;
        case Outcome::Agent1Wins: return agent_id == 1 ? 1.0 : -1.0;
        case Outcome::Tie: return -1.0;
    }
    return 0.0;
}

SearchTree::SearchTree(GameState root_state, int agent_id) : agent_id_(agent_id) {
    SearchNode root;
    root.untried = legal_actions(root_state, agent_id);
    root.state = std::move(root_state);
    root.visits = 1;
    nodes_.push_back(std::move(root));
}

int SearchTree::expand(int parent, Action action, Action opponent_action) {
    SearchNode child;
    child.state = step(node(parent).state, joint(agent_id_, action, opponent_action)).next;
    if (!child.state.is_terminal()) child.untried = legal_actions(child.state, agent_id_);
    child.visits = 1;
    child.depth = node(parent).depth + 1;
    child.parent_action = static_cast<int>(action);
    nodes_.push_back(std::move(child));
    const int index = static_cast<int>(nodes_.size() - 1);
    SearchNode& p = node(parent);
    p.child[static_cast<std::size_t>(action)] = index;
    std::erase(p.untried, action);
    return index;
}

Action SearchTree::select(int index, double c) const {
    const SearchNode& n = node(index);
    Action best = Action::Stop;
    double best_score = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t a = 0; a < kNumActions; ++a) {
        if (n.child[a] < 0) continue;
        const double s = ucb_score(n.q[a], n.visits, n.edge_visits[a], c);
        if (!found || s > best_score) {
            best = static_cast<Action>(a);
            best_score = s;
            found = true;
        }
    }
    if (!found) throw ContractViolation("select called on a node without children");
    return best;
}

void SearchTree::backpropagate(const std::vector<std::pair<int, Action>>& path, double value) {
    for (const auto& [index, action] : path) {
        SearchNode& n = node(index);
        const auto a = static_cast<std::size_t>(action);
        ++n.visits;
        ++n.edge_visits[a];
        n.q[a] += (value - n.q[a]) / n.edge_visits[a];
    }
}

std::string SearchTree::dump() const {
    std::ostringstream out;
    std::vector<std::pair<int, double>> stack{{0, 0.0}};
    while (!stack.empty()) {
        const auto [index, q] = stack.back();
        stack.pop_back();
        const SearchNode& n = node(index);
        out << n.depth << ' ' << (n.parent_action < 0 ? "root" : action_name(static_cast<Action>(n.parent_action)))
            << ' ' << n.visits << ' ' << q << '\n';
        for (std::size_t a = kNumActions; a-- > 0;) {
            if (n.child[a] >= 0) stack.emplace_back(n.child[a], n.q[a]);
        }
    }
    return out.str();
}

double run_rollout(const GameState& state, int agent_id, int depth, RolloutPolicy policy, const NetworkParams* net,
                   Rng& rng) {
    if (depth < 0) throw ContractViolation("rollout depth must be non-negative");
    if (policy == RolloutPolicy::NetworkBiased && net == nullptr) {
        throw ContractViolation("network-biased rollout without a network");
    }
    if (state.is_terminal()) return terminal_value(state, agent_id);
    GameState s = state;
    for (int d = 0; d < depth; ++d) {
        Action self = Action::Stop;
        if (policy == RolloutPolicy::NetworkBiased) {
            self = sample_policy(forward(*net, encode_observation(s, agent_id)).policy, rng);
        } else {
            self = random_action(rng);
        }
        const Action other = random_action(rng);
        s = step(s, joint(agent_id, self, other)).next;
        if (s.is_terminal()) return terminal_value(s, agent_id);
    }
    return 0.0;
}

double run_rollout(const GameState& state, int agent_id, int depth, RolloutPolicy policy, const NetworkParams* net,
                   std::uint64_t seed) {
    Rng rng(seed);
    return run_rollout(state, agent_id, depth, policy, net, rng);
}

PlanResult plan(const GameState& state, int agent_id, const PlannerConfig& config, const NetworkParams* net,
                std::uint64_t seed, std::string* tree_dump) {
    validate(config);
    if (state.is_terminal()) throw ContractViolation("plan called on a terminal state");
    if (agent_id < 0 || agent_id >= kNumAgents) throw ContractViolation("agent id out of range");
    if (!state.agents[static_cast<std::size_t>(agent_id)].alive) throw ContractViolation("plan for a dead agent");
    const bool biased = config.rollout_policy == RolloutPolicy::NetworkBiased;
    if (biased != (net != nullptr)) {
        throw ContractViolation("a network must be supplied exactly when rollouts are network-biased");
    }

    Rng rng(seed);
    SearchTree tree(state, agent_id);
    std::vector<std::pair<int, Action>> path;
    for (int it = 0; it < config.n_rollouts; ++it) {
        path.clear();
        int current = 0;
        double value = 0.0;
        while (true) {
            const SearchNode& n = tree.node(current);
            if (n.state.is_terminal()) {
                value = terminal_value(n.state, agent_id);
                break;
            }
            if (!n.untried.empty()) {
                const Action a = n.untried[rng.below(n.untried.size())];
                const Action other = random_action(rng);
                const int leaf = tree.expand(current, a, other);
                path.emplace_back(current, a);
                value = run_rollout(tree.node(leaf).state, agent_id, config.rollout_depth, config.rollout_policy, net,
                                    rng);
                break;
            }
            const Action a = tree.select(current, config.exploration_c);
            path.emplace_back(current, a);
            current = tree.node(current).child[static_cast<std::size_t>(a)];
        }
        tree.backpropagate(path, value);
    }

    PlanResult result;
    const SearchNode& root = tree.node(0);
    result.visit_counts = root.edge_visits;
    result.q_values = root.q;
    result.tree_size = tree.size();
    const int best = *std::max_element(root.edge_visits.begin(), root.edge_visits.end());
    std::vector<Action> ties;
    for (std::size_t a = 0; a < kNumActions; ++a) {
        if (root.edge_visits[a] == best && root.child[a] >= 0) ties.push_back(static_cast<Action>(a));
    }
    result.action = ties[rng.below(ties.size())];
    if (tree_dump) *tree_dump = tree.dump();
    return result;
}

}  // namespace pia3c
