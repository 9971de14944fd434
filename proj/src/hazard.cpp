#include "pia3c/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <deque>
#include <iomanip>
#include <sstream>

namespace pia3c {

namespace {

constexpr std::array<Action, 5> kWalkActions = {Action::Stop, Action::Up, Action::Down, Action::Left,
                                                Action::Right};

const Bomb* validate(const HazardQuery& q) {
    const GameState& s = q.state;
    if (q.horizon < 1) throw ContractViolation("hazard horizon must be at least 1");
    if (q.agent_id < 0 || q.agent_id >= kNumAgents) throw ContractViolation("agent id out of range");
    const AgentState& a = s.agents[static_cast<std::size_t>(q.agent_id)];
    if (!a.alive) throw ContractViolation("hazard query on a dead agent");
    const Bomb* own = nullptr;
    int own_count = 0;
    for (const auto& b : s.bombs) {
        if (b.owner == q.agent_id) {
            own = &b;
            ++own_count;
        } else if (q.static_world) {
            throw ContractViolation("static-world hazard query with another agent's bomb on the board");
        }
        if (q.static_world && b.velocity) throw ContractViolation("static-world hazard query with a moving bomb");
    }
    if (own_count > 1) throw ContractViolation("hazard query expects at most one live bomb for the agent");
    if (q.require_bomb && own_count != 1) throw ContractViolation("hazard query expects the agent's live bomb");
    return own;
}

template <typename Mass>
std::vector<Mass> propagate(const GameState& s, int agent_id, int horizon, const Bomb* own) {
    const int n = s.size;
    const Pos other = s.agents[static_cast<std::size_t>(1 - agent_id)].pos;
    const bool other_alive = s.agents[static_cast<std::size_t>(1 - agent_id)].alive;
    auto open = [&](Pos p) {
        if (!is_passage(s, p)) return false;
        if (other_alive && p == other) return false;
        if (const Bomb* b = s.bomb_at(p); b && b != own) return false;
        return true;
    };
    // Precomputed successor of every (cell, action).
    std::vector<std::array<int, 5>> next(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            for (std::size_t k = 0; k < kWalkActions.size(); ++k) {
                const Pos q = offset({r, c}, kWalkActions[k]);
                next[static_cast<std::size_t>(r * n + c)][k] = open(q) ? s.index(q) : r * n + c;
            }
        }
    }
    std::vector<Mass> cur(static_cast<std::size_t>(n * n), Mass{0});
    cur[static_cast<std::size_t>(s.index(s.agents[static_cast<std::size_t>(agent_id)].pos))] = Mass{1};
    for (int t = 0; t < horizon; ++t) {
        std::vector<Mass> nxt(cur.size(), Mass{0});
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cur[i] == Mass{0}) continue;
            for (int j : next[i]) {
                if constexpr (std::is_floating_point_v<Mass>) {
                    nxt[static_cast<std::size_t>(j)] += cur[i] / 5.0;
                } else {
                    nxt[static_cast<std::size_t>(j)] += cur[i];
                }
            }
        }
        cur = std::move(nxt);
    }
    return cur;
}

}  // namespace

HazardResult survival_distribution(const HazardQuery& q) {
    const Bomb* own = validate(q);
    const GameState& s = q.state;
    HazardResult out;
    out.size = s.size;
    out.horizon = q.horizon;
    out.flame_mask.assign(static_cast<std::size_t>(s.size * s.size), 0);
    if (own) {
        for (const Pos p : flame_cross(s, own->pos, own->blast_strength)) {
            out.flame_mask[static_cast<std::size_t>(s.index(p))] = 1;
        }
    }

    if (q.horizon <= kMaxExactHorizon) {
        out.path_counts = propagate<std::uint64_t>(s, q.agent_id, q.horizon, own);
        out.total_paths = 1;
        for (int t = 0; t < q.horizon; ++t) out.total_paths *= 5;
        const auto total = static_cast<double>(out.total_paths);
        out.position_distribution.reserve(out.path_counts.size());
        std::uint64_t dead = 0;
        for (std::size_t i = 0; i < out.path_counts.size(); ++i) {
            out.position_distribution.push_back(static_cast<double>(out.path_counts[i]) / total);
            if (out.flame_mask[i]) dead += out.path_counts[i];
        }
        out.suicide_probability = static_cast<double>(dead) / total;
    } else {
        out.position_distribution = propagate<double>(s, q.agent_id, q.horizon, own);
        for (std::size_t i = 0; i < out.position_distribution.size(); ++i) {
            if (out.flame_mask[i]) out.suicide_probability += out.position_distribution[i];
        }
    }
    return out;
}

double suicide_probability(const HazardQuery& query) { return survival_distribution(query).suicide_probability; }

double survival_after_bombs(double p_suicide, int b) {
    if (p_suicide < 0.0 || p_suicide > 1.0 || b < 0) {
        throw ContractViolation("survival_after_bombs expects p in [0, 1] and b >= 0");
    }
    return std::pow(1.0 - p_suicide, b);
}

HazardQuery bomb_placement_query(const GameState& state, int agent_id, int horizon) {
    if (agent_id < 0 || agent_id >= kNumAgents) throw ContractViolation("agent id out of range");
    HazardQuery q;
    q.state = state;
    q.agent_id = agent_id;
    q.horizon = horizon;
    AgentState& a = q.state.agents[static_cast<std::size_t>(agent_id)];
    if (q.state.bomb_at(a.pos)) throw ContractViolation("cell already holds a bomb");
    q.state.bombs.push_back(Bomb{.pos = a.pos, .timer = kBombTimer - 1, .blast_strength = a.blast_strength,
                                 .owner = agent_id});
    a.ammo = std::max(0, a.ammo - 1);
    return q;
}

GameState corridor_scenario(int length, int bomb_strength) {
    if (length < 2) throw ContractViolation("corridor length must be at least 2");
    if (bomb_strength < 1) throw ContractViolation("bomb strength must be positive");
    const int size = std::max(length + 1, 5);
    const int row = size - 1;
    GameState s = empty_board(size, {row, 0}, {0, size - 1});
    for (auto& c : s.grid) c.kind = CellKind::Wood;
    for (int col = 0; col < length - 1; ++col) s.at({row, col}).kind = CellKind::Passage;
    s.at({row - 1, length - 2}).kind = CellKind::Passage;
    s.at({0, size - 1}).kind = CellKind::Passage;
    s.agents[0].ammo = 0;
    s.agents[0].blast_strength = bomb_strength;
    s.bombs.push_back(Bomb{.pos = {row, 0}, .timer = kBombTimer - 1, .blast_strength = bomb_strength, .owner = 0});
    return s;
}

std::vector<int> evasion_steps(const GameState& s, Pos bomb, int blast_strength) {
    const int n = s.size;
    std::vector<char> in_cross(static_cast<std::size_t>(n * n), 0);
    for (const Pos p : flame_cross(s, bomb, blast_strength)) in_cross[static_cast<std::size_t>(s.index(p))] = 1;
    std::vector<int> dist(static_cast<std::size_t>(n * n), -1);
    std::deque<Pos> frontier;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (is_passage(s, {r, c}) && !in_cross[static_cast<std::size_t>(r * n + c)]) {
                dist[static_cast<std::size_t>(r * n + c)] = 0;
                frontier.push_back({r, c});
            }
        }
    }
    // Multi-source BFS backwards from every safe cell; moves are symmetric.
    while (!frontier.empty()) {
        const Pos p = frontier.front();
        frontier.pop_front();
        for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right}) {
            const Pos q = offset(p, a);
            if (!is_passage(s, q) || dist[static_cast<std::size_t>(s.index(q))] >= 0) continue;
            dist[static_cast<std::size_t>(s.index(q))] = dist[static_cast<std::size_t>(s.index(p))] + 1;
            frontier.push_back(q);
        }
    }
    return dist;
}

std::string hazard_heatmap_csv(const HazardResult& result, const GameState& state) {
    std::ostringstream out;
    out << std::setprecision(6) << std::fixed;
    for (int r = 0; r < result.size; ++r) {
        for (int c = 0; c < result.size; ++c) {
            if (c) out << ',';
            const Pos p{r, c};
            if (!is_passage(state, p)) {
                out << '#';
                continue;
            }
            out << result.probability(p);
            if (result.flamed(p)) out << '*';
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace pia3c
