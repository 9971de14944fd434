#include "pia3c/rule_based.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

#include "pia3c/rng.hpp"

namespace pia3c {

namespace {

constexpr std::array<Action, 4> kMoves = {Action::Up, Action::Down, Action::Left, Action::Right};

// For each cell, the step offsets (relative to now) at which it holds a flame.
struct DangerMap {
    int size = 0;
    std::vector<std::vector<int>> times;

    const std::vector<int>& at(Pos p) const { return times[static_cast<std::size_t>(p.row * size + p.col)]; }

    bool burning(Pos p, int t) const {
        const auto& ts = at(p);
        return std::find(ts.begin(), ts.end(), t) != ts.end();
    }
    bool threatened_from(Pos p, int t) const {
        for (int x : at(p)) {
            if (x >= t) return true;
        }
        return false;
    }
};

DangerMap build_danger(const GameState& s) {
    DangerMap d;
    d.size = s.size;
    d.times.assign(static_cast<std::size_t>(s.size * s.size), {});
    for (const auto& f : s.flames) {
        for (int t = 0; t < f.lifetime; ++t) d.times[static_cast<std::size_t>(s.index(f.pos))].push_back(t);
    }
    // Chains: a bomb inside another bomb's cross explodes no later than it.
    std::vector<int> when(s.bombs.size());
    std::vector<std::vector<Pos>> cross(s.bombs.size());
    for (std::size_t i = 0; i < s.bombs.size(); ++i) {
        when[i] = std::max(1, s.bombs[i].timer);
        cross[i] = flame_cross(s, s.bombs[i].pos, s.bombs[i].blast_strength);
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < s.bombs.size(); ++i) {
            for (std::size_t j = 0; j < s.bombs.size(); ++j) {
                if (i == j || when[j] >= when[i]) continue;
                if (std::find(cross[j].begin(), cross[j].end(), s.bombs[i].pos) != cross[j].end()) {
                    when[i] = when[j];
                    changed = true;
                }
            }
        }
    }
    for (std::size_t i = 0; i < s.bombs.size(); ++i) {
        for (const Pos p : cross[i]) {
            auto& ts = d.times[static_cast<std::size_t>(s.index(p))];
            for (int t = when[i]; t < when[i] + kFlameLifetime; ++t) ts.push_back(t);
        }
    }
    return d;
}

bool walkable(const GameState& s, Pos p, Pos self) {
    if (!is_passage(s, p)) return false;
    if (p == self) return true;
    if (s.bomb_at(p)) return false;
    return !s.agent_at(p).has_value();
}

// Dijkstra over the time-expanded grid; returns the first action of the
// shortest route to a cell satisfying goal, or nullopt when none exists.
std::optional<Action> shortest_first_action(const GameState& s, Pos start, const DangerMap& danger,
                                            const std::function<bool(Pos, int)>& goal, Rng& rng,
                                            int horizon, int clamp) {
    struct Node {
        int dist;
        int order;
        Pos pos;
        Action first;
    };
    auto cmp = [](const Node& a, const Node& b) {
        return a.dist != b.dist ? a.dist > b.dist : a.order > b.order;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);
    const int n = s.size;
    // Beyond `clamp` the danger map is empty, so time no longer distinguishes states.
    std::vector<char> closed(static_cast<std::size_t>(n * n * (clamp + 1)), 0);
    auto key = [&](Pos p, int t) {
        return static_cast<std::size_t>((std::min(t, clamp) * n + p.row) * n + p.col);
    };
    int order = 0;
    open.push({0, order++, start, Action::Stop});
    while (!open.empty()) {
        const Node cur = open.top();
        open.pop();
        if (closed[key(cur.pos, cur.dist)]) continue;
        closed[key(cur.pos, cur.dist)] = 1;
        if (goal(cur.pos, cur.dist)) return cur.first;
        if (cur.dist >= horizon) continue;
        std::array<Action, 5> options = {Action::Up, Action::Down, Action::Left, Action::Right, Action::Stop};
        for (std::size_t i = 3; i > 0; --i) std::swap(options[i], options[rng.below(i + 1)]);
        for (Action a : options) {
            const Pos q = offset(cur.pos, a);
            const int t = cur.dist + 1;
            if (a == Action::Stop && cur.dist >= clamp) continue;
            if (a != Action::Stop && !walkable(s, q, start)) continue;
            if (danger.burning(q, t)) continue;
            if (closed[key(q, t)]) continue;
            open.push({t, order++, q, cur.dist == 0 ? a : cur.first});
        }
    }
    return std::nullopt;
}

int danger_horizon(const GameState& s) {
    int h = kFlameLifetime + 1;
    for (const auto& b : s.bombs) h = std::max(h, b.timer + kFlameLifetime + 1);
    return std::min(h, kBombTimer + kFlameLifetime + 1);
}

std::optional<Action> escape_action(const GameState& s, int agent_id, Rng& rng) {
    const DangerMap danger = build_danger(s);
    const Pos start = s.agents[static_cast<std::size_t>(agent_id)].pos;
    return shortest_first_action(
        s, start, danger, [&](Pos p, int t) { return !danger.threatened_from(p, t); }, rng,
        danger_horizon(s), danger_horizon(s));
}

bool can_bomb_safely(const GameState& s, int agent_id) {
    const AgentState& self = s.agents[static_cast<std::size_t>(agent_id)];
    if (self.ammo <= 0 || s.bomb_at(self.pos)) return false;
    GameState hypo = s;
    hypo.bombs.push_back(Bomb{.pos = self.pos, .timer = kBombTimer - 1,
                              .blast_strength = self.blast_strength, .owner = agent_id});
    return has_escape(hypo, agent_id);
}

}  // namespace

bool has_escape(const GameState& state, int agent_id) {
    Rng rng(0);
    return escape_action(state, agent_id, rng).has_value();
}

Action rule_based_policy(const GameState& state, int agent_id, std::uint64_t rng_seed) {
    if (agent_id < 0 || agent_id >= kNumAgents) throw ContractViolation("agent id out of range");
    const AgentState& self = state.agents[static_cast<std::size_t>(agent_id)];
    if (!self.alive || state.is_terminal()) return Action::Stop;
    Rng rng(rng_seed);

    const DangerMap danger = build_danger(state);
    const int horizon = danger_horizon(state);

    // 1. evade
    if (danger.threatened_from(self.pos, 0)) {
        auto a = shortest_first_action(
            state, self.pos, danger, [&](Pos p, int t) { return !danger.threatened_from(p, t); }, rng,
            horizon, horizon);
        return a.value_or(Action::Stop);
    }

    auto safe_move = [&](Action a) {
        if (!is_move(a)) return a;
        return danger.threatened_from(offset(self.pos, a), 1) ? Action::Stop : a;
    };

    // 2. attack
    const AgentState& other = state.agents[static_cast<std::size_t>(1 - agent_id)];
    if (other.alive) {
        const auto cross = flame_cross(state, self.pos, self.blast_strength);
        if (std::find(cross.begin(), cross.end(), other.pos) != cross.end() &&
            can_bomb_safely(state, agent_id)) {
            return Action::Bomb;
        }
    }

    const int travel_horizon = horizon + 2 * state.size * state.size;

    // 3a. power-ups
    auto to_item = shortest_first_action(
        state, self.pos, danger,
        [&](Pos p, int t) {
            return t > 0 && state.at(p).visible_item.has_value() && !danger.threatened_from(p, t);
        },
        rng, travel_horizon, horizon);
    if (to_item) return safe_move(*to_item);

    // 3b. wood
    auto next_to_wood = [&](Pos p) {
        for (Action m : kMoves) {
            const Pos q = offset(p, m);
            if (state.in_bounds(q) && state.at(q).kind == CellKind::Wood) return true;
        }
        return false;
    };
    if (next_to_wood(self.pos)) {
        return can_bomb_safely(state, agent_id) ? Action::Bomb : Action::Stop;
    }
    auto to_wood = shortest_first_action(
        state, self.pos, danger,
        [&](Pos p, int t) { return t > 0 && next_to_wood(p) && !danger.threatened_from(p, t); }, rng,
        travel_horizon, horizon);
    if (to_wood) return safe_move(*to_wood);
    return Action::Stop;
}

}  // namespace pia3c
