#include "pia3c/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "pia3c/rng.hpp"

namespace pia3c {

namespace {

constexpr std::array<std::string_view, kNumActions> kActionNames = {"Stop", "Up",   "Down",
                                                                    "Left", "Right", "Bomb"};

constexpr std::array<Action, 4> kMoves = {Action::Up, Action::Down, Action::Left, Action::Right};

void check_agent_id(int agent_id) {
    if (agent_id < 0 || agent_id >= kNumAgents) {
        throw ContractViolation("agent id out of range: " + std::to_string(agent_id));
    }
}

}  // namespace

std::string_view action_name(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

std::optional<Action> parse_action(std::string_view text) {
    for (int i = 0; i < kNumActions; ++i) {
        if (text == kActionNames[static_cast<std::size_t>(i)]) return static_cast<Action>(i);
    }
    if (text.size() == 1 && text[0] >= '0' && text[0] < '0' + kNumActions) {
        return static_cast<Action>(text[0] - '0');
    }
    return std::nullopt;
}

bool is_move(Action a) {
    return a == Action::Up || a == Action::Down || a == Action::Left || a == Action::Right;
}

Pos offset(Pos p, Action a) {
    switch (a) {
        case Action::Up: return {p.row - 1, p.col};
        case Action::Down: return {p.row + 1, p.col};
        case Action::Left: return {p.row, p.col - 1};
        case Action::Right: return {p.row, p.col + 1};
        default: return p;
    }
}

const Bomb* GameState::bomb_at(Pos p) const {
    for (const auto& b : bombs) {
        if (b.pos == p) return &b;
    }
    return nullptr;
}

const Flame* GameState::flame_at(Pos p) const {
    for (const auto& f : flames) {
        if (f.pos == p) return &f;
    }
    return nullptr;
}

std::optional<int> GameState::agent_at(Pos p) const {
    for (const auto& a : agents) {
        if (a.alive && a.pos == p) return a.id;
    }
    return std::nullopt;
}

bool is_passage(const GameState& s, Pos p) {
    return s.in_bounds(p) && s.at(p).kind == CellKind::Passage;
}

GameState empty_board(int size, Pos agent0, Pos agent1, GameRules rules) {
    GameState s;
    s.size = size;
    s.grid.assign(static_cast<std::size_t>(size * size), Cell{});
    s.rules = rules;
    s.agents[0] = AgentState{.id = 0, .pos = agent0};
    s.agents[1] = AgentState{.id = 1, .pos = agent1};
    return s;
}

bool agents_connected(const GameState& s) {
    std::vector<char> seen(s.grid.size(), 0);
    std::deque<Pos> frontier{s.agents[0].pos};
    seen[static_cast<std::size_t>(s.index(s.agents[0].pos))] = 1;
    while (!frontier.empty()) {
        const Pos p = frontier.front();
        frontier.pop_front();
        if (p == s.agents[1].pos) return true;
        for (Action m : kMoves) {
            const Pos q = offset(p, m);
            if (!s.in_bounds(q) || s.at(q).kind == CellKind::Rigid) continue;
            auto& flag = seen[static_cast<std::size_t>(s.index(q))];
            if (flag) continue;
            flag = 1;
            frontier.push_back(q);
        }
    }
    return false;
}

GameState generate_board(std::uint64_t seed, int size, const BoardDensity& density,
                         const GameRules& rules, int max_attempts) {
    if (size < 5) throw ContractViolation("board size must be at least 5");
    auto in_unit = [](double d) { return d >= 0.0 && d <= 1.0; };
    if (!in_unit(density.wood_density) || !in_unit(density.rigid_density) || density.n_powerups < 0) {
        throw ContractViolation("board densities must lie in [0, 1]");
    }

    const int last = size - 1;
    const std::array<Pos, 4> corners = {Pos{0, 0}, Pos{0, last}, Pos{last, 0}, Pos{last, last}};
    std::vector<char> reserved(static_cast<std::size_t>(size * size), 0);
    for (const Pos c : corners) {
        reserved[static_cast<std::size_t>(c.row * size + c.col)] = 1;
        const int dr = c.row == 0 ? 1 : -1;
        const int dc = c.col == 0 ? 1 : -1;
        reserved[static_cast<std::size_t>((c.row + dr) * size + c.col)] = 1;
        reserved[static_cast<std::size_t>(c.row * size + c.col + dc)] = 1;
    }

    Rng rng(seed);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const auto first = static_cast<int>(rng.below(4));
        auto second = static_cast<int>(rng.below(3));
        if (second >= first) ++second;

        GameState s = empty_board(size, corners[static_cast<std::size_t>(first)],
                                  corners[static_cast<std::size_t>(second)], rules);
        s.seed = seed;

        // Walls and wood go on interior cells only; the border stays open.
        std::vector<int> eligible;
        for (int r = 1; r < last; ++r) {
            for (int c = 1; c < last; ++c) {
                if (!reserved[static_cast<std::size_t>(r * size + c)]) eligible.push_back(r * size + c);
            }
        }
        for (std::size_t i = eligible.size(); i > 1; --i) {
            std::swap(eligible[i - 1], eligible[rng.below(i)]);
        }

        const auto n_eligible = static_cast<int>(eligible.size());
        const int n_rigid = static_cast<int>(std::lround(density.rigid_density * n_eligible));
        const int n_wood = static_cast<int>(std::lround(density.wood_density * n_eligible));
        if (n_rigid + n_wood > n_eligible) {
            throw GenerationError("rigid and wood densities exceed the interior (" +
                                  std::to_string(n_rigid + n_wood) + " > " + std::to_string(n_eligible) +
                                  " cells)");
        }
        const int n_items = std::min(density.n_powerups, n_wood);
        for (int i = 0; i < n_rigid; ++i) {
            s.grid[static_cast<std::size_t>(eligible[static_cast<std::size_t>(i)])].kind = CellKind::Rigid;
        }
        for (int i = 0; i < n_wood; ++i) {
            auto& cell = s.grid[static_cast<std::size_t>(eligible[static_cast<std::size_t>(n_rigid + i)])];
            cell.kind = CellKind::Wood;
            if (i < n_items) cell.hidden_item = static_cast<Item>(rng.below(3));
        }
        if (agents_connected(s)) return s;
    }
    throw GenerationError("could not generate a connected board after " +
                          std::to_string(max_attempts) + " attempts (seed " +
                          std::to_string(seed) + ")");
}

std::vector<Pos> flame_cross(const GameState& s, Pos pos, int blast_strength) {
    std::vector<Pos> cells{pos};
    for (Action m : kMoves) {
        Pos p = pos;
        for (int r = 1; r < blast_strength; ++r) {
            p = offset(p, m);
            if (!s.in_bounds(p)) break;
            const CellKind k = s.at(p).kind;
            if (k == CellKind::Rigid) break;
            cells.push_back(p);
            if (k == CellKind::Wood) break;
        }
    }
    return cells;
}

StepResult step(const GameState& state, std::array<Action, kNumAgents> actions) {
    if (state.is_terminal()) throw ContractViolation("step called on a terminal state");

    GameState n = state;

    // (b) simultaneous movement
    std::array<Pos, kNumAgents> target{};
    std::array<bool, kNumAgents> moving{};
    std::array<bool, kNumAgents> kicking{};
    for (int i = 0; i < kNumAgents; ++i) {
        const AgentState& a = n.agents[static_cast<std::size_t>(i)];
        target[static_cast<std::size_t>(i)] = a.pos;
        const Action act = actions[static_cast<std::size_t>(i)];
        if (!a.alive || !is_move(act)) continue;
        const Pos t = offset(a.pos, act);
        if (!is_passage(n, t)) continue;
        if (n.bomb_at(t) != nullptr) {
            if (!(n.rules.kick_enabled && a.can_kick)) continue;
            const Pos beyond = offset(t, act);
            if (!is_passage(n, beyond) || n.bomb_at(beyond) || n.agent_at(beyond)) continue;
            kicking[static_cast<std::size_t>(i)] = true;
        }
        target[static_cast<std::size_t>(i)] = t;
        moving[static_cast<std::size_t>(i)] = true;
    }
    auto bounce = [&](int i) {
        moving[static_cast<std::size_t>(i)] = false;
        kicking[static_cast<std::size_t>(i)] = false;
        target[static_cast<std::size_t>(i)] = n.agents[static_cast<std::size_t>(i)].pos;
    };
    if (moving[0] && moving[1]) {
        const bool same_cell = target[0] == target[1];
        const bool swap = target[0] == n.agents[1].pos && target[1] == n.agents[0].pos;
        if (same_cell || swap) {
            bounce(0);
            bounce(1);
        }
    }
    // A mover cannot enter a cell whose occupant ends up staying.
    for (int pass = 0; pass < kNumAgents; ++pass) {
        for (int i = 0; i < kNumAgents; ++i) {
            const int j = 1 - i;
            if (moving[static_cast<std::size_t>(i)] && !moving[static_cast<std::size_t>(j)] &&
                n.agents[static_cast<std::size_t>(j)].alive &&
                target[static_cast<std::size_t>(i)] == n.agents[static_cast<std::size_t>(j)].pos) {
                bounce(i);
            }
        }
    }
    for (int i = 0; i < kNumAgents; ++i) {
        auto& a = n.agents[static_cast<std::size_t>(i)];
        if (kicking[static_cast<std::size_t>(i)]) {
            for (auto& b : n.bombs) {
                if (b.pos == target[static_cast<std::size_t>(i)]) b.velocity = actions[static_cast<std::size_t>(i)];
            }
        }
        a.pos = target[static_cast<std::size_t>(i)];
    }

    // (c) bomb placement
    for (int i = 0; i < kNumAgents; ++i) {
        auto& a = n.agents[static_cast<std::size_t>(i)];
        if (!a.alive || actions[static_cast<std::size_t>(i)] != Action::Bomb) continue;
        if (a.ammo <= 0 || n.bomb_at(a.pos) != nullptr) continue;
        n.bombs.push_back(Bomb{.pos = a.pos, .timer = kBombTimer, .blast_strength = a.blast_strength,
                               .owner = i, .velocity = std::nullopt});
        --a.ammo;
    }

    // (d) kicked bombs slide one cell
    for (auto& b : n.bombs) {
        if (!b.velocity) continue;
        const Pos t = offset(b.pos, *b.velocity);
        if (is_passage(n, t) && n.bomb_at(t) == nullptr && !n.agent_at(t)) {
            b.pos = t;
        } else {
            b.velocity.reset();
        }
    }

    // (e) timers
    for (auto& b : n.bombs) --b.timer;

    // (f) explosions, chained through bombs caught in any flame
    const auto cells = static_cast<std::size_t>(n.size * n.size);
    std::vector<std::uint8_t> new_flame(cells, 0);
    std::vector<char> burning(cells, 0);
    for (const auto& f : n.flames) burning[static_cast<std::size_t>(n.index(f.pos))] = 1;
    std::vector<char> exploded(n.bombs.size(), 0);
    std::deque<std::size_t> pending;
    for (std::size_t k = 0; k < n.bombs.size(); ++k) {
        if (n.bombs[k].timer <= 0 || burning[static_cast<std::size_t>(n.index(n.bombs[k].pos))]) {
            exploded[k] = 1;
            pending.push_back(k);
        }
    }
    std::vector<Pos> destroyed_wood;
    while (!pending.empty()) {
        const Bomb& b = n.bombs[pending.front()];
        pending.pop_front();
        for (const Pos p : flame_cross(n, b.pos, b.blast_strength)) {
            const auto idx = static_cast<std::size_t>(n.index(p));
            new_flame[idx] |= static_cast<std::uint8_t>(1u << b.owner);
            if (n.at(p).kind == CellKind::Wood) destroyed_wood.push_back(p);
            for (std::size_t k = 0; k < n.bombs.size(); ++k) {
                if (!exploded[k] && n.bombs[k].pos == p) {
                    exploded[k] = 1;
                    pending.push_back(k);
                }
            }
        }
    }
    for (const Pos p : destroyed_wood) {
        Cell& c = n.at(p);
        if (c.kind != CellKind::Wood) continue;
        c.kind = CellKind::Passage;
        c.visible_item = c.hidden_item;
        c.hidden_item.reset();
    }
    {
        std::vector<Bomb> live;
        for (std::size_t k = 0; k < n.bombs.size(); ++k) {
            if (exploded[k]) {
                ++n.agents[static_cast<std::size_t>(n.bombs[k].owner)].ammo;
            } else {
                live.push_back(n.bombs[k]);
            }
        }
        n.bombs = std::move(live);
    }

    // (g) flames age, then new flames spawn
    {
        std::vector<Flame> kept;
        for (auto f : n.flames) {
            if (--f.lifetime > 0) kept.push_back(f);
        }
        n.flames = std::move(kept);
        for (int r = 0; r < n.size; ++r) {
            for (int c = 0; c < n.size; ++c) {
                const std::uint8_t owners = new_flame[static_cast<std::size_t>(r * n.size + c)];
                if (!owners) continue;
                auto it = std::find_if(n.flames.begin(), n.flames.end(),
                                       [&](const Flame& f) { return f.pos == Pos{r, c}; });
                if (it != n.flames.end()) {
                    it->lifetime = kFlameLifetime;
                    it->owners |= owners;
                } else {
                    n.flames.push_back(Flame{.pos = {r, c}, .lifetime = kFlameLifetime, .owners = owners});
                }
            }
        }
    }

    // (h) deaths, then pickups
    for (auto& a : n.agents) {
        if (!a.alive) continue;
        if (const Flame* f = n.flame_at(a.pos)) {
            a.alive = false;
            n.last_death_cause[static_cast<std::size_t>(a.id)] =
                (f->owners & (1u << a.id)) ? DeathCause::OwnBomb : DeathCause::OpponentBomb;
        }
    }
    for (auto& a : n.agents) {
        if (!a.alive) continue;
        Cell& c = n.at(a.pos);
        if (!c.visible_item) continue;
        switch (*c.visible_item) {
            case Item::ExtraAmmo: ++a.ammo; break;
            case Item::BlastRadius: ++a.blast_strength; break;
            case Item::Kick: a.can_kick = true; break;
        }
        c.visible_item.reset();
    }

    ++n.tick;

    StepResult result;
    const bool dead0 = !n.agents[0].alive;
    const bool dead1 = !n.agents[1].alive;
    if (dead0 && dead1) {
        n.terminal = Outcome::Tie;
    } else if (dead1) {
        n.terminal = Outcome::Agent0Wins;
    } else if (dead0) {
        n.terminal = Outcome::Agent1Wins;
    } else if (n.tick >= n.rules.max_ticks) {
        n.terminal = Outcome::Tie;
    }
    if (n.terminal) {
        result.done = true;
        switch (*n.terminal) {
            case Outcome::Agent0Wins: result.rewards = {1.0, -1.0}; break;
            case Outcome::Agent1Wins: result.rewards = {-1.0, 1.0}; break;
            case Outcome::Tie: result.rewards = {-1.0, -1.0}; break;
        }
    }
    result.next = std::move(n);
    return result;
}

std::vector<Action> legal_actions(const GameState& state, int agent_id) {
    check_agent_id(agent_id);
    const AgentState& a = state.agents[static_cast<std::size_t>(agent_id)];
    std::vector<Action> out;
    if (!a.alive) return out;
    out.push_back(Action::Stop);
    for (Action m : kMoves) {
        const Pos t = offset(a.pos, m);
        if (!is_passage(state, t)) continue;
        if (state.bomb_at(t) && !(state.rules.kick_enabled && a.can_kick)) continue;
        out.push_back(m);
    }
    if (a.ammo > 0 && state.bomb_at(a.pos) == nullptr) out.push_back(Action::Bomb);
    return out;
}

Observation encode_observation(const GameState& state, int agent_id) {
    check_agent_id(agent_id);
    const int n = state.size;
    Observation obs;
    obs.size = n;
    obs.data.assign(static_cast<std::size_t>(kObservationChannels * n * n), 0.0);
    auto plane = [&](int ch, Pos p) -> double& {
        return obs.data[static_cast<std::size_t>((ch * n + p.row) * n + p.col)];
    };
    auto fill = [&](int ch, double v) {
        std::fill_n(obs.data.begin() + static_cast<std::ptrdiff_t>(ch * n * n), n * n, v);
    };

    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const Pos p{r, c};
            const Cell& cell = state.at(p);
            plane(static_cast<int>(cell.kind), p) = 1.0;
            if (cell.visible_item) plane(channel::kItemFirst + static_cast<int>(*cell.visible_item), p) = 1.0;
        }
    }
    for (const auto& b : state.bombs) {
        plane(channel::kBombTimer, b.pos) = b.timer / static_cast<double>(kBombTimer);
        plane(channel::kBombStrength, b.pos) = b.blast_strength;
    }
    for (const auto& f : state.flames) {
        plane(channel::kFlame, f.pos) = 1.0;
        plane(channel::kFlameLife, f.pos) = f.lifetime / static_cast<double>(kFlameLifetime);
    }

    // Slot 0 is always the observing agent.
    std::array<int, kNumAgents> order{agent_id, 1 - agent_id};
    for (int slot = 0; slot < kNumAgents; ++slot) {
        const AgentState& a = state.agents[static_cast<std::size_t>(order[static_cast<std::size_t>(slot)])];
        if (a.alive) plane(channel::kAgentFirst + slot, a.pos) = 1.0;
        const int base = channel::kAbilityFirst + 3 * slot;
        fill(base, a.ammo / 8.0);
        fill(base + 1, a.blast_strength / 8.0);
        fill(base + 2, a.can_kick ? 1.0 : 0.0);
    }
    const AgentState& self = state.agents[static_cast<std::size_t>(agent_id)];
    if (self.alive) plane(channel::kSelfCopy, self.pos) = 1.0;
    fill(channel::kTick, state.tick / 800.0);
    return obs;
}

}  // namespace pia3c
