#pragma once

// Independent reference implementations used to check the library. They share
// no code with the modules under test beyond the GameState data types.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "pia3c/engine.hpp"
#include "pia3c/net.hpp"
#include "pia3c/rng.hpp"

namespace oracle {

using pia3c::Action;
using pia3c::CellKind;
using pia3c::GameState;
using pia3c::Pos;

inline constexpr std::array<std::array<int, 2>, 5> kWalk = {{{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

/// Cells hit by a bomb: the bomb cell and strength-1 cells per direction,
/// halting before Rigid and after the first Wood.
inline std::vector<char> blast_mask(const GameState& s, Pos bomb, int strength) {
    std::vector<char> mask(static_cast<std::size_t>(s.size * s.size), 0);
    mask[static_cast<std::size_t>(bomb.row * s.size + bomb.col)] = 1;
    for (int d = 1; d < 5; ++d) {
        for (int k = 1; k < strength; ++k) {
            const int r = bomb.row + kWalk[d][0] * k;
            const int c = bomb.col + kWalk[d][1] * k;
            if (r < 0 || c < 0 || r >= s.size || c >= s.size) break;
            const CellKind kind = s.grid[static_cast<std::size_t>(r * s.size + c)].kind;
            if (kind == CellKind::Rigid) break;
            mask[static_cast<std::size_t>(r * s.size + c)] = 1;
            if (kind == CellKind::Wood) break;
        }
    }
    return mask;
}

struct Enumeration {
    std::vector<std::uint64_t> end_counts;  // row-major
    std::uint64_t total = 0;
    std::uint64_t fatal = 0;
};

/// Walks every one of the 5^horizon action strings of a uniformly random
/// agent in a frozen world and tallies where each one ends.
inline Enumeration enumerate_walks(const GameState& s, int agent, int horizon, Pos bomb, int strength) {
    const Pos other = s.agents[static_cast<std::size_t>(1 - agent)].pos;
    const bool other_alive = s.agents[static_cast<std::size_t>(1 - agent)].alive;
    auto open = [&](int r, int c) {
        if (r < 0 || c < 0 || r >= s.size || c >= s.size) return false;
        if (s.grid[static_cast<std::size_t>(r * s.size + c)].kind != CellKind::Passage) return false;
        return !(other_alive && other.row == r && other.col == c);
    };
    Enumeration e;
    e.end_counts.assign(static_cast<std::size_t>(s.size * s.size), 0);
    std::function<void(int, int, int)> walk = [&](int r, int c, int left) {
        if (left == 0) {
            ++e.end_counts[static_cast<std::size_t>(r * s.size + c)];
            ++e.total;
            return;
        }
        for (const auto& d : kWalk) {
            const int nr = r + d[0];
            const int nc = c + d[1];
            if (open(nr, nc)) walk(nr, nc, left - 1);
            else walk(r, c, left - 1);
        }
    };
    const Pos start = s.agents[static_cast<std::size_t>(agent)].pos;
    walk(start.row, start.col, horizon);
    const auto mask = blast_mask(s, bomb, strength);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) e.fatal += e.end_counts[i];
    }
    return e;
}

/// Actions of `agent` after which it survives the next two ticks whatever the
/// opponent does, given that it then picks its best reply.
inline std::vector<Action> two_ply_safe_actions(const GameState& s, int agent) {
    auto alive_after = [agent](const pia3c::StepResult& r) {
        return r.next.agents[static_cast<std::size_t>(agent)].alive;
    };
    auto joint = [agent](Action mine, Action theirs) {
        std::array<Action, pia3c::kNumAgents> a{};
        a[static_cast<std::size_t>(agent)] = mine;
        a[static_cast<std::size_t>(1 - agent)] = theirs;
        return a;
    };
    std::vector<Action> safe;
    for (Action a1 : pia3c::kAllActions) {
        bool ok = true;
        for (Action o1 : pia3c::kAllActions) {
            const auto r1 = pia3c::step(s, joint(a1, o1));
            if (!alive_after(r1)) {
                ok = false;
                break;
            }
            if (r1.done) continue;
            bool some_reply = false;
            for (Action a2 : pia3c::kAllActions) {
                bool survives_all = true;
                for (Action o2 : pia3c::kAllActions) {
                    if (!alive_after(pia3c::step(r1.next, joint(a2, o2)))) {
                        survives_all = false;
                        break;
                    }
                }
                if (survives_all) {
                    some_reply = true;
                    break;
                }
            }
            if (!some_reply) {
                ok = false;
                break;
            }
        }
        if (ok) safe.push_back(a1);
    }
    return safe;
}

struct TrapState {
    GameState state;
    Action safe_action;
};

/// Boards where the agent stands next to a bomb about to go off: one
/// perpendicular side step escapes, the other is walled. Only boards on which
/// the two-ply enumeration finds exactly one safe action are returned.
inline std::vector<TrapState> trap_states(int count, std::uint64_t seed) {
    std::vector<TrapState> out;
    pia3c::Rng rng(seed);
    const std::array<Action, 4> dirs = {Action::Up, Action::Down, Action::Left, Action::Right};
    while (static_cast<int>(out.size()) < count) {
        const int size = 8;
        const Pos agent{1 + static_cast<int>(rng.below(6)), 1 + static_cast<int>(rng.below(6))};
        const Action toward = dirs[rng.below(4)];
        const Pos bomb = pia3c::offset(agent, toward);
        const bool vertical = toward == Action::Up || toward == Action::Down;
        const Action side_a = vertical ? Action::Left : Action::Up;
        const Action side_b = vertical ? Action::Right : Action::Down;
        const bool block_a = rng.below(2) == 0;
        const Pos blocked = pia3c::offset(agent, block_a ? side_a : side_b);
        const Action exit = block_a ? side_b : side_a;

        // Opponent in whichever corner is farthest from the agent.
        Pos opp{agent.row < size / 2 ? size - 1 : 0, agent.col < size / 2 ? size - 1 : 0};
        GameState s = pia3c::empty_board(size, agent, opp);
        if (!s.in_bounds(bomb)) continue;
        s.at(blocked).kind = rng.below(2) ? CellKind::Rigid : CellKind::Wood;
        // A little clutter away from the agent.
        for (int k = 0; k < 4; ++k) {
            const Pos p{static_cast<int>(rng.below(size)), static_cast<int>(rng.below(size))};
            if (std::abs(p.row - agent.row) + std::abs(p.col - agent.col) <= 2) continue;
            if (p == opp || p == bomb) continue;
            s.at(p).kind = CellKind::Rigid;
        }
        s.agents[0].ammo = 0;
        s.bombs.push_back(pia3c::Bomb{.pos = bomb,
                                      .timer = 1,
                                      .blast_strength = 3 + static_cast<int>(rng.below(3)),
                                      .owner = 0,
                                      .velocity = std::nullopt});
        s.seed = rng.next();
        const auto safe = two_ply_safe_actions(s, 0);
        if (safe.size() != 1 || safe.front() != exit) continue;
        out.push_back({s, exit});
    }
    return out;
}

/// Synthetic trajectory segment with random observations, rewards and
/// (optionally) demonstrator actions; returns/advantages filled from `params`.
inline pia3c::TrajectorySegment random_segment(const pia3c::NetworkParams& params, int length, bool with_demo,
                                               std::uint64_t seed) {
    pia3c::Rng rng(seed);
    pia3c::TrajectorySegment seg;
    const int n = params.arch().board_size;
    double running = 0.3;
    seg.bootstrap_value = running;
    for (int t = 0; t < length; ++t) {
        pia3c::TrajectoryStep st;
        st.observation.size = n;
        st.observation.data.resize(static_cast<std::size_t>(pia3c::kObservationChannels * n * n));
        for (auto& v : st.observation.data) v = rng.uniform() < 0.3 ? rng.uniform() : 0.0;
        const auto out = pia3c::forward(params, st.observation);
        st.action_taken = static_cast<Action>(rng.below(pia3c::kNumActions));
        st.reward = t + 1 == length ? 1.0 : 0.0;
        st.value_estimate = out.value;
        st.policy_snapshot = out.policy;
        if (with_demo && rng.below(3) != 0) st.demonstrator_action = static_cast<Action>(rng.below(pia3c::kNumActions));
        seg.steps.push_back(std::move(st));
    }
    for (int t = length - 1; t >= 0; --t) {
        auto& st = seg.steps[static_cast<std::size_t>(t)];
        running = st.reward + 0.99 * running;
        st.ret = running;
        st.advantage = running - st.value_estimate;
    }
    return seg;
}

struct GradCheck {
    double worst_relative_error = 0.0;
    int coordinates = 0;
};

/// Central differences of `loss` on `count` random coordinates compared with
/// the analytic gradient; relative error uses a floor of 1e-6 on the scale.
inline GradCheck finite_difference_check(pia3c::NetworkParams params, const std::vector<double>& analytic,
                                         const std::function<double(const pia3c::NetworkParams&)>& loss,
                                         int count, std::uint64_t seed, double h = 1e-4) {
    pia3c::Rng rng(seed);
    GradCheck out;
    for (int k = 0; k < count; ++k) {
        const auto i = static_cast<std::size_t>(rng.below(params.size()));
        const double saved = params.values()[i];
        params.values()[i] = saved + h;
        const double up = loss(params);
        params.values()[i] = saved - h;
        const double down = loss(params);
        params.values()[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
        out.worst_relative_error = std::max(out.worst_relative_error, std::abs(numeric - analytic[i]) / scale);
        ++out.coordinates;
    }
    return out;
}

}  // namespace oracle
