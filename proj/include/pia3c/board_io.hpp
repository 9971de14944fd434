#pragma once

// Line-oriented text format for boards and replays.
//
//   <size> <tick> <seed>
//   rules <max_ticks> <kick 0|1>
//   <size lines of grid characters>
//       .  passage          #  rigid         W  wood
//       a/b/c  wood hiding ammo / blast / kick
//       A/B/C  passage with that power-up visible
//   agent <id> <row> <col> <ammo> <blast> <kick> <alive> <cause: - | own | opp>
//   bomb <row> <col> <timer> <strength> <owner> <velocity: - | action name>
//   flame <row> <col> <lifetime> <owner bits>
//   terminal <none | agent0 | agent1 | tie>
//
// A replay is a board followed by `actions <count>` and one `<a0> <a1>` line
// per tick.

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pia3c/engine.hpp"

namespace pia3c {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string serialize_state(const GameState& state);
GameState parse_state(std::string_view text);

struct Replay {
    GameState initial;
    std::vector<std::array<Action, kNumAgents>> actions;
};

std::string serialize_replay(const Replay& replay);
Replay parse_replay(std::string_view text);

/// Steps the initial state through the logged actions; returns every state
/// including the initial one. Throws ContractViolation if the log continues
/// past a terminal state.
std::vector<GameState> replay_states(const Replay& replay);

/// Human-readable board with agents drawn as 0/1, bombs as *, flames as ~.
std::string render_state(const GameState& state);

std::string read_file(const std::string& path);

}  // namespace pia3c
