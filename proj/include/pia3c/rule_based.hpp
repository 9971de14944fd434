#pragma once

#include <cstdint>

#include "pia3c/engine.hpp"

namespace pia3c {

/// Scripted benchmark opponent. Priorities: escape any cell that incoming
/// flames will cover, bomb an opponent in blast range when an escape exists,
/// walk toward the nearest visible power-up, walk to and bomb the nearest
/// wood, otherwise stay. Paths come from Dijkstra over cells that are
/// passable and not aflame at the time of arrival. rng_seed only breaks ties
/// between equally short paths.
Action rule_based_policy(const GameState& state, int agent_id, std::uint64_t rng_seed);

/// True when agent_id can reach a cell no current bomb or flame will ever
/// cover, assuming the world stays as it is apart from bomb countdowns.
bool has_escape(const GameState& state, int agent_id);

}  // namespace pia3c
