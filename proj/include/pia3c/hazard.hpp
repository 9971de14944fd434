#pragma once

// Exact suicide-hazard analysis for an agent that has just dropped its only
// bomb and then moves uniformly at random over the five non-bomb actions
// (Stop, Up, Down, Left, Right) while everything else stays put.

#include <cstdint>
#include <string>
#include <vector>

#include "pia3c/engine.hpp"

namespace pia3c {

struct HazardQuery {
    GameState state;
    int agent_id = 0;
    int horizon = 9;            // the bomb explodes on this step
    bool static_world = true;
    bool require_bomb = true;   // false only for the no-bomb test variant
};

struct HazardResult {
    int size = 0;
    int horizon = 0;
    std::vector<double> position_distribution;  // row-major, at t = horizon
    std::vector<char> flame_mask;               // cells covered by the explosion
    double suicide_probability = 0.0;
    // Exact path counts out of 5^horizon; filled when horizon <= kMaxExactHorizon.
    std::vector<std::uint64_t> path_counts;
    std::uint64_t total_paths = 0;

    double probability(Pos p) const { return position_distribution[static_cast<std::size_t>(p.row * size + p.col)]; }
    bool flamed(Pos p) const { return flame_mask[static_cast<std::size_t>(p.row * size + p.col)] != 0; }
};

/// 5^27 is the largest power of five that fits in 64 bits.
inline constexpr int kMaxExactHorizon = 27;

/// Dynamic program over the agent's position distribution. Blocked moves
/// (walls, wood, the other agent, the board edge) leave the agent in place;
/// the agent's own bomb cell stays enterable until it explodes. The agent dies
/// iff it stands in the flame cross at t = horizon.
HazardResult survival_distribution(const HazardQuery& query);

double suicide_probability(const HazardQuery& query);

/// (1 - p)^b
double survival_after_bombs(double p_suicide, int b);

/// Copy of state with a fresh bomb (timer 9) under agent_id and its ammo spent,
/// wrapped as a query with the given horizon.
HazardQuery bomb_placement_query(const GameState& state, int agent_id, int horizon = 9);

/// Worst-case corridor: `length` Passage cells in total, length-1 of them in a
/// horizontal corridor walled by wood plus one escape cell above its far end.
/// The agent sits on its own just-placed bomb at the corridor's left end.
GameState corridor_scenario(int length, int bomb_strength);

/// Minimum number of moves from each Passage cell to a cell outside the flame
/// cross of the bomb at `bomb` (0 outside the cross, -1 when unreachable or
/// not Passage). Row-major.
std::vector<int> evasion_steps(const GameState& state, Pos bomb, int blast_strength);

/// Heatmap CSV: one row per board row. Obstacles print as '#', other cells as
/// the probability, suffixed with '*' when the cell is in the flame cross.
std::string hazard_heatmap_csv(const HazardResult& result, const GameState& state);

}  // namespace pia3c
