#pragma once

// Deterministic two-agent Mini-Pommerman simulator.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pia3c {

/// Thrown when a caller breaks an operation's precondition (stepping a
/// terminal state, planning from a dead agent, mismatched shapes, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Board generation could not satisfy the connectivity guarantee.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CellKind : std::uint8_t { Passage, Rigid, Wood };
enum class Item : std::uint8_t { ExtraAmmo, BlastRadius, Kick };
enum class Action : std::uint8_t { Stop, Up, Down, Left, Right, Bomb };
enum class Outcome : std::uint8_t { Agent0Wins, Agent1Wins, Tie };
enum class DeathCause : std::uint8_t { OwnBomb, OpponentBomb };

inline constexpr int kNumActions = 6;
inline constexpr int kNumAgents = 2;
inline constexpr int kBombTimer = 10;
inline constexpr int kFlameLifetime = 2;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Stop, Action::Up, Action::Down, Action::Left, Action::Right, Action::Bomb};

std::string_view action_name(Action a);
/// Accepts the names produced by action_name (case-sensitive) or a digit 0-5.
std::optional<Action> parse_action(std::string_view text);
bool is_move(Action a);

struct Pos {
    int row = 0;
    int col = 0;
    bool operator==(const Pos&) const = default;
};

/// Neighbor in the direction of a movement action; Stop/Bomb return p unchanged.
Pos offset(Pos p, Action a);

struct Cell {
    CellKind kind = CellKind::Passage;
    std::optional<Item> hidden_item;   // only on Wood
    std::optional<Item> visible_item;  // only on Passage
    bool operator==(const Cell&) const = default;
};

struct AgentState {
    int id = 0;
    Pos pos;
    int ammo = 1;
    int blast_strength = 2;
    bool can_kick = false;
    bool alive = true;
    bool operator==(const AgentState&) const = default;
};

struct Bomb {
    Pos pos;
    int timer = kBombTimer;
    int blast_strength = 2;
    int owner = 0;
    std::optional<Action> velocity;  // set by a kick; one of Up/Down/Left/Right
    bool operator==(const Bomb&) const = default;
};

struct Flame {
    Pos pos;
    int lifetime = kFlameLifetime;
    std::uint8_t owners = 0;  // bit i set when agent i's bomb produced this flame
    bool operator==(const Flame&) const = default;
};

struct GameRules {
    int max_ticks = 800;
    bool kick_enabled = true;
    bool operator==(const GameRules&) const = default;
};

struct BoardDensity {
    double wood_density = 0.25;
    double rigid_density = 0.15;
    int n_powerups = 6;
    bool operator==(const BoardDensity&) const = default;
};

struct GameState {
    int size = 8;
    std::vector<Cell> grid;  // row-major, size * size
    std::array<AgentState, kNumAgents> agents{};
    std::vector<Bomb> bombs;
    std::vector<Flame> flames;
    int tick = 0;
    std::optional<Outcome> terminal;
    std::array<std::optional<DeathCause>, kNumAgents> last_death_cause{};
    std::uint64_t seed = 0;
    GameRules rules;

    bool operator==(const GameState&) const = default;

    bool in_bounds(Pos p) const { return p.row >= 0 && p.col >= 0 && p.row < size && p.col < size; }
    int index(Pos p) const { return p.row * size + p.col; }
    Cell& at(Pos p) { return grid[static_cast<std::size_t>(index(p))]; }
    const Cell& at(Pos p) const { return grid[static_cast<std::size_t>(index(p))]; }

    const Bomb* bomb_at(Pos p) const;
    const Flame* flame_at(Pos p) const;
    /// Id of the living agent standing on p, if any.
    std::optional<int> agent_at(Pos p) const;
    bool is_terminal() const { return terminal.has_value(); }
};

/// Passable-by-movement test used by the engine, the hazard analyzer and the
/// scripted opponents: in bounds and a Passage cell (bombs and agents not considered).
bool is_passage(const GameState& s, Pos p);

/// Empty Passage board with both agents at the given positions; used by tests
/// and hand-built scenarios.
GameState empty_board(int size, Pos agent0, Pos agent1, GameRules rules = {});

/// Randomized board: agents in two distinct pseudo-random corners; rigid walls
/// and wood placed by exact counts (density times the number of interior,
/// non-border cells) on interior cells only, so corners, their neighbors and
/// the whole border stay Passage; hidden power-ups under the first wood cells.
/// Rejection-samples until the agents are joined by non-Rigid cells. Throws
/// GenerationError when the densities do not fit or after max_attempts.
GameState generate_board(std::uint64_t seed, int size = 8, const BoardDensity& density = {},
                         const GameRules& rules = {}, int max_attempts = 200);

/// Flood fill over non-Rigid cells.
bool agents_connected(const GameState& s);

/// Cells covered by a bomb of the given strength at pos: the bomb cell plus up
/// to strength-1 cells per direction, stopping before Rigid and at (including)
/// the first Wood cell.
std::vector<Pos> flame_cross(const GameState& s, Pos pos, int blast_strength);

struct StepResult {
    GameState next;
    std::array<double, kNumAgents> rewards{};
    bool done = false;
};

/// Advances one tick. Resolution order: simultaneous moves (shared targets and
/// swaps bounce), bomb placement, kicked-bomb slides, timer decrement,
/// explosions with chaining, flame aging/spawning, deaths and pickups.
StepResult step(const GameState& state, std::array<Action, kNumAgents> actions);

/// Actions that do something for the agent; empty for a dead agent.
std::vector<Action> legal_actions(const GameState& state, int agent_id);

inline Action static_policy() { return Action::Stop; }

inline constexpr int kObservationChannels = 28;

/// Channel layout:
///   0 passage, 1 rigid, 2 wood, 3-5 visible power-ups (ammo, blast, kick),
///   6 bomb timer / 10, 7 bomb strength, 8 flame present, 9 flame lifetime / 2,
///   10-13 agent positions (self, then others by id, unused slots zero),
///   14-25 per-slot (ammo / 8, blast / 8, kick) constant planes,
///   26 copy of the self position plane, 27 tick / 800.
struct Observation {
    int size = 0;
    std::vector<double> data;  // channel-major: [channel][row][col]

    double at(int channel, int row, int col) const {
        return data[static_cast<std::size_t>((channel * size + row) * size + col)];
    }
    bool operator==(const Observation&) const = default;
};

namespace channel {
inline constexpr int kPassage = 0;
inline constexpr int kRigid = 1;
inline constexpr int kWood = 2;
inline constexpr int kItemFirst = 3;
inline constexpr int kBombTimer = 6;
inline constexpr int kBombStrength = 7;
inline constexpr int kFlame = 8;
inline constexpr int kFlameLife = 9;
inline constexpr int kAgentFirst = 10;
inline constexpr int kAbilityFirst = 14;
inline constexpr int kSelfCopy = 26;
inline constexpr int kTick = 27;
}  // namespace channel

Observation encode_observation(const GameState& state, int agent_id);

}  // namespace pia3c
