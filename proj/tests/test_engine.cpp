#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "pia3c/engine.hpp"
#include "pia3c/rng.hpp"

using namespace pia3c;

namespace {

Bomb bomb_at(Pos p, int timer, int strength, int owner = 0) {
    return Bomb{.pos = p, .timer = timer, .blast_strength = strength, .owner = owner, .velocity = std::nullopt};
}

std::set<std::pair<int, int>> flame_cells(const GameState& s) {
    std::set<std::pair<int, int>> out;
    for (const auto& f : s.flames) out.insert({f.pos.row, f.pos.col});
    return out;
}

int count_kind(const GameState& s, CellKind k) {
    return static_cast<int>(std::count_if(s.grid.begin(), s.grid.end(), [k](const Cell& c) { return c.kind == k; }));
}

}  // namespace

TEST_CASE("rng below stays in range and is reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.below(7);
        CHECK(x < 7);
        CHECK(x == b.below(7));
    }
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("action names round trip") {
    for (Action a : kAllActions) {
        CHECK(parse_action(action_name(a)) == a);
        CHECK(parse_action(std::to_string(static_cast<int>(a))) == a);
    }
    CHECK_FALSE(parse_action("Jump").has_value());
    CHECK(kAllActions.size() == 6);
}

TEST_CASE("board generation is deterministic and keeps its guarantees") {
    const GameState a = generate_board(7);
    const GameState b = generate_board(7);
    CHECK(a == b);
    CHECK(a.size == 8);
    CHECK(generate_board(8) != a);

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const GameState s = generate_board(seed);
        CHECK(agents_connected(s));
        CHECK(s.agents[0].pos != s.agents[1].pos);
        for (const auto& ag : s.agents) {
            const bool corner = (ag.pos.row == 0 || ag.pos.row == s.size - 1) &&
                                (ag.pos.col == 0 || ag.pos.col == s.size - 1);
            CHECK(corner);
            CHECK(ag.ammo == 1);
            CHECK(ag.blast_strength == 2);
            CHECK_FALSE(ag.can_kick);
            CHECK(s.at(ag.pos).kind == CellKind::Passage);
        }
        for (const auto& c : s.grid) {
            if (c.hidden_item) CHECK(c.kind == CellKind::Wood);
            CHECK_FALSE(c.visible_item.has_value());
        }
    }
}

TEST_CASE("corner agents start in all four corners across seeds") {
    std::set<std::pair<int, int>> corners;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const GameState s = generate_board(seed);
        for (const auto& ag : s.agents) corners.insert({ag.pos.row, ag.pos.col});
    }
    CHECK(corners.size() == 4);
}

TEST_CASE("empirical wood fraction matches the requested density") {
    // Counting oracle: wood cells over interior (non-border) cells.
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const GameState s = generate_board(seed, 8);
        total += count_kind(s, CellKind::Wood) / 36.0;
        for (int i = 0; i < 8; ++i) {
            for (Pos p : {Pos{0, i}, Pos{7, i}, Pos{i, 0}, Pos{i, 7}}) CHECK(s.at(p).kind == CellKind::Passage);
        }
    }
    CHECK(std::abs(total / 1000.0 - 0.25) <= 0.05);
}

TEST_CASE("infeasible densities report a generation failure") {
    BoardDensity d;
    d.rigid_density = 0.8;
    d.wood_density = 0.5;
    CHECK_THROWS_AS(generate_board(1, 8, d), GenerationError);
    d.rigid_density = 1.0;
    d.wood_density = 0.0;
    CHECK(agents_connected(generate_board(1, 8, d)));
    d.rigid_density = 1.5;
    CHECK_THROWS_AS(generate_board(1, 8, d), ContractViolation);
    CHECK_THROWS_AS(generate_board(1, 4), ContractViolation);
}

TEST_CASE("a timer-1 bomb explodes into a lifetime-2 cross") {
    GameState s = empty_board(8, {0, 0}, {7, 7});
    s.bombs.push_back(bomb_at({3, 3}, 1, 2));
    s.agents[0].ammo = 0;
    const StepResult r = step(s, {Action::Stop, Action::Stop});
    const std::set<std::pair<int, int>> expected = {{3, 3}, {2, 3}, {4, 3}, {3, 2}, {3, 4}};
    CHECK(flame_cells(r.next) == expected);
    for (const auto& f : r.next.flames) CHECK(f.lifetime == 2);
    CHECK(r.next.bombs.empty());
    CHECK(r.next.agents[0].ammo == 1);
    CHECK_FALSE(r.done);
}

TEST_CASE("flames last two ticks") {
    GameState s = empty_board(8, {0, 0}, {7, 7});
    s.bombs.push_back(bomb_at({3, 3}, 1, 2));
    const GameState t1 = step(s, {Action::Stop, Action::Stop}).next;
    const GameState t2 = step(t1, {Action::Stop, Action::Stop}).next;
    const GameState t3 = step(t2, {Action::Stop, Action::Stop}).next;
    CHECK(t1.flames.size() == 5);
    CHECK(t2.flames.size() == 5);
    for (const auto& f : t2.flames) CHECK(f.lifetime == 1);
    CHECK(t3.flames.empty());
}

TEST_CASE("placed bombs explode ten ticks later") {
    GameState s = empty_board(8, {3, 3}, {7, 7});
    s = step(s, {Action::Bomb, Action::Stop}).next;
    REQUIRE(s.bombs.size() == 1);
    CHECK(s.bombs[0].timer == kBombTimer - 1);
    CHECK(s.agents[0].ammo == 0);
    s = step(s, {Action::Up, Action::Stop}).next;
    s = step(s, {Action::Up, Action::Stop}).next;
    s = step(s, {Action::Left, Action::Stop}).next;
    for (int t = 4; t < kBombTimer; ++t) {
        CHECK(s.flames.empty());
        s = step(s, {Action::Stop, Action::Stop}).next;
    }
    CHECK(s.flames.size() == 5);
    CHECK(s.tick == kBombTimer);
    CHECK(s.agents[0].alive);
    CHECK(s.agents[0].ammo == 1);
}

TEST_CASE("moving off the board is a no-op") {
    GameState s = empty_board(8, {0, 0}, {7, 7});
    const StepResult r = step(s, {Action::Up, Action::Stop});
    CHECK(r.next.agents[0].pos == Pos{0, 0});
    const StepResult l = step(s, {Action::Left, Action::Stop});
    CHECK(l.next.agents[0].pos == Pos{0, 0});
}

TEST_CASE("walls, wood and unkickable bombs block movement") {
    GameState s = empty_board(8, {3, 3}, {7, 7});
    s.at({2, 3}).kind = CellKind::Rigid;
    s.at({4, 3}).kind = CellKind::Wood;
    s.bombs.push_back(bomb_at({3, 4}, 5, 2, 1));
    for (Action a : {Action::Up, Action::Down, Action::Right}) {
        CHECK(step(s, {a, Action::Stop}).next.agents[0].pos == Pos{3, 3});
    }
    CHECK(step(s, {Action::Left, Action::Stop}).next.agents[0].pos == Pos{3, 2});
}

TEST_CASE("simultaneous moves into one cell bounce both agents") {
    GameState s = empty_board(8, {3, 2}, {3, 4});
    const StepResult r = step(s, {Action::Right, Action::Left});
    CHECK(r.next.agents[0].pos == Pos{3, 2});
    CHECK(r.next.agents[1].pos == Pos{3, 4});
}

TEST_CASE("agents cannot swap places") {
    GameState s = empty_board(8, {3, 3}, {3, 4});
    const StepResult r = step(s, {Action::Right, Action::Left});
    CHECK(r.next.agents[0].pos == Pos{3, 3});
    CHECK(r.next.agents[1].pos == Pos{3, 4});
}

TEST_CASE("moving into a staying agent bounces, following a leaving agent works") {
    GameState s = empty_board(8, {3, 3}, {3, 4});
    CHECK(step(s, {Action::Right, Action::Stop}).next.agents[0].pos == Pos{3, 3});
    const StepResult r = step(s, {Action::Right, Action::Right});
    CHECK(r.next.agents[0].pos == Pos{3, 4});
    CHECK(r.next.agents[1].pos == Pos{3, 5});
    // A chain whose head is blocked bounces entirely.
    GameState w = empty_board(8, {3, 6}, {3, 7});
    const StepResult b = step(w, {Action::Right, Action::Right});
    CHECK(b.next.agents[0].pos == Pos{3, 6});
    CHECK(b.next.agents[1].pos == Pos{3, 7});
}

TEST_CASE("kicked bombs slide until blocked") {
    GameState s = empty_board(8, {3, 1}, {7, 7});
    s.agents[0].can_kick = true;
    s.at({3, 6}).kind = CellKind::Rigid;
    s.bombs.push_back(bomb_at({3, 2}, 9, 2, 1));
    GameState t = step(s, {Action::Right, Action::Stop}).next;
    CHECK(t.agents[0].pos == Pos{3, 2});
    REQUIRE(t.bombs.size() == 1);
    CHECK(t.bombs[0].pos == Pos{3, 3});
    t = step(t, {Action::Stop, Action::Stop}).next;
    CHECK(t.bombs[0].pos == Pos{3, 4});
    t = step(t, {Action::Stop, Action::Stop}).next;
    CHECK(t.bombs[0].pos == Pos{3, 5});
    t = step(t, {Action::Stop, Action::Stop}).next;
    CHECK(t.bombs[0].pos == Pos{3, 5});
    CHECK_FALSE(t.bombs[0].velocity.has_value());

    GameState off = s;
    off.rules.kick_enabled = false;
    CHECK(step(off, {Action::Right, Action::Stop}).next.agents[0].pos == Pos{3, 1});
}

TEST_CASE("explosions chain through bombs in the blast") {
    GameState s = empty_board(8, {0, 0}, {7, 7});
    s.bombs.push_back(bomb_at({3, 3}, 1, 2, 0));
    s.bombs.push_back(bomb_at({3, 4}, 8, 3, 1));
    const StepResult r = step(s, {Action::Stop, Action::Stop});
    CHECK(r.next.bombs.empty());
    const auto cells = flame_cells(r.next);
    CHECK(cells.count({3, 6}) == 1);
    CHECK(cells.count({1, 4}) == 1);
    CHECK(r.next.agents[1].ammo == 2);
}

TEST_CASE("a bomb caught in a lingering flame explodes") {
    GameState s = empty_board(8, {0, 0}, {7, 7});
    s.flames.push_back(Flame{.pos = {3, 3}, .lifetime = 2, .owners = 1});
    s.bombs.push_back(bomb_at({3, 3}, 8, 2, 1));
    const StepResult r = step(s, {Action::Stop, Action::Stop});
    CHECK(r.next.bombs.empty());
    CHECK(flame_cells(r.next).count({2, 3}) == 1);
}

TEST_CASE("flames stop at rigid walls and destroy the first wood") {
    GameState s = empty_board(8, {0, 0}, {7, 7});
    s.at({3, 5}).kind = CellKind::Rigid;
    s.at({1, 3}).kind = CellKind::Wood;
    s.at({1, 3}).hidden_item = Item::Kick;
    s.at({0, 3}).kind = CellKind::Wood;
    s.bombs.push_back(bomb_at({3, 3}, 1, 4));
    const StepResult r = step(s, {Action::Stop, Action::Stop});
    const auto cells = flame_cells(r.next);
    CHECK(cells.count({3, 4}) == 1);
    CHECK(cells.count({3, 5}) == 0);
    CHECK(cells.count({1, 3}) == 1);
    CHECK(cells.count({0, 3}) == 0);
    CHECK(r.next.at({1, 3}).kind == CellKind::Passage);
    CHECK(r.next.at({1, 3}).visible_item == Item::Kick);
    CHECK(r.next.at({0, 3}).kind == CellKind::Wood);
}

TEST_CASE("blast cells match the reference cross") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const GameState s = generate_board(seed);
        Rng rng(seed);
        const Pos p{static_cast<int>(rng.below(8)), static_cast<int>(rng.below(8))};
        const int strength = 2 + static_cast<int>(rng.below(5));
        const auto ref = oracle::blast_mask(s, p, strength);
        std::vector<char> got(ref.size(), 0);
        for (Pos q : flame_cross(s, p, strength)) got[static_cast<std::size_t>(s.index(q))] = 1;
        CHECK(got == ref);
    }
}

TEST_CASE("a death ends the game with winner and loser rewards") {
    GameState s = empty_board(8, {0, 0}, {3, 4});
    s.bombs.push_back(bomb_at({3, 3}, 1, 2, 0));
    const StepResult r = step(s, {Action::Stop, Action::Stop});
    CHECK(r.done);
    CHECK(r.rewards == std::array<double, 2>{1.0, -1.0});
    CHECK(r.next.terminal == Outcome::Agent0Wins);
    CHECK(r.next.last_death_cause[1] == DeathCause::OpponentBomb);
    CHECK_FALSE(r.next.last_death_cause[0].has_value());
    CHECK_THROWS_AS(step(r.next, {Action::Stop, Action::Stop}), ContractViolation);
}

TEST_CASE("own bomb deaths are recorded as suicide") {
    GameState s = empty_board(8, {3, 3}, {7, 7});
    s.bombs.push_back(bomb_at({3, 3}, 1, 2, 0));
    const StepResult r = step(s, {Action::Stop, Action::Stop});
    CHECK(r.next.terminal == Outcome::Agent1Wins);
    CHECK(r.rewards == std::array<double, 2>{-1.0, 1.0});
    CHECK(r.next.last_death_cause[0] == DeathCause::OwnBomb);
}

TEST_CASE("walking into a lingering flame kills") {
    GameState s = empty_board(8, {3, 2}, {7, 7});
    s.flames.push_back(Flame{.pos = {3, 3}, .lifetime = 2, .owners = 2});
    const StepResult r = step(s, {Action::Right, Action::Stop});
    CHECK(r.done);
    CHECK(r.next.last_death_cause[0] == DeathCause::OpponentBomb);
}

TEST_CASE("simultaneous death and timeout are ties worth -1 each") {
    GameState s = empty_board(8, {3, 3}, {3, 4});
    s.bombs.push_back(bomb_at({3, 3}, 1, 2, 0));
    const StepResult r = step(s, {Action::Stop, Action::Stop});
    CHECK(r.next.terminal == Outcome::Tie);
    CHECK(r.rewards == std::array<double, 2>{-1.0, -1.0});

    GameState t = empty_board(8, {0, 0}, {7, 7}, GameRules{.max_ticks = 5});
    int steps = 0;
    StepResult last;
    while (!t.is_terminal()) {
        last = step(t, {Action::Stop, Action::Stop});
        t = last.next;
        ++steps;
    }
    CHECK(steps == 5);
    CHECK(t.terminal == Outcome::Tie);
    CHECK(last.rewards == std::array<double, 2>{-1.0, -1.0});
}

TEST_CASE("power-ups are picked up") {
    GameState s = empty_board(8, {3, 3}, {7, 7});
    s.at({3, 4}).visible_item = Item::ExtraAmmo;
    s.at({3, 5}).visible_item = Item::BlastRadius;
    s.at({3, 6}).visible_item = Item::Kick;
    s = step(s, {Action::Right, Action::Stop}).next;
    s = step(s, {Action::Right, Action::Stop}).next;
    s = step(s, {Action::Right, Action::Stop}).next;
    CHECK(s.agents[0].ammo == 2);
    CHECK(s.agents[0].blast_strength == 3);
    CHECK(s.agents[0].can_kick);
    CHECK_FALSE(s.at({3, 4}).visible_item.has_value());
}

TEST_CASE("legal actions") {
    GameState s = empty_board(8, {0, 0}, {7, 7});
    std::vector<Action> expected = {Action::Stop, Action::Down, Action::Right, Action::Bomb};
    CHECK(legal_actions(s, 0) == expected);
    s.agents[0].ammo = 0;
    expected = {Action::Stop, Action::Down, Action::Right};
    CHECK(legal_actions(s, 0) == expected);

    GameState w = empty_board(8, {3, 3}, {7, 7});
    for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right}) w.at(offset({3, 3}, a)).kind = CellKind::Rigid;
    expected = {Action::Stop, Action::Bomb};
    CHECK(legal_actions(w, 0) == expected);

    w.agents[0].alive = false;
    CHECK(legal_actions(w, 0).empty());
}

TEST_CASE("static policy always stays") {
    for (int i = 0; i < 100; ++i) CHECK(static_policy() == Action::Stop);
}

TEST_CASE("observation layout") {
    GameState s = empty_board(8, {0, 0}, {7, 7});
    s.bombs.push_back(bomb_at({2, 2}, 4, 3));
    s.flames.push_back(Flame{.pos = {5, 5}, .lifetime = 1, .owners = 1});
    s.at({1, 1}).kind = CellKind::Rigid;
    s.at({1, 2}).kind = CellKind::Wood;
    s.at({4, 4}).visible_item = Item::Kick;
    s.agents[1].ammo = 3;
    s.agents[1].can_kick = true;
    s.tick = 200;

    const Observation o = encode_observation(s, 1);
    CHECK(o.data.size() == static_cast<std::size_t>(28 * 8 * 8));
    for (double v : o.data) CHECK(std::isfinite(v));
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            const bool bomb = r == 2 && c == 2;
            CHECK(o.at(channel::kBombTimer, r, c) == doctest::Approx(bomb ? 0.4 : 0.0));
            CHECK(o.at(channel::kBombStrength, r, c) == (bomb ? 3.0 : 0.0));
            CHECK(o.at(channel::kPassage, r, c) + o.at(channel::kRigid, r, c) + o.at(channel::kWood, r, c) == 1.0);
            CHECK(o.at(channel::kTick, r, c) == doctest::Approx(0.25));
            // Self first: agent 1 occupies slot 0 in its own view.
            CHECK(o.at(channel::kAgentFirst, r, c) == (r == 7 && c == 7 ? 1.0 : 0.0));
            CHECK(o.at(channel::kAgentFirst + 1, r, c) == (r == 0 && c == 0 ? 1.0 : 0.0));
            CHECK(o.at(channel::kAgentFirst + 2, r, c) == 0.0);
            CHECK(o.at(channel::kAgentFirst + 3, r, c) == 0.0);
            CHECK(o.at(channel::kSelfCopy, r, c) == o.at(channel::kAgentFirst, r, c));
            CHECK(o.at(channel::kAbilityFirst, r, c) == doctest::Approx(3.0 / 8.0));
            CHECK(o.at(channel::kAbilityFirst + 1, r, c) == doctest::Approx(2.0 / 8.0));
            CHECK(o.at(channel::kAbilityFirst + 2, r, c) == 1.0);
            CHECK(o.at(channel::kAbilityFirst + 3, r, c) == doctest::Approx(1.0 / 8.0));
            CHECK(o.at(channel::kAbilityFirst + 5, r, c) == 0.0);
            for (int ch = channel::kAbilityFirst + 6; ch < channel::kSelfCopy; ++ch) CHECK(o.at(ch, r, c) == 0.0);
        }
    }
    CHECK(o.at(channel::kRigid, 1, 1) == 1.0);
    CHECK(o.at(channel::kWood, 1, 2) == 1.0);
    CHECK(o.at(channel::kItemFirst + 2, 4, 4) == 1.0);
    CHECK(o.at(channel::kFlame, 5, 5) == 1.0);
    CHECK(o.at(channel::kFlameLife, 5, 5) == doctest::Approx(0.5));
    CHECK(encode_observation(s, 1) == o);

    s.agents[0].alive = false;
    const Observation dead = encode_observation(s, 1);
    double sum = 0.0;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) sum += dead.at(channel::kAgentFirst + 1, r, c);
    CHECK(sum == 0.0);
}

TEST_CASE("random play respects the episode invariants") {
    // Property sweep over random action sequences.
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        GameState s = generate_board(seed);
        Rng rng(seed + 1000);
        const int rigid = count_kind(s, CellKind::Rigid);
        int wood = count_kind(s, CellKind::Wood);
        int hidden = static_cast<int>(std::count_if(s.grid.begin(), s.grid.end(), [](const Cell& c) { return c.hidden_item.has_value(); }));
        std::array<int, 2> budget = {s.agents[0].ammo, s.agents[1].ammo};
        int steps = 0;
        while (!s.is_terminal()) {
            const std::array<Action, 2> acts = {kAllActions[rng.below(6)], kAllActions[rng.below(6)]};
            const StepResult r = step(s, acts);
            CHECK(r.next.tick == s.tick + 1);
            CHECK(count_kind(r.next, CellKind::Rigid) == rigid);
            const int wood_now = count_kind(r.next, CellKind::Wood);
            CHECK(wood_now <= wood);
            wood = wood_now;
            for (int i = 0; i < 2; ++i) {
                const auto& a = r.next.agents[static_cast<std::size_t>(i)];
                const int live = static_cast<int>(std::count_if(r.next.bombs.begin(), r.next.bombs.end(),
                                                                [i](const Bomb& b) { return b.owner == i; }));
                const int now = a.ammo + live;
                // Only an ammo pickup changes the budget, and by exactly one.
                if (now != budget[static_cast<std::size_t>(i)]) {
                    CHECK(now == budget[static_cast<std::size_t>(i)] + 1);
                    CHECK(s.at(a.pos).visible_item == Item::ExtraAmmo);
                    budget[static_cast<std::size_t>(i)] = now;
                }
                if (a.alive) CHECK(r.next.at(a.pos).kind == CellKind::Passage);
            }
            for (const auto& b : r.next.bombs) {
                CHECK(b.timer >= 1);
                CHECK(b.timer <= kBombTimer);
            }
            for (const auto& f : r.next.flames) CHECK((f.lifetime == 1 || f.lifetime == 2));
            CHECK(r.done == r.next.is_terminal());
            if (!r.done) CHECK(r.rewards == std::array<double, 2>{0.0, 0.0});
            s = r.next;
            ++steps;
        }
        CHECK(steps <= 800);
        const int hidden_now = static_cast<int>(
            std::count_if(s.grid.begin(), s.grid.end(), [](const Cell& c) { return c.hidden_item.has_value(); }));
        CHECK(hidden_now <= hidden);
        for (int i = 0; i < 2; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            CHECK(s.agents[idx].alive != s.last_death_cause[idx].has_value());
        }
    }
}

TEST_CASE("suicide telemetry traces the flame owner") {
    // Two bombs, one per agent, whose flames overlap on agent 0's cell.
    GameState s = empty_board(8, {3, 3}, {7, 7});
    s.bombs.push_back(bomb_at({3, 2}, 1, 2, 1));
    const StepResult r = step(s, {Action::Stop, Action::Stop});
    CHECK(r.next.last_death_cause[0] == DeathCause::OpponentBomb);
    s.bombs.push_back(bomb_at({2, 3}, 1, 2, 0));
    const StepResult both = step(s, {Action::Stop, Action::Stop});
    CHECK(both.next.last_death_cause[0] == DeathCause::OwnBomb);
}
