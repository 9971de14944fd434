#include "pia3c/board_io.hpp"

#include <fstream>
#include <sstream>

namespace pia3c {

namespace {

char cell_char(const Cell& c) {
    switch (c.kind) {
        case CellKind::Rigid: return '#';
        case CellKind::Wood: return c.hidden_item ? static_cast<char>('a' + static_cast<int>(*c.hidden_item)) : 'W';
        case CellKind::Passage:
            return c.visible_item ? static_cast<char>('A' + static_cast<int>(*c.visible_item)) : '.';
    }
    return '?';
}

Cell parse_cell(char ch) {
    Cell c;
    switch (ch) {
        case '.': break;
        case '#': c.kind = CellKind::Rigid; break;
        case 'W': c.kind = CellKind::Wood; break;
        case 'a': case 'b': case 'c':
            c.kind = CellKind::Wood;
            c.hidden_item = static_cast<Item>(ch - 'a');
            break;
        case 'A': case 'B': case 'C':
            c.visible_item = static_cast<Item>(ch - 'A');
            break;
        default: throw ParseError(std::string("unknown grid character '") + ch + "'");
    }
    return c;
}

std::string_view cause_token(const std::optional<DeathCause>& c) {
    if (!c) return "-";
    return *c == DeathCause::OwnBomb ? "own" : "opp";
}

std::string_view terminal_token(const std::optional<Outcome>& o) {
    if (!o) return "none";
    switch (*o) {
        case Outcome::Agent0Wins: return "agent0";
        case Outcome::Agent1Wins: return "agent1";
        case Outcome::Tie: return "tie";
    }
    return "none";
}

void write_state(std::ostream& out, const GameState& s) {
    out << s.size << ' ' << s.tick << ' ' << s.seed << '\n';
    out << "rules " << s.rules.max_ticks << ' ' << (s.rules.kick_enabled ? 1 : 0) << '\n';
    for (int r = 0; r < s.size; ++r) {
        for (int c = 0; c < s.size; ++c) out << cell_char(s.at({r, c}));
        out << '\n';
    }
    for (const auto& a : s.agents) {
        out << "agent " << a.id << ' ' << a.pos.row << ' ' << a.pos.col << ' ' << a.ammo << ' '
            << a.blast_strength << ' ' << (a.can_kick ? 1 : 0) << ' ' << (a.alive ? 1 : 0) << ' '
            << cause_token(s.last_death_cause[static_cast<std::size_t>(a.id)]) << '\n';
    }
    for (const auto& b : s.bombs) {
        out << "bomb " << b.pos.row << ' ' << b.pos.col << ' ' << b.timer << ' ' << b.blast_strength
            << ' ' << b.owner << ' ' << (b.velocity ? action_name(*b.velocity) : "-") << '\n';
    }
    for (const auto& f : s.flames) {
        out << "flame " << f.pos.row << ' ' << f.pos.col << ' ' << f.lifetime << ' '
            << static_cast<int>(f.owners) << '\n';
    }
    out << "terminal " << terminal_token(s.terminal) << '\n';
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : in_(std::string(text)) {}

    std::string next(const char* what) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return line;
        }
        throw ParseError(std::string("unexpected end of input, expected ") + what);
    }

    int line_no() const { return line_no_; }

private:
    std::istringstream in_;
    int line_no_ = 0;
};

[[noreturn]] void fail(const LineReader& r, const std::string& msg) {
    throw ParseError("line " + std::to_string(r.line_no()) + ": " + msg);
}

template <typename... Ts>
void read_fields(const LineReader& r, std::istringstream& ls, Ts&... fields) {
    if (!(ls >> ... >> fields)) fail(r, "malformed record");
}

GameState read_state(LineReader& r) {
    GameState s;
    {
        std::istringstream ls(r.next("header"));
        read_fields(r, ls, s.size, s.tick, s.seed);
        if (s.size < 1 || s.size > 64) fail(r, "bad board size");
    }
    {
        std::istringstream ls(r.next("rules"));
        std::string tag;
        int kick = 0;
        read_fields(r, ls, tag, s.rules.max_ticks, kick);
        if (tag != "rules") fail(r, "expected rules record");
        s.rules.kick_enabled = kick != 0;
    }
    s.grid.reserve(static_cast<std::size_t>(s.size * s.size));
    for (int row = 0; row < s.size; ++row) {
        const std::string line = r.next("grid row");
        if (static_cast<int>(line.size()) != s.size) fail(r, "grid row has wrong width");
        for (char ch : line) {
            try {
                s.grid.push_back(parse_cell(ch));
            } catch (const ParseError& e) {
                fail(r, e.what());
            }
        }
    }
    int agents_seen = 0;
    bool done = false;
    while (!done) {
        std::istringstream ls(r.next("record"));
        std::string tag;
        ls >> tag;
        if (tag == "agent") {
            AgentState a;
            int kick = 0, alive = 0;
            std::string cause;
            read_fields(r, ls, a.id, a.pos.row, a.pos.col, a.ammo, a.blast_strength, kick, alive, cause);
            if (a.id < 0 || a.id >= kNumAgents || !s.in_bounds(a.pos)) fail(r, "bad agent record");
            a.can_kick = kick != 0;
            a.alive = alive != 0;
            auto& slot = s.last_death_cause[static_cast<std::size_t>(a.id)];
            if (cause == "own") slot = DeathCause::OwnBomb;
            else if (cause == "opp") slot = DeathCause::OpponentBomb;
            else if (cause != "-") fail(r, "bad death cause");
            s.agents[static_cast<std::size_t>(a.id)] = a;
            ++agents_seen;
        } else if (tag == "bomb") {
            Bomb b;
            std::string vel;
            read_fields(r, ls, b.pos.row, b.pos.col, b.timer, b.blast_strength, b.owner, vel);
            if (!s.in_bounds(b.pos) || b.owner < 0 || b.owner >= kNumAgents) fail(r, "bad bomb record");
            if (vel != "-") {
                b.velocity = parse_action(vel);
                if (!b.velocity || !is_move(*b.velocity)) fail(r, "bad bomb velocity");
            }
            s.bombs.push_back(b);
        } else if (tag == "flame") {
            Flame f;
            int owners = 0;
            read_fields(r, ls, f.pos.row, f.pos.col, f.lifetime, owners);
            if (!s.in_bounds(f.pos)) fail(r, "bad flame record");
            f.owners = static_cast<std::uint8_t>(owners);
            s.flames.push_back(f);
        } else if (tag == "terminal") {
            std::string t;
            read_fields(r, ls, t);
            if (t == "agent0") s.terminal = Outcome::Agent0Wins;
            else if (t == "agent1") s.terminal = Outcome::Agent1Wins;
            else if (t == "tie") s.terminal = Outcome::Tie;
            else if (t != "none") fail(r, "bad terminal record");
            done = true;
        } else {
            fail(r, "unknown record '" + tag + "'");
        }
    }
    if (agents_seen != kNumAgents) fail(r, "expected exactly two agent records");
    return s;
}

}  // namespace

std::string serialize_state(const GameState& state) {
    std::ostringstream out;
    write_state(out, state);
    return out.str();
}

GameState parse_state(std::string_view text) {
    LineReader r(text);
    return read_state(r);
}

std::string serialize_replay(const Replay& replay) {
    std::ostringstream out;
    write_state(out, replay.initial);
    out << "actions " << replay.actions.size() << '\n';
    for (const auto& pair : replay.actions) {
        out << action_name(pair[0]) << ' ' << action_name(pair[1]) << '\n';
    }
    return out.str();
}

Replay parse_replay(std::string_view text) {
    LineReader r(text);
    Replay replay;
    replay.initial = read_state(r);
    std::istringstream header(r.next("actions header"));
    std::string tag;
    std::size_t count = 0;
    read_fields(r, header, tag, count);
    if (tag != "actions") fail(r, "expected actions header");
    for (std::size_t i = 0; i < count; ++i) {
        std::istringstream ls(r.next("action pair"));
        std::string a0, a1;
        read_fields(r, ls, a0, a1);
        const auto p0 = parse_action(a0);
        const auto p1 = parse_action(a1);
        if (!p0 || !p1) fail(r, "unknown action");
        replay.actions.push_back({*p0, *p1});
    }
    return replay;
}

std::vector<GameState> replay_states(const Replay& replay) {
    std::vector<GameState> states{replay.initial};
    for (const auto& pair : replay.actions) states.push_back(step(states.back(), pair).next);
    return states;
}

std::string render_state(const GameState& s) {
    std::ostringstream out;
    out << "tick " << s.tick << '\n';
    for (int r = 0; r < s.size; ++r) {
        for (int c = 0; c < s.size; ++c) {
            const Pos p{r, c};
            char ch = cell_char(s.at(p));
            if (s.flame_at(p)) ch = '~';
            if (s.bomb_at(p)) ch = '*';
            if (auto id = s.agent_at(p)) ch = static_cast<char>('0' + *id);
            out << ch;
        }
        out << '\n';
    }
    for (const auto& a : s.agents) {
        out << "agent " << a.id << (a.alive ? " alive" : " dead") << " ammo=" << a.ammo
            << " blast=" << a.blast_strength << " kick=" << (a.can_kick ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pia3c
