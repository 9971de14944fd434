#include "pia3c/run_config.hpp"

#include <charconv>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

namespace pia3c {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

std::string number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
std::string number(T v) {
    return std::to_string(v);
}

struct Field {
    std::string_view key;
    std::function<std::string(const TrainConfig&)> get;
    std::function<void(TrainConfig&, std::string_view)> set;
};

template <typename T>
Field numeric(std::string_view key, T TrainConfig::*member) {
    return {key, [member](const TrainConfig& c) { return number(c.*member); },
            [key, member](TrainConfig& c, std::string_view v) { c.*member = parse_number<T>(key, v); }};
}

template <typename Getter>
Field numeric_at(std::string_view key, Getter getter) {
    using T = std::remove_reference_t<decltype(getter(std::declval<TrainConfig&>()))>;
    return {key, [getter](const TrainConfig& c) { return number(getter(const_cast<TrainConfig&>(c))); },
            [key, getter](TrainConfig& c, std::string_view v) { getter(c) = parse_number<T>(key, v); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(numeric("n_workers", &TrainConfig::n_workers));
        f.push_back(numeric("k_demonstrators", &TrainConfig::k_demonstrators));
        f.push_back(numeric("gamma", &TrainConfig::gamma));
        f.push_back(numeric("t_max", &TrainConfig::t_max));
        f.push_back(numeric("lambda_pi", &TrainConfig::lambda_pi));
        f.push_back(numeric_at("lambda_value", [](TrainConfig& c) -> double& { return c.loss.value; }));
        f.push_back(numeric_at("lambda_policy", [](TrainConfig& c) -> double& { return c.loss.policy; }));
        f.push_back(numeric_at("lambda_entropy", [](TrainConfig& c) -> double& { return c.loss.entropy; }));
        f.push_back(numeric_at("lr", [](TrainConfig& c) -> double& { return c.adam.lr; }));
        f.push_back(numeric_at("adam_beta1", [](TrainConfig& c) -> double& { return c.adam.beta1; }));
        f.push_back(numeric_at("adam_beta2", [](TrainConfig& c) -> double& { return c.adam.beta2; }));
        f.push_back(numeric_at("adam_eps", [](TrainConfig& c) -> double& { return c.adam.eps; }));
        f.push_back(numeric_at("weight_decay", [](TrainConfig& c) -> double& { return c.adam.weight_decay; }));
        f.push_back(numeric("clip_norm", &TrainConfig::clip_norm));
        f.push_back({"opponent",
                     [](const TrainConfig& c) {
                         return std::string(c.opponent == OpponentKind::RuleBased ? "rule_based" : "static");
                     },
                     [](TrainConfig& c, std::string_view v) {
                         if (v == "static") c.opponent = OpponentKind::Static;
                         else if (v == "rule_based") c.opponent = OpponentKind::RuleBased;
                         else throw ConfigError("opponent must be static or rule_based");
                     }});
        f.push_back(numeric("total_env_steps", &TrainConfig::total_env_steps));
        f.push_back(numeric("eval_every", &TrainConfig::eval_every));
        f.push_back(numeric("eval_episodes", &TrainConfig::eval_episodes));
        f.push_back(numeric("seed", &TrainConfig::seed));
        f.push_back({"arch",
                     [](const TrainConfig& c) { return std::string(c.arch == ArchPreset::Full ? "full" : "desk"); },
                     [](TrainConfig& c, std::string_view v) {
                         if (v == "desk") c.arch = ArchPreset::Desk;
                         else if (v == "full") c.arch = ArchPreset::Full;
                         else throw ConfigError("arch must be desk or full");
                     }});
        f.push_back({"log_wallclock", [](const TrainConfig& c) { return std::string(c.log_wallclock ? "true" : "false"); },
                     [](TrainConfig& c, std::string_view v) { c.log_wallclock = parse_bool("log_wallclock", v); }});
        f.push_back(numeric("board.size", &TrainConfig::board_size));
        f.push_back(numeric_at("board.wood_density", [](TrainConfig& c) -> double& { return c.density.wood_density; }));
        f.push_back(numeric_at("board.rigid_density", [](TrainConfig& c) -> double& { return c.density.rigid_density; }));
        f.push_back(numeric_at("board.n_powerups", [](TrainConfig& c) -> int& { return c.density.n_powerups; }));
        f.push_back(numeric_at("board.max_ticks", [](TrainConfig& c) -> int& { return c.rules.max_ticks; }));
        f.push_back({"board.kick", [](const TrainConfig& c) { return std::string(c.rules.kick_enabled ? "true" : "false"); },
                     [](TrainConfig& c, std::string_view v) { c.rules.kick_enabled = parse_bool("board.kick", v); }});
        f.push_back(numeric_at("planner.n_rollouts", [](TrainConfig& c) -> int& { return c.planner.n_rollouts; }));
        f.push_back(numeric_at("planner.rollout_depth", [](TrainConfig& c) -> int& { return c.planner.rollout_depth; }));
        f.push_back(numeric_at("planner.exploration_c", [](TrainConfig& c) -> double& { return c.planner.exploration_c; }));
        f.push_back({"planner.rollout_policy",
                     [](const TrainConfig& c) {
                         return std::string(c.planner.rollout_policy == RolloutPolicy::NetworkBiased ? "NetworkBiased"
                                                                                                    : "UniformRandom");
                     },
                     [](TrainConfig& c, std::string_view v) {
                         if (v == "UniformRandom") c.planner.rollout_policy = RolloutPolicy::UniformRandom;
                         else if (v == "NetworkBiased") c.planner.rollout_policy = RolloutPolicy::NetworkBiased;
                         else throw ConfigError("planner.rollout_policy must be UniformRandom or NetworkBiased");
                     }});
        f.push_back({"planner.opponent_model", [](const TrainConfig&) { return std::string("UniformRandom"); },
                     [](TrainConfig& c, std::string_view v) {
                         if (v != "UniformRandom") throw ConfigError("planner.opponent_model must be UniformRandom");
                         c.planner.opponent_model = OpponentModel::UniformRandom;
                     }});
        return f;
    }();
    return table;
}

}  // namespace

std::string serialize_config(const TrainConfig& config) {
    std::ostringstream out;
    for (const auto& f : fields()) out << f.key << '=' << f.get(config) << '\n';
    return out.str();
}

void apply_setting(TrainConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    const std::string_view key = trim(assignment.substr(0, eq));
    const std::string_view value = trim(assignment.substr(eq + 1));
    for (const auto& f : fields()) {
        if (f.key == key) {
            f.set(config, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

TrainConfig parse_config(std::string_view text) {
    TrainConfig config;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        try {
            apply_setting(config, line);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

}  // namespace pia3c
