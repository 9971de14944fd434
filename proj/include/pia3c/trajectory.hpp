#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pia3c/engine.hpp"

namespace pia3c {

using PolicyVector = std::array<double, kNumActions>;

struct TrajectoryStep {
    Observation observation;
    Action action_taken = Action::Stop;
    double reward = 0.0;
    double value_estimate = 0.0;
    PolicyVector policy_snapshot{};
    std::optional<Action> demonstrator_action;  // set only by demonstrator workers
    // Filled by compute_returns_and_advantages.
    double ret = 0.0;
    double advantage = 0.0;
};

/// Up to t_max consecutive steps of one worker, cut at t_max or at a terminal.
struct TrajectorySegment {
    std::vector<TrajectoryStep> steps;
    double bootstrap_value = 0.0;  // 0 when terminal, else V(s_{t+n}) from the local net
    bool terminal = false;
};

}  // namespace pia3c
