#pragma once

// Convolutional actor-critic with hand-derived gradients.
//
// Trunk: conv layers (ReLU) -> flatten -> dense (ReLU); heads: linear policy
// logits followed by softmax over the six actions, and a linear scalar value.
// All parameters live in one flat vector partitioned into named blocks so
// that gradients, optimizer moments and checkpoints share a single layout.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pia3c/engine.hpp"
#include "pia3c/trajectory.hpp"

namespace pia3c {

struct ConvSpec {
    int filters = 32;
    int kernel = 3;
    int stride = 1;
    int padding = 1;
    bool operator==(const ConvSpec&) const = default;
};

struct NetworkArch {
    int board_size = 8;
    int in_channels = kObservationChannels;
    std::vector<ConvSpec> conv{4, ConvSpec{}};
    int dense_units = 128;
    int n_actions = kNumActions;

    bool operator==(const NetworkArch&) const = default;

    /// 4 conv layers x 32 filters (3x3, stride 1, pad 1), dense 128.
    static NetworkArch full(int board_size);
    /// 2 conv layers x 16 filters, dense 64; used for fast tests and desk-scale runs.
    static NetworkArch desk(int board_size);

    /// Single-line description, e.g. "board=8 in=28 conv=32x3s1p1,32x3s1p1 dense=128 actions=6".
    std::string describe() const;
    static NetworkArch parse(const std::string& text);

    /// Spatial side length after each conv layer (index 0 is the input).
    std::vector<int> spatial_sizes() const;
};

struct ParamBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
};

class NetworkParams {
public:
    NetworkParams() = default;
    explicit NetworkParams(NetworkArch arch);

    const NetworkArch& arch() const { return arch_; }
    const std::vector<ParamBlock>& blocks() const { return blocks_; }
    const ParamBlock& block(const std::string& name) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::span<double> view(const std::string& name);
    std::span<const double> view(const std::string& name) const;
    std::size_t size() const { return values_.size(); }

    bool operator==(const NetworkParams& other) const { return arch_ == other.arch_ && values_ == other.values_; }

private:
    NetworkArch arch_;
    std::vector<ParamBlock> blocks_;
    std::vector<double> values_;
};

/// Co-shaped with NetworkParams::values().
struct GradientSet {
    std::vector<double> values;
    double norm() const;
};

class NonFiniteGradient : public std::runtime_error {
public:
    explicit NonFiniteGradient(const std::string& block)
        : std::runtime_error("non-finite gradient in parameter block " + block), block_name(block) {}
    std::string block_name;
};

/// Fan-in scaled uniform initialization of trunk weights, zero biases; both
/// head weight matrices are zero when zero_heads is set (uniform initial
/// policy, zero initial value), otherwise they are initialized like the trunk.
NetworkParams init_params(const NetworkArch& arch, std::uint64_t seed, bool zero_heads = true);

struct ForwardOutput {
    PolicyVector policy{};
    double value = 0.0;
};

ForwardOutput forward(const NetworkParams& params, const Observation& obs);

/// Probability floor applied inside every log.
inline constexpr double kProbFloor = 1e-8;

double policy_entropy(const PolicyVector& p);

struct LossWeights {
    double value = 0.5;
    double policy = 1.0;
    double entropy = 0.01;
    double imitation = 0.0;
    bool operator==(const LossWeights&) const = default;
};

struct LossParts {
    double value = 0.0;       // sum_t (R_t - V(s_t))^2
    double policy = 0.0;      // -sum_t log pi(a_t|s_t) A_t
    double entropy = 0.0;     // mean_t H(pi(s_t))
    double imitation = 0.0;   // mean cross entropy against demonstrator actions (0 if none)
    double total = 0.0;       // value*Lv + policy*Lpi - entropy*H + imitation*Lpi_im
};

/// A3C loss on a segment whose returns/advantages are attached; the imitation
/// weight is ignored.
LossParts a3c_loss(const TrajectorySegment& segment, const NetworkParams& params,
                   const LossWeights& weights = {});

/// -(1/N) sum_i log p_i[demo_i].
double planner_imitation_loss(std::span<const Action> demonstrator_actions,
                              std::span<const PolicyVector> network_policies);

/// Full composed loss over a segment. The imitation term averages over the
/// steps that carry a demonstrator action.
LossParts segment_loss(const TrajectorySegment& segment, const NetworkParams& params,
                       const LossWeights& weights);

struct LossAndGradient {
    LossParts loss;
    GradientSet grads;
    double norm_before_clip = 0.0;
};

/// Exact gradient of segment_loss. Advantages are constants. Throws
/// NonFiniteGradient before clipping; rescales to clip_norm when the global
/// norm exceeds it (clip_norm <= 0 disables clipping).
LossAndGradient backward(const NetworkParams& params, const TrajectorySegment& segment,
                         const LossWeights& weights, double clip_norm = 40.0);

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-5;
    double weight_decay = 1e-5;
    bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step = 0;
};

/// Adam with bias correction; weight decay is added to the gradient (L2).
void adam_step(NetworkParams& params, const GradientSet& grads, AdamState& state, const AdamConfig& config = {});

/// Checkpoint: text header (magic/version, arch, step, count) followed by the
/// parameters as raw little-endian IEEE-754 doubles.
std::string serialize_checkpoint(const NetworkParams& params, std::int64_t step);
NetworkParams parse_checkpoint(std::string_view bytes, std::int64_t* step = nullptr);
void save_checkpoint(const std::string& path, const NetworkParams& params, std::int64_t step);
NetworkParams load_checkpoint(const std::string& path, std::int64_t* step = nullptr);

}  // namespace pia3c
