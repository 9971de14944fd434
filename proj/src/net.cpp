#include "pia3c/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pia3c/rng.hpp"

namespace pia3c {

namespace {

std::string conv_name(std::size_t l, const char* part) { return "conv" + std::to_string(l) + "." + part; }

int flat_size(const NetworkArch& arch) {
    const auto sizes = arch.spatial_sizes();
    const int channels = arch.conv.empty() ? arch.in_channels : arch.conv.back().filters;
    return channels * sizes.back() * sizes.back();
}

// Activations recorded during a forward pass, needed by backward.
struct Trace {
    std::vector<std::vector<double>> act;  // act[0] = input, act[l + 1] = ReLU(conv l)
    std::vector<double> hidden;            // ReLU(dense)
    PolicyVector logits{};
    PolicyVector probs{};
    double value = 0.0;
};

void softmax(const PolicyVector& z, PolicyVector& p) {
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - mx);
        sum += p[i];
    }
    for (auto& x : p) x /= sum;
}

// Valid output range along one axis for kernel offset k: in = out * s + k - p must lie in [0, in_size).
struct AxisRange {
    int lo;
    int hi;  // exclusive
};

AxisRange axis_range(int k, const ConvSpec& cs, int in_size, int out_size) {
    int lo = 0;
    while (lo < out_size && lo * cs.stride + k - cs.padding < 0) ++lo;
    int hi = out_size;
    while (hi > lo && (hi - 1) * cs.stride + k - cs.padding >= in_size) --hi;
    return {lo, hi};
}

void conv_forward(const double* in, int cin, int sin, const double* w, const double* b, const ConvSpec& cs,
                  int sout, double* out) {
    const int k = cs.kernel;
    std::vector<AxisRange> ranges(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) ranges[static_cast<std::size_t>(i)] = axis_range(i, cs, sin, sout);
    const int plane_out = sout * sout;
    const int plane_in = sin * sin;
    for (int f = 0; f < cs.filters; ++f) {
        double* o = out + f * plane_out;
        std::fill(o, o + plane_out, b[f]);
        for (int c = 0; c < cin; ++c) {
            const double* ip = in + c * plane_in;
            const double* wf = w + (f * cin + c) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                const AxisRange ry = ranges[static_cast<std::size_t>(ky)];
                for (int kx = 0; kx < k; ++kx) {
                    const double wv = wf[ky * k + kx];
                    if (wv == 0.0) continue;
                    const AxisRange rx = ranges[static_cast<std::size_t>(kx)];
                    for (int oy = ry.lo; oy < ry.hi; ++oy) {
                        const double* row = ip + (oy * cs.stride + ky - cs.padding) * sin;
                        double* orow = o + oy * sout;
                        for (int ox = rx.lo; ox < rx.hi; ++ox) {
                            orow[ox] += wv * row[ox * cs.stride + kx - cs.padding];
                        }
                    }
                }
            }
        }
        for (int i = 0; i < plane_out; ++i) o[i] = std::max(0.0, o[i]);
    }
}

// gpre: gradient w.r.t. the pre-activation output. Accumulates into gw, gb and
// (when gin is non-null) the gradient w.r.t. the layer input.
void conv_backward(const double* in, int cin, int sin, const double* w, const ConvSpec& cs, int sout,
                   const double* gpre, double* gw, double* gb, double* gin) {
    const int k = cs.kernel;
    std::vector<AxisRange> ranges(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) ranges[static_cast<std::size_t>(i)] = axis_range(i, cs, sin, sout);
    const int plane_out = sout * sout;
    const int plane_in = sin * sin;
    for (int f = 0; f < cs.filters; ++f) {
        const double* g = gpre + f * plane_out;
        double bsum = 0.0;
        for (int i = 0; i < plane_out; ++i) bsum += g[i];
        gb[f] += bsum;
        for (int c = 0; c < cin; ++c) {
            const double* ip = in + c * plane_in;
            double* gip = gin ? gin + c * plane_in : nullptr;
            const double* wf = w + (f * cin + c) * k * k;
            double* gwf = gw + (f * cin + c) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                const AxisRange ry = ranges[static_cast<std::size_t>(ky)];
                for (int kx = 0; kx < k; ++kx) {
                    const AxisRange rx = ranges[static_cast<std::size_t>(kx)];
                    const double wv = wf[ky * k + kx];
                    double acc = 0.0;
                    for (int oy = ry.lo; oy < ry.hi; ++oy) {
                        const int iy = oy * cs.stride + ky - cs.padding;
                        const double* grow = g + oy * sout;
                        const double* row = ip + iy * sin;
                        for (int ox = rx.lo; ox < rx.hi; ++ox) {
                            const int ix = ox * cs.stride + kx - cs.padding;
                            acc += grow[ox] * row[ix];
                            if (gip) gip[iy * sin + ix] += wv * grow[ox];
                        }
                    }
                    gwf[ky * k + kx] += acc;
                }
            }
        }
    }
}

void check_obs(const NetworkParams& params, const Observation& obs) {
    const auto& arch = params.arch();
    if (obs.size != arch.board_size ||
        obs.data.size() != static_cast<std::size_t>(arch.in_channels * arch.board_size * arch.board_size)) {
        throw ContractViolation("observation shape does not match network architecture (" + arch.describe() + ")");
    }
}

Trace run_forward(const NetworkParams& params, const Observation& obs) {
    check_obs(params, obs);
    const NetworkArch& arch = params.arch();
    const auto sizes = arch.spatial_sizes();
    Trace t;
    t.act.reserve(arch.conv.size() + 1);
    t.act.push_back(obs.data);
    int cin = arch.in_channels;
    for (std::size_t l = 0; l < arch.conv.size(); ++l) {
        const ConvSpec& cs = arch.conv[l];
        std::vector<double> out(static_cast<std::size_t>(cs.filters * sizes[l + 1] * sizes[l + 1]));
        conv_forward(t.act.back().data(), cin, sizes[l], params.view(conv_name(l, "weight")).data(),
                     params.view(conv_name(l, "bias")).data(), cs, sizes[l + 1], out.data());
        t.act.push_back(std::move(out));
        cin = cs.filters;
    }
    const std::vector<double>& flat = t.act.back();
    const auto d = flat.size();
    const auto dw = params.view("dense.weight");
    const auto db = params.view("dense.bias");
    t.hidden.resize(static_cast<std::size_t>(arch.dense_units));
    for (std::size_t u = 0; u < t.hidden.size(); ++u) {
        double acc = db[u];
        const double* row = dw.data() + u * d;
        for (std::size_t i = 0; i < d; ++i) acc += row[i] * flat[i];
        t.hidden[u] = std::max(0.0, acc);
    }
    const auto pw = params.view("policy.weight");
    const auto pb = params.view("policy.bias");
    for (std::size_t j = 0; j < t.logits.size(); ++j) {
        double acc = pb[j];
        for (std::size_t u = 0; u < t.hidden.size(); ++u) acc += pw[j * t.hidden.size() + u] * t.hidden[u];
        t.logits[j] = acc;
    }
    softmax(t.logits, t.probs);
    const auto vw = params.view("value.weight");
    double v = params.view("value.bias")[0];
    for (std::size_t u = 0; u < t.hidden.size(); ++u) v += vw[u] * t.hidden[u];
    t.value = v;
    return t;
}

double floored_log(double p) { return std::log(std::max(p, kProbFloor)); }

// Gradient of -log(max(p_a, floor)) w.r.t. the logits, scaled by `scale`.
void add_neg_log_prob_grad(const PolicyVector& p, std::size_t a, double scale, PolicyVector& dz) {
    if (p[a] < kProbFloor) return;
    for (std::size_t k = 0; k < p.size(); ++k) dz[k] += scale * (p[k] - (k == a ? 1.0 : 0.0));
}

// Gradient of -H(p) (with floored logs) w.r.t. the logits, scaled by `scale`.
void add_neg_entropy_grad(const PolicyVector& p, double scale, PolicyVector& dz) {
    PolicyVector g{};
    double mean = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        g[j] = floored_log(p[j]) + (p[j] >= kProbFloor ? 1.0 : 0.0);
        mean += p[j] * g[j];
    }
    for (std::size_t k = 0; k < p.size(); ++k) dz[k] += scale * p[k] * (g[k] - mean);
}

void require_nonempty(const TrajectorySegment& segment) {
    if (segment.steps.empty()) throw ContractViolation("loss requested on an empty segment");
}

}  // namespace

NetworkArch NetworkArch::full(int board_size) {
    NetworkArch a;
    a.board_size = board_size;
    return a;
}

NetworkArch NetworkArch::desk(int board_size) {
    NetworkArch a;
    a.board_size = board_size;
    a.conv = {ConvSpec{16, 3, 1, 1}, ConvSpec{16, 3, 1, 1}};
    a.dense_units = 64;
    return a;
}

std::string NetworkArch::describe() const {
    std::ostringstream out;
    out << "board=" << board_size << " in=" << in_channels << " conv=";
    if (conv.empty()) out << '-';
    for (std::size_t i = 0; i < conv.size(); ++i) {
        if (i) out << ',';
        out << conv[i].filters << 'x' << conv[i].kernel << 's' << conv[i].stride << 'p' << conv[i].padding;
    }
    out << " dense=" << dense_units << " actions=" << n_actions;
    return out.str();
}

NetworkArch NetworkArch::parse(const std::string& text) {
    NetworkArch a;
    a.conv.clear();
    std::istringstream in(text);
    std::string token;
    int seen = 0;
    auto bad = [&]() { return std::runtime_error("malformed architecture description: " + text); };
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw bad();
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        try {
            if (key == "board") a.board_size = std::stoi(val);
            else if (key == "in") a.in_channels = std::stoi(val);
            else if (key == "dense") a.dense_units = std::stoi(val);
            else if (key == "actions") a.n_actions = std::stoi(val);
            else if (key == "conv") {
                if (val != "-") {
                    std::istringstream layers(val);
                    std::string layer;
                    while (std::getline(layers, layer, ',')) {
                        ConvSpec cs;
                        char x = 0, s = 0, p = 0;
                        std::istringstream ls(layer);
                        if (!(ls >> cs.filters >> x >> cs.kernel >> s >> cs.stride >> p >> cs.padding) || x != 'x' ||
                            s != 's' || p != 'p') {
                            throw bad();
                        }
                        a.conv.push_back(cs);
                    }
                }
            } else {
                throw bad();
            }
        } catch (const std::invalid_argument&) {
            throw bad();
        }
        ++seen;
    }
    if (seen != 5) throw bad();
    if (a.n_actions != kNumActions || a.in_channels != kObservationChannels) throw bad();
    return a;
}

std::vector<int> NetworkArch::spatial_sizes() const {
    std::vector<int> sizes{board_size};
    for (const auto& cs : conv) {
        const int next = (sizes.back() + 2 * cs.padding - cs.kernel) / cs.stride + 1;
        if (next < 1) throw ContractViolation("convolution stack shrinks the board below one cell");
        sizes.push_back(next);
    }
    return sizes;
}

NetworkParams::NetworkParams(NetworkArch arch) : arch_(std::move(arch)) {
    std::size_t offset = 0;
    auto add = [&](std::string name, std::size_t n) {
        blocks_.push_back(ParamBlock{std::move(name), offset, n});
        offset += n;
    };
    int cin = arch_.in_channels;
    for (std::size_t l = 0; l < arch_.conv.size(); ++l) {
        const ConvSpec& cs = arch_.conv[l];
        add(conv_name(l, "weight"), static_cast<std::size_t>(cs.filters * cin * cs.kernel * cs.kernel));
        add(conv_name(l, "bias"), static_cast<std::size_t>(cs.filters));
        cin = cs.filters;
    }
    const auto flat = static_cast<std::size_t>(flat_size(arch_));
    const auto units = static_cast<std::size_t>(arch_.dense_units);
    add("dense.weight", units * flat);
    add("dense.bias", units);
    add("policy.weight", static_cast<std::size_t>(arch_.n_actions) * units);
    add("policy.bias", static_cast<std::size_t>(arch_.n_actions));
    add("value.weight", units);
    add("value.bias", 1);
    values_.assign(offset, 0.0);
}

const ParamBlock& NetworkParams::block(const std::string& name) const {
    for (const auto& b : blocks_) {
        if (b.name == name) return b;
    }
    throw std::out_of_range("no parameter block named " + name);
}

std::span<double> NetworkParams::view(const std::string& name) {
    const auto& b = block(name);
    return {values_.data() + b.offset, b.size};
}

std::span<const double> NetworkParams::view(const std::string& name) const {
    const auto& b = block(name);
    return {values_.data() + b.offset, b.size};
}

double GradientSet::norm() const {
    double sq = 0.0;
    for (double g : values) sq += g * g;
    return std::sqrt(sq);
}

NetworkParams init_params(const NetworkArch& arch, std::uint64_t seed, bool zero_heads) {
    NetworkParams p(arch);
    Rng rng(seed);
    auto fill_uniform = [&](const std::string& name, double fan_in) {
        const double bound = std::sqrt(6.0 / fan_in);
        for (double& w : p.view(name)) w = (2.0 * rng.uniform() - 1.0) * bound;
    };
    int cin = arch.in_channels;
    for (std::size_t l = 0; l < arch.conv.size(); ++l) {
        fill_uniform(conv_name(l, "weight"), cin * arch.conv[l].kernel * arch.conv[l].kernel);
        cin = arch.conv[l].filters;
    }
    fill_uniform("dense.weight", flat_size(arch));
    if (!zero_heads) {
        fill_uniform("policy.weight", arch.dense_units);
        fill_uniform("value.weight", arch.dense_units);
    }
    return p;
}

ForwardOutput forward(const NetworkParams& params, const Observation& obs) {
    const Trace t = run_forward(params, obs);
    return {t.probs, t.value};
}

double policy_entropy(const PolicyVector& p) {
    double h = 0.0;
    for (double x : p) h -= x * floored_log(x);
    return h;
}

double planner_imitation_loss(std::span<const Action> demonstrator_actions,
                              std::span<const PolicyVector> network_policies) {
    if (demonstrator_actions.size() != network_policies.size()) {
        throw ContractViolation("imitation loss needs one policy per demonstrator action");
    }
    if (demonstrator_actions.empty()) throw ContractViolation("imitation loss on an empty batch");
    double sum = 0.0;
    for (std::size_t i = 0; i < demonstrator_actions.size(); ++i) {
        sum -= floored_log(network_policies[i][static_cast<std::size_t>(demonstrator_actions[i])]);
    }
    return sum / static_cast<double>(demonstrator_actions.size());
}

LossParts segment_loss(const TrajectorySegment& segment, const NetworkParams& params, const LossWeights& w) {
    require_nonempty(segment);
    LossParts parts;
    std::vector<Action> demo;
    std::vector<PolicyVector> demo_policies;
    for (const auto& st : segment.steps) {
        const ForwardOutput out = forward(params, st.observation);
        const double err = st.ret - out.value;
        parts.value += err * err;
        parts.policy -= floored_log(out.policy[static_cast<std::size_t>(st.action_taken)]) * st.advantage;
        parts.entropy += policy_entropy(out.policy);
        if (st.demonstrator_action) {
            demo.push_back(*st.demonstrator_action);
            demo_policies.push_back(out.policy);
        }
    }
    parts.entropy /= static_cast<double>(segment.steps.size());
    if (!demo.empty()) parts.imitation = planner_imitation_loss(demo, demo_policies);
    parts.total = w.value * parts.value + w.policy * parts.policy - w.entropy * parts.entropy +
                  w.imitation * parts.imitation;
    return parts;
}

LossParts a3c_loss(const TrajectorySegment& segment, const NetworkParams& params, const LossWeights& weights) {
    LossWeights w = weights;
    w.imitation = 0.0;
    LossParts parts = segment_loss(segment, params, w);
    return parts;
}

LossAndGradient backward(const NetworkParams& params, const TrajectorySegment& segment, const LossWeights& w,
                         double clip_norm) {
    require_nonempty(segment);
    const NetworkArch& arch = params.arch();
    const auto sizes = arch.spatial_sizes();
    LossAndGradient out;
    out.grads.values.assign(params.size(), 0.0);
    auto gblock = [&](const std::string& name) {
        const auto& b = params.block(name);
        return out.grads.values.data() + b.offset;
    };

    const auto n_steps = static_cast<double>(segment.steps.size());
    std::size_t n_demo = 0;
    for (const auto& st : segment.steps) n_demo += st.demonstrator_action ? 1 : 0;

    std::vector<Action> demo;
    std::vector<PolicyVector> demo_policies;
    const auto units = static_cast<std::size_t>(arch.dense_units);
    const auto pw = params.view("policy.weight");
    const auto vw = params.view("value.weight");
    const auto dw = params.view("dense.weight");

    for (const auto& st : segment.steps) {
        const Trace t = run_forward(params, st.observation);

        const double err = st.ret - t.value;
        out.loss.value += err * err;
        out.loss.policy -= floored_log(t.probs[static_cast<std::size_t>(st.action_taken)]) * st.advantage;
        out.loss.entropy += policy_entropy(t.probs);

        PolicyVector dz{};
        add_neg_log_prob_grad(t.probs, static_cast<std::size_t>(st.action_taken), w.policy * st.advantage, dz);
        add_neg_entropy_grad(t.probs, w.entropy / n_steps, dz);
        if (st.demonstrator_action) {
            demo.push_back(*st.demonstrator_action);
            demo_policies.push_back(t.probs);
            add_neg_log_prob_grad(t.probs, static_cast<std::size_t>(*st.demonstrator_action),
                                  w.imitation / static_cast<double>(n_demo), dz);
        }
        const double dv = -2.0 * w.value * err;

        // heads
        double* gpw = gblock("policy.weight");
        double* gpb = gblock("policy.bias");
        double* gvw = gblock("value.weight");
        gblock("value.bias")[0] += dv;
        std::vector<double> gh(units, 0.0);
        for (std::size_t j = 0; j < dz.size(); ++j) {
            gpb[j] += dz[j];
            if (dz[j] == 0.0) continue;
            for (std::size_t u = 0; u < units; ++u) {
                gpw[j * units + u] += dz[j] * t.hidden[u];
                gh[u] += pw[j * units + u] * dz[j];
            }
        }
        for (std::size_t u = 0; u < units; ++u) {
            gvw[u] += dv * t.hidden[u];
            gh[u] += vw[u] * dv;
            if (t.hidden[u] <= 0.0) gh[u] = 0.0;
        }

        // dense
        const std::vector<double>& flat = t.act.back();
        const std::size_t d = flat.size();
        double* gdw = gblock("dense.weight");
        double* gdb = gblock("dense.bias");
        std::vector<double> gflat(d, 0.0);
        for (std::size_t u = 0; u < units; ++u) {
            const double g = gh[u];
            if (g == 0.0) continue;
            gdb[u] += g;
            double* grow = gdw + u * d;
            const double* wrow = dw.data() + u * d;
            for (std::size_t i = 0; i < d; ++i) {
                grow[i] += g * flat[i];
                gflat[i] += g * wrow[i];
            }
        }

        // conv stack, last layer first
        std::vector<double> gcur = std::move(gflat);
        for (std::size_t l = arch.conv.size(); l-- > 0;) {
            const std::vector<double>& post = t.act[l + 1];
            for (std::size_t i = 0; i < gcur.size(); ++i) {
                if (post[i] <= 0.0) gcur[i] = 0.0;
            }
            const int cin = l == 0 ? arch.in_channels : arch.conv[l - 1].filters;
            std::vector<double> gin;
            if (l > 0) gin.assign(t.act[l].size(), 0.0);
            conv_backward(t.act[l].data(), cin, sizes[l], params.view(conv_name(l, "weight")).data(), arch.conv[l],
                          sizes[l + 1], gcur.data(), gblock(conv_name(l, "weight")), gblock(conv_name(l, "bias")),
                          l > 0 ? gin.data() : nullptr);
            gcur = std::move(gin);
        }
    }

    out.loss.entropy /= n_steps;
    if (!demo.empty()) out.loss.imitation = planner_imitation_loss(demo, demo_policies);
    out.loss.total = w.value * out.loss.value + w.policy * out.loss.policy - w.entropy * out.loss.entropy +
                     w.imitation * out.loss.imitation;

    for (const auto& b : params.blocks()) {
        for (std::size_t i = b.offset; i < b.offset + b.size; ++i) {
            if (!std::isfinite(out.grads.values[i])) throw NonFiniteGradient(b.name);
        }
    }
    out.norm_before_clip = out.grads.norm();
    if (clip_norm > 0.0 && out.norm_before_clip > clip_norm) {
        const double scale = clip_norm / out.norm_before_clip;
        for (double& g : out.grads.values) g *= scale;
    }
    return out;
}

void adam_step(NetworkParams& params, const GradientSet& grads, AdamState& state, const AdamConfig& c) {
    auto& theta = params.values();
    if (grads.values.size() != theta.size()) throw ContractViolation("gradient shape does not match parameters");
    if (state.m.empty() && state.v.empty()) {
        state.m.assign(theta.size(), 0.0);
        state.v.assign(theta.size(), 0.0);
    }
    if (state.m.size() != theta.size() || state.v.size() != theta.size()) {
        throw ContractViolation("optimizer state shape does not match parameters");
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grads.values[i] + c.weight_decay * theta[i];
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        theta[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

namespace {
constexpr const char* kCheckpointMagic = "PIA3C-CHECKPOINT 1";
}

std::string serialize_checkpoint(const NetworkParams& params, std::int64_t step) {
    std::ostringstream out;
    out << kCheckpointMagic << '\n'
        << "arch " << params.arch().describe() << '\n'
        << "step " << step << '\n'
        << "count " << params.size() << '\n';
    std::string bytes = out.str();
    bytes.reserve(bytes.size() + params.size() * 8);
    for (double v : params.values()) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            bytes.push_back(static_cast<char>(bits & 0xffu));
            bits >>= 8;
        }
    }
    return bytes;
}

NetworkParams parse_checkpoint(std::string_view bytes, std::int64_t* step) {
    std::size_t pos = 0;
    auto line = [&]() {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos) throw std::runtime_error("truncated checkpoint header");
        std::string s(bytes.substr(pos, nl - pos));
        pos = nl + 1;
        return s;
    };
    if (line() != kCheckpointMagic) throw std::runtime_error("not a checkpoint (bad magic)");
    const std::string arch_line = line();
    const std::string step_line = line();
    const std::string count_line = line();
    if (arch_line.rfind("arch ", 0) != 0 || step_line.rfind("step ", 0) != 0 || count_line.rfind("count ", 0) != 0) {
        throw std::runtime_error("malformed checkpoint header");
    }
    NetworkParams params(NetworkArch::parse(arch_line.substr(5)));
    const auto count = std::stoull(count_line.substr(6));
    if (count != params.size()) throw std::runtime_error("checkpoint parameter count does not match its architecture");
    if (bytes.size() - pos != count * 8) throw std::runtime_error("checkpoint payload has the wrong length");
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) {
            bits = (bits << 8) | static_cast<unsigned char>(bytes[pos + i * 8 + static_cast<std::size_t>(b)]);
        }
        params.values()[i] = std::bit_cast<double>(bits);
    }
    if (step) *step = std::stoll(step_line.substr(5));
    return params;
}

void save_checkpoint(const std::string& path, const NetworkParams& params, std::int64_t step) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    const std::string bytes = serialize_checkpoint(params, step);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

NetworkParams load_checkpoint(const std::string& path, std::int64_t* step) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_checkpoint(ss.str(), step);
}

}  // namespace pia3c
