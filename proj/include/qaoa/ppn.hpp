#ifndef QAOA_PPN_HPP
#define QAOA_PPN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qaoa/qaoa.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

// Dense channels x height x width tensor. Parameter tensors are 1 x 2 x p:
// row 0 holds normalized gammas, row 1 normalized betas. Storage is
// channels-last so per-pixel channel vectors are contiguous; use at() rather
// than indexing data directly.
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(int c, int h, int w)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, 0.0) {}

    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor3& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

// 2-D convolution layer: stride 1, zero padding on all four sides, bias per
// filter. Weights are stored (kh, kw, c, m) internally; weight_at() exposes
// the usual (filter, channel, row, col) view.
struct ConvLayer {
    int out_channels = 0;
    int in_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    int padding = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    ConvLayer() = default;
    ConvLayer(int m, int c, int kh, int kw, int pad)
        : out_channels(m), in_channels(c), kernel_h(kh), kernel_w(kw), padding(pad),
          weights(static_cast<std::size_t>(m) * c * kh * kw, 0.0), bias(m, 0.0) {}

    double& weight_at(int m, int c, int i, int j) {
        return weights[((static_cast<std::size_t>(i) * kernel_w + j) * in_channels + c) *
                           out_channels +
                       m];
    }
    double weight_at(int m, int c, int i, int j) const {
        return weights[((static_cast<std::size_t>(i) * kernel_w + j) * in_channels + c) *
                           out_channels +
                       m];
    }
    int out_height(int h) const { return h + 2 * padding - kernel_h + 1; }
    int out_width(int w) const { return w + 2 * padding - kernel_w + 1; }
};

// Cross-correlation with zero padding and stride 1.
Tensor3 conv2d(const Tensor3& input, const ConvLayer& layer);

struct ResidualBlock {
    ConvLayer conv1;
    ConvLayer conv2;
};

// Width-p parameter tensor in, width-(p+1) tensor out: two 2x2 up-sampling
// convolutions (1 -> 16 -> 64 channels), D residual blocks of two 3x3
// convolutions with an identity skip, and a single 3x2 down-sampling filter.
struct PpnModel {
    ConvLayer up1;
    ConvLayer up2;
    std::vector<ResidualBlock> blocks;
    ConvLayer down;

    int n_blocks() const { return static_cast<int>(blocks.size()); }

    // fan-in-scaled Gaussian weights, zero biases
    static PpnModel randomized(int n_blocks, Rng& rng);
    static PpnModel zeros(int n_blocks);
};

// gamma / pi and 2 * beta / pi; inputs must lie in the parameter box.
Tensor3 normalize(const ParameterSet& params);
// Inverse of normalize; entries must lie in [0, 1).
ParameterSet denormalize(const Tensor3& t);

// Inference forward pass: entries clamped to [0, 1 - 1e-6].
Tensor3 ppn_forward(const PpnModel& model, const Tensor3& x);
// Training forward pass, no clamping.
Tensor3 ppn_forward_raw(const PpnModel& model, const Tensor3& x);
// steps successive clamped forward passes; output width = input width + steps.
Tensor3 ppn_compose(const PpnModel& model, const Tensor3& x, int steps);

// Squared distance between equal-width normalized tensors.
double prediction_error(const Tensor3& pred, const Tensor3& truth);

// One training instance: the normalized depth-s optimum plus the normalized
// optima for depths s+1 .. s+T.
struct TrainingExample {
    Tensor3 start;
    std::vector<Tensor3> targets;
};

// (1 / (N T)) sum_i sum_t || F^t(x_i) - x_i^(s+t) ||^2 with raw forwards.
double composed_loss(const PpnModel& model, const std::vector<TrainingExample>& batch,
                     int horizon);

// Same value; also accumulates d(loss)/d(weights) into gradient (a
// zero-initialized model-shaped container). Backpropagates through the full
// composition unroll.
double composed_loss_with_gradient(const PpnModel& model,
                                   const std::vector<TrainingExample>& batch, int horizon,
                                   PpnModel& gradient);

struct TrainConfig {
    int epochs_phase1 = 3000;
    int epochs_phase2 = 1000;
    double lr_phase1 = 1e-5;
    double lr_phase2 = 1e-6;
    int batch_phase1 = 11;
    int batch_phase2 = 6;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 1;
    int horizon = 4;  // T
    int n_threads = 1;
};

// Two-phase Adam training; deterministic for a fixed seed and any thread
// count. Returns the per-epoch mean loss.
std::vector<double> train_ppn(PpnModel& model, const std::vector<TrainingExample>& dataset,
                              const TrainConfig& cfg);

// Self-describing binary container; exact weight round trip.
void save_model(const PpnModel& model, const std::string& path);
PpnModel load_model(const std::string& path);

}  // namespace qaoa

#endif  // QAOA_PPN_HPP
