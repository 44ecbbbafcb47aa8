#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eeglab/common.hpp"
#include "eeglab/mat.hpp"
#include "eeglab/recording.hpp"

namespace eeglab {

enum class Family {
    linear_softmax,
    channelwise_cnn,
    pooled_cnn,
    recurrent_encoder,
};

// Encoder/classifier boundary variants. direct and fc40 are one FC layer to
// n_classes whose activations are both the logits and the encoding. relu_only
// applies FC -> ReLU and reads the first n_classes activations as logits.
// relu_fc40 puts a second FC after the ReLU encoding.
enum class Head { direct, fc40, relu_fc40, relu_only };

std::string family_name(Family f);
Family family_from_name(const std::string& s);
std::string head_name(Head h);
Head head_from_name(const std::string& s);

struct ModelSpec {
    Family family = Family::linear_softmax;
    Head head = Head::direct;
    std::size_t n_channels = 128;
    std::size_t input_len = 440;
    std::size_t n_classes = 40;
    std::size_t encoder_dim = 128;
    // 0 = family default (4 for recurrent-encoder, else 1).
    std::size_t downsample_factor = 0;
    std::size_t hidden = 128;       // recurrent trunk
    std::size_t conv_filters = 6;   // per channel (channelwise) or total (pooled)
    std::size_t kernel = 9;
    std::size_t stride = 2;
    std::size_t pool_bins = 4;

    ModelSpec resolved() const;
    std::size_t steps() const;         // time length after downsampling
    std::size_t conv_positions() const;
    std::size_t feature_dim() const;   // trunk output size
    std::size_t encode_dim() const;    // boundary activation size
    std::size_t param_count() const;
    void validate() const;
};

struct EpochStats {
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
};

struct TrainedModel {
    ModelSpec spec;  // resolved
    std::vector<double> params;
    std::vector<EpochStats> history;
    std::size_t checkpoint_epoch = 0;   // highest validation accuracy
    std::size_t lowest_val_epoch = 0;   // logged for audit
    bool trained = false;
};

// Seeded initialization: weights uniform in +-1/sqrt(fan_in), biases zero.
TrainedModel build(const ModelSpec& spec, std::uint64_t seed);

// Per-sample activation caches, reused across calls to avoid reallocation.
struct ModelWorkspace {
    std::vector<double> xd;      // downsampled input, channel-major
    std::vector<double> conv;    // pre-ReLU conv activations
    std::vector<double> feat;    // trunk output
    std::vector<double> act1;    // head pre-ReLU
    std::vector<double> enc;     // boundary activations
    std::vector<double> logits;
    std::vector<double> probs;
    // LSTM step caches (gate outputs, cell, hidden, tanh(cell)).
    std::vector<double> gi, gf, gg, go, cs, hs, tanhc;
    std::vector<double> dfeat, dact1, denc, dlogits, dh, dc, dz;
};

void forward(const ModelSpec& spec, const std::vector<double>& params,
             const Mat& x, ModelWorkspace& ws);

// Forward + softmax cross-entropy + backward; gradients are accumulated
// into grad (same layout as params). Returns the sample loss.
double loss_and_grad(const ModelSpec& spec, const std::vector<double>& params,
                     const Mat& x, int label, ModelWorkspace& ws,
                     std::vector<double>& grad);

std::vector<double> logits_of(const TrainedModel& m, const Mat& x);
std::vector<double> encode(const TrainedModel& m, const Segment& seg);
int predict(const TrainedModel& m, const Mat& x);  // argmax, lowest index wins

}  // namespace eeglab
