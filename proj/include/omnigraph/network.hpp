#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "omnigraph/dataset.hpp"
#include "omnigraph/graph.hpp"

namespace omnigraph {

struct NetworkConfig {
    int j1 = 10;      // filters in the first spectral layer
    int j2 = 20;      // output maps of the second spectral layer
    int degree = 5;   // polynomial degree M
    int p1 = 2000;    // nodes kept after the first layer
    int p2 = 200;     // nodes kept after the second layer
    int scales = 12;  // Laplacian powers 0..scales-1 in the statistical layer
    std::vector<int> fc = {300, 200, 100};
    int classes = 3;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int batch_size = 32;
    int epochs = 30;
    std::uint64_t seed = 7;

    int feature_size() const { return j2 * scales * 2; }
    /// Throws ShapeError when the configuration cannot run on n_nodes.
    void validate(std::size_t n_nodes) const;
    bool operator==(const NetworkConfig&) const = default;
};

struct DenseLayer {
    int in = 0;
    int out = 0;
    std::vector<double> weights;  // out x in, row-major
    std::vector<double> bias;
};

/// Trainable parameters. Also used as the container for their gradients.
struct NetworkParams {
    std::vector<double> alpha1;  // [j][m], j1 x (M+1)
    std::vector<double> alpha2;  // [j][k][m], j1 x j2 x (M+1)
    std::vector<DenseLayer> fc;  // hidden layers, then the class layer
    // Fixed affine map applied to the feature vector before the dense head:
    // (f - feature_shift) * feature_scale. Fitted once on the training set,
    // never trained; identity after init().
    std::vector<double> feature_shift;
    std::vector<double> feature_scale;

    /// Seeded initialisation: spectral coefficients uniform in
    /// +-1/(M+1), dense weights uniform in +-sqrt(6 / fan_in), zero biases.
    static NetworkParams init(const NetworkConfig& cfg);
    /// Same shapes, all zeros.
    static NetworkParams zeros_like(const NetworkParams& p);

    /// Every trainable array in checkpoint order: alpha1, alpha2, then
    /// weights and bias of each dense layer.
    std::vector<std::span<double>> groups();
    std::vector<std::span<const double>> groups() const;

    /// Throws ShapeError on any mismatch with cfg.
    void check(const NetworkConfig& cfg) const;
    bool operator==(const NetworkParams& o) const;
};

/// Keeps the p entries of largest magnitude (ties to the lower index) and
/// zeroes the rest.
std::vector<double> dynamic_pool(std::span<const double> map, std::size_t p);

/// Mean and variance of |L_s^s y_j| for every map j and scale s, ordered
/// (j, s, statistic).
std::vector<double> statistical_layer(std::span<const std::vector<double>> maps, const SparseLaplacian& ls,
                                      int scales);

struct ForwardResult {
    std::vector<double> logits;
    std::vector<double> probabilities;
    std::vector<double> features;
};

/// Feature maps of one spectral layer, before pooling.
struct LayerMaps {
    std::vector<std::vector<double>> layer1;
    std::vector<std::vector<double>> layer2;
};

ForwardResult forward(const NetworkParams& params, const NetworkConfig& cfg, const EquirectImage& x,
                      const SparseLaplacian& ls);

LayerMaps feature_maps(const NetworkParams& params, const NetworkConfig& cfg, const EquirectImage& x,
                       const SparseLaplacian& ls);

struct Example {
    const EquirectImage* image;
    int label;
};

std::vector<Example> examples(std::span<const Sample> samples);

struct LossAndGrad {
    double loss = 0.0;  // mean cross-entropy
    NetworkParams grad;
    int correct = 0;    // argmax hits in the batch
};

/// Mean cross-entropy over the batch and its exact gradient. Per-sample
/// gradients are reduced in batch order, so the result does not depend on the
/// number of threads.
LossAndGrad loss_and_grad(const NetworkParams& params, const NetworkConfig& cfg, std::span<const Example> batch,
                          const SparseLaplacian& ls);

/// Adaptive-moment optimiser state.
class Adam {
public:
    Adam(const NetworkConfig& cfg, const NetworkParams& like);
    void step(NetworkParams& params, const NetworkParams& grad);

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    NetworkParams m_;
    NetworkParams v_;
};

struct EpochLog {
    int epoch;
    double loss;
    double train_accuracy;
    double val_accuracy;
};

struct TrainResult {
    NetworkParams params;  // best validation accuracy
    std::vector<EpochLog> log;
    int best_epoch = 0;
};

/// Sets the feature standardisation to the per-feature mean and inverse
/// standard deviation over `samples` (scale 1 where a feature is constant).
void fit_feature_scaling(NetworkParams& params, const NetworkConfig& cfg, std::span<const Sample> samples,
                         const SparseLaplacian& ls);

/// Mini-batch training; fits the feature scaling on the training set first. Throws DivergenceError when the loss turns non-finite.
TrainResult train(const NetworkConfig& cfg, std::span<const Sample> train_set, std::span<const Sample> val_set,
                  const SparseLaplacian& ls);
/// Builds the graph of `mode` over the dataset grid and trains on its splits.
TrainResult train(const NetworkConfig& cfg, const Dataset& ds, GraphMode mode);

/// Laplacian used by the network: built for `mode` and scaled by lambda_max.
SparseLaplacian network_laplacian(const EquirectGrid& grid, GraphMode mode);

struct EvalResult {
    double accuracy = 0.0;
    std::vector<std::vector<int>> confusion;  // [true][predicted]
};

EvalResult evaluate(const NetworkParams& params, const NetworkConfig& cfg, std::span<const Sample> split,
                    const SparseLaplacian& ls);

/// Index of the largest entry, ties to the lowest index.
int argmax(std::span<const double> v);

void write_training_log_csv(const std::filesystem::path& path, std::span<const EpochLog> log);

}  // namespace omnigraph
