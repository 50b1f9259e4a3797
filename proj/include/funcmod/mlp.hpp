#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace funcmod {

enum class Activation { Relu, Tanh };
enum class MlpTask { Regression, BinaryClassification };

struct MlpConfig {
    std::vector<size_t> layer_sizes; // input, hidden..., output
    Activation activation = Activation::Relu;
    double learning_rate = 0.05;
    size_t epochs = 500;
    size_t batch_size = 64;
    uint64_t seed = 0;
    MlpTask task = MlpTask::Regression;

    void validate() const;
};

// Fully connected network trained by plain mini-batch SGD. Weights for layer
// l are stored row-major as (in x out) so the forward pass streams along
// contiguous rows. Regression uses a linear output and mean squared error;
// binary classification a sigmoid output and cross-entropy.
class MlpModel {
public:
    MlpConfig config;
    std::vector<std::vector<double>> weights; // weights[l]: in*out, row-major
    std::vector<std::vector<double>> biases;  // biases[l]: out

    std::vector<double> forward(std::span<const double> x) const;
    double predict_real(std::span<const double> x) const { return forward(x)[0]; }
    double predict_proba(std::span<const double> x) const; // classification only
    int predict_class(std::span<const double> x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }

    size_t n_parameters() const;

    void save(const std::string& path) const; // text header + flat binary doubles
    static MlpModel load(const std::string& path);
};

MlpModel init_mlp(const MlpConfig& config);

struct MlpTrainResult {
    MlpModel model;
    std::vector<double> loss_trace; // mean training loss per epoch
};

// X: n rows of layer_sizes[0] features; y: targets (0/1 for classification).
// Deterministic given (config, seed, data). Throws DivergenceError with the
// offending epoch when the loss turns non-finite.
MlpTrainResult mlp_train(const MlpConfig& config, const std::vector<std::vector<double>>& X,
                         const std::vector<double>& y);

// Max relative error between analytic gradients and central finite
// differences over every parameter, on the full batch (X, y).
double mlp_grad_check(const MlpConfig& config, const std::vector<std::vector<double>>& X,
                      const std::vector<double>& y, double step = 1e-5);

} // namespace funcmod
