#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "featrec/data.hpp"
#include "featrec/matrix.hpp"

namespace featrec::models {

// Adam optimizer settings. The default learning rate of 0.2 is high for Adam;
// lower it when training on data with many features.
struct AdamConfig {
    double learning_rate = 0.2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t epochs = 300;
    std::size_t batch_size = 0;  // 0 = full batch
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

struct MlpParams {
    std::vector<std::size_t> hidden = {14, 8};
    AdamConfig adam;
};

struct MlpLayer {
    Matrix weights;  // outputs x inputs
    std::vector<double> bias;
};

// Fully connected network: logistic-sigmoid hidden layers, softmax output,
// mean cross-entropy loss.
class MlpModel {
public:
    // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    static MlpModel initialize(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

    std::vector<std::size_t> layer_sizes() const;
    std::size_t input_width() const { return layers.front().weights.cols(); }
    std::size_t class_count() const { return layers.back().weights.rows(); }

    Matrix predict_proba(const Matrix& x) const;

    std::vector<MlpLayer> layers;
};

struct MlpGradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> bias;
};

// Row-wise softmax, stable for any finite logits.
Matrix softmax_rows(const Matrix& logits);

double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const int> labels);

// Mean cross-entropy and its gradient with respect to every parameter.
double mlp_loss_and_gradients(const MlpModel& model, const Matrix& x, std::span<const int> labels,
                              MlpGradients& gradients);

MlpModel mlp_train(const Matrix& x, std::span<const int> labels, int class_count,
                   const MlpParams& params);

// Trains on the given feature columns of a (standardized) dataset.
MlpModel mlp_train(const Dataset& d, std::span<const std::size_t> features, const MlpParams& params);

// Argmax of the softmax output; ties go to the lowest class.
std::vector<int> mlp_predict(const MlpModel& model, const Matrix& rows);

}  // namespace featrec::models
