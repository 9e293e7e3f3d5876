#include "featrec/models/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "featrec/error.hpp"
#include "featrec/random.hpp"

namespace featrec::models {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_labels(std::span<const int> labels, std::size_t rows, std::size_t classes) {
    if (labels.size() != rows) throw ContractError("label count does not match row count");
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= classes) throw ContractError("label out of range");
    }
}

// Activations per layer; activations[0] is the input, the last holds softmax outputs.
std::vector<Matrix> forward(const MlpModel& model, const Matrix& x) {
    if (x.cols() != model.input_width()) {
        throw ContractError("input width " + std::to_string(x.cols()) + " does not match model width " +
                            std::to_string(model.input_width()));
    }
    std::vector<Matrix> acts;
    acts.reserve(model.layers.size() + 1);
    acts.push_back(x);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        const Matrix& in = acts.back();
        Matrix z(in.rows(), layer.weights.rows());
        for (std::size_t r = 0; r < in.rows(); ++r) {
            const auto a = in.row(r);
            for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
                const auto w = layer.weights.row(o);
                z(r, o) = std::inner_product(w.begin(), w.end(), a.begin(), layer.bias[o]);
            }
        }
        const bool output = l + 1 == model.layers.size();
        if (output) {
            acts.push_back(softmax_rows(z));
        } else {
            for (double& v : z.data()) v = sigmoid(v);
            acts.push_back(std::move(z));
        }
    }
    return acts;
}

double cross_entropy(const Matrix& proba, std::span<const int> labels) {
    double loss = 0.0;
    for (std::size_t r = 0; r < proba.rows(); ++r) {
        loss -= std::log(std::max(proba(r, static_cast<std::size_t>(labels[r])), 1e-300));
    }
    return loss / static_cast<double>(proba.rows());
}

MlpGradients zero_gradients(const MlpModel& model) {
    MlpGradients g;
    for (const auto& layer : model.layers) {
        g.weights.emplace_back(layer.weights.rows(), layer.weights.cols());
        g.bias.emplace_back(layer.bias.size(), 0.0);
    }
    return g;
}

}  // namespace

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0) throw ConfigError("beta1 must lie in [0, 1)");
    if (beta2 < 0.0 || beta2 >= 1.0) throw ConfigError("beta2 must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

MlpModel MlpModel::initialize(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw ContractError("a network needs at least input and output layers");
    if (std::find(layer_sizes.begin(), layer_sizes.end(), 0) != layer_sizes.end()) {
        throw ContractError("layer sizes must be positive");
    }
    Rng rng(seed);
    MlpModel model;
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
        const std::size_t fan_in = layer_sizes[l - 1];
        const std::size_t fan_out = layer_sizes[l];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        MlpLayer layer{Matrix(fan_out, fan_in), std::vector<double>(fan_out, 0.0)};
        for (double& w : layer.weights.data()) w = rng.uniform(-limit, limit);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

std::vector<std::size_t> MlpModel::layer_sizes() const {
    std::vector<std::size_t> sizes{input_width()};
    for (const auto& layer : layers) sizes.push_back(layer.weights.rows());
    return sizes;
}

Matrix MlpModel::predict_proba(const Matrix& x) const { return forward(*this, x).back(); }

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const auto z = logits.row(r);
        const double hi = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        auto p = out.row(r);
        for (std::size_t k = 0; k < z.size(); ++k) {
            p[k] = std::exp(z[k] - hi);
            sum += p[k];
        }
        for (double& v : p) v /= sum;
    }
    return out;
}

double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const int> labels) {
    check_labels(labels, x.rows(), model.class_count());
    return cross_entropy(model.predict_proba(x), labels);
}

double mlp_loss_and_gradients(const MlpModel& model, const Matrix& x, std::span<const int> labels,
                              MlpGradients& gradients) {
    check_labels(labels, x.rows(), model.class_count());
    const auto acts = forward(model, x);
    gradients = zero_gradients(model);
    const double batch = static_cast<double>(x.rows());

    // dL/dz at the output: (p - onehot) / B
    Matrix delta = acts.back();
    for (std::size_t r = 0; r < delta.rows(); ++r) {
        delta(r, static_cast<std::size_t>(labels[r])) -= 1.0;
    }
    for (double& v : delta.data()) v /= batch;

    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const Matrix& in = acts[l];
        auto& gw = gradients.weights[l];
        auto& gb = gradients.bias[l];
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            const auto a = in.row(r);
            for (std::size_t o = 0; o < delta.cols(); ++o) {
                const double d = delta(r, o);
                gb[o] += d;
                auto g = gw.row(o);
                for (std::size_t i = 0; i < a.size(); ++i) g[i] += d * a[i];
            }
        }
        if (l == 0) break;
        const auto& w = model.layers[l].weights;
        Matrix prev(delta.rows(), w.cols());
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            for (std::size_t i = 0; i < w.cols(); ++i) {
                double s = 0.0;
                for (std::size_t o = 0; o < w.rows(); ++o) s += delta(r, o) * w(o, i);
                const double a = in(r, i);
                prev(r, i) = s * a * (1.0 - a);
            }
        }
        delta = std::move(prev);
    }
    return cross_entropy(acts.back(), labels);
}

MlpModel mlp_train(const Matrix& x, std::span<const int> labels, int class_count,
                   const MlpParams& params) {
    params.adam.validate();
    if (x.rows() == 0 || x.cols() == 0) throw ContractError("training data is empty");
    if (class_count < 1) throw ContractError("class count must be positive");
    check_labels(labels, x.rows(), static_cast<std::size_t>(class_count));

    std::vector<std::size_t> sizes{x.cols()};
    sizes.insert(sizes.end(), params.hidden.begin(), params.hidden.end());
    sizes.push_back(static_cast<std::size_t>(class_count));
    MlpModel model = MlpModel::initialize(sizes, derive_seed(params.adam.seed, 0));

    const auto& cfg = params.adam;
    const std::size_t n = x.rows();
    const std::size_t batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);

    MlpGradients first = zero_gradients(model);
    MlpGradients second = zero_gradients(model);
    MlpGradients grads;
    std::size_t step = 0;

    Rng shuffle_rng(derive_seed(cfg.seed, 1));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    auto adam_update = [&](std::vector<double>& param, std::vector<double>& m, std::vector<double>& v,
                           const std::vector<double>& g, double lr_t) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            param[i] -= lr_t * m[i] / (std::sqrt(v[i]) + cfg.epsilon);
        }
    };

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (batch < n) shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(start + batch, n);
            double loss = 0.0;
            if (batch == n) {
                loss = mlp_loss_and_gradients(model, x, labels, grads);
            } else {
                std::span<const std::size_t> idx(order.data() + start, stop - start);
                std::vector<int> y;
                y.reserve(idx.size());
                for (std::size_t i : idx) y.push_back(labels[i]);
                loss = mlp_loss_and_gradients(model, x.select_rows(idx), y, grads);
            }
            if (!std::isfinite(loss)) throw DivergenceError(epoch, "cross-entropy loss is not finite");

            ++step;
            const double t = static_cast<double>(step);
            const double lr_t = cfg.learning_rate * std::sqrt(1.0 - std::pow(cfg.beta2, t)) /
                                (1.0 - std::pow(cfg.beta1, t));
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                adam_update(model.layers[l].weights.data(), first.weights[l].data(),
                            second.weights[l].data(), grads.weights[l].data(), lr_t);
                adam_update(model.layers[l].bias, first.bias[l], second.bias[l], grads.bias[l], lr_t);
            }
        }
    }
    return model;
}

MlpModel mlp_train(const Dataset& d, std::span<const std::size_t> features, const MlpParams& params) {
    if (features.empty()) throw ContractError("feature subset is empty");
    return mlp_train(d.values.select_columns(features), d.labels, d.class_count, params);
}

std::vector<int> mlp_predict(const MlpModel& model, const Matrix& rows) {
    if (rows.rows() == 0) return {};
    const Matrix proba = model.predict_proba(rows);
    std::vector<int> out(rows.rows());
    for (std::size_t r = 0; r < proba.rows(); ++r) {
        const auto p = proba.row(r);
        out[r] = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    }
    return out;
}

}  // namespace featrec::models
