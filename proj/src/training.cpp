#include "rnntc/training.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "rnntc/errors.hpp"
#include "rnntc/network.hpp"
#include "rnntc/rng.hpp"

namespace rnntc {

void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ShapeError("adam_update: parameter, gradient and moment sizes differ");
    }
    const auto& h = state.hyper;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correct1 = 1.0 - std::pow(h.beta1, t);
    const double correct2 = 1.0 - std::pow(h.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * g;
        state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * g * g;
        const double m_hat = state.m[i] / correct1;
        const double v_hat = state.v[i] / correct2;
        params[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw std::invalid_argument("train config: epochs must be at least 1");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("train config: batch_size must be at least 1");
    }
}

std::vector<std::size_t> predict_classes(const Model& model, const EncodedDataset& data,
                                         std::span<const std::size_t> indices) {
    std::vector<std::size_t> out;
    out.reserve(indices.size());
    for (const std::size_t i : indices) {
        out.push_back(predict(predict_proba(data.sequences.at(i), model)));
    }
    return out;
}

SplitScore evaluate_split(const Model& model, const EncodedDataset& data, std::span<const std::size_t> indices) {
    if (indices.empty()) {
        throw InputError("evaluate_split: empty index list");
    }
    double loss = 0.0;
    std::size_t correct = 0;
    for (const std::size_t i : indices) {
        const Vector probs = predict_proba(data.sequences.at(i), model);
        loss += cross_entropy(probs, data.labels.at(i));
        if (predict(probs) == data.labels[i]) {
            ++correct;
        }
    }
    const auto n = static_cast<double>(indices.size());
    return {loss / n, static_cast<double>(correct) / n};
}

TrainResult train(const EncodedDataset& data, const DatasetSplit& split, const ModelConfig& model_config,
                  const TrainConfig& train_config, const EpochObserver& observer) {
    train_config.validate();
    model_config.validate();
    if (split.train.empty() || split.validation.empty()) {
        throw InputError("train: training and validation splits must be non-empty");
    }
    if (data.labels.size() != data.sequences.size()) {
        throw InputError("train: label and sequence counts differ");
    }

    TrainResult result{Model::initialized(model_config, train_config.seed), {}};
    Model& model = result.model;
    AdamState adam = AdamState::zeros(model.params().size(), train_config.adam);
    ParamSet grads = model.params().zeros_like();
    Rng shuffler(mix_seed(train_config.seed, 1));

    std::vector<std::size_t> order = split.train;
    const std::size_t n_classes = model_config.n_classes;

    for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
        if (train_config.shuffle) {
            shuffler.shuffle(order);
        }
        double loss_sum = 0.0;
        std::size_t batch_no = 0;
        for (std::size_t start = 0; start < order.size(); start += train_config.batch_size, ++batch_no) {
            const std::size_t stop = std::min(order.size(), start + train_config.batch_size);
            const double scale = 1.0 / static_cast<double>(stop - start);
            grads.fill(0.0);
            // Ascending index order fixes the floating-point summation order.
            std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(stop));
            std::sort(batch.begin(), batch.end());
            for (const std::size_t idx : batch) {
                const std::size_t label = data.labels.at(idx);
                if (label >= n_classes) {
                    throw InputError("train: label index out of range for record " + std::to_string(idx));
                }
                const ForwardResult fwd = forward_pass(data.sequences.at(idx), model);
                const double loss = cross_entropy(fwd.probabilities, label);
                if (!std::isfinite(loss) || !std::isfinite(fwd.probabilities[label])) {
                    throw NumericError(fmt::format("non-finite loss at epoch {}, batch {} (record {})", epoch,
                                                   batch_no + 1, idx));
                }
                loss_sum += loss;
                accumulate_gradients(fwd.cache, one_hot(label, n_classes), model, grads, scale);
            }
            adam_update(model.params().values(), grads.values(), adam);
            const auto values = model.params().values();
            if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
                throw NumericError(fmt::format("non-finite parameters after epoch {}, batch {}", epoch, batch_no + 1));
            }
        }

        const SplitScore val = evaluate_split(model, data, split.validation);
        EpochRecord record{epoch, loss_sum / static_cast<double>(order.size()), val.mean_loss, val.accuracy};
        if (!std::isfinite(record.val_loss)) {
            throw NumericError(fmt::format("non-finite validation loss at epoch {}", epoch));
        }
        result.history.push_back(record);
        if (observer && !observer(record, model)) {
            break;
        }
    }
    return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
    std::string out = "epoch,train_loss,val_loss,val_accuracy\n";
    for (const auto& r : history) {
        out += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", r.epoch, r.train_loss, r.val_loss, r.val_accuracy);
    }
    return out;
}

}  // namespace rnntc
