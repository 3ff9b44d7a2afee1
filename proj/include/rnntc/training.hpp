#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rnntc/corpus.hpp"
#include "rnntc/model.hpp"

namespace rnntc {

struct AdamHyperparams {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators mirroring the parameter buffer.
struct AdamState {
    Vector m;
    Vector v;
    std::uint64_t step = 0;
    AdamHyperparams hyper;

    static AdamState zeros(std::size_t n, AdamHyperparams hyper = {}) { return {Vector(n, 0.0), Vector(n, 0.0), 0, hyper}; }
};

/// One bias-corrected Adam step:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state);

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    bool shuffle = true;
    AdamHyperparams adam;

    /// Throws std::invalid_argument when epochs or batch_size is zero.
    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;

    bool operator==(const EpochRecord&) const = default;
};

struct SplitScore {
    double mean_loss = 0.0;
    double accuracy = 0.0;
};

/// Mean cross-entropy and argmax accuracy over `indices`. Throws InputError
/// on an empty index list.
SplitScore evaluate_split(const Model& model, const EncodedDataset& data, std::span<const std::size_t> indices);

/// Argmax class for each listed example.
std::vector<std::size_t> predict_classes(const Model& model, const EncodedDataset& data,
                                         std::span<const std::size_t> indices);

/// Called after every epoch; returning false ends training early.
using EpochObserver = std::function<bool(const EpochRecord&, const Model&)>;

struct TrainResult {
    Model model;
    std::vector<EpochRecord> history;
};

/// Minibatch Adam over split.train with per-epoch scoring on
/// split.validation. Model weights are initialized from train_config.seed;
/// shuffling uses a stream derived from the same seed. Example gradients
/// within a batch are summed in ascending example index and averaged. Throws
/// NumericError naming the epoch and batch on a non-finite loss.
TrainResult train(const EncodedDataset& data, const DatasetSplit& split, const ModelConfig& model_config,
                  const TrainConfig& train_config, const EpochObserver& observer = {});

/// `epoch,train_loss,val_loss,val_accuracy` with a header row.
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace rnntc
