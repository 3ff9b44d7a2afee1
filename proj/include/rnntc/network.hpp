#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rnntc/cells.hpp"
#include "rnntc/corpus.hpp"
#include "rnntc/model.hpp"
#include "rnntc/tensor.hpp"

namespace rnntc {

/// Row t of the result is table row seq[t]. Throws std::out_of_range for an
/// id outside the table.
Matrix embed(std::span<const TokenId> seq, ConstMatrixView table);

/// Per-step record of one recurrent direction. hidden[0] (and cell[0]) is the
/// zero initial state; hidden[s + 1] follows the s-th processed input. For a
/// reversed run the s-th processed input is row L - 1 - s.
struct DirectionTrace {
    bool reversed = false;
    std::vector<Vector> hidden;
    std::vector<Vector> cell;
    std::vector<GruGates> gru;
    std::vector<LstmGates> lstm;

    const Vector& final_hidden() const { return hidden.back(); }
};

DirectionTrace trace_srnn(const Matrix& inputs, const SrnnParams& p, bool reversed = false);
DirectionTrace trace_gru(const Matrix& inputs, const GruParams& p, bool reversed = false);
DirectionTrace trace_lstm(const Matrix& inputs, const LstmParams& p, bool reversed = false);

/// Final hidden state from a zero start (H values), or for BLSTM the forward
/// state after step L followed by the backward state after step 1 (2H values).
Vector run_recurrent(const Matrix& embedded, const Model& model);

/// Everything backward_pass needs from one forward evaluation.
struct ForwardCache {
    ModelConfig config;
    std::size_t param_count = 0;
    TokenSequence ids;
    Matrix embedded;
    DirectionTrace forward;
    DirectionTrace backward;  // BLSTM only
    Vector features;
    std::vector<Vector> dense_pre;  // pre-ReLU, one per hidden dense layer
    std::vector<Vector> dense_out;  // post-ReLU
    Vector logits;
    Vector probabilities;
};

struct ForwardResult {
    Vector probabilities;
    ForwardCache cache;
};

/// embed -> recurrent readout -> ReLU dense layers -> softmax.
ForwardResult forward_pass(std::span<const TokenId> seq, const Model& model);

/// Same computation without keeping intermediates.
Vector predict_proba(std::span<const TokenId> seq, const Model& model);

/// Argmax with the lowest index winning ties.
std::size_t predict(std::span<const double> probabilities);

inline constexpr double kProbabilityFloor = 1e-12;

/// -sum_k y_k ln(max(p_k, 1e-12)); for a one-hot target this is -ln p_true.
double cross_entropy(std::span<const double> probabilities, std::span<const double> one_hot);
double cross_entropy(std::span<const double> probabilities, std::size_t true_class);

/// Adds `scale` times the analytic gradient of cross_entropy into `grads`,
/// which must share the model's parameter layout. The gradient is that of the
/// unclamped loss. Throws std::invalid_argument on a cache from another model
/// configuration.
void accumulate_gradients(const ForwardCache& cache, std::span<const double> one_hot, const Model& model,
                          ParamSet& grads, double scale = 1.0);

/// Fresh gradient set for one example.
ParamSet backward_pass(const ForwardCache& cache, std::span<const double> one_hot, const Model& model);

}  // namespace rnntc
