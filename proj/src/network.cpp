#include "rnntc/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rnntc/activations.hpp"
#include "rnntc/errors.hpp"

namespace rnntc {

namespace {

std::size_t step_row(const DirectionTrace& trace, std::size_t s, std::size_t len) {
    return trace.reversed ? len - 1 - s : s;
}

DirectionTrace start_trace(const Matrix& inputs, std::size_t hidden, bool reversed, bool with_cell) {
    if (inputs.rows() == 0) {
        throw ShapeError("recurrent input has no time steps");
    }
    DirectionTrace t;
    t.reversed = reversed;
    t.hidden.reserve(inputs.rows() + 1);
    t.hidden.emplace_back(hidden, 0.0);
    if (with_cell) {
        t.cell.reserve(inputs.rows() + 1);
        t.cell.emplace_back(hidden, 0.0);
    }
    return t;
}

// Dense head: hidden ReLU layers then the linear output layer.
void head_forward(const Model& model, ForwardCache& cache) {
    const auto layers = model.head();
    const Vector* in = &cache.features;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.weights.cols() != in->size()) {
            throw ShapeError("dense layer " + std::to_string(l) + " input width mismatch");
        }
        Vector pre(layer.weights.rows());
        for (std::size_t r = 0; r < pre.size(); ++r) {
            const auto row = layer.weights.row(r);
            double acc = layer.bias[r];
            for (std::size_t j = 0; j < row.size(); ++j) {
                acc += row[j] * (*in)[j];
            }
            pre[r] = acc;
        }
        if (l + 1 == layers.size()) {
            cache.logits = std::move(pre);
        } else {
            cache.dense_out.push_back(relu(pre));
            cache.dense_pre.push_back(std::move(pre));
            in = &cache.dense_out.back();
        }
    }
    cache.probabilities = softmax(cache.logits);
}

void backprop_direction(const DirectionTrace& trace, const Matrix& embedded, CellKind kind, const Model& model,
                        ParamSet& grads, Direction dir, std::span<const double> dh_final, Matrix& d_embedded) {
    const std::size_t len = embedded.rows();
    const std::size_t hidden = dh_final.size();
    Vector dh(dh_final.begin(), dh_final.end());
    Vector dh_prev(hidden);
    Vector dc(hidden, 0.0);

    const auto srnn_p = kind == CellKind::Srnn ? model.srnn() : SrnnParams{};
    const auto srnn_g = kind == CellKind::Srnn ? model.srnn_grads(grads) : SrnnGrads{};
    const auto gru_p = kind == CellKind::Gru ? model.gru() : GruParams{};
    const auto gru_g = kind == CellKind::Gru ? model.gru_grads(grads) : GruGrads{};
    const bool is_lstm = kind == CellKind::Lstm || kind == CellKind::Blstm;
    const auto lstm_p = is_lstm ? model.lstm(dir) : LstmParams{};
    const auto lstm_g = is_lstm ? model.lstm_grads(grads, dir) : LstmGrads{};

    for (std::size_t s = len; s-- > 0;) {
        const std::size_t row = step_row(trace, s, len);
        const auto x = embedded.row(row);
        auto dx = d_embedded.row(row);
        switch (kind) {
            case CellKind::Srnn:
                srnn_step_backward(x, trace.hidden[s], trace.hidden[s + 1], dh, srnn_p, srnn_g, dh_prev, dx);
                break;
            case CellKind::Gru:
                gru_step_backward(x, trace.hidden[s], trace.gru[s], dh, gru_p, gru_g, dh_prev, dx);
                break;
            case CellKind::Lstm:
            case CellKind::Blstm:
                lstm_step_backward(x, trace.hidden[s], trace.cell[s], trace.lstm[s], trace.cell[s + 1], dh, dc,
                                   lstm_p, lstm_g, dh_prev, dx);
                break;
        }
        std::swap(dh, dh_prev);
    }
}

}  // namespace

Matrix embed(std::span<const TokenId> seq, ConstMatrixView table) {
    Matrix out(seq.size(), table.cols());
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const TokenId id = seq[t];
        if (id < 0 || static_cast<std::size_t>(id) >= table.rows()) {
            throw std::out_of_range("token id " + std::to_string(id) + " at position " + std::to_string(t) +
                                    " is outside the embedding table (" + std::to_string(table.rows()) + " rows)");
        }
        const auto src = table.row(static_cast<std::size_t>(id));
        std::copy(src.begin(), src.end(), out.row(t).begin());
    }
    return out;
}

DirectionTrace trace_srnn(const Matrix& inputs, const SrnnParams& p, bool reversed) {
    DirectionTrace t = start_trace(inputs, p.w_h.rows(), reversed, false);
    for (std::size_t s = 0; s < inputs.rows(); ++s) {
        t.hidden.push_back(srnn_step(inputs.row(step_row(t, s, inputs.rows())), t.hidden.back(), p));
    }
    return t;
}

DirectionTrace trace_gru(const Matrix& inputs, const GruParams& p, bool reversed) {
    DirectionTrace t = start_trace(inputs, p.w_z.rows(), reversed, false);
    t.gru.reserve(inputs.rows());
    for (std::size_t s = 0; s < inputs.rows(); ++s) {
        GruGates g = gru_gates(inputs.row(step_row(t, s, inputs.rows())), t.hidden.back(), p);
        t.hidden.push_back(gru_compose(g.update, t.hidden.back(), g.candidate));
        t.gru.push_back(std::move(g));
    }
    return t;
}

DirectionTrace trace_lstm(const Matrix& inputs, const LstmParams& p, bool reversed) {
    DirectionTrace t = start_trace(inputs, p.w_f.rows(), reversed, true);
    t.lstm.reserve(inputs.rows());
    for (std::size_t s = 0; s < inputs.rows(); ++s) {
        LstmGates g = lstm_gates(inputs.row(step_row(t, s, inputs.rows())), t.hidden.back(), p);
        CellState next = lstm_compose(g, t.cell.back());
        t.hidden.push_back(std::move(next.h));
        t.cell.push_back(std::move(next.c));
        t.lstm.push_back(std::move(g));
    }
    return t;
}

namespace {

void run_directions(const Matrix& embedded, const Model& model, DirectionTrace& fwd, DirectionTrace& bwd,
                    Vector& features) {
    switch (model.config().cell_kind) {
        case CellKind::Srnn:
            fwd = trace_srnn(embedded, model.srnn());
            break;
        case CellKind::Gru:
            fwd = trace_gru(embedded, model.gru());
            break;
        case CellKind::Lstm:
            fwd = trace_lstm(embedded, model.lstm(Direction::Forward));
            break;
        case CellKind::Blstm:
            fwd = trace_lstm(embedded, model.lstm(Direction::Forward));
            bwd = trace_lstm(embedded, model.lstm(Direction::Backward), true);
            break;
    }
    features = fwd.final_hidden();
    if (model.config().cell_kind == CellKind::Blstm) {
        const auto& tail = bwd.final_hidden();
        features.insert(features.end(), tail.begin(), tail.end());
    }
}

}  // namespace

Vector run_recurrent(const Matrix& embedded, const Model& model) {
    DirectionTrace fwd;
    DirectionTrace bwd;
    Vector features;
    run_directions(embedded, model, fwd, bwd, features);
    return features;
}

ForwardResult forward_pass(std::span<const TokenId> seq, const Model& model) {
    if (seq.size() != model.config().seq_len) {
        throw ShapeError("sequence length " + std::to_string(seq.size()) + " differs from the model's " +
                         std::to_string(model.config().seq_len));
    }
    ForwardCache cache;
    cache.config = model.config();
    cache.param_count = model.params().size();
    cache.ids.assign(seq.begin(), seq.end());
    cache.embedded = embed(seq, model.embedding());
    run_directions(cache.embedded, model, cache.forward, cache.backward, cache.features);
    head_forward(model, cache);
    Vector probs = cache.probabilities;
    return {std::move(probs), std::move(cache)};
}

Vector predict_proba(std::span<const TokenId> seq, const Model& model) {
    return forward_pass(seq, model).probabilities;
}

std::size_t predict(std::span<const double> probabilities) {
    if (probabilities.empty()) {
        throw std::invalid_argument("predict: empty probability vector");
    }
    return static_cast<std::size_t>(std::max_element(probabilities.begin(), probabilities.end()) -
                                    probabilities.begin());
}

double cross_entropy(std::span<const double> probabilities, std::span<const double> one_hot) {
    if (probabilities.size() != one_hot.size()) {
        throw ShapeError("cross_entropy: probability and target lengths differ");
    }
    double loss = 0.0;
    for (std::size_t k = 0; k < one_hot.size(); ++k) {
        if (one_hot[k] != 0.0) {
            loss -= one_hot[k] * std::log(std::max(probabilities[k], kProbabilityFloor));
        }
    }
    return loss;
}

double cross_entropy(std::span<const double> probabilities, std::size_t true_class) {
    if (true_class >= probabilities.size()) {
        throw std::out_of_range("cross_entropy: class index out of range");
    }
    return -std::log(std::max(probabilities[true_class], kProbabilityFloor));
}

void accumulate_gradients(const ForwardCache& cache, std::span<const double> one_hot, const Model& model,
                          ParamSet& grads, double scale) {
    const ModelConfig& cfg = model.config();
    if (!(cache.config == cfg) || cache.param_count != model.params().size()) {
        throw std::invalid_argument("backward pass: cache was produced by a different model configuration");
    }
    if (!grads.same_layout(model.params())) {
        throw std::invalid_argument("backward pass: gradient buffer layout differs from the model");
    }
    if (one_hot.size() != cfg.n_classes) {
        throw ShapeError("backward pass: target length differs from n_classes");
    }

    // Softmax + cross-entropy: dL/dlogits = p - y.
    Vector d(cfg.n_classes);
    for (std::size_t k = 0; k < d.size(); ++k) {
        d[k] = scale * (cache.probabilities[k] - one_hot[k]);
    }

    const auto layers = model.head();
    auto layer_grads = model.head_grads(grads);
    for (std::size_t l = layers.size(); l-- > 0;) {
        const Vector& in = l == 0 ? cache.features : cache.dense_out[l - 1];
        const auto& w = layers[l].weights;
        auto& g = layer_grads[l];
        Vector d_in(in.size(), 0.0);
        for (std::size_t r = 0; r < w.rows(); ++r) {
            const double dr = d[r];
            g.bias[r] += dr;
            if (dr == 0.0) {
                continue;
            }
            const auto wrow = w.row(r);
            const auto grow = g.weights.row(r);
            for (std::size_t j = 0; j < in.size(); ++j) {
                grow[j] += dr * in[j];
                d_in[j] += dr * wrow[j];
            }
        }
        if (l > 0) {
            const Vector& pre = cache.dense_pre[l - 1];
            for (std::size_t j = 0; j < d_in.size(); ++j) {
                if (pre[j] <= 0.0) {
                    d_in[j] = 0.0;
                }
            }
        }
        d = std::move(d_in);
    }

    // d now holds dL/dfeatures.
    const std::size_t hidden = cfg.hidden_dim;
    Matrix d_embedded(cache.embedded.rows(), cache.embedded.cols());
    backprop_direction(cache.forward, cache.embedded, cfg.cell_kind, model, grads, Direction::Forward,
                       std::span<const double>(d.data(), hidden), d_embedded);
    if (cfg.cell_kind == CellKind::Blstm) {
        backprop_direction(cache.backward, cache.embedded, cfg.cell_kind, model, grads, Direction::Backward,
                           std::span<const double>(d.data() + hidden, hidden), d_embedded);
    }

    auto table_grads = model.embedding_grads(grads);
    for (std::size_t t = 0; t < cache.ids.size(); ++t) {
        const auto src = d_embedded.row(t);
        auto dst = table_grads.row(static_cast<std::size_t>(cache.ids[t]));
        for (std::size_t j = 0; j < src.size(); ++j) {
            dst[j] += src[j];
        }
    }
}

ParamSet backward_pass(const ForwardCache& cache, std::span<const double> one_hot, const Model& model) {
    ParamSet grads = model.params().zeros_like();
    accumulate_gradients(cache, one_hot, model, grads);
    return grads;
}

}  // namespace rnntc
