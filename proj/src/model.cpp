#include "rnntc/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "rnntc/errors.hpp"
#include "rnntc/rng.hpp"

namespace rnntc {

std::string_view to_string(CellKind kind) {
    switch (kind) {
        case CellKind::Srnn: return "srnn";
        case CellKind::Gru: return "gru";
        case CellKind::Lstm: return "lstm";
        case CellKind::Blstm: return "blstm";
    }
    return "?";
}

std::string_view display_name(CellKind kind) {
    switch (kind) {
        case CellKind::Srnn: return "sRNN";
        case CellKind::Gru: return "GRU";
        case CellKind::Lstm: return "LSTM";
        case CellKind::Blstm: return "BLSTM";
    }
    return "?";
}

CellKind parse_cell_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const CellKind kind : kAllCellKinds) {
        if (lower == to_string(kind)) {
            return kind;
        }
    }
    throw InputError("unknown cell kind '" + std::string(text) + "' (expected srnn, gru, lstm or blstm)");
}

void ModelConfig::validate() const {
    auto positive = [](std::size_t v, const char* name) {
        if (v < 1) {
            throw std::invalid_argument(std::string("model config: ") + name + " must be at least 1");
        }
    };
    positive(vocab_capacity + 2, "vocab_capacity");
    positive(embed_dim, "embed_dim");
    positive(hidden_dim, "hidden_dim");
    positive(seq_len, "seq_len");
    for (const std::size_t d : dense_dims) {
        positive(d, "dense layer width");
    }
    if (n_classes < 2) {
        throw std::invalid_argument("model config: n_classes must be at least 2");
    }
}

std::size_t ModelConfig::feature_dim() const {
    return cell_kind == CellKind::Blstm ? 2 * hidden_dim : hidden_dim;
}

std::size_t ParamSet::add(std::string name, std::size_t rows, std::size_t cols) {
    slots_.push_back({std::move(name), rows, cols, values_.size()});
    values_.resize(values_.size() + rows * cols, 0.0);
    return slots_.size() - 1;
}

std::optional<std::size_t> ParamSet::find(std::string_view name) const {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

MatrixView ParamSet::matrix(std::size_t slot) {
    const auto& s = slots_.at(slot);
    return {values_.data() + s.offset, s.rows, s.cols};
}

ConstMatrixView ParamSet::matrix(std::size_t slot) const {
    const auto& s = slots_.at(slot);
    return {values_.data() + s.offset, s.rows, s.cols};
}

std::span<double> ParamSet::vector(std::size_t slot) {
    const auto& s = slots_.at(slot);
    return {values_.data() + s.offset, s.size()};
}

std::span<const double> ParamSet::vector(std::size_t slot) const {
    const auto& s = slots_.at(slot);
    return {values_.data() + s.offset, s.size()};
}

ParamSet ParamSet::zeros_like() const {
    ParamSet out = *this;
    out.fill(0.0);
    return out;
}

void ParamSet::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

Model::Model(ModelConfig config) : config_(std::move(config)) {
    config_.validate();
    const std::size_t hidden = config_.hidden_dim;
    const std::size_t concat = hidden + config_.embed_dim;

    layout_.embedding = params_.add("embedding", config_.embedding_rows(), config_.embed_dim);

    auto add_cell = [&](CellSlots& slots, const std::string& prefix, std::initializer_list<const char*> weights,
                        std::initializer_list<const char*> biases, bool with_bias) {
        std::size_t i = 0;
        for (const char* w : weights) {
            slots.w[i++] = params_.add(prefix + w, hidden, concat);
        }
        slots.has_bias = with_bias;
        if (with_bias) {
            i = 0;
            for (const char* b : biases) {
                slots.b[i++] = params_.add(prefix + b, hidden, 1);
            }
        }
    };

    switch (config_.cell_kind) {
        case CellKind::Srnn:
            add_cell(layout_.cell[0], "cell.", {"W_h"}, {"b_h"}, true);
            break;
        case CellKind::Gru:
            add_cell(layout_.cell[0], "cell.", {"W_z", "W_r", "W"}, {"b_z", "b_r", "b_c"},
                     !config_.strict_paper_gru_bias);
            break;
        case CellKind::Lstm:
            add_cell(layout_.cell[0], "cell.", {"W_f", "W_i", "W_g", "W_o"}, {"b_f", "b_i", "b_g", "b_o"}, true);
            break;
        case CellKind::Blstm:
            add_cell(layout_.cell[0], "fwd.", {"W_f", "W_i", "W_g", "W_o"}, {"b_f", "b_i", "b_g", "b_o"}, true);
            add_cell(layout_.cell[1], "bwd.", {"W_f", "W_i", "W_g", "W_o"}, {"b_f", "b_i", "b_g", "b_o"}, true);
            break;
    }

    std::size_t in = config_.feature_dim();
    for (std::size_t l = 0; l < config_.dense_dims.size(); ++l) {
        const std::size_t out = config_.dense_dims[l];
        layout_.head_w.push_back(params_.add("dense" + std::to_string(l) + ".W", out, in));
        layout_.head_b.push_back(params_.add("dense" + std::to_string(l) + ".b", out, 1));
        in = out;
    }
    layout_.head_w.push_back(params_.add("output.W", config_.n_classes, in));
    layout_.head_b.push_back(params_.add("output.b", config_.n_classes, 1));
}

Model Model::initialized(ModelConfig config, std::uint64_t seed) {
    Model model(std::move(config));
    Rng rng(seed);
    ParamSet& p = model.params_;
    for (std::size_t s = 0; s < p.slots().size(); ++s) {
        const auto& slot = p.slots()[s];
        if (slot.cols == 1) {
            continue;  // biases start at zero
        }
        // fan_in + fan_out is rows + cols for every matrix here, embedding included.
        const double limit = std::sqrt(6.0 / static_cast<double>(slot.rows + slot.cols));
        for (double& v : p.matrix(s).flat()) {
            v = rng.uniform(-limit, limit);
        }
    }
    return model;
}

SrnnParams Model::srnn() const {
    const auto& c = layout_.cell[0];
    return {params_.matrix(c.w[0]), params_.vector(c.b[0])};
}

GruParams Model::gru() const {
    const auto& c = layout_.cell[0];
    GruParams p{params_.matrix(c.w[0]), params_.matrix(c.w[1]), params_.matrix(c.w[2]), {}, {}, {}};
    if (c.has_bias) {
        p.b_z = params_.vector(c.b[0]);
        p.b_r = params_.vector(c.b[1]);
        p.b_c = params_.vector(c.b[2]);
    }
    return p;
}

LstmParams Model::lstm(Direction dir) const {
    const auto& c = layout_.cell[dir == Direction::Forward ? 0 : 1];
    return {params_.matrix(c.w[0]), params_.matrix(c.w[1]), params_.matrix(c.w[2]), params_.matrix(c.w[3]),
            params_.vector(c.b[0]), params_.vector(c.b[1]), params_.vector(c.b[2]), params_.vector(c.b[3])};
}

SrnnGrads Model::srnn_grads(ParamSet& grads) const {
    const auto& c = layout_.cell[0];
    return {grads.matrix(c.w[0]), grads.vector(c.b[0])};
}

GruGrads Model::gru_grads(ParamSet& grads) const {
    const auto& c = layout_.cell[0];
    GruGrads g{grads.matrix(c.w[0]), grads.matrix(c.w[1]), grads.matrix(c.w[2]), {}, {}, {}};
    if (c.has_bias) {
        g.b_z = grads.vector(c.b[0]);
        g.b_r = grads.vector(c.b[1]);
        g.b_c = grads.vector(c.b[2]);
    }
    return g;
}

LstmGrads Model::lstm_grads(ParamSet& grads, Direction dir) const {
    const auto& c = layout_.cell[dir == Direction::Forward ? 0 : 1];
    return {grads.matrix(c.w[0]), grads.matrix(c.w[1]), grads.matrix(c.w[2]), grads.matrix(c.w[3]),
            grads.vector(c.b[0]), grads.vector(c.b[1]), grads.vector(c.b[2]), grads.vector(c.b[3])};
}

std::vector<DenseLayerView> Model::head() const {
    std::vector<DenseLayerView> layers;
    for (std::size_t l = 0; l < layout_.head_w.size(); ++l) {
        layers.push_back({params_.matrix(layout_.head_w[l]), params_.vector(layout_.head_b[l])});
    }
    return layers;
}

std::vector<DenseLayerGrads> Model::head_grads(ParamSet& grads) const {
    std::vector<DenseLayerGrads> layers;
    for (std::size_t l = 0; l < layout_.head_w.size(); ++l) {
        layers.push_back({grads.matrix(layout_.head_w[l]), grads.vector(layout_.head_b[l])});
    }
    return layers;
}

}  // namespace rnntc
