#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rnntc/cells.hpp"
#include "rnntc/tensor.hpp"

namespace rnntc {

enum class CellKind { Srnn, Gru, Lstm, Blstm };

/// Lowercase CLI spelling: srnn, gru, lstm, blstm.
std::string_view to_string(CellKind kind);
/// Report spelling: sRNN, GRU, LSTM, BLSTM.
std::string_view display_name(CellKind kind);
/// Accepts either spelling, case-insensitively.
CellKind parse_cell_kind(std::string_view text);

inline constexpr CellKind kAllCellKinds[] = {CellKind::Srnn, CellKind::Gru, CellKind::Lstm, CellKind::Blstm};

struct ModelConfig {
    CellKind cell_kind = CellKind::Lstm;
    std::size_t vocab_capacity = 100000;  // assigned tokens; the table adds PAD and OOV rows
    std::size_t embed_dim = 64;
    std::size_t hidden_dim = 64;
    std::vector<std::size_t> dense_dims{32};
    std::size_t n_classes = 4;
    std::size_t seq_len = 2000;
    bool strict_paper_gru_bias = false;  // drop b_z, b_r, b_c

    /// Throws std::invalid_argument on a zero dimension or fewer than 2 classes.
    void validate() const;
    std::size_t embedding_rows() const { return vocab_capacity + 2; }
    /// Width of the recurrent readout: H, or 2H for BLSTM.
    std::size_t feature_dim() const;

    bool operator==(const ModelConfig&) const = default;
};

/// Named 2-D slot inside a ParamSet's flat buffer. Vectors have cols == 1.
struct TensorSlot {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t offset = 0;

    std::size_t size() const { return rows * cols; }
    bool operator==(const TensorSlot&) const = default;
};

/// All trainable numbers in one contiguous buffer, addressed by named slots.
/// Gradients and Adam moments share the same layout.
class ParamSet {
public:
    std::size_t add(std::string name, std::size_t rows, std::size_t cols);

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    const std::vector<TensorSlot>& slots() const { return slots_; }
    std::optional<std::size_t> find(std::string_view name) const;

    MatrixView matrix(std::size_t slot);
    ConstMatrixView matrix(std::size_t slot) const;
    std::span<double> vector(std::size_t slot);
    std::span<const double> vector(std::size_t slot) const;

    /// Same layout, all zeros.
    ParamSet zeros_like() const;
    void fill(double value);

    bool same_layout(const ParamSet& other) const { return slots_ == other.slots_; }
    bool operator==(const ParamSet&) const = default;

private:
    std::vector<TensorSlot> slots_;
    std::vector<double> values_;
};

enum class Direction { Forward, Backward };

struct DenseLayerView {
    ConstMatrixView weights;  // out x in
    std::span<const double> bias;
};

struct DenseLayerGrads {
    MatrixView weights;
    std::span<double> bias;
};

/// Embedding table, one recurrent cell (two for BLSTM), ReLU dense layers,
/// softmax output layer.
class Model {
public:
    /// All parameters zero.
    explicit Model(ModelConfig config);

    /// Glorot-uniform weights, zero biases, drawn in slot order from `seed`.
    static Model initialized(ModelConfig config, std::uint64_t seed);

    const ModelConfig& config() const { return config_; }
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

    ConstMatrixView embedding() const { return params_.matrix(layout_.embedding); }
    MatrixView embedding_grads(ParamSet& grads) const { return grads.matrix(layout_.embedding); }

    SrnnParams srnn() const;
    GruParams gru() const;
    LstmParams lstm(Direction dir = Direction::Forward) const;
    SrnnGrads srnn_grads(ParamSet& grads) const;
    GruGrads gru_grads(ParamSet& grads) const;
    LstmGrads lstm_grads(ParamSet& grads, Direction dir = Direction::Forward) const;

    /// Hidden dense layers followed by the output layer.
    std::vector<DenseLayerView> head() const;
    std::vector<DenseLayerGrads> head_grads(ParamSet& grads) const;

    bool operator==(const Model& other) const { return config_ == other.config_ && params_ == other.params_; }

private:
    struct CellSlots {
        std::size_t w[4]{};
        std::size_t b[4]{};
        bool has_bias = true;
    };
    struct Layout {
        std::size_t embedding = 0;
        CellSlots cell[2];
        std::vector<std::size_t> head_w;
        std::vector<std::size_t> head_b;
    };

    ModelConfig config_;
    ParamSet params_;
    Layout layout_;
};

}  // namespace rnntc
