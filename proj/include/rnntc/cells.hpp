#pragma once

#include <span>

#include "rnntc/tensor.hpp"

namespace rnntc {

// Every cell weight matrix is H x (H + E) and multiplies the concatenation
// [h_prev, x]: columns [0, H) see the previous hidden state, columns
// [H, H + E) see the input.

template <class M, class V>
struct SrnnWeights {
    M w_h;
    V b_h;
};

/// b_z, b_r and b_c are empty spans when the GRU is built without biases.
template <class M, class V>
struct GruWeights {
    M w_z, w_r, w;
    V b_z, b_r, b_c;
};

template <class M, class V>
struct LstmWeights {
    M w_f, w_i, w_g, w_o;
    V b_f, b_i, b_g, b_o;
};

using SrnnParams = SrnnWeights<ConstMatrixView, std::span<const double>>;
using GruParams = GruWeights<ConstMatrixView, std::span<const double>>;
using LstmParams = LstmWeights<ConstMatrixView, std::span<const double>>;

using SrnnGrads = SrnnWeights<MatrixView, std::span<double>>;
using GruGrads = GruWeights<MatrixView, std::span<double>>;
using LstmGrads = LstmWeights<MatrixView, std::span<double>>;

struct GruGates {
    Vector update;     // z_t
    Vector reset;      // r_t
    Vector candidate;  // h'_t
};

struct LstmGates {
    Vector forget;     // f_t
    Vector input;      // i_t
    Vector candidate;  // g_t
    Vector output;     // o_t
};

struct CellState {
    Vector h;
    Vector c;  // empty for sRNN and GRU
};

/// h_t = sigmoid(W_h [h_prev, x] + b_h)
Vector srnn_step(std::span<const double> x, std::span<const double> h_prev, const SrnnParams& p);

/// z_t, r_t over [h_prev, x]; h'_t = tanh(W [r_t * h_prev, x] + b_c).
GruGates gru_gates(std::span<const double> x, std::span<const double> h_prev, const GruParams& p);

/// h_t = (1 - z) * h_prev + z * h'
Vector gru_compose(std::span<const double> update, std::span<const double> h_prev,
                   std::span<const double> candidate);

LstmGates lstm_gates(std::span<const double> x, std::span<const double> h_prev, const LstmParams& p);

/// C_t = f * C_prev + i * g, h_t = o * tanh(C_t)
CellState lstm_compose(std::span<const double> forget, std::span<const double> input,
                       std::span<const double> candidate, std::span<const double> output,
                       std::span<const double> c_prev);

inline CellState lstm_compose(const LstmGates& g, std::span<const double> c_prev) {
    return lstm_compose(g.forget, g.input, g.candidate, g.output, c_prev);
}

// Single-step backward passes. Parameter gradients and dx are accumulated
// (+=); dh_prev is overwritten.

void srnn_step_backward(std::span<const double> x, std::span<const double> h_prev, std::span<const double> h,
                        std::span<const double> dh, const SrnnParams& p, const SrnnGrads& g,
                        std::span<double> dh_prev, std::span<double> dx);

void gru_step_backward(std::span<const double> x, std::span<const double> h_prev, const GruGates& gates,
                       std::span<const double> dh, const GruParams& p, const GruGrads& g,
                       std::span<double> dh_prev, std::span<double> dx);

/// `dc` carries dL/dC_t in and dL/dC_{t-1} out.
void lstm_step_backward(std::span<const double> x, std::span<const double> h_prev,
                        std::span<const double> c_prev, const LstmGates& gates, std::span<const double> c,
                        std::span<const double> dh, std::span<double> dc, const LstmParams& p,
                        const LstmGrads& g, std::span<double> dh_prev, std::span<double> dx);

}  // namespace rnntc
